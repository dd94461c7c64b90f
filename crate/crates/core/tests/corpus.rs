mod common;

use cliq::mapping::default_rules;
use cliq::optimizer::OptimizeMode;
use cliq::qasm::{emit_qasm, parse_qasm};
use cliq::verifier::{differential_check, CheckOptions, Verdict};

use common::corpus;

fn opts(mode: OptimizeMode) -> CheckOptions {
    CheckOptions { mode, ..CheckOptions::default() }
}

#[test]
fn classical_corpus_is_large_enough() {
    assert!(corpus("classical").len() >= 30);
}

#[test]
fn classical_corpus_passes() {
    for (name, src) in corpus("classical") {
        let run = differential_check(&src, &opts(OptimizeMode::ReportOnly)).unwrap_or_else(|d| panic!("{name}: {d:?}"));
        assert_eq!(run.report.verdict, Verdict::Pass, "{name}: {:?}\n{}", run.report, run.qasm);
        assert!(run.optimization.sites.is_empty(), "{name} has a pattern site");
    }
}

#[test]
fn search_corpus_passes_unoptimized() {
    for (name, src) in corpus("search") {
        let run = differential_check(&src, &opts(OptimizeMode::ReportOnly)).unwrap();
        assert!(run.report.passed(), "{name}: {:?}", run.report);
        assert!(!run.report.optimized);
    }
}

#[test]
fn search_corpus_passes_optimized() {
    for (name, src) in corpus("search") {
        let run = differential_check(&src, &opts(OptimizeMode::ApplyAll)).unwrap();
        assert!(run.report.passed(), "{name}: {:?}\n{}", run.report, run.qasm);
        let applied = run.optimization.applied().count();
        assert_eq!(run.report.blocks.len(), applied, "{name}");
        if applied > 0 {
            assert!(run.qasm.contains("measure"), "{name}");
        }
    }
}

#[test]
fn every_translation_round_trips() {
    let rules = default_rules();
    for kind in ["classical", "search"] {
        for (name, src) in corpus(kind) {
            for mode in [OptimizeMode::ReportOnly, OptimizeMode::ApplyAll] {
                let t = cliq::translate(&src, &rules, &mode).unwrap();
                assert!(t.qasm.starts_with("OPENQASM 3.0;\n"), "{name}");
                let back = parse_qasm(&t.qasm).unwrap_or_else(|d| panic!("{name}: {d:?}\n{}", t.qasm));
                assert_eq!(back, t.program, "{name}");
                assert_eq!(emit_qasm(&back), t.qasm, "{name}");
            }
        }
    }
}

#[test]
fn no_site_programs_are_unchanged_by_optimize() {
    let rules = default_rules();
    for (name, src) in corpus("classical") {
        let a = cliq::translate(&src, &rules, &OptimizeMode::ReportOnly).unwrap();
        let b = cliq::translate(&src, &rules, &OptimizeMode::ApplyAll).unwrap();
        assert_eq!(a.qasm, b.qasm, "{name}");
    }
}

#[test]
fn reports_are_deterministic() {
    for (name, src) in corpus("search") {
        let a = cliq::translate(&src, &default_rules(), &OptimizeMode::ApplyAll).unwrap();
        let b = cliq::translate(&src, &default_rules(), &OptimizeMode::ApplyAll).unwrap();
        assert_eq!(a.report.to_json(), b.report.to_json(), "{name}");
        assert_eq!(a.qasm, b.qasm, "{name}");
    }
}

#[test]
fn selected_sites_only() {
    let (_, src) = corpus("search").into_iter().find(|(n, _)| n == "two_sites.cliq").unwrap();
    let t = cliq::translate(&src, &default_rules(), &OptimizeMode::ApplySelected(vec!["site-1".into()])).unwrap();
    let applied: Vec<_> = t.report.applied().map(|s| s.site.as_str()).collect();
    assert_eq!(applied, ["site-1"]);
    assert!(t.qasm.contains("qubit[3] __q0;"), "{}", t.qasm);
    let run = differential_check(&src, &opts(OptimizeMode::ApplySelected(vec!["site-1".into()]))).unwrap();
    assert!(run.report.passed(), "{:?}", run.report);
}

#[test]
fn one_corrupted_rule_is_caught() {
    let broken = default_rules().with_template("binop.mul", &["int", "int"], "({0} + {1})").unwrap();
    let caught = corpus("classical").into_iter().any(|(_, src)| {
        let run = differential_check(&src, &CheckOptions { mode: OptimizeMode::ReportOnly, rules: broken.clone() }).unwrap();
        !run.report.passed()
    });
    assert!(caught);
}
