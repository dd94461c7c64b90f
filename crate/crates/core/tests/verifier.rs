use cliq::diag::SourceModule;
use cliq::frontend::analyze;
use cliq::mapping::default_rules;
use cliq::optimizer::OptimizeMode;
use cliq::qasm::parse_qasm;
use cliq::value::Value;
use cliq::verifier::*;

const SEARCH4: &str =
    "a = [3, 1, 2, 0]\nfound = -1\nfor i in range(0, 4):\n    if a[i] == 2:\n        found = i\n        break\nprint(found)\n";

fn src(text: &str) -> SourceModule {
    SourceModule::new("t.cliq", text)
}

fn check(text: &str, mode: OptimizeMode) -> CheckRun {
    let opts = CheckOptions { mode, ..CheckOptions::default() };
    differential_check(&src(text), &opts).unwrap_or_else(|d| panic!("{d:?}"))
}

#[test]
fn reference_examples() {
    let run = |t: &str| reference_eval(&analyze(&src(t)).unwrap()).unwrap().outputs().unwrap().to_vec();
    assert_eq!(run("s = 0\nfor i in range(1, 11):\n    s += i\nprint(s)\n"), vec![Some(Value::Int(55))]);
    assert_eq!(run("x = 5 // 2\nprint(x)\n"), vec![Some(Value::Int(2))]);
    assert_eq!(run(SEARCH4), vec![Some(Value::Int(2))]);
}

#[test]
fn reference_runtime_errors_are_e060() {
    let tp = analyze(&src("a = [1, 2]\ni = 2\ni = i + 0\nprint(a[i])\n")).unwrap();
    assert_eq!(reference_eval(&tp).unwrap_err().code, "E060");
    let tp = analyze(&src("x = 0\nx = x + 0\nprint(1 // x)\n")).unwrap();
    assert_eq!(reference_eval(&tp).unwrap_err().code, "E060");
}

#[test]
fn translated_sum_matches_reference() {
    let r = check("s = 0\nfor i in range(1, 11):\n    s += i\nprint(s)\n", OptimizeMode::ReportOnly);
    assert!(r.report.passed(), "{:?}", r.report);
    let x = r.result.unwrap();
    assert_eq!(x.outputs().unwrap(), &[Some(Value::Int(55))]);
    assert!(x.quantum_trace.is_empty());
}

#[test]
fn hadamard_measure_is_even() {
    let qp = parse_qasm("OPENQASM 3.0;\ninclude \"stdgates.inc\";\nqubit[1] q;\nbit[1] c;\nh q[0];\nc = measure q;\n").unwrap();
    let r = interpret_qasm(&qp, Mode::Exact).unwrap();
    assert_eq!(r.branches.len(), 2);
    for b in &r.branches {
        assert!((b.probability - 0.5).abs() < 1e-12);
    }
    assert_eq!(r.quantum_trace.len(), 1);
}

#[test]
fn optimized_search_is_certain() {
    let r = check(SEARCH4, OptimizeMode::ApplyAll);
    assert!(r.report.passed(), "{}\n{:?}", r.qasm, r.report);
    assert!(r.qasm.contains("qubit[2] __q0;"), "{}", r.qasm);
    let x = r.result.unwrap();
    assert_eq!(x.branches.len(), 1);
    assert_eq!(x.branches[0].measurements[0].outcome, 2);
    assert!((x.branches[0].probability - 1.0).abs() < 1e-9);
    assert_eq!(r.report.blocks[0].observed.map(|p| (p - 1.0).abs() < 1e-9), Some(true));
}

#[test]
fn corrupted_rule_fails_with_index() {
    let rules = default_rules().with_template("binop.add", &["int", "int"], "({0} - {1})").unwrap();
    let opts = CheckOptions { mode: OptimizeMode::ReportOnly, rules };
    let r = differential_check(&src("x = 1\nprint(x)\ny = x + 2\nprint(y)\n"), &opts).unwrap();
    assert_eq!(r.report.verdict, Verdict::Fail);
    assert_eq!(r.report.first_divergence, Some(1));
}

#[test]
fn eight_element_search_matches_model() {
    let text = "a = [9, 9, 9, 9, 9, 4, 9, 9]\nf = -1\nfor i in range(8):\n    if a[i] == 4:\n        f = i\n        break\nprint(f)\n";
    let r = check(text, OptimizeMode::ApplyAll);
    assert!(r.report.passed(), "{:?}", r.report);
    let b = &r.report.blocks[0];
    assert!((b.observed.unwrap() - b.predicted).abs() < 1e-9);
    assert!((b.predicted - 0.9453125).abs() < 1e-3);
}
