use std::path::{Path, PathBuf};

use cliq::cli::run_cli;

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

fn cli(args: &[&str]) -> Out {
    let mut out = vec![];
    let mut err = vec![];
    let code = run_cli(std::iter::once("cliq").chain(args.iter().copied()), &mut out, &mut err);
    Out { code, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
}

fn scratch() -> tempfile::TempDir {
    tempfile::Builder::new().prefix("cli").tempdir_in(env!("CARGO_TARGET_TMPDIR")).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const SEARCH: &str =
    "a = [3, 1, 2, 0]\nfound = -1\nfor i in range(0, 4):\n    if a[i] == 2:\n        found = i\n        break\nprint(found)\n";

#[test]
fn translate_to_stdout() {
    let d = scratch();
    let f = write(d.path(), "x.cliq", "x = 1\nprint(x + 2)\n");
    let o = cli(&["translate", s(&f)]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert!(o.stdout.starts_with("OPENQASM 3.0;\n"));
    assert!(o.stdout.contains("output int[32] __out_0;"));
}

#[test]
fn translate_then_run() {
    let d = scratch();
    let f = write(d.path(), "s.cliq", SEARCH);
    let q = d.path().join("s.qasm");
    let rep = d.path().join("s.json");
    let o = cli(&["translate", s(&f), "-o", s(&q), "--optimize", "--report-out", s(&rep)]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert!(o.stdout.is_empty());
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&rep).unwrap()).unwrap();
    assert_eq!(report["mode"], "apply-all");
    assert_eq!(report["sites"][0]["applied"], true);
    assert_eq!(report["sites"][0]["bindings"]["N"], 4);

    let o = cli(&["run", s(&q)]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert!(o.stdout.contains("__out_0=2"), "{}", o.stdout);

    let o = cli(&["run", s(&q), "--json"]);
    let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(v["mode"]["kind"], "exact");
    assert_eq!(v["output_names"][0], "__out_0");
}

#[test]
fn report_goes_to_stdout_with_output_file() {
    let d = scratch();
    let f = write(d.path(), "s.cliq", SEARCH);
    let q = d.path().join("s.qasm");
    let o = cli(&["translate", s(&f), "-o", s(&q)]);
    assert_eq!(o.code, 0);
    let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(v["mode"], "report-only");
    assert_eq!(v["sites"][0]["applied"], false);
}

#[test]
fn sampled_run_is_reproducible() {
    let d = scratch();
    let q = write(
        d.path(),
        "h.qasm",
        "OPENQASM 3.0;\ninclude \"stdgates.inc\";\nqubit[1] q;\nbit[1] c;\noutput int[32] r;\nh q[0];\nc = measure q;\nr = int[32](c);\n",
    );
    let a = cli(&["run", s(&q), "--shots", "500", "--seed", "9"]);
    let b = cli(&["run", s(&q), "--shots", "500", "--seed", "9"]);
    assert_eq!(a.code, 0, "{}", a.stderr);
    assert_eq!(a.stdout, b.stdout);
    assert!(a.stdout.contains("count="));
    assert_eq!(cli(&["run", s(&q), "--shots", "500"]).code, 1);
    assert_eq!(cli(&["run", s(&q), "--shots", "0", "--seed", "1"]).code, 1);
}

#[test]
fn verify_pass_and_optimized() {
    let d = scratch();
    let f = write(d.path(), "s.cliq", SEARCH);
    let o = cli(&["verify", s(&f)]);
    assert_eq!(o.code, 0);
    assert!(o.stdout.starts_with("PASS\n"));
    let o = cli(&["verify", s(&f), "--optimize"]);
    assert_eq!(o.code, 0, "{}", o.stdout);
    assert!(o.stdout.contains("\"optimized\": true"));
    let o = cli(&["verify", s(&f), "--optimize-only", "site-0"]);
    assert_eq!(o.code, 0);
}

#[test]
fn verify_fails_with_broken_mapping() {
    let d = scratch();
    let f = write(d.path(), "m.cliq", "x = 6\ny = 7\nprint(x * y)\n");
    let text =
        cliq::mapping::DEFAULT_MAPPING.replace("binop.mul | int,int -> int | ({0} * {1})", "binop.mul | int,int -> int | ({0} + {1})");
    let m = write(d.path(), "bad.map", &text);
    let o = cli(&["verify", s(&f), "--mapping", s(&m)]);
    assert_eq!(o.code, 1);
    assert!(o.stdout.starts_with("FAIL\n"), "{}", o.stdout);
}

#[test]
fn diagnostics_have_locations() {
    let d = scratch();
    let f = write(d.path(), "c.cliq", "x = 1\nclass A:\n    pass\n");
    let o = cli(&["translate", s(&f)]);
    assert_eq!(o.code, 1);
    assert!(o.stderr.contains("c.cliq:2:1: E002:"), "{}", o.stderr);

    let f = write(d.path(), "t.cliq", "if 3:\n    x = 1\n");
    let o = cli(&["translate", s(&f)]);
    assert!(o.stderr.contains("E013"), "{}", o.stderr);

    let m = write(d.path(), "dup.map", "version 1\nbinop.add | int,int -> int | ({0} + {1})\nbinop.add | int,int -> int | ({0} + {1})\n");
    let o = cli(&["translate", s(&f), "--mapping", s(&m)]);
    assert_eq!(o.code, 1);
    assert!(o.stderr.contains("E021"), "{}", o.stderr);
}

#[test]
fn bad_qasm_is_rejected() {
    let d = scratch();
    let q = write(d.path(), "b.qasm", "OPENQASM 3.0;\nqubit[2] q;\nfoo q;\n");
    let o = cli(&["run", s(&q)]);
    assert_eq!(o.code, 1);
    assert!(o.stderr.contains("b.qasm:3:"), "{}", o.stderr);
}

#[test]
fn missing_file_fails() {
    let o = cli(&["translate", "does/not/exist.cliq"]);
    assert_eq!(o.code, 1);
    assert!(o.stderr.contains("cannot read"));
}

#[test]
fn list_qplp_shows_catalog() {
    let o = cli(&["list-qplp"]);
    assert_eq!(o.code, 0);
    let lines: Vec<&str> = o.stdout.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("qplp.search.grover\ttrue\t"));
    assert!(lines.iter().filter(|l| l.contains("\tfalse\t")).count() == 2);
}

#[test]
fn unknown_selection_warns() {
    let d = scratch();
    let f = write(d.path(), "s.cliq", SEARCH);
    let o = cli(&["translate", s(&f), "--optimize-only", "site-7"]);
    assert_eq!(o.code, 0);
    assert!(o.stderr.contains("W051"), "{}", o.stderr);
    assert!(!o.stdout.contains("qubit"));
}

#[test]
fn help_exits_zero() {
    let o = cli(&["--help"]);
    assert_eq!(o.code, 0);
    assert!(o.stdout.contains("translate"));
}
