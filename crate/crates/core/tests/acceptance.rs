//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p cliq --test acceptance`.

mod common;

use std::io::Write as _;
use std::path::Path;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use cliq::cli::run_cli;
use cliq::diag::SourceModule;
use cliq::mapping::{default_rules, MappingRuleSet};
use cliq::optimizer::OptimizeMode;
use cliq::qasm::{emit_qasm, parse_qasm, Decl, QStmt, QType, QasmProgram};
use cliq::qplp::{grover_circuit, GroverParams};
use cliq::verifier::{differential_check, interpret_qasm, CheckOptions, ExecutionResult, Gate, Mode, Prng, StateVector};

use common::corpus;

const FLOAT_REL_TOL: f64 = 1e-9;
const MODEL_TOL: f64 = 1e-9;
const STATE_TOL: f64 = 1e-10;
const C1_LIMIT: Duration = Duration::from_secs(10);
const C3_LIMIT: Duration = Duration::from_secs(5);
const SHOTS: u64 = 100_000;
const SEED: u64 = 0x5eed_c11a;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn opts(mode: OptimizeMode, rules: MappingRuleSet) -> CheckOptions {
    CheckOptions { mode, rules }
}

fn c1_classical() -> Outcome {
    let start = Instant::now();
    let programs = corpus("classical");
    let mut failed = vec![];
    for (name, src) in &programs {
        match differential_check(src, &opts(OptimizeMode::ReportOnly, default_rules())) {
            Ok(run) if run.report.passed() => {}
            Ok(run) => failed.push(format!("{name}: {}", run.report.reason.unwrap_or_default())),
            Err(d) => failed.push(format!("{name}: {:?}", d.codes())),
        }
    }
    let took = start.elapsed();
    let pass = programs.len() >= 30 && failed.is_empty() && took < C1_LIMIT;
    outcome(
        pass,
        format!(
            "{}/{} programs pass (need >= 30), {:.2} s (limit {} s), float rel tol {FLOAT_REL_TOL:e}{}",
            programs.len() - failed.len(),
            programs.len(),
            took.as_secs_f64(),
            C1_LIMIT.as_secs(),
            if failed.is_empty() { String::new() } else { format!("; failing: {}", failed.join(", ")) }
        ),
    )
}

/// Recognizer for the grammar in `docs/qasm-subset.md`, written separately
/// from the crate's own parser.
mod grammar {
    #[derive(Clone, Debug, PartialEq)]
    enum T {
        Id(String),
        Int,
        Float,
        Str,
        P(&'static str),
    }

    const PUNCT: &[&str] = &[
        "**", "==", "!=", "<=", ">=", "&&", "||", "->", "+", "-", "*", "/", "%", "<", ">", "!", "=", "(", ")", "[", "]", "{", "}", ",",
        ";", ":", "@",
    ];

    fn lex(src: &str) -> Result<Vec<T>, String> {
        let b = src.as_bytes();
        let mut i = 0;
        let mut out = vec![];
        'outer: while i < b.len() {
            let c = b[i];
            if c.is_ascii_whitespace() {
                i += 1;
                continue;
            }
            if c.is_ascii_alphabetic() || c == b'_' {
                let s = i;
                while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                    i += 1;
                }
                out.push(T::Id(src[s..i].to_string()));
                continue;
            }
            if c.is_ascii_digit() {
                let mut float = false;
                while i < b.len() && b[i].is_ascii_digit() {
                    i += 1;
                }
                if i < b.len() && b[i] == b'.' {
                    float = true;
                    i += 1;
                    while i < b.len() && b[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
                    float = true;
                    i += 1;
                    if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
                        i += 1;
                    }
                    if i >= b.len() || !b[i].is_ascii_digit() {
                        return Err("bad exponent".into());
                    }
                    while i < b.len() && b[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                out.push(if float { T::Float } else { T::Int });
                continue;
            }
            if c == b'"' {
                let end = src[i + 1..].find('"').ok_or("unterminated string")?;
                out.push(T::Str);
                i += end + 2;
                continue;
            }
            for p in PUNCT {
                if src[i..].starts_with(p) {
                    out.push(T::P(p));
                    i += p.len();
                    continue 'outer;
                }
            }
            return Err(format!("unexpected character {:?}", c as char));
        }
        Ok(out)
    }

    struct P {
        t: Vec<T>,
        i: usize,
    }

    type R = Result<(), String>;

    impl P {
        fn peek(&self) -> Option<&T> {
            self.t.get(self.i)
        }
        fn peek_at(&self, k: usize) -> Option<&T> {
            self.t.get(self.i + k)
        }
        fn is(&self, p: &str) -> bool {
            matches!(self.peek(), Some(T::P(q)) if *q == p)
        }
        fn is_kw(&self, k: &str) -> bool {
            matches!(self.peek(), Some(T::Id(s)) if s == k)
        }
        fn eat(&mut self, p: &str) -> bool {
            let ok = self.is(p) || self.is_kw(p);
            if ok {
                self.i += 1;
            }
            ok
        }
        fn want(&mut self, p: &str) -> R {
            if self.eat(p) {
                Ok(())
            } else {
                Err(format!("expected {p:?} at token {}, found {:?}", self.i, self.peek()))
            }
        }
        fn int(&mut self) -> R {
            match self.peek() {
                Some(T::Int) => {
                    self.i += 1;
                    Ok(())
                }
                t => Err(format!("expected integer, found {t:?}")),
            }
        }
        fn ident(&mut self) -> R {
            match self.peek() {
                Some(T::Id(s)) if !is_keyword(s) => {
                    self.i += 1;
                    Ok(())
                }
                t => Err(format!("expected identifier, found {t:?}")),
            }
        }

        fn program(&mut self) -> R {
            self.want("OPENQASM")?;
            match self.peek() {
                Some(T::Float) => self.i += 1,
                t => return Err(format!("expected version, found {t:?}")),
            }
            self.want(";")?;
            while self.is_kw("include") {
                self.i += 1;
                if self.peek() != Some(&T::Str) {
                    return Err("include needs a string".into());
                }
                self.i += 1;
                self.want(";")?;
            }
            while self.peek().is_some() {
                self.statement()?;
            }
            Ok(())
        }

        fn scalar_start(&self) -> bool {
            self.is_kw("int") || self.is_kw("float") || self.is_kw("bool")
        }

        fn scalar(&mut self) -> R {
            if self.eat("int") || self.eat("float") {
                self.want("[")?;
                self.int()?;
                self.want("]")
            } else {
                self.want("bool")
            }
        }

        fn ty(&mut self) -> R {
            if self.eat("bit") || self.eat("qubit") {
                self.want("[")?;
                self.int()?;
                return self.want("]");
            }
            if self.eat("array") {
                self.want("[")?;
                self.want("int")?;
                self.want("[")?;
                self.int()?;
                self.want("]")?;
                self.want(",")?;
                self.int()?;
                return self.want("]");
            }
            self.scalar()
        }

        fn block(&mut self) -> R {
            self.want("{")?;
            while !self.is("}") {
                if self.peek().is_none() {
                    return Err("unterminated block".into());
                }
                self.statement()?;
            }
            self.want("}")
        }

        fn qarg(&mut self) -> R {
            self.ident()?;
            if self.eat("[") {
                self.int()?;
                self.want("]")?;
            }
            Ok(())
        }

        fn statement(&mut self) -> R {
            let decl_start = self.is_kw("output")
                || self.is_kw("bit")
                || self.is_kw("qubit")
                || self.is_kw("array")
                || (self.scalar_start() && !matches!(self.peek_at(1), Some(T::P("("))) && !matches!(self.peek_at(4), Some(T::P("("))));
            if decl_start {
                self.eat("output");
                self.ty()?;
                self.ident()?;
                if self.eat("=") {
                    self.expr()?;
                }
                return self.want(";");
            }
            if self.eat("def") {
                self.ident()?;
                self.want("(")?;
                if !self.is(")") {
                    loop {
                        self.scalar()?;
                        self.ident()?;
                        if !self.eat(",") {
                            break;
                        }
                    }
                }
                self.want(")")?;
                if self.eat("->") {
                    self.scalar()?;
                }
                return self.block();
            }
            if self.eat("for") {
                self.want("int")?;
                self.want("[")?;
                self.int()?;
                self.want("]")?;
                self.ident()?;
                self.want("in")?;
                self.want("[")?;
                self.expr()?;
                self.want(":")?;
                self.expr()?;
                self.want("]")?;
                return self.block();
            }
            if self.eat("while") {
                self.want("(")?;
                self.expr()?;
                self.want(")")?;
                return self.block();
            }
            if self.eat("if") {
                self.want("(")?;
                self.expr()?;
                self.want(")")?;
                self.block()?;
                if self.eat("else") {
                    self.block()?;
                }
                return Ok(());
            }
            if self.eat("break") || self.eat("continue") {
                return self.want(";");
            }
            if self.eat("return") {
                if !self.is(";") {
                    self.expr()?;
                }
                return self.want(";");
            }
            if self.eat("reset") {
                self.qarg()?;
                return self.want(";");
            }
            if self.eat("ctrl") {
                if self.eat("(") {
                    self.int()?;
                    self.want(")")?;
                }
                self.want("@")?;
                return self.gate();
            }
            if matches!(self.peek(), Some(T::Id(g)) if ["h", "x", "z", "cx"].contains(&g.as_str()))
                && matches!(self.peek_at(1), Some(T::Id(_)))
            {
                return self.gate();
            }
            self.ident()?;
            if self.is("(") {
                self.call_args()?;
                return self.want(";");
            }
            if self.eat("[") {
                self.expr()?;
                self.want("]")?;
            }
            self.want("=")?;
            if self.eat("measure") {
                self.ident()?;
            } else {
                self.expr()?;
            }
            self.want(";")
        }

        fn gate(&mut self) -> R {
            match self.peek() {
                Some(T::Id(g)) if ["h", "x", "z", "cx"].contains(&g.as_str()) => self.i += 1,
                t => return Err(format!("expected gate name, found {t:?}")),
            }
            self.qarg()?;
            while self.eat(",") {
                self.qarg()?;
            }
            self.want(";")
        }

        fn call_args(&mut self) -> R {
            self.want("(")?;
            if !self.is(")") {
                loop {
                    self.expr()?;
                    if !self.eat(",") {
                        break;
                    }
                }
            }
            self.want(")")
        }

        fn expr(&mut self) -> R {
            self.binary(0)
        }

        fn binary(&mut self, level: usize) -> R {
            const LEVELS: &[&[&str]] = &[&["||"], &["&&"], &["==", "!="], &["<", "<=", ">", ">="], &["+", "-"], &["*", "/", "%"]];
            if level == LEVELS.len() {
                return self.unary();
            }
            self.binary(level + 1)?;
            while LEVELS[level].iter().any(|op| self.is(op)) {
                self.i += 1;
                self.binary(level + 1)?;
            }
            Ok(())
        }

        fn unary(&mut self) -> R {
            if self.eat("-") || self.eat("!") {
                return self.unary();
            }
            self.primary()?;
            if self.eat("**") {
                self.unary()?;
            }
            Ok(())
        }

        fn primary(&mut self) -> R {
            match self.peek().cloned() {
                Some(T::Int) | Some(T::Float) => {
                    self.i += 1;
                    Ok(())
                }
                Some(T::Id(s)) if s == "true" || s == "false" => {
                    self.i += 1;
                    Ok(())
                }
                Some(T::Id(_)) if self.scalar_start() => {
                    self.scalar()?;
                    self.want("(")?;
                    self.expr()?;
                    self.want(")")
                }
                Some(T::Id(_)) => {
                    self.ident()?;
                    if self.is("(") {
                        return self.call_args();
                    }
                    if self.eat("[") {
                        self.expr()?;
                        self.want("]")?;
                    }
                    Ok(())
                }
                Some(T::P("(")) => {
                    self.i += 1;
                    self.expr()?;
                    self.want(")")
                }
                t => Err(format!("unexpected {t:?} in expression")),
            }
        }
    }

    fn is_keyword(s: &str) -> bool {
        [
            "OPENQASM", "include", "output", "int", "float", "bool", "bit", "qubit", "array", "def", "for", "in", "while", "if", "else",
            "break", "continue", "return", "reset", "measure", "ctrl", "true", "false",
        ]
        .contains(&s)
    }

    pub fn check(src: &str) -> Result<(), String> {
        let mut p = P { t: lex(src)?, i: 0 };
        p.program()
    }
}

/// Feeds `text` to the reference `openqasm3` Python parser when it is
/// installed. `None` means the parser is unavailable.
fn python_parser(text: &str) -> Option<Result<(), String>> {
    let mut child = Command::new("python3")
        .args(["-c", "import sys, openqasm3; openqasm3.parse(sys.stdin.read())"])
        .stdin(Stdio::piped())
        .stdout(Stdio::null())
        .stderr(Stdio::piped())
        .spawn()
        .ok()?;
    child.stdin.take()?.write_all(text.as_bytes()).ok()?;
    let out = child.wait_with_output().ok()?;
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    if err.contains("ModuleNotFoundError") || err.contains("ImportError") || err.contains("antlr") {
        return None;
    }
    Some(if out.status.success() { Ok(()) } else { Err(err.lines().last().unwrap_or_default().to_string()) })
}

fn c2_validity() -> Outcome {
    let rules = default_rules();
    let mut emitted = vec![];
    let mut problems = vec![];
    for kind in ["classical", "search"] {
        for (name, src) in corpus(kind) {
            for mode in [OptimizeMode::ReportOnly, OptimizeMode::ApplyAll] {
                let t = match cliq::translate(&src, &rules, &mode) {
                    Ok(t) => t,
                    Err(d) => {
                        problems.push(format!("{name}: {:?}", d.codes()));
                        continue;
                    }
                };
                let ok = t.qasm.starts_with("OPENQASM 3.0;\n")
                    && parse_qasm(&t.qasm).is_ok_and(|back| back == t.program && emit_qasm(&back) == t.qasm);
                if !ok {
                    problems.push(format!("{name}: round trip"));
                }
                emitted.push((format!("{name}/{mode:?}"), t.qasm));
            }
        }
    }
    let mut spot = 0;
    for (name, text) in &emitted {
        match grammar::check(text) {
            Ok(()) => spot += 1,
            Err(e) => problems.push(format!("{name}: grammar: {e}")),
        }
    }
    // A handful of files, including every optimized one, through the reference parser.
    let sample: Vec<&(String, String)> = emitted.iter().filter(|(_, t)| t.contains("qubit")).chain(emitted.iter().step_by(9)).collect();
    let mut external = 0;
    let mut external_note = "openqasm3 python parser not installed".to_string();
    for (name, text) in &sample {
        match python_parser(text) {
            None => break,
            Some(Ok(())) => external += 1,
            Some(Err(e)) => problems.push(format!("{name}: openqasm3: {e}")),
        }
        external_note = format!("{external}/{} accepted by the openqasm3 parser", sample.len());
    }
    outcome(
        problems.is_empty() && spot >= 5,
        format!(
            "{} emitted programs round-trip; {spot} match the documented grammar (need >= 5); {external_note}{}",
            emitted.len(),
            if problems.is_empty() { String::new() } else { format!("; problems: {}", problems.join(", ")) }
        ),
    )
}

fn marked_mass(params: &GroverParams) -> f64 {
    let mut stmts = grover_circuit(params, "q");
    stmts.push(QStmt::Measure { bits: "c".into(), qubits: "q".into() });
    let qp = QasmProgram {
        includes: vec!["stdgates.inc".into()],
        decls: vec![Decl::new(QType::Qubit(params.n), "q"), Decl::new(QType::Bit(params.n), "c")],
        stmts,
    };
    let r = interpret_qasm(&qp, Mode::Exact).expect("grover circuit runs");
    r.branches.iter().filter(|b| params.marked.contains(&b.measurements[0].outcome)).map(|b| b.probability).sum()
}

fn c3_grover() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut cases = 0;
    for n in 1..=4 {
        let size = 1usize << n;
        for m in 1..=size {
            let mut marked: Vec<usize> = (0..m).map(|j| (5 * j + 3) % size).collect();
            marked.sort();
            for k in 0..=3 {
                let sim = marked_mass(&GroverParams { n, marked: marked.clone(), k });
                let theta = (m as f64 / size as f64).sqrt().asin();
                let model = ((2 * k + 1) as f64 * theta).sin().powi(2);
                worst = worst.max((sim - model).abs());
                cases += 1;
            }
        }
    }
    let anchors = [
        (GroverParams { n: 2, marked: vec![3], k: 1 }, 1.0, MODEL_TOL),
        (GroverParams { n: 3, marked: vec![5], k: 2 }, 0.9453, 1e-3),
        (GroverParams { n: 1, marked: vec![1], k: 1 }, 0.5, MODEL_TOL),
    ];
    let mut anchor_text = vec![];
    let mut anchors_ok = true;
    for (p, want, tol) in &anchors {
        let got = marked_mass(p);
        anchors_ok &= (got - want).abs() <= *tol;
        anchor_text.push(format!("N={} k={} -> {got:.6}", p.size(), p.k));
    }
    let took = start.elapsed();
    outcome(
        worst <= MODEL_TOL && anchors_ok && took < C3_LIMIT,
        format!(
            "{cases} (N,M,k) cases, max |sim - model| = {worst:.2e} (tol {MODEL_TOL:e}); anchors {}; {:.2} s (limit {} s)",
            anchor_text.join(", "),
            took.as_secs_f64(),
            C3_LIMIT.as_secs()
        ),
    )
}

fn c4_optimized() -> Outcome {
    let mut checked = 0;
    let mut certain = 0;
    let mut problems = vec![];
    for (name, src) in corpus("search") {
        let run = match differential_check(&src, &opts(OptimizeMode::ApplyAll, default_rules())) {
            Ok(r) => r,
            Err(d) => {
                problems.push(format!("{name}: {:?}", d.codes()));
                continue;
            }
        };
        if run.optimization.applied().count() == 0 {
            continue;
        }
        checked += 1;
        if !run.report.passed() {
            problems.push(format!("{name}: {}", run.report.reason.clone().unwrap_or_default()));
            continue;
        }
        let all_certain = run.report.blocks.iter().all(|b| b.marked.len() == 1 && (b.predicted - 1.0).abs() <= MODEL_TOL);
        if all_certain {
            certain += 1;
            let x = run.result.as_ref().unwrap();
            if x.branches.iter().any(|b| b.outputs != run.report.reference) {
                problems.push(format!("{name}: probability-1 search differs from the unoptimized outputs"));
            }
        }
    }
    outcome(
        problems.is_empty() && checked > 0 && certain > 0,
        format!(
            "{checked} optimized programs pass the relaxed check; {certain} probability-1 programs match unoptimized outputs{}",
            if problems.is_empty() { String::new() } else { format!("; problems: {}", problems.join(", ")) }
        ),
    )
}

fn c5_noop() -> Outcome {
    let dir = tempfile::Builder::new().prefix("acceptance").tempdir_in(env!("CARGO_TARGET_TMPDIR")).expect("scratch dir");
    let mut compared = 0;
    let mut differ = vec![];
    let (mut out, mut err) = (vec![], vec![]);
    for (name, src) in corpus("classical") {
        let input = dir.path().join(&name);
        std::fs::write(&input, &src.text).unwrap();
        let plain = dir.path().join(format!("{name}.plain.qasm"));
        let opt = dir.path().join(format!("{name}.opt.qasm"));
        let p = |x: &Path| x.to_str().unwrap().to_string();
        let a = run_cli(["cliq", "translate", &p(&input), "-o", &p(&plain)], &mut out, &mut err);
        let b = run_cli(["cliq", "translate", &p(&input), "-o", &p(&opt), "--optimize"], &mut out, &mut err);
        if a != 0 || b != 0 || std::fs::read(&plain).unwrap() != std::fs::read(&opt).unwrap() {
            differ.push(name);
        }
        compared += 1;
    }
    outcome(
        differ.is_empty() && compared > 0,
        format!(
            "{compared} zero-site programs byte-identical with and without --optimize{}",
            if differ.is_empty() { String::new() } else { format!("; differ: {}", differ.join(", ")) }
        ),
    )
}

fn random_gates(rng: &mut Prng, n: usize, count: usize) -> Vec<(Gate, Vec<usize>, usize)> {
    let pick = |rng: &mut Prng, k: usize| ((rng.next_f64() * k as f64) as usize).min(k - 1);
    (0..count)
        .map(|_| {
            let gate = [Gate::H, Gate::X, Gate::Z][pick(rng, 3)];
            let target = pick(rng, n);
            let mut controls: Vec<usize> = (0..n).filter(|q| *q != target && rng.next_f64() < 0.3).collect();
            controls.truncate(3);
            (gate, controls, target)
        })
        .collect()
}

fn bucket_mass(x: &ExecutionResult) -> Vec<(String, f64)> {
    let mut m: std::collections::BTreeMap<String, f64> = Default::default();
    for b in &x.branches {
        *m.entry(format!("{:?}", b.outputs)).or_default() += b.probability;
    }
    m.into_iter().collect()
}

fn c6_simulator() -> Outcome {
    let mut rng = Prng::new(SEED);
    let mut norm_drift = 0.0f64;
    let mut involution_err = 0.0f64;
    for n in 1..=6 {
        for _ in 0..20 {
            let mut sv = StateVector::new(n);
            for q in 0..n {
                sv.apply(Gate::H, &[], q);
            }
            for (g, c, t) in random_gates(&mut rng, n, 60) {
                let before = sv.clone();
                sv.apply(g, &c, t);
                norm_drift = norm_drift.max((sv.norm_sqr() - 1.0).abs());
                let mut twice = sv.clone();
                twice.apply(g, &c, t);
                let err = twice.amplitudes().iter().zip(before.amplitudes()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
                involution_err = involution_err.max(err);
            }
        }
    }

    let mut worst_sigma = 0.0f64;
    let mut programs = 0;
    let mut reproducible = true;
    let mut problems = vec![];
    for (name, src) in corpus("search") {
        let t = cliq::translate(&src, &default_rules(), &OptimizeMode::ApplyAll).unwrap();
        if t.report.applied().count() == 0 {
            continue;
        }
        programs += 1;
        let exact = interpret_qasm(&t.program, Mode::Exact).unwrap();
        let mode = Mode::Sampled { shots: SHOTS, seed: SEED };
        let a = interpret_qasm(&t.program, mode).unwrap();
        let b = interpret_qasm(&t.program, mode).unwrap();
        reproducible &= a == b;
        let sampled = bucket_mass(&a);
        for (key, p) in bucket_mass(&exact) {
            let f = sampled.iter().find(|(k, _)| *k == key).map_or(0.0, |(_, f)| *f);
            let sigma = (p * (1.0 - p) / SHOTS as f64).sqrt();
            let z = if sigma > 0.0 {
                (f - p).abs() / sigma
            } else if (f - p).abs() < 1e-12 {
                0.0
            } else {
                f64::INFINITY
            };
            worst_sigma = worst_sigma.max(z);
            if z > 3.0 {
                problems.push(format!("{name}: outputs {key} sampled {f:.5} vs exact {p:.5}"));
            }
        }
        if sampled.iter().any(|(k, _)| !bucket_mass(&exact).iter().any(|(e, _)| e == k)) {
            problems.push(format!("{name}: sampled an outcome exact mode does not have"));
        }
    }
    let pass = norm_drift <= STATE_TOL && involution_err <= STATE_TOL && problems.is_empty() && reproducible && programs > 0;
    outcome(
        pass,
        format!(
            "norm drift {norm_drift:.1e}, involution error {involution_err:.1e} (tol {STATE_TOL:e}); {programs} Grover programs at {SHOTS} shots, worst deviation {worst_sigma:.2} sigma (limit 3); seeded runs {}{}",
            if reproducible { "bit-identical" } else { "DIFFER" },
            if problems.is_empty() { String::new() } else { format!("; {}", problems.join(", ")) }
        ),
    )
}

fn c7_faults() -> Outcome {
    let faults: &[(&str, &[&str], &str)] = &[
        ("binop.add", &["int", "int"], "({0} - {1})"),
        ("binop.mul", &["int", "int"], "({0} + {1})"),
        ("cmp.lt", &["-"], "({0} <= {1})"),
        ("unop.neg", &["int"], "({0})"),
        ("index", &["intarray", "int"], "{0}[0]"),
        ("binop.div", &["int", "int"], "(float[64]({0}) * float[64]({1}))"),
    ];
    let programs: Vec<(String, SourceModule, OptimizeMode)> = corpus("classical")
        .into_iter()
        .map(|(n, s)| (n, s, OptimizeMode::ReportOnly))
        .chain(corpus("search").into_iter().map(|(n, s)| (n, s, OptimizeMode::ApplyAll)))
        .collect();
    let mut lines = vec![];
    let mut all_caught = true;
    for (kind, sig, template) in faults {
        let rules = default_rules().with_template(kind, sig, template).expect("rule exists");
        let caught = programs.iter().find(|(_, src, mode)| match differential_check(src, &opts(mode.clone(), rules.clone())) {
            Ok(run) => !run.report.passed(),
            Err(_) => true,
        });
        all_caught &= caught.is_some();
        lines.push(format!("{kind} -> {}", caught.map_or("not caught".to_string(), |(n, _, _)| format!("FAIL on {n}"))));
    }
    outcome(all_caught, lines.join("; "))
}

fn main() {
    type Criterion = (&'static str, &'static str, fn() -> Outcome);
    let criteria: [Criterion; 7] = [
        ("C1", "classical differential semantics", c1_classical),
        ("C2", "QASM validity", c2_validity),
        ("C3", "Grover model agreement", c3_grover),
        ("C4", "optimized-path correctness", c4_optimized),
        ("C5", "no-op optimization identity", c5_noop),
        ("C6", "simulator invariants", c6_simulator),
        ("C7", "fault injection", c7_faults),
    ];
    let mut failed = 0;
    for (id, title, f) in criteria {
        let o = f();
        if !o.pass {
            failed += 1;
        }
        println!("{id} {} {title}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {}/{} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
