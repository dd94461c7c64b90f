//! Differential check: reference interpretation of the source against
//! interpretation of the translated OpenQASM.

use serde::Serialize;

use crate::backend::lower_program;
use crate::diag::{Diagnostic, Diagnostics, SourceModule};
use crate::frontend::ast::{QuantumBlock, StmtKind};
use crate::frontend::{analyze, TypedProgram};
use crate::mapping::{default_rules, MappingRuleSet};
use crate::optimizer::{optimize, OptimizationReport, OptimizeMode};
use crate::qasm::{emit_qasm, parse_qasm};
use crate::qplp::Catalog;
use crate::value::Value;

use super::exec::{ExecutionResult, Mode};
use super::interp::interpret_qasm;
use super::reference::{reference_run, FoundScript};

/// Relative tolerance for Float outputs; also the absolute tolerance for
/// success probabilities.
pub const TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockCheck {
    pub site: usize,
    pub entry: String,
    pub marked: Vec<usize>,
    pub predicted: f64,
    /// Marked-outcome mass over all branches; `None` if the block never ran.
    pub observed: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiffReport {
    pub verdict: Verdict,
    pub optimized: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    /// First output index whose values differ.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_divergence: Option<usize>,
    pub reference: Vec<Option<Value>>,
    pub branches: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub blocks: Vec<BlockCheck>,
}

impl DiffReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[derive(Clone, Debug)]
pub struct CheckOptions {
    pub mode: OptimizeMode,
    pub rules: MappingRuleSet,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { mode: OptimizeMode::ReportOnly, rules: default_rules() }
    }
}

/// Everything the check produced along the way.
#[derive(Clone, Debug)]
pub struct CheckRun {
    pub report: DiffReport,
    pub qasm: String,
    pub optimization: OptimizationReport,
    pub result: Result<ExecutionResult, Diagnostic>,
}

fn outputs_match(a: &[Option<Value>], b: &[Option<Value>]) -> Result<(), usize> {
    if a.len() != b.len() {
        return Err(a.len().min(b.len()));
    }
    for (k, (x, y)) in a.iter().zip(b).enumerate() {
        let same = match (x, y) {
            (None, None) => true,
            (Some(x), Some(y)) => x.matches(y, TOLERANCE),
            _ => false,
        };
        if !same {
            return Err(k);
        }
    }
    Ok(())
}

fn blocks(tp: &TypedProgram) -> Vec<&QuantumBlock> {
    let mut out = vec![];
    tp.module.walk_stmts(&mut |s| {
        if let StmtKind::QuantumBlock(q) = &s.kind {
            out.push(&**q);
        }
    });
    out
}

/// Parses, checks, translates and compares `src`.
pub fn differential_check(src: &SourceModule, opts: &CheckOptions) -> Result<CheckRun, Diagnostics> {
    let tp = analyze(src)?;
    check_typed(&tp, opts)
}

pub fn check_typed(tp: &TypedProgram, opts: &CheckOptions) -> Result<CheckRun, Diagnostics> {
    let catalog = Catalog::default();
    let (opt, optimization) = optimize(tp, &catalog, &opts.mode)?;
    let qp = lower_program(&opt, &opts.rules)?;
    let qasm = emit_qasm(&qp);
    let parsed = parse_qasm(&qasm).map_err(Diagnostics)?;
    let result = interpret_qasm(&parsed, Mode::Exact);
    let reference = reference_run(tp, FoundScript::new());
    let qblocks = blocks(&opt);
    let report =
        if qblocks.is_empty() { classical_verdict(&reference, &result) } else { quantum_verdict(&opt, &qblocks, &reference, &result) };
    Ok(CheckRun { report, qasm, optimization, result })
}

fn fail(optimized: bool, reason: String, reference: Vec<Option<Value>>, branches: usize) -> DiffReport {
    DiffReport { verdict: Verdict::Fail, optimized, reason: Some(reason), first_divergence: None, reference, branches, blocks: vec![] }
}

fn classical_verdict(
    reference: &Result<super::reference::ReferenceRun, Diagnostic>,
    result: &Result<ExecutionResult, Diagnostic>,
) -> DiffReport {
    let pass = |reference: Vec<Option<Value>>, branches| DiffReport {
        verdict: Verdict::Pass,
        optimized: false,
        reason: None,
        first_divergence: None,
        reference,
        branches,
        blocks: vec![],
    };
    match (reference, result) {
        (Err(a), Err(b)) if a.code == "E060" && b.code == "E060" => {
            let mut r = pass(vec![], 0);
            r.reason = Some(format!("both sides raise a runtime error ({} / {})", a.message, b.message));
            r
        }
        (Err(a), _) => fail(false, format!("reference raised {}: {}", a.code, a.message), vec![], 0),
        (Ok(r), Err(b)) => fail(false, format!("translated program raised {}: {}", b.code, b.message), r.outputs.clone(), 0),
        (Ok(r), Ok(x)) => {
            if x.branches.len() != 1 {
                return fail(false, "classical program produced several branches".into(), r.outputs.clone(), x.branches.len());
            }
            match outputs_match(&r.outputs, &x.branches[0].outputs) {
                Ok(()) => pass(r.outputs.clone(), 1),
                Err(k) => {
                    let mut d = fail(false, format!("output {k} differs"), r.outputs.clone(), 1);
                    d.first_divergence = Some(k);
                    d
                }
            }
        }
    }
}

fn quantum_verdict(
    opt: &TypedProgram,
    qblocks: &[&QuantumBlock],
    reference: &Result<super::reference::ReferenceRun, Diagnostic>,
    result: &Result<ExecutionResult, Diagnostic>,
) -> DiffReport {
    let ref_outputs = reference.as_ref().map(|r| r.outputs.clone()).unwrap_or_default();
    let x = match result {
        Ok(x) => x,
        Err(e) => return fail(true, format!("translated program raised {}: {}", e.code, e.message), ref_outputs, 0),
    };
    let n = x.branches.len();
    let arrays: Vec<Vec<i32>> = qblocks
        .iter()
        .map(|q| match opt.symbols.get(&q.array).and_then(|s| s.value.clone()) {
            Some(Value::IntArray(xs)) => xs,
            _ => vec![],
        })
        .collect();
    let mut success = vec![None::<f64>; qblocks.len()];
    let exact_required = qblocks.iter().all(|q| q.params.marked.len() == 1 && (q.params.success_probability() - 1.0).abs() <= TOLERANCE);
    for b in &x.branches {
        let mut script = FoundScript::new();
        let mut seen = vec![false; qblocks.len()];
        for m in &b.measurements {
            let Some(j) = m.register.strip_prefix("__c").and_then(|j| j.parse::<usize>().ok()) else { continue };
            let Some(q) = qblocks.get(j) else { continue };
            let hit = arrays[j].get(m.outcome) == Some(&q.target);
            let found = if hit { m.outcome as i32 } else { -1 };
            if hit != q.params.marked.contains(&m.outcome) {
                return fail(true, format!("block {j}: outcome {} misclassified", m.outcome), ref_outputs, n);
            }
            script.entry(q.site).or_default().push_back(found);
            if !seen[j] {
                seen[j] = true;
                *success[j].get_or_insert(0.0) += if hit { b.probability } else { 0.0 };
            }
        }
        let expect = match reference_run(opt, script) {
            Ok(r) => r.outputs,
            Err(e) => return fail(true, format!("reference raised {}: {}", e.code, e.message), ref_outputs, n),
        };
        if let Err(k) = outputs_match(&expect, &b.outputs) {
            let mut d = fail(true, format!("branch {:?}: output {k} differs from the relaxed reference", b.choices), ref_outputs, n);
            d.first_divergence = Some(k);
            return d;
        }
        if exact_required {
            if let Err(k) = outputs_match(&ref_outputs, &b.outputs) {
                let mut d = fail(true, format!("probability-1 search: output {k} differs from the unoptimized program"), ref_outputs, n);
                d.first_divergence = Some(k);
                return d;
            }
        }
    }
    let checks: Vec<BlockCheck> = qblocks
        .iter()
        .zip(&success)
        .map(|(q, s)| BlockCheck {
            site: q.site,
            entry: q.entry.clone(),
            marked: q.params.marked.clone(),
            predicted: q.params.success_probability(),
            observed: *s,
        })
        .collect();
    let off = checks.iter().find(|c| c.observed.is_some_and(|o| (o - c.predicted).abs() > TOLERANCE));
    let mut report = DiffReport {
        verdict: Verdict::Pass,
        optimized: true,
        reason: None,
        first_divergence: None,
        reference: ref_outputs,
        branches: n,
        blocks: checks.clone(),
    };
    if let Some(c) = off {
        report.verdict = Verdict::Fail;
        report.reason =
            Some(format!("site {}: success probability {:.12} differs from the model {:.12}", c.site, c.observed.unwrap(), c.predicted));
    }
    report
}
