use serde::Serialize;

use crate::diag::Span;
use crate::frontend::ast::*;
use crate::frontend::{CliqType, TypedProgram};
use crate::value::Value;

use super::{grover_iterations, GroverParams, PatternKind, QplpEntry, SIMULATOR_QUBIT_LIMIT};

/// Hole bindings of a matched search block.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchBinding {
    pub found: String,
    pub index_var: String,
    pub array: String,
    pub target: i32,
    #[serde(rename = "N")]
    pub size: usize,
    pub params: GroverParams,
    /// Number of statements the block spans.
    #[serde(skip)]
    pub len: usize,
    #[serde(skip)]
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NoMatch {
    pub reason: String,
}

fn no(reason: impl Into<String>) -> NoMatch {
    NoMatch { reason: reason.into() }
}

const SHAPE: &str = "body shape mismatch";

/// Tries `entry` on the statement window starting at `body[at]`.
pub fn match_block(tp: &TypedProgram, entry: &QplpEntry, body: &[Stmt], at: usize) -> Result<SearchBinding, NoMatch> {
    if entry.kind != PatternKind::LinearSearch {
        return Err(no(format!("{} has no executable matcher", entry.id)));
    }
    match_search(tp, body, at)
}

fn const_int(tp: &TypedProgram, e: &Expr) -> Option<i32> {
    tp.const_of(e).and_then(Value::as_int)
}

fn is_name(e: &Expr, name: &str) -> bool {
    e.as_name() == Some(name)
}

/// `a[i] == t` or `t == a[i]`; returns (array, target expression).
fn index_eq<'a>(cond: &'a Expr, var: &str) -> Option<(&'a str, &'a Expr)> {
    let ExprKind::Compare { op: CmpOp::Eq, lhs, rhs } = &cond.kind else { return None };
    let probe = |side: &'a Expr| match &side.kind {
        ExprKind::Index { array, index } if is_name(index, var) => array.as_name(),
        _ => None,
    };
    if let Some(a) = probe(lhs) {
        return Some((a, rhs));
    }
    probe(rhs).map(|a| (a, &**lhs))
}

/// Whether `s` looks like a linear-search loop at all; such statements are
/// reported even when they fail to match.
pub(crate) fn is_candidate(s: &Stmt) -> bool {
    let StmtKind::ForRange { var, body, .. } = &s.kind else { return false };
    body.iter().any(|b| match &b.kind {
        StmtKind::If { cond, .. } => index_eq(cond, &var.name).is_some(),
        _ => false,
    })
}

fn match_search(tp: &TypedProgram, body: &[Stmt], at: usize) -> Result<SearchBinding, NoMatch> {
    let (Some(init), Some(lp)) = (body.get(at), body.get(at + 1)) else { return Err(no(SHAPE)) };
    let StmtKind::Assign { target: Target::Name(found), value: init_value } = &init.kind else {
        return Err(no(format!("{SHAPE}: expected `found = -1` before the loop")));
    };
    if tp.types.get(&found.id) != Some(&CliqType::Int) || const_int(tp, init_value) != Some(-1) {
        return Err(no(format!("{SHAPE}: expected `found = -1` before the loop")));
    }
    let StmtKind::ForRange { var, start, stop, body: loop_body } = &lp.kind else { return Err(no(SHAPE)) };
    let [only] = loop_body.as_slice() else { return Err(no(SHAPE)) };
    let StmtKind::If { cond, then_body, else_body } = &only.kind else { return Err(no(SHAPE)) };
    if !else_body.is_empty() {
        return Err(no(SHAPE));
    }
    let Some((array, target)) = index_eq(cond, &var.name) else { return Err(no(SHAPE)) };
    let [assign, brk] = then_body.as_slice() else { return Err(no(SHAPE)) };
    let assign_ok = matches!(&assign.kind,
        StmtKind::Assign { target: Target::Name(f), value } if f.name == found.name && is_name(value, &var.name));
    if !assign_ok || brk.kind != StmtKind::Break || found.name == array {
        return Err(no(SHAPE));
    }
    if let Some(s) = start {
        if const_int(tp, s) != Some(0) {
            return Err(no("range does not start at 0"));
        }
    }
    let sym = tp.symbols.get(array);
    let values = match sym {
        Some(s) if s.is_const => match &s.value {
            Some(Value::IntArray(xs)) => xs.clone(),
            _ => return Err(no("array not compile-time constant")),
        },
        _ => return Err(no("array not compile-time constant")),
    };
    let size = values.len();
    if const_int(tp, stop) != Some(size as i32) {
        return Err(no("range does not cover the whole array"));
    }
    let Some(target) = const_int(tp, target) else { return Err(no("target not compile-time constant")) };
    if !size.is_power_of_two() {
        return Err(no("N not a power of two"));
    }
    let n = size.trailing_zeros() as usize;
    if n == 0 {
        return Err(no("N too small (needs at least 2 elements)"));
    }
    if n > SIMULATOR_QUBIT_LIMIT {
        return Err(no(format!("N needs {n} qubits, above the simulator limit of {SIMULATOR_QUBIT_LIMIT}")));
    }
    let marked: Vec<usize> = values.iter().enumerate().filter(|(_, v)| **v == target).map(|(i, _)| i).collect();
    let k = grover_iterations(size, marked.len()).map_err(|_| no("no marked element"))?;
    Ok(SearchBinding {
        found: found.name.clone(),
        index_var: var.name.clone(),
        array: array.to_string(),
        target,
        size,
        params: GroverParams { n, marked, k },
        len: 2,
        span: init.span.to(lp.span),
    })
}
