use std::f64::consts::FRAC_PI_4;

use crate::diag::{Diagnostic, Span};
use crate::qasm::{Decl, GateOp, LValue, QArg, QBinOp, QExpr, QStmt, QType};

use super::GroverParams;

pub const SIMULATOR_QUBIT_LIMIT: usize = 16;

/// `floor(pi/4 * sqrt(N/M))`.
pub fn grover_iterations(size: usize, marked: usize) -> Result<usize, Diagnostic> {
    if marked == 0 {
        return Err(Diagnostic::error("E040", "no marked element: the search pattern does not apply", Span::default()));
    }
    assert!(marked <= size, "marked count {marked} exceeds search space {size}");
    Ok((FRAC_PI_4 * (size as f64 / marked as f64).sqrt()).floor() as usize)
}

/// `sin^2((2k+1) theta)` with `theta = asin(sqrt(M/N))`.
pub fn grover_success_probability(size: usize, marked: usize, k: usize) -> f64 {
    let theta = (marked as f64 / size as f64).sqrt().asin();
    ((2 * k + 1) as f64 * theta).sin().powi(2)
}

/// Register and variable names a fragment binds to.
#[derive(Clone, Debug)]
pub struct GroverNames {
    pub qubits: String,
    pub bits: String,
    pub found: String,
    pub array: String,
}

impl GroverNames {
    /// Standard names for the `j`-th quantum block of a program.
    pub fn numbered(j: usize, found: impl Into<String>, array: impl Into<String>) -> Self {
        GroverNames { qubits: format!("__q{j}"), bits: format!("__c{j}"), found: found.into(), array: array.into() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroverFragment {
    pub decls: Vec<Decl>,
    pub stmts: Vec<QStmt>,
}

fn gate(name: &str, ctrl: usize, operands: Vec<QArg>) -> QStmt {
    QStmt::Gate(GateOp { name: name.into(), ctrl, operands })
}

/// Phase flip of |1...1>: plain `z` on one qubit, `ctrl(n-1) @ z` otherwise.
fn all_ones_phase(reg: &str, n: usize) -> QStmt {
    let operands = (0..n).map(|b| QArg::bit(reg, b)).collect();
    gate("z", n - 1, operands)
}

fn oracle(reg: &str, n: usize, marked: &[usize], out: &mut Vec<QStmt>) {
    for &m in marked {
        let zeros: Vec<usize> = (0..n).filter(|b| m >> b & 1 == 0).collect();
        for &b in &zeros {
            out.push(gate("x", 0, vec![QArg::bit(reg, b)]));
        }
        out.push(all_ones_phase(reg, n));
        for &b in &zeros {
            out.push(gate("x", 0, vec![QArg::bit(reg, b)]));
        }
    }
}

fn diffusion(reg: &str, n: usize, out: &mut Vec<QStmt>) {
    out.push(gate("h", 0, vec![QArg::reg(reg)]));
    out.push(gate("x", 0, vec![QArg::reg(reg)]));
    out.push(all_ones_phase(reg, n));
    out.push(gate("x", 0, vec![QArg::reg(reg)]));
    out.push(gate("h", 0, vec![QArg::reg(reg)]));
}

/// Reset, uniform superposition and `k` oracle+diffusion rounds on `reg`.
/// Qubit `b` carries bit `b` of the basis index.
pub fn grover_circuit(params: &GroverParams, reg: &str) -> Vec<QStmt> {
    let mut out = vec![QStmt::Reset(QArg::reg(reg)), gate("h", 0, vec![QArg::reg(reg)])];
    for _ in 0..params.k {
        oracle(reg, params.n, &params.marked, &mut out);
        diffusion(reg, params.n, &mut out);
    }
    out
}

/// The phase oracle alone, for property tests.
pub fn grover_oracle(params: &GroverParams, reg: &str) -> Vec<QStmt> {
    let mut out = vec![];
    oracle(reg, params.n, &params.marked, &mut out);
    out
}

/// The full subroutine: circuit, joint measurement, and the classical
/// fallback that rejects an unmarked outcome.
pub fn instantiate_grover(params: &GroverParams, names: &GroverNames, target: i32) -> Result<GroverFragment, Diagnostic> {
    if params.n == 0 || params.n > SIMULATOR_QUBIT_LIMIT {
        return Err(Diagnostic::error(
            "E041",
            format!("search needs {} qubits; the simulator limit is {SIMULATOR_QUBIT_LIMIT}", params.n),
            Span::default(),
        ));
    }
    let decls = vec![Decl::new(QType::Qubit(params.n), &names.qubits), Decl::new(QType::Bit(params.n), &names.bits)];
    let mut stmts = grover_circuit(params, &names.qubits);
    stmts.push(QStmt::Measure { bits: names.bits.clone(), qubits: names.qubits.clone() });
    let found = || LValue { name: names.found.clone(), index: None };
    stmts.push(QStmt::Assign { target: found(), value: QExpr::Cast(QType::Int32, Box::new(QExpr::ident(&names.bits))) });
    let probe = QExpr::Index(names.array.clone(), Box::new(QExpr::ident(&names.found)));
    stmts.push(QStmt::If {
        cond: QExpr::binary(QBinOp::Ne, probe, QExpr::int(target as i64)),
        then_body: vec![QStmt::Assign { target: found(), value: QExpr::int(-1) }],
        else_body: None,
    });
    Ok(GroverFragment { decls, stmts })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iteration_counts() {
        assert_eq!(grover_iterations(4, 1).unwrap(), 1);
        assert_eq!(grover_iterations(8, 1).unwrap(), 2);
        assert_eq!(grover_iterations(16, 4).unwrap(), 1);
        assert_eq!(grover_iterations(16, 16).unwrap(), 0);
        assert_eq!(grover_iterations(4, 0).unwrap_err().code, "E040");
    }

    #[test]
    fn closed_form_anchors() {
        assert!((grover_success_probability(4, 1, 1) - 1.0).abs() < 1e-12);
        assert!((grover_success_probability(2, 1, 1) - 0.5).abs() < 1e-12);
        assert!((grover_success_probability(16, 4, 1) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn oracle_flips_only_marked_pattern() {
        // n=2, marked {2} = |10>: qubit 0 is zero, so it is conjugated by X.
        let p = GroverParams { n: 2, marked: vec![2], k: 1 };
        let o = grover_oracle(&p, "q");
        assert_eq!(
            o,
            vec![
                gate("x", 0, vec![QArg::bit("q", 0)]),
                gate("z", 1, vec![QArg::bit("q", 0), QArg::bit("q", 1)]),
                gate("x", 0, vec![QArg::bit("q", 0)]),
            ]
        );
    }

    #[test]
    fn too_many_qubits() {
        let p = GroverParams { n: 17, marked: vec![0], k: 1 };
        let names = GroverNames::numbered(0, "f", "a");
        assert_eq!(instantiate_grover(&p, &names, 0).unwrap_err().code, "E041");
    }
}
