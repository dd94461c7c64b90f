//! CliqLang to OpenQASM 3.0 translation.
//!
//! The pipeline is `frontend` (parse and type-check) → `optimizer` (find and
//! optionally apply quantum pattern sites from `qplp`) → `backend` (lower
//! through the `mapping` rules) → `qasm` (emit). `verifier` runs both ends and
//! compares them.
//!
//! ```
//! use cliq::{translate, diag::SourceModule, mapping::default_rules, optimizer::OptimizeMode};
//!
//! let src = SourceModule::new("sum.cliq", "s = 0\nfor i in range(0, 4):\n    s = s + i\nprint(s)\n");
//! let t = translate(&src, &default_rules(), &OptimizeMode::ReportOnly).unwrap();
//! assert!(t.qasm.starts_with("OPENQASM 3.0;\n"));
//! assert!(t.qasm.contains("for int[32] i in [0:3] {"));
//! ```

pub mod backend;
pub mod cli;
pub mod diag;
pub mod frontend;
pub mod mapping;
pub mod optimizer;
pub mod qasm;
pub mod qplp;
pub mod value;
pub mod verifier;

use diag::{Diagnostics, SourceModule};
use mapping::MappingRuleSet;
use optimizer::{OptimizationReport, OptimizeMode};
use qasm::QasmProgram;

/// Output of [`translate`].
#[derive(Clone, Debug)]
pub struct Translation {
    pub qasm: String,
    pub program: QasmProgram,
    pub report: OptimizationReport,
}

/// Source text to OpenQASM text in one call.
pub fn translate(src: &SourceModule, rules: &MappingRuleSet, mode: &OptimizeMode) -> Result<Translation, Diagnostics> {
    let tp = frontend::analyze(src)?;
    let (tp, report) = optimizer::optimize(&tp, &qplp::Catalog::default(), mode)?;
    let program = backend::lower_program(&tp, rules)?;
    Ok(Translation { qasm: qasm::emit_qasm(&program), program, report })
}
