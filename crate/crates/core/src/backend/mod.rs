//! Lowering from checked CliqLang to OpenQASM 3.0.

mod lower;

pub use crate::qasm::emit_qasm;
pub use lower::lower_program;
