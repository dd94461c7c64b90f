//! OpenQASM 3.0 subset: syntax tree, emitter and parser.

pub mod ast;
pub mod emit;
pub mod parse;

pub use ast::*;
pub use emit::{emit_qasm, emit_stmts};
pub use parse::{parse_fragment, parse_fragment_expr, parse_fragment_in, parse_qasm};
