//! CliqLang front end: lexing, parsing and type checking.

pub mod ast;
pub mod check;
pub mod lexer;
pub mod parser;

pub use check::{check_program, CliqType, FunctionInfo, Symbol, TypedProgram};
pub use parser::{parse_expr, parse_module};

use crate::diag::{Diagnostics, SourceModule};

/// Parses and type-checks a source module.
pub fn analyze(src: &SourceModule) -> Result<TypedProgram, Diagnostics> {
    let module = parse_module(src).map_err(Diagnostics)?;
    check_program(module).map_err(Diagnostics)
}
