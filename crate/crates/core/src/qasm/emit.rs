//! Deterministic text emission.

use std::fmt::Write as _;

use super::ast::*;

pub fn emit_qasm(qp: &QasmProgram) -> String {
    let mut out = String::from("OPENQASM 3.0;\n");
    for inc in &qp.includes {
        writeln!(out, "include \"{inc}\";").unwrap();
    }
    for d in &qp.decls {
        emit_decl(d, 0, &mut out);
    }
    emit_body(&qp.stmts, 0, &mut out);
    out
}

pub fn type_text(t: QType) -> String {
    match t {
        QType::Int32 => "int[32]".into(),
        QType::Float64 => "float[64]".into(),
        QType::Bool => "bool".into(),
        QType::Bit(n) => format!("bit[{n}]"),
        QType::IntArray(n) => format!("array[int[32], {n}]"),
        QType::Qubit(n) => format!("qubit[{n}]"),
    }
}

fn indent(level: usize, out: &mut String) {
    for _ in 0..level {
        out.push_str("  ");
    }
}

fn emit_decl(d: &Decl, level: usize, out: &mut String) {
    indent(level, out);
    if d.output {
        out.push_str("output ");
    }
    write!(out, "{} {}", type_text(d.ty), d.name).unwrap();
    if let Some(init) = &d.init {
        out.push_str(" = ");
        expr_text(init, out);
    }
    out.push_str(";\n");
}

fn emit_body(body: &[QStmt], level: usize, out: &mut String) {
    for s in body {
        emit_stmt(s, level, out);
    }
}

fn block(body: &[QStmt], level: usize, out: &mut String) {
    out.push_str(" {\n");
    emit_body(body, level + 1, out);
    indent(level, out);
    out.push('}');
}

fn arg_text(a: &QArg, out: &mut String) {
    out.push_str(&a.reg);
    if let Some(i) = a.index {
        write!(out, "[{i}]").unwrap();
    }
}

fn emit_stmt(s: &QStmt, level: usize, out: &mut String) {
    if let QStmt::Decl(d) = s {
        emit_decl(d, level, out);
        return;
    }
    indent(level, out);
    match s {
        QStmt::Decl(_) => unreachable!(),
        QStmt::Assign { target, value } => {
            out.push_str(&target.name);
            if let Some(i) = &target.index {
                out.push('[');
                expr_text(i, out);
                out.push(']');
            }
            out.push_str(" = ");
            expr_text(value, out);
            out.push(';');
        }
        QStmt::Measure { bits, qubits } => write!(out, "{bits} = measure {qubits};").unwrap(),
        QStmt::Reset(a) => {
            out.push_str("reset ");
            arg_text(a, out);
            out.push(';');
        }
        QStmt::Gate(g) => {
            match g.ctrl {
                0 => {}
                1 => out.push_str("ctrl @ "),
                n => write!(out, "ctrl({n}) @ ").unwrap(),
            }
            out.push_str(&g.name);
            for (i, a) in g.operands.iter().enumerate() {
                out.push_str(if i == 0 { " " } else { ", " });
                arg_text(a, out);
            }
            out.push(';');
        }
        QStmt::If { cond, then_body, else_body } => {
            out.push_str("if (");
            expr_text(cond, out);
            out.push(')');
            block(then_body, level, out);
            if let Some(e) = else_body {
                out.push_str(" else");
                block(e, level, out);
            }
        }
        QStmt::While { cond, body } => {
            out.push_str("while (");
            expr_text(cond, out);
            out.push(')');
            block(body, level, out);
        }
        QStmt::For { var, start, end, body } => {
            write!(out, "for int[32] {var} in [").unwrap();
            expr_text(start, out);
            out.push(':');
            expr_text(end, out);
            out.push(']');
            block(body, level, out);
        }
        QStmt::Break => out.push_str("break;"),
        QStmt::Continue => out.push_str("continue;"),
        QStmt::Return(None) => out.push_str("return;"),
        QStmt::Return(Some(e)) => {
            out.push_str("return ");
            expr_text(e, out);
            out.push(';');
        }
        QStmt::Expr(e) => {
            expr_text(e, out);
            out.push(';');
        }
        QStmt::Def { name, params, ret, body } => {
            write!(out, "def {name}(").unwrap();
            for (i, (t, p)) in params.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write!(out, "{} {p}", type_text(*t)).unwrap();
            }
            out.push(')');
            if let Some(t) = ret {
                write!(out, " -> {}", type_text(*t)).unwrap();
            }
            block(body, level, out);
        }
    }
    out.push('\n');
}

/// Statements at indentation level 0, one per line, no trailing newline.
pub fn emit_stmts(stmts: &[QStmt]) -> String {
    let mut out = String::new();
    emit_body(stmts, 0, &mut out);
    out.pop();
    out
}

pub fn float_text(v: f64) -> String {
    format!("{v:?}")
}

pub fn expr_text(e: &QExpr, out: &mut String) {
    match e {
        QExpr::Int(v) => write!(out, "{v}").unwrap(),
        QExpr::Float(v) => out.push_str(&float_text(*v)),
        QExpr::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        QExpr::Ident(n) => out.push_str(n),
        QExpr::Index(n, i) => {
            out.push_str(n);
            out.push('[');
            expr_text(i, out);
            out.push(']');
        }
        QExpr::Binary(op, l, r) => {
            expr_text(l, out);
            write!(out, " {} ", op.symbol()).unwrap();
            expr_text(r, out);
        }
        QExpr::Unary(op, x) => {
            out.push(if *op == QUnOp::Neg { '-' } else { '!' });
            expr_text(x, out);
        }
        QExpr::Paren(x) => {
            out.push('(');
            expr_text(x, out);
            out.push(')');
        }
        QExpr::Call(n, args) => {
            out.push_str(n);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                expr_text(a, out);
            }
            out.push(')');
        }
        QExpr::Cast(t, x) => {
            out.push_str(&type_text(*t));
            out.push('(');
            expr_text(x, out);
            out.push(')');
        }
    }
}

pub fn expr_string(e: &QExpr) -> String {
    let mut s = String::new();
    expr_text(e, &mut s);
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_program_is_header_only() {
        assert_eq!(emit_qasm(&QasmProgram::default()), "OPENQASM 3.0;\n");
    }

    #[test]
    fn decl_follows_header() {
        let qp = QasmProgram { decls: vec![Decl::new(QType::Int32, "x")], ..Default::default() };
        assert_eq!(emit_qasm(&qp), "OPENQASM 3.0;\nint[32] x;\n");
    }

    #[test]
    fn nested_blocks_indent_by_two() {
        let qp = QasmProgram {
            stmts: vec![QStmt::While {
                cond: QExpr::binary(QBinOp::Lt, QExpr::ident("i"), QExpr::Int(10)),
                body: vec![QStmt::Gate(GateOp {
                    name: "z".into(),
                    ctrl: 2,
                    operands: vec![QArg::bit("q", 0), QArg::bit("q", 1), QArg::bit("q", 2)],
                })],
            }],
            ..Default::default()
        };
        assert_eq!(emit_qasm(&qp), "OPENQASM 3.0;\nwhile (i < 10) {\n  ctrl(2) @ z q[0], q[1], q[2];\n}\n");
    }
}
