//! Template-driven lowering of a typed program to the OpenQASM subset.
//!
//! Each statement is rendered to text through the mapping rules and then
//! parsed back, so a rule that produces invalid OpenQASM is caught at the
//! statement that used it.

use std::collections::{BTreeSet, HashSet};

use crate::diag::{Diagnostic, Diagnostics, Span};
use crate::frontend::ast::*;
use crate::frontend::{CliqType, TypedProgram};
use crate::mapping::{MappingRule, MappingRuleSet};
use crate::qasm::emit::{emit_stmts, expr_string, float_text};
use crate::qasm::{parse_fragment_in, Decl, QExpr, QStmt, QasmProgram};
use crate::qplp::{instantiate_grover, GroverNames, SIMULATOR_QUBIT_LIMIT};
use crate::value::Value;

/// OpenQASM 3 keywords and built-ins a CliqLang identifier must not shadow.
const QASM_RESERVED: &[&str] = &[
    "OPENQASM",
    "include",
    "def",
    "return",
    "if",
    "else",
    "while",
    "for",
    "in",
    "break",
    "continue",
    "measure",
    "reset",
    "barrier",
    "gate",
    "qubit",
    "bit",
    "int",
    "uint",
    "float",
    "bool",
    "angle",
    "complex",
    "array",
    "const",
    "input",
    "output",
    "let",
    "true",
    "false",
    "ctrl",
    "negctrl",
    "inv",
    "pow",
    "gphase",
    "U",
    "CX",
    "box",
    "delay",
    "duration",
    "stretch",
    "durationof",
    "extern",
    "opaque",
    "defcal",
    "defcalgrammar",
    "cal",
    "end",
    "switch",
    "case",
    "default",
    "sizeof",
    "pi",
    "tau",
    "euler",
    "arccos",
    "arcsin",
    "arctan",
    "ceiling",
    "cos",
    "exp",
    "floor",
    "log",
    "mod",
    "popcount",
    "real",
    "imag",
    "rotl",
    "rotr",
    "sin",
    "sqrt",
    "tan",
    "qreg",
    "creg",
    "void",
    "mutable",
    "readonly",
    "pragma",
];

/// Names bound by stdgates.inc; reserved only when it is included.
const GATE_NAMES: &[&str] = &[
    "h", "x", "z", "cx", "p", "phase", "cphase", "id", "u1", "u2", "u3", "y", "s", "sdg", "t", "tdg", "sx", "rx", "ry", "rz", "cy", "cz",
    "cp", "crx", "cry", "crz", "ch", "swap", "ccx", "cswap", "cu",
];

pub fn lower_program(tp: &TypedProgram, rules: &MappingRuleSet) -> Result<QasmProgram, Diagnostics> {
    let mut quantum = false;
    tp.module.walk_stmts(&mut |s| quantum |= matches!(s.kind, StmtKind::QuantumBlock(_)));
    let mut l = Lowerer { tp, rules, quantum, decls: vec![], declared: HashSet::new(), func: None, temps: 0, blocks: 0, qubits: 0 };
    let mut stmts = vec![];
    let mut diags = vec![];
    for s in &tp.module.body {
        match l.stmt(s).and_then(|text| l.parse(&text, s.span)) {
            Ok(mut v) => stmts.append(&mut v),
            Err(d) => diags.push(d),
        }
    }
    if !diags.is_empty() {
        return Err(Diagnostics(diags));
    }
    let helpers = l.helpers(&stmts).map_err(Diagnostics::single)?;
    let mut all = helpers;
    all.extend(stmts);
    strip_condition_parens(&mut all);
    Ok(QasmProgram { includes: if quantum { vec!["stdgates.inc".into()] } else { vec![] }, decls: l.decls, stmts: all })
}

struct FnState {
    decl_text: Vec<String>,
    declared: HashSet<String>,
}

struct Lowerer<'a> {
    tp: &'a TypedProgram,
    rules: &'a MappingRuleSet,
    quantum: bool,
    decls: Vec<Decl>,
    declared: HashSet<String>,
    func: Option<FnState>,
    temps: usize,
    blocks: usize,
    qubits: usize,
}

fn no_lowering(msg: impl Into<String>, span: Span) -> Diagnostic {
    Diagnostic::error("E030", format!("no lowering: {}", msg.into()), span)
}

fn sig(ts: &[CliqType]) -> Vec<String> {
    ts.iter().map(|t| t.sig_name().to_string()).collect()
}

impl<'a> Lowerer<'a> {
    fn mangle(&self, name: &str) -> String {
        if QASM_RESERVED.contains(&name) || (self.quantum && GATE_NAMES.contains(&name)) {
            format!("__v_{name}")
        } else {
            name.to_string()
        }
    }

    fn rule(&self, kind: &str, sig: &[String], span: Span) -> Result<&'a MappingRule, Diagnostic> {
        self.rules.lookup(kind, sig).map_err(|d| Diagnostic { span, ..d })
    }

    /// Looks up and renders a rule, checking its declared result type.
    fn apply(
        &self,
        kind: &str,
        operand_types: &[CliqType],
        args: &[(&str, &str)],
        result: Option<CliqType>,
        span: Span,
    ) -> Result<String, Diagnostic> {
        let r = self.rule(kind, &sig(operand_types), span)?;
        if let (Some(declared), Some(actual)) = (&r.result, result) {
            if declared != actual.sig_name() {
                return Err(no_lowering(
                    format!("rule '{kind}' yields {declared} but the expression has type {}", actual.sig_name()),
                    span,
                ));
            }
        }
        Ok(r.render(args))
    }

    fn parse(&self, text: &str, span: Span) -> Result<Vec<QStmt>, Diagnostic> {
        parse_fragment_in(text, self.quantum)
            .map_err(|d| no_lowering(format!("mapping rules produced invalid OpenQASM ({}: {})", d.code, d.message), span))
    }

    // ---- declarations ----

    fn decl_text(&self, name: &str, ty: CliqType, output: bool, span: Span) -> Result<String, Diagnostic> {
        let size = match ty {
            CliqType::IntArray(n) => n.to_string(),
            _ => String::new(),
        };
        let kind = if output { "decl.output" } else { "decl" };
        self.apply(kind, &[ty], &[("name", name), ("size", &size)], None, span)
    }

    /// Declares `name` in the current scope on first use.
    fn declare(&mut self, name: &str, ty: CliqType, span: Span) -> Result<(), Diagnostic> {
        self.declare_as(name, ty, false, span)
    }

    fn declare_as(&mut self, name: &str, ty: CliqType, output: bool, span: Span) -> Result<(), Diagnostic> {
        if let Some(f) = &self.func {
            if f.declared.contains(name) {
                return Ok(());
            }
            let text = self.decl_text(name, ty, output, span)?;
            let f = self.func.as_mut().unwrap();
            f.declared.insert(name.to_string());
            f.decl_text.push(text);
            return Ok(());
        }
        if self.declared.contains(name) {
            return Ok(());
        }
        let text = self.decl_text(name, ty, output, span)?;
        for s in self.parse(&text, span)? {
            match s {
                QStmt::Decl(d) => self.decls.push(d),
                _ => return Err(no_lowering(format!("rule 'decl' for {} is not a declaration", ty.sig_name()), span)),
            }
        }
        self.declared.insert(name.to_string());
        Ok(())
    }

    fn fresh_temp(&mut self) -> String {
        let name = format!("__t{}", self.temps);
        self.temps += 1;
        name
    }

    // ---- expressions ----

    fn ty(&self, e: &Expr) -> CliqType {
        self.tp.type_of(e)
    }

    fn coerce(&self, text: String, from: CliqType, to: CliqType, span: Span) -> Result<String, Diagnostic> {
        if from == CliqType::Int && to == CliqType::Float {
            return self.apply("cast", &[CliqType::Int], &[("0", &text)], Some(CliqType::Float), span);
        }
        Ok(text)
    }

    fn lit_int(&self, v: i64, span: Span) -> Result<String, Diagnostic> {
        self.apply("lit.int", &[], &[("value", &expr_string(&QExpr::int(v)))], Some(CliqType::Int), span)
    }

    fn index_text(&self, array: &str, index: &str, span: Span) -> Result<String, Diagnostic> {
        let t = [CliqType::IntArray(0), CliqType::Int];
        self.apply("index", &t, &[("0", array), ("1", index)], Some(CliqType::Int), span)
    }

    fn binop_text(&self, op: BinOp, l: (&str, CliqType), r: (&str, CliqType), out: CliqType, span: Span) -> Result<String, Diagnostic> {
        let kind = format!("binop.{}", op.key());
        self.apply(&kind, &[l.1, r.1], &[("0", l.0), ("1", r.0)], Some(out), span)
    }

    fn expr(&mut self, e: &Expr) -> Result<String, Diagnostic> {
        let ty = self.ty(e);
        match &e.kind {
            ExprKind::IntLit(v) => self.apply("lit.int", &[], &[("value", &v.to_string())], Some(ty), e.span),
            ExprKind::FloatLit(v) => self.apply("lit.float", &[], &[("value", &float_text(*v))], Some(ty), e.span),
            ExprKind::BoolLit(b) => self.apply("lit.bool", &[], &[("value", if *b { "true" } else { "false" })], Some(ty), e.span),
            ExprKind::Name(n) => {
                let m = self.mangle(n);
                self.apply("name", &[], &[("name", &m)], None, e.span)
            }
            ExprKind::ArrayLit(_) => Err(no_lowering("array literal outside an assignment", e.span)),
            ExprKind::Index { array, index } => {
                let a = self.mangle(array.as_name().unwrap_or_default());
                let i = self.expr(index)?;
                self.index_text(&a, &i, e.span)
            }
            ExprKind::BinOp { op: BinOp::Pow, lhs, rhs } if ty == CliqType::Int => self.int_pow(e, lhs, rhs),
            ExprKind::BinOp { op, lhs, rhs } => {
                let (lt, rt) = (self.ty(lhs), self.ty(rhs));
                let l = self.expr(lhs)?;
                let r = self.expr(rhs)?;
                self.binop_text(*op, (&l, lt), (&r, rt), ty, e.span)
            }
            ExprKind::UnaryOp { op, operand } => {
                let t = self.ty(operand);
                let x = self.expr(operand)?;
                let kind = if *op == UnaryOp::Neg { "unop.neg" } else { "unop.not" };
                self.apply(kind, &[t], &[("0", &x)], Some(ty), e.span)
            }
            ExprKind::Compare { op, lhs, rhs } => {
                let (lt, rt) = (self.ty(lhs), self.ty(rhs));
                let l = self.expr(lhs)?;
                let r = self.expr(rhs)?;
                self.apply(&format!("cmp.{}", op.key()), &[lt, rt], &[("0", &l), ("1", &r)], Some(ty), e.span)
            }
            ExprKind::BoolOp { op, lhs, rhs } => {
                let l = self.expr(lhs)?;
                let r = self.expr(rhs)?;
                let kind = if *op == BoolOpKind::And { "boolop.and" } else { "boolop.or" };
                self.apply(kind, &[CliqType::Bool, CliqType::Bool], &[("0", &l), ("1", &r)], Some(ty), e.span)
            }
            ExprKind::Call { func, args } => self.call(e, func, args),
        }
    }

    /// Integer `**` expands to repeated multiplication for exponents 0..=8.
    fn int_pow(&mut self, e: &Expr, lhs: &Expr, rhs: &Expr) -> Result<String, Diagnostic> {
        let exp = self.tp.const_of(rhs).and_then(Value::as_int).filter(|k| (0..=8).contains(k));
        let Some(k) = exp else {
            if let Some(Value::Int(v)) = self.tp.const_of(e) {
                return self.lit_int(*v as i64, e.span);
            }
            return Err(no_lowering("integer '**' needs a literal exponent between 0 and 8", e.span));
        };
        let base = self.expr(lhs)?;
        let int = CliqType::Int;
        if k == 0 {
            // Keep the base evaluated: base * 0 + 1.
            let zero = self.lit_int(0, e.span)?;
            let one = self.lit_int(1, e.span)?;
            let m = self.binop_text(BinOp::Mul, (&base, int), (&zero, int), int, e.span)?;
            return self.binop_text(BinOp::Add, (&m, int), (&one, int), int, e.span);
        }
        let mut acc = base.clone();
        for _ in 1..k {
            acc = self.binop_text(BinOp::Mul, (&acc, int), (&base, int), int, e.span)?;
        }
        Ok(acc)
    }

    fn array_elems(&self, arg: &Expr) -> Result<(String, usize), Diagnostic> {
        match self.ty(arg) {
            CliqType::IntArray(n) => Ok((self.mangle(arg.as_name().unwrap_or_default()), n)),
            _ => Err(no_lowering("expected an array", arg.span)),
        }
    }

    fn call(&mut self, e: &Expr, func: &Ident, args: &[Expr]) -> Result<String, Diagnostic> {
        let ty = self.ty(e);
        let span = e.span;
        match func.name.as_str() {
            "len" => {
                let (_, n) = self.array_elems(&args[0])?;
                self.lit_int(n as i64, span)
            }
            "sum" => {
                let (a, n) = self.array_elems(&args[0])?;
                let mut acc = self.index_text(&a, &self.lit_int(0, span)?, span)?;
                for i in 1..n {
                    let x = self.index_text(&a, &self.lit_int(i as i64, span)?, span)?;
                    acc = self.binop_text(BinOp::Add, (&acc, CliqType::Int), (&x, CliqType::Int), CliqType::Int, span)?;
                }
                Ok(acc)
            }
            "abs" => {
                let x = self.expr(&args[0])?;
                self.apply("call.abs", &[ty], &[("0", &x)], Some(ty), span)
            }
            "min" | "max" => {
                let kind = format!("call.{}", func.name);
                let items: Vec<String> = if args.len() == 1 {
                    let (a, n) = self.array_elems(&args[0])?;
                    let mut v = vec![];
                    for i in 0..n {
                        v.push(self.index_text(&a, &self.lit_int(i as i64, span)?, span)?);
                    }
                    v
                } else {
                    let mut v = vec![];
                    for a in args {
                        let t = self.expr(a)?;
                        v.push(self.coerce(t, self.ty(a), ty, a.span)?);
                    }
                    v
                };
                let mut acc = items[0].clone();
                for x in &items[1..] {
                    acc = self.apply(&kind, &[ty, ty], &[("0", &acc), ("1", x)], Some(ty), span)?;
                }
                Ok(acc)
            }
            name => {
                let info = &self.tp.functions[name];
                let mut texts = vec![];
                for (a, (_, pt)) in args.iter().zip(&info.params) {
                    let t = self.expr(a)?;
                    texts.push(self.coerce(t, self.ty(a), *pt, a.span)?);
                }
                let m = self.mangle(name);
                self.apply("call.user", &[], &[("name", &m), ("args", &texts.join(", "))], None, span)
            }
        }
    }

    // ---- statements ----

    fn body(&mut self, body: &[Stmt]) -> Result<String, Diagnostic> {
        let mut parts = vec![];
        for s in body {
            let t = self.stmt(s)?;
            if !t.trim().is_empty() {
                parts.push(t);
            }
        }
        Ok(parts.join("\n"))
    }

    fn assign_text(&self, target: &str, value: &str, span: Span) -> Result<String, Diagnostic> {
        self.apply("stmt.assign", &[], &[("target", target), ("value", value)], None, span)
    }

    fn stmt(&mut self, s: &Stmt) -> Result<String, Diagnostic> {
        let text = self.stmt_inner(s)?;
        // Validate eagerly so errors point at the innermost statement.
        self.parse(&text, s.span)?;
        Ok(text)
    }

    fn stmt_inner(&mut self, s: &Stmt) -> Result<String, Diagnostic> {
        let span = s.span;
        match &s.kind {
            StmtKind::FuncDef(f) => self.funcdef(f, span),
            StmtKind::Assign { target: Target::Name(id), value } => {
                let ty = self.tp.types[&id.id];
                let name = self.mangle(&id.name);
                if let CliqType::IntArray(_) = ty {
                    return self.array_assign(&id.name, &name, ty, value, span);
                }
                self.declare(&name, ty, id.span)?;
                let v = self.expr(value)?;
                let v = self.coerce(v, self.ty(value), ty, value.span)?;
                self.assign_text(&name, &v, span)
            }
            StmtKind::Assign { target: Target::Index { array, index, .. }, value } => {
                let a = self.mangle(&array.name);
                let i = self.expr(index)?;
                let t = self.index_text(&a, &i, span)?;
                let v = self.expr(value)?;
                self.assign_text(&t, &v, span)
            }
            StmtKind::AugAssign { target, op, value } => {
                let (target_text, tt) = match target {
                    Target::Name(id) => {
                        let n = self.mangle(&id.name);
                        let text = self.apply("name", &[], &[("name", &n)], None, id.span)?;
                        (text, self.tp.types[&id.id])
                    }
                    Target::Index { array, index, span: tspan, .. } => {
                        let a = self.mangle(&array.name);
                        let i = self.expr(index)?;
                        (self.index_text(&a, &i, *tspan)?, CliqType::Int)
                    }
                };
                let vt = self.ty(value);
                let rhs = if *op == BinOp::Pow && tt == CliqType::Int && vt == CliqType::Int {
                    let k = self.tp.const_of(value).and_then(Value::as_int).filter(|k| (0..=8).contains(k));
                    let Some(k) = k else {
                        return Err(no_lowering("integer '**=' needs a literal exponent between 0 and 8", span));
                    };
                    let int = CliqType::Int;
                    if k == 0 {
                        let zero = self.lit_int(0, span)?;
                        let one = self.lit_int(1, span)?;
                        let m = self.binop_text(BinOp::Mul, (&target_text, int), (&zero, int), int, span)?;
                        self.binop_text(BinOp::Add, (&m, int), (&one, int), int, span)?
                    } else {
                        let mut acc = target_text.clone();
                        for _ in 1..k {
                            acc = self.binop_text(BinOp::Mul, (&acc, int), (&target_text, int), int, span)?;
                        }
                        acc
                    }
                } else {
                    let v = self.expr(value)?;
                    let out = match op {
                        BinOp::Div => CliqType::Float,
                        _ if tt == CliqType::Float || vt == CliqType::Float => CliqType::Float,
                        _ => CliqType::Int,
                    };
                    self.binop_text(*op, (&target_text, tt), (&v, vt), out, span)?
                };
                self.assign_text(&target_text, &rhs, span)
            }
            StmtKind::If { cond, then_body, else_body } => {
                let c = self.expr(cond)?;
                let b = self.body(then_body)?;
                if else_body.is_empty() {
                    self.apply("stmt.if", &[], &[("cond", &c), ("body", &b)], None, span)
                } else {
                    let o = self.body(else_body)?;
                    self.apply("stmt.ifelse", &[], &[("cond", &c), ("body", &b), ("orelse", &o)], None, span)
                }
            }
            StmtKind::While { cond, body } => {
                let c = self.expr(cond)?;
                let b = self.body(body)?;
                self.apply("stmt.while", &[], &[("cond", &c), ("body", &b)], None, span)
            }
            StmtKind::ForRange { var, start, stop, body } => {
                let v = self.mangle(&var.name);
                let start_text = match start {
                    Some(e) => self.expr(e)?,
                    None => self.lit_int(0, span)?,
                };
                let last = match self.tp.const_of(stop).and_then(Value::as_int) {
                    Some(n) => self.lit_int(n as i64 - 1, stop.span)?,
                    None => {
                        let s = self.expr(stop)?;
                        let one = self.lit_int(1, stop.span)?;
                        self.binop_text(BinOp::Sub, (&s, CliqType::Int), (&one, CliqType::Int), CliqType::Int, stop.span)?
                    }
                };
                if let Some(f) = &mut self.func {
                    f.declared.insert(v.clone());
                }
                let b = self.body(body)?;
                self.apply("stmt.for", &[], &[("var", &v), ("start", &start_text), ("last", &last), ("body", &b)], None, span)
            }
            StmtKind::Break => self.apply("stmt.break", &[], &[], None, span),
            StmtKind::Continue => self.apply("stmt.continue", &[], &[], None, span),
            StmtKind::Pass => self.apply("stmt.pass", &[], &[], None, span),
            StmtKind::Return(None) => self.apply("stmt.return.void", &[], &[], None, span),
            StmtKind::Return(Some(e)) => {
                let v = self.expr(e)?;
                let ret = self.current_ret(span)?;
                let v = self.coerce(v, self.ty(e), ret, e.span)?;
                self.apply("stmt.return", &[], &[("value", &v)], None, span)
            }
            StmtKind::Expr(e) => {
                if let Some(k) = self.tp.print_index(s.id) {
                    let ExprKind::Call { args, .. } = &e.kind else { unreachable!() };
                    let ty = self.ty(&args[0]);
                    let out = format!("__out_{k}");
                    self.declare_as(&out, ty, true, span)?;
                    let v = self.expr(&args[0])?;
                    return self.apply("stmt.print", &[ty], &[("target", &out), ("value", &v)], None, span);
                }
                let v = self.expr(e)?;
                self.apply("stmt.expr", &[], &[("value", &v)], None, span)
            }
            StmtKind::QuantumBlock(q) => self.quantum_block(q, span),
        }
    }

    fn current_ret(&self, span: Span) -> Result<CliqType, Diagnostic> {
        // The enclosing function is the one whose body contains `span`.
        let mut ret = None;
        for s in &self.tp.module.body {
            if let StmtKind::FuncDef(f) = &s.kind {
                if s.span.contains(&span) {
                    ret = self.tp.functions.get(&f.name.name).and_then(|i| i.ret);
                }
            }
        }
        ret.ok_or_else(|| no_lowering("return outside a typed function", span))
    }

    fn array_assign(&mut self, source_name: &str, name: &str, ty: CliqType, value: &Expr, span: Span) -> Result<String, Diagnostic> {
        let elems: Vec<&Expr> = match &value.kind {
            ExprKind::ArrayLit(items) => items.iter().collect(),
            ExprKind::BinOp { op: BinOp::Mul, lhs, .. } => match &lhs.kind {
                ExprKind::ArrayLit(items) => {
                    let CliqType::IntArray(n) = ty else { unreachable!() };
                    items.iter().cycle().take(n).collect()
                }
                _ => return Err(no_lowering("array value", value.span)),
            },
            _ => return Err(no_lowering("array value", value.span)),
        };
        self.declare(name, ty, span)?;
        let mut reads_self = false;
        for e in &elems {
            e.walk(&mut |x| reads_self |= x.as_name() == Some(source_name));
        }
        let dest = if reads_self {
            let t = self.fresh_temp();
            self.declare(&t, ty, span)?;
            t
        } else {
            name.to_string()
        };
        let mut lines = vec![];
        for (i, e) in elems.iter().enumerate() {
            let v = self.expr(e)?;
            let t = self.index_text(&dest, &self.lit_int(i as i64, span)?, span)?;
            lines.push(self.assign_text(&t, &v, span)?);
        }
        if reads_self {
            for i in 0..elems.len() {
                let idx = self.lit_int(i as i64, span)?;
                let t = self.index_text(name, &idx, span)?;
                let v = self.index_text(&dest, &idx, span)?;
                lines.push(self.assign_text(&t, &v, span)?);
            }
        }
        Ok(lines.join("\n"))
    }

    fn funcdef(&mut self, f: &FuncDef, span: Span) -> Result<String, Diagnostic> {
        let info = &self.tp.functions[&f.name.name];
        let mut params = vec![];
        let mut declared = HashSet::new();
        for (p, t) in &info.params {
            let m = self.mangle(p);
            params.push(self.apply("param", &[*t], &[("name", &m)], None, span)?);
            declared.insert(m);
        }
        let saved = self.func.replace(FnState { decl_text: vec![], declared });
        let body = self.body(&f.body);
        let state = std::mem::replace(&mut self.func, saved).unwrap();
        let body = body?;
        let mut full = state.decl_text;
        if !body.is_empty() {
            full.push(body);
        }
        let ret = match info.ret {
            Some(t) => t.sig_name(),
            None => "none",
        };
        let name = self.mangle(&f.name.name);
        let rule = self.rules.lookup("stmt.def", &[ret.to_string()]).map_err(|d| Diagnostic { span, ..d })?;
        Ok(rule.render(&[("name", &name), ("params", &params.join(", ")), ("body", &full.join("\n"))]))
    }

    fn quantum_block(&mut self, q: &QuantumBlock, span: Span) -> Result<String, Diagnostic> {
        if self.func.is_some() {
            return Err(no_lowering("quantum blocks inside functions", span));
        }
        let found = self.mangle(&q.found.name);
        self.declare(&found, CliqType::Int, span)?;
        let names = GroverNames::numbered(self.blocks, found, self.mangle(&q.array));
        self.blocks += 1;
        self.qubits += q.params.n;
        if self.qubits > SIMULATOR_QUBIT_LIMIT {
            return Err(Diagnostic::error(
                "E041",
                format!("program needs {} qubits; the simulator limit is {SIMULATOR_QUBIT_LIMIT}", self.qubits),
                span,
            ));
        }
        let frag = instantiate_grover(&q.params, &names, q.target).map_err(|d| Diagnostic { span, ..d })?;
        self.decls.extend(frag.decls);
        Ok(emit_stmts(&frag.stmts))
    }

    /// Helper subroutines referenced by the program, in mapping-file order.
    fn helpers(&self, stmts: &[QStmt]) -> Result<Vec<QStmt>, Diagnostic> {
        let mut called = BTreeSet::new();
        collect_calls(stmts, &mut called);
        let mut chosen: Vec<(&str, &str)> = vec![];
        loop {
            let before = chosen.len();
            for (name, text) in self.rules.helpers() {
                if called.contains(name) && !chosen.iter().any(|(n, _)| *n == name) {
                    chosen.push((name, text));
                    collect_calls(&self.parse(text, Span::default())?, &mut called);
                }
            }
            if chosen.len() == before {
                break;
            }
        }
        let mut out = vec![];
        for (name, text) in self.rules.helpers() {
            if chosen.iter().any(|(n, _)| *n == name) {
                out.extend(self.parse(text, Span::default())?);
            }
        }
        Ok(out)
    }
}

fn collect_calls(stmts: &[QStmt], out: &mut BTreeSet<String>) {
    fn exprs(s: &QStmt) -> Vec<&QExpr> {
        match s {
            QStmt::Decl(d) => d.init.iter().collect(),
            QStmt::Assign { target, value } => target.index.iter().chain(std::iter::once(value)).collect(),
            QStmt::If { cond, .. } | QStmt::While { cond, .. } => vec![cond],
            QStmt::For { start, end, .. } => vec![start, end],
            QStmt::Return(Some(e)) | QStmt::Expr(e) => vec![e],
            _ => vec![],
        }
    }
    for s in stmts {
        for e in exprs(s) {
            e.walk(&mut |x| {
                if let QExpr::Call(n, _) = x {
                    out.insert(n.clone());
                }
            });
        }
        for b in s.bodies() {
            collect_calls(b, out);
        }
    }
}

/// `if ((c))` becomes `if (c)`: the statement syntax already supplies the
/// parentheses a rule template put around the condition.
fn strip_condition_parens(stmts: &mut [QStmt]) {
    for s in stmts {
        match s {
            QStmt::If { cond, then_body, else_body } => {
                if let QExpr::Paren(inner) = cond {
                    *cond = (**inner).clone();
                }
                strip_condition_parens(then_body);
                if let Some(e) = else_body {
                    strip_condition_parens(e);
                }
            }
            QStmt::While { cond, body } => {
                if let QExpr::Paren(inner) = cond {
                    *cond = (**inner).clone();
                }
                strip_condition_parens(body);
            }
            QStmt::For { body, .. } | QStmt::Def { body, .. } => strip_condition_parens(body),
            _ => {}
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diag::SourceModule;
    use crate::frontend::analyze;
    use crate::mapping::default_rules;
    use crate::qasm::{emit_qasm, parse_qasm};

    fn translate(src: &str) -> String {
        let tp = analyze(&SourceModule::new("t.cliq", src)).unwrap_or_else(|d| panic!("{d:?}"));
        let qp = lower_program(&tp, &default_rules()).unwrap_or_else(|d| panic!("{d:?}"));
        let text = emit_qasm(&qp);
        let back = parse_qasm(&text).unwrap_or_else(|d| panic!("{text}\n{d:?}"));
        assert_eq!(back, qp, "{text}");
        text
    }

    fn lower_err(src: &str) -> Diagnostics {
        let tp = analyze(&SourceModule::new("t.cliq", src)).unwrap();
        lower_program(&tp, &default_rules()).unwrap_err()
    }

    #[test]
    fn range_becomes_inclusive() {
        let out = translate("s = 0\nfor i in range(0, 4):\n    s = s + i\nprint(s)\n");
        assert!(out.contains("for int[32] i in [0:3] {\n  s = (s + i);\n}"), "{out}");
        assert!(out.contains("output int[32] __out_0;"), "{out}");
        assert!(out.contains("__out_0 = s;"), "{out}");
    }

    #[test]
    fn int_pow_expands() {
        let out = translate("x = 3\ny = x ** 3\nz = x ** 0\n");
        assert!(out.contains("y = ((x * x) * x);"), "{out}");
        assert!(out.contains("z = ((x * 0) + 1);"), "{out}");
        assert!(lower_err("x = 3\nn = 2\nn = n + 1\ny = x ** n\n").has("E030"));
        assert!(lower_err("x = 3\nx = x + 1\ny = x ** 9\n").has("E030"));
        assert!(translate("x = 3\ny = x ** 9\n").contains("y = 19683;"));
    }

    #[test]
    fn floor_div_pulls_in_helper() {
        let out = translate("x = 7\ny = x // 2\nprint(y)\n");
        assert!(out.contains("def __cliq_floordiv("), "{out}");
        assert!(!out.contains("__cliq_mod"), "{out}");
    }

    #[test]
    fn mixed_arithmetic_casts() {
        let out = translate("def f(x: float) -> float:\n    return x * 2\ny = f(3)\nz = 1.5\nz = 2\n");
        assert!(out.contains("y = f(float[64](3));"), "{out}");
        assert!(out.contains("z = float[64](2);"), "{out}");
    }

    #[test]
    fn function_locals_are_declared_in_body() {
        let out = translate("def g(n: int) -> int:\n    t = 0\n    for i in range(n):\n        t += i\n    return t\nprint(g(4))\n");
        assert!(out.contains("def g(int[32] n) -> int[32] {\n  int[32] t;\n  t = 0;"), "{out}");
        assert!(out.contains("[0:(n - 1)]"), "{out}");
    }

    #[test]
    fn arrays_and_builtins() {
        let out = translate("a = [3, 1, 2]\nb = [0] * 4\nprint(sum(a))\nprint(max(a))\nprint(len(b))\na = [a[2], a[1], a[0]]\n");
        assert!(out.contains("array[int[32], 3] a;"), "{out}");
        assert!(out.contains("b[3] = 0;"), "{out}");
        assert!(out.contains("((a[0] + a[1]) + a[2])"), "{out}");
        assert!(out.contains("__cliq_max_i(__cliq_max_i(a[0], a[1]), a[2])"), "{out}");
        assert!(out.contains("__out_2 = 4;"), "{out}");
        assert!(out.contains("__t0[0] = a[2];"), "{out}");
        assert!(out.contains("a[2] = __t0[2];"), "{out}");
    }

    #[test]
    fn reserved_names_are_mangled() {
        let out = translate("pi = 3\nfor in_ in range(2):\n    pi += 1\nprint(pi)\n");
        assert!(out.contains("int[32] __v_pi;"), "{out}");
        let out = translate("def s(v: int) -> int:\n    return v\nx = 1\nprint(s(x))\n");
        assert!(out.contains("__out_0 = s(x);"), "{out}");
    }

    #[test]
    fn broken_rule_is_e030() {
        let rules = default_rules().with_template("binop.add", &["int", "int"], "({0} + )").unwrap();
        let tp = analyze(&SourceModule::new("t.cliq", "x = 1\ny = x + 2\n")).unwrap();
        let d = lower_program(&tp, &rules).unwrap_err();
        assert!(d.has("E030"), "{d:?}");
        assert_eq!(d.0[0].span, tp.module.body[1].span);
    }
}
