//! Parser for the emitted OpenQASM 3.0 subset.
//!
//! Syntax errors and references to undeclared identifiers are E061;
//! well-formed OpenQASM that falls outside the subset is E062.

use std::collections::HashMap;

use super::ast::*;
use crate::diag::{Diagnostic, Span};

#[derive(Clone, Debug, PartialEq)]
enum T {
    Ident(String),
    Int(u64),
    Float(f64),
    Str(String),
    P(&'static str),
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    t: T,
    span: Span,
}

const PUNCT: &[&str] = &[
    "**", "==", "!=", "<=", ">=", "&&", "||", "->", "++", "+=", "-=", "*=", "/=", "<<", ">>", ";", ",", "(", ")", "[", "]", "{", "}", "=",
    "<", ">", "+", "-", "*", "/", "%", "!", "@", ":", "~", "&", "|", "^", ".",
];

/// Keywords of full OpenQASM 3 that this subset does not accept.
const UNSUPPORTED: &[&str] = &[
    "gate",
    "qreg",
    "creg",
    "const",
    "uint",
    "angle",
    "complex",
    "input",
    "barrier",
    "box",
    "let",
    "switch",
    "case",
    "default",
    "extern",
    "opaque",
    "delay",
    "duration",
    "stretch",
    "durationof",
    "inv",
    "pow",
    "negctrl",
    "gphase",
    "U",
    "cal",
    "defcal",
    "defcalgrammar",
    "pragma",
    "end",
    "mutable",
    "readonly",
    "sizeof",
    "return_type",
];

/// Gates from stdgates.inc outside the supported set.
const STDGATES_OTHER: &[&str] = &[
    "p", "phase", "cphase", "id", "u1", "u2", "u3", "y", "s", "sdg", "t", "tdg", "sx", "rx", "ry", "rz", "cy", "cz", "cp", "crx", "cry",
    "crz", "ch", "swap", "ccx", "cswap", "cu", "CX",
];

fn syntax(msg: impl Into<String>, span: Span) -> Diagnostic {
    Diagnostic::error("E061", msg, span)
}

fn unsupported(msg: impl Into<String>, span: Span) -> Diagnostic {
    Diagnostic::error("E062", format!("outside the supported OpenQASM subset: {}", msg.into()), span)
}

fn tokenize(text: &str) -> Result<Vec<Token>, Diagnostic> {
    let bytes = text.as_bytes();
    let mut i = 0;
    let mut out = vec![];
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if text[i..].starts_with("//") {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        if text[i..].starts_with("/*") {
            match text[i + 2..].find("*/") {
                Some(end) => i += end + 4,
                None => return Err(syntax("unterminated block comment", Span::new(i, text.len()))),
            }
            continue;
        }
        let start = i;
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token { t: T::Ident(text[start..i].to_string()), span: Span::new(start, i) });
            continue;
        }
        if c.is_ascii_digit() || (c == b'.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            let mut is_float = false;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'.' {
                is_float = true;
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    is_float = true;
                    i = j;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let s = &text[start..i];
            let span = Span::new(start, i);
            let t = if is_float {
                T::Float(s.parse().map_err(|_| syntax(format!("bad float literal '{s}'"), span))?)
            } else {
                T::Int(s.parse().map_err(|_| syntax(format!("integer literal '{s}' out of range"), span))?)
            };
            out.push(Token { t, span });
            continue;
        }
        if c == b'"' {
            i += 1;
            while i < bytes.len() && bytes[i] != b'"' && bytes[i] != b'\n' {
                i += 1;
            }
            if i >= bytes.len() || bytes[i] != b'"' {
                return Err(syntax("unterminated string", Span::new(start, i)));
            }
            i += 1;
            out.push(Token { t: T::Str(text[start + 1..i - 1].to_string()), span: Span::new(start, i) });
            continue;
        }
        match PUNCT.iter().find(|p| text[i..].starts_with(**p)) {
            Some(p) => {
                i += p.len();
                out.push(Token { t: T::P(p), span: Span::new(start, i) });
            }
            None => {
                let ch = text[i..].chars().next().unwrap();
                return Err(syntax(format!("unexpected character '{ch}'"), Span::new(i, i + ch.len_utf8())));
            }
        }
    }
    out.push(Token { t: T::Eof, span: Span::new(text.len(), text.len()) });
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Kind {
    Var(QType),
    Func,
}

/// Marks a scope that hides everything outside it.
const BARRIER: &str = "";

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    /// Scope stack for declaration checking; `None` disables the check.
    scopes: Option<Vec<HashMap<String, Kind>>>,
    stdgates: bool,
}

/// Parses a complete program, enforcing declare-before-use.
pub fn parse_qasm(text: &str) -> Result<QasmProgram, Vec<Diagnostic>> {
    let mut p = Parser { toks: tokenize(text).map_err(|d| vec![d])?, pos: 0, scopes: Some(vec![HashMap::new()]), stdgates: false };
    p.program().map_err(|d| vec![d])
}

/// Parses a statement sequence without a header and without declaration
/// checks. Used on template output during lowering.
pub fn parse_fragment(text: &str) -> Result<Vec<QStmt>, Diagnostic> {
    parse_fragment_in(text, true)
}

/// As [`parse_fragment`], with `stdgates` saying whether stdgates.inc is in
/// scope (its gate names then shadow subroutine calls).
pub fn parse_fragment_in(text: &str, stdgates: bool) -> Result<Vec<QStmt>, Diagnostic> {
    let mut p = Parser { toks: tokenize(text)?, pos: 0, scopes: None, stdgates };
    let mut out = vec![];
    while !p.at_eof() {
        out.push(p.stmt(true)?);
    }
    Ok(out)
}

/// Parses a single expression without declaration checks.
pub fn parse_fragment_expr(text: &str) -> Result<QExpr, Diagnostic> {
    let mut p = Parser { toks: tokenize(text)?, pos: 0, scopes: None, stdgates: true };
    let e = p.expr()?;
    if !p.at_eof() {
        return Err(syntax("unexpected trailing input", p.span()));
    }
    Ok(e)
}

impl Parser {
    fn peek(&self) -> &T {
        &self.toks[self.pos].t
    }

    fn peek_at(&self, n: usize) -> &T {
        &self.toks[(self.pos + n).min(self.toks.len() - 1)].t
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn at_eof(&self) -> bool {
        *self.peek() == T::Eof
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn is_p(&self, p: &str) -> bool {
        matches!(self.peek(), T::P(q) if *q == p)
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), T::Ident(s) if s == kw)
    }

    fn eat_p(&mut self, p: &str) -> bool {
        if self.is_p(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_p(&mut self, p: &str) -> Result<Span, Diagnostic> {
        if self.is_p(p) {
            Ok(self.bump().span)
        } else {
            Err(syntax(format!("expected '{p}', found {}", self.describe()), self.span()))
        }
    }

    fn expect_kw(&mut self, kw: &str) -> Result<(), Diagnostic> {
        if self.is_kw(kw) {
            self.bump();
            Ok(())
        } else {
            Err(syntax(format!("expected '{kw}', found {}", self.describe()), self.span()))
        }
    }

    fn describe(&self) -> String {
        match self.peek() {
            T::Ident(s) => format!("'{s}'"),
            T::Int(v) => format!("'{v}'"),
            T::Float(v) => format!("'{v}'"),
            T::Str(s) => format!("\"{s}\""),
            T::P(p) => format!("'{p}'"),
            T::Eof => "end of input".into(),
        }
    }

    fn ident(&mut self) -> Result<(String, Span), Diagnostic> {
        match self.peek().clone() {
            T::Ident(s) => {
                let span = self.bump().span;
                if UNSUPPORTED.contains(&s.as_str()) {
                    return Err(unsupported(format!("keyword '{s}'"), span));
                }
                Ok((s, span))
            }
            _ => Err(syntax(format!("expected identifier, found {}", self.describe()), self.span())),
        }
    }

    fn usize_lit(&mut self) -> Result<usize, Diagnostic> {
        match self.peek().clone() {
            T::Int(v) => {
                let span = self.bump().span;
                usize::try_from(v).map_err(|_| syntax("size out of range", span))
            }
            _ => Err(syntax(format!("expected integer, found {}", self.describe()), self.span())),
        }
    }

    // ---- scopes ----

    fn declare(&mut self, name: &str, kind: Kind, span: Span) -> Result<(), Diagnostic> {
        let Some(scopes) = &mut self.scopes else { return Ok(()) };
        let top = scopes.last_mut().unwrap();
        if top.contains_key(name) {
            return Err(syntax(format!("'{name}' is already declared"), span));
        }
        top.insert(name.to_string(), kind);
        Ok(())
    }

    fn resolve(&self, name: &str, span: Span) -> Result<Option<Kind>, Diagnostic> {
        let Some(scopes) = &self.scopes else { return Ok(None) };
        for s in scopes.iter().rev() {
            if let Some(k) = s.get(name) {
                return Ok(Some(*k));
            }
            if s.contains_key(BARRIER) {
                break;
            }
        }
        Err(syntax(format!("undeclared identifier '{name}'"), span))
    }

    fn push_scope(&mut self, inherit: bool) {
        if let Some(scopes) = &mut self.scopes {
            if inherit {
                scopes.push(HashMap::new());
            } else {
                // Subroutine bodies see only other subroutines.
                let mut funcs: HashMap<_, _> = scopes[0].iter().filter(|(_, k)| **k == Kind::Func).map(|(n, k)| (n.clone(), *k)).collect();
                funcs.insert(BARRIER.to_string(), Kind::Func);
                scopes.push(funcs);
            }
        }
    }

    fn pop_scope(&mut self) {
        if let Some(scopes) = &mut self.scopes {
            scopes.pop();
        }
    }

    // ---- program ----

    fn program(&mut self) -> Result<QasmProgram, Diagnostic> {
        let span = self.span();
        if !self.is_kw("OPENQASM") {
            return Err(syntax("program must start with 'OPENQASM 3.0;'", span));
        }
        self.bump();
        let vspan = self.span();
        let version = match self.bump().t {
            T::Float(v) => v,
            T::Int(v) => v as f64,
            _ => return Err(syntax("expected version number", vspan)),
        };
        let vtext = {
            let end = self.toks[self.pos - 1].span.end;
            (vspan.start, end)
        };
        self.expect_p(";")?;
        if version != 3.0 || vtext.1 - vtext.0 != 3 {
            return Err(unsupported("only 'OPENQASM 3.0;' is accepted", vspan));
        }
        let mut qp = QasmProgram::default();
        while self.is_kw("include") {
            let s = self.bump().span;
            let name = match self.bump().t {
                T::Str(n) => n,
                _ => return Err(syntax("expected include path string", s)),
            };
            self.expect_p(";")?;
            if name != "stdgates.inc" {
                return Err(unsupported(format!("include \"{name}\""), s));
            }
            self.stdgates = true;
            qp.includes.push(name);
        }
        let mut in_decls = true;
        while !self.at_eof() {
            let s = self.stmt(true)?;
            match s {
                QStmt::Decl(d) if in_decls => qp.decls.push(d),
                other => {
                    in_decls = false;
                    qp.stmts.push(other);
                }
            }
        }
        Ok(qp)
    }

    fn type_start(&self) -> bool {
        matches!(self.peek(), T::Ident(s) if matches!(s.as_str(), "int" | "float" | "bool" | "bit" | "array" | "qubit"))
    }

    fn qtype(&mut self) -> Result<QType, Diagnostic> {
        let (name, span) = self.ident()?;
        let sized = |p: &mut Parser| -> Result<usize, Diagnostic> {
            p.expect_p("[")?;
            let n = p.usize_lit()?;
            p.expect_p("]")?;
            Ok(n)
        };
        match name.as_str() {
            "int" => {
                if sized(self)? != 32 {
                    return Err(unsupported("only int[32] is supported", span));
                }
                Ok(QType::Int32)
            }
            "float" => {
                if sized(self)? != 64 {
                    return Err(unsupported("only float[64] is supported", span));
                }
                Ok(QType::Float64)
            }
            "bool" => Ok(QType::Bool),
            "bit" => {
                let n = sized(self)?;
                if n == 0 {
                    return Err(syntax("register size must be positive", span));
                }
                Ok(QType::Bit(n))
            }
            "qubit" => {
                let n = sized(self)?;
                if n == 0 {
                    return Err(syntax("register size must be positive", span));
                }
                Ok(QType::Qubit(n))
            }
            "array" => {
                self.expect_p("[")?;
                let et = self.qtype()?;
                if et != QType::Int32 {
                    return Err(unsupported("only array[int[32], N] is supported", span));
                }
                self.expect_p(",")?;
                let n = self.usize_lit()?;
                self.expect_p("]")?;
                if n == 0 {
                    return Err(syntax("array size must be positive", span));
                }
                Ok(QType::IntArray(n))
            }
            other => Err(syntax(format!("unknown type '{other}'"), span)),
        }
    }

    fn decl(&mut self, output: bool, top: bool) -> Result<QStmt, Diagnostic> {
        let span = self.span();
        let ty = self.qtype()?;
        let (name, nspan) = self.ident()?;
        if !top && (output || matches!(ty, QType::Qubit(_) | QType::IntArray(_))) {
            return Err(unsupported("this declaration is only allowed at global scope", span));
        }
        if output && !ty.is_scalar() {
            return Err(unsupported("output declarations must be scalar", span));
        }
        let init = if self.eat_p("=") {
            if ty.is_quantum() || matches!(ty, QType::IntArray(_)) || output {
                return Err(unsupported("initializer on this declaration", span));
            }
            Some(self.expr()?)
        } else {
            None
        };
        self.expect_p(";")?;
        self.declare(&name, Kind::Var(ty), nspan)?;
        Ok(QStmt::Decl(Decl { ty, name, output, init }))
    }

    fn block(&mut self) -> Result<Vec<QStmt>, Diagnostic> {
        self.expect_p("{")?;
        let mut body = vec![];
        while !self.is_p("}") {
            if self.at_eof() {
                return Err(syntax("unterminated block", self.span()));
            }
            body.push(self.stmt(false)?);
        }
        self.bump();
        Ok(body)
    }

    fn scoped_block(&mut self) -> Result<Vec<QStmt>, Diagnostic> {
        self.push_scope(true);
        let r = self.block();
        self.pop_scope();
        r
    }

    fn stmt(&mut self, top: bool) -> Result<QStmt, Diagnostic> {
        let span = self.span();
        if self.is_kw("output") {
            self.bump();
            return self.decl(true, top);
        }
        if self.type_start() && !matches!(self.peek_at(1), T::P("(")) {
            return self.decl(false, top);
        }
        let T::Ident(kw) = self.peek().clone() else {
            return Err(syntax(format!("expected a statement, found {}", self.describe()), span));
        };
        match kw.as_str() {
            "if" => {
                self.bump();
                self.expect_p("(")?;
                let cond = self.expr()?;
                self.expect_p(")")?;
                let then_body = self.scoped_block()?;
                let else_body = if self.is_kw("else") {
                    self.bump();
                    if self.is_kw("if") {
                        self.push_scope(true);
                        let s = self.stmt(false);
                        self.pop_scope();
                        Some(vec![s?])
                    } else {
                        Some(self.scoped_block()?)
                    }
                } else {
                    None
                };
                Ok(QStmt::If { cond, then_body, else_body })
            }
            "while" => {
                self.bump();
                self.expect_p("(")?;
                let cond = self.expr()?;
                self.expect_p(")")?;
                let body = self.scoped_block()?;
                Ok(QStmt::While { cond, body })
            }
            "for" => {
                self.bump();
                let tspan = self.span();
                if self.qtype()? != QType::Int32 {
                    return Err(unsupported("loop variables must be int[32]", tspan));
                }
                let (var, vspan) = self.ident()?;
                self.expect_kw("in")?;
                self.expect_p("[")?;
                let start = self.expr()?;
                self.expect_p(":")?;
                let end = self.expr()?;
                if self.is_p(":") {
                    return Err(unsupported("stepped ranges", self.span()));
                }
                self.expect_p("]")?;
                self.push_scope(true);
                let r = self.declare(&var, Kind::Var(QType::Int32), vspan).and_then(|_| self.block());
                self.pop_scope();
                Ok(QStmt::For { var, start, end, body: r? })
            }
            "break" => {
                self.bump();
                self.expect_p(";")?;
                Ok(QStmt::Break)
            }
            "continue" => {
                self.bump();
                self.expect_p(";")?;
                Ok(QStmt::Continue)
            }
            "return" => {
                self.bump();
                if self.eat_p(";") {
                    return Ok(QStmt::Return(None));
                }
                let e = self.expr()?;
                self.expect_p(";")?;
                Ok(QStmt::Return(Some(e)))
            }
            "def" => {
                if !top {
                    return Err(unsupported("nested subroutine definition", span));
                }
                self.bump();
                let (name, nspan) = self.ident()?;
                self.declare(&name, Kind::Func, nspan)?;
                self.expect_p("(")?;
                let mut params = vec![];
                self.push_scope(false);
                let r = (|| {
                    if !self.is_p(")") {
                        loop {
                            let pspan = self.span();
                            let t = self.qtype()?;
                            if !t.is_scalar() {
                                return Err(unsupported("only scalar subroutine parameters", pspan));
                            }
                            let (p, ps) = self.ident()?;
                            self.declare(&p, Kind::Var(t), ps)?;
                            params.push((t, p));
                            if !self.eat_p(",") {
                                break;
                            }
                        }
                    }
                    self.expect_p(")")?;
                    let ret = if self.eat_p("->") {
                        let rspan = self.span();
                        let t = self.qtype()?;
                        if !t.is_scalar() {
                            return Err(unsupported("only scalar return types", rspan));
                        }
                        Some(t)
                    } else {
                        None
                    };
                    let body = self.block()?;
                    Ok((ret, body))
                })();
                self.pop_scope();
                let (ret, body) = r?;
                Ok(QStmt::Def { name, params, ret, body })
            }
            "reset" => {
                self.bump();
                let a = self.qarg()?;
                self.expect_p(";")?;
                Ok(QStmt::Reset(a))
            }
            "ctrl" => self.gate(),
            "measure" => Err(unsupported("measure without assignment", span)),
            k if UNSUPPORTED.contains(&k) => Err(unsupported(format!("keyword '{k}'"), span)),
            k if gate_arity(k).is_some() && matches!(self.peek_at(1), T::Ident(_)) => self.gate(),
            k if !self.stdgates_gate_ok(k) => Err(unsupported(format!("gate '{k}'"), span)),
            _ => self.assign_or_expr(),
        }
    }

    /// Identifiers followed by another identifier look like gate calls; only
    /// the supported gate set passes.
    fn stdgates_gate_ok(&self, k: &str) -> bool {
        match self.peek_at(1) {
            T::Ident(_) => false,
            T::P("(") => !(self.stdgates && STDGATES_OTHER.contains(&k)),
            _ => true,
        }
    }

    fn qarg(&mut self) -> Result<QArg, Diagnostic> {
        let (reg, span) = self.ident()?;
        let kind = self.resolve(&reg, span)?;
        let size = match kind {
            Some(Kind::Var(QType::Qubit(n))) => Some(n),
            Some(_) => return Err(syntax(format!("'{reg}' is not a qubit register"), span)),
            None => None,
        };
        let index = if self.eat_p("[") {
            let ispan = self.span();
            let i = self.usize_lit()?;
            self.expect_p("]")?;
            if size.is_some_and(|n| i >= n) {
                return Err(syntax(format!("qubit index {i} out of range for '{reg}'"), ispan));
            }
            Some(i)
        } else {
            None
        };
        Ok(QArg { reg, index })
    }

    fn gate(&mut self) -> Result<QStmt, Diagnostic> {
        let span = self.span();
        let mut ctrl = 0;
        if self.is_kw("ctrl") {
            self.bump();
            ctrl = if self.eat_p("(") {
                let n = self.usize_lit()?;
                self.expect_p(")")?;
                if n == 0 {
                    return Err(syntax("ctrl count must be positive", span));
                }
                n
            } else {
                1
            };
            self.expect_p("@")?;
            if self.is_kw("ctrl") {
                return Err(unsupported("stacked ctrl modifiers", self.span()));
            }
        }
        let (name, nspan) = self.ident()?;
        let Some(arity) = gate_arity(&name) else {
            return Err(unsupported(format!("gate '{name}'"), nspan));
        };
        if self.scopes.is_some() && !self.stdgates {
            return Err(syntax(format!("gate '{name}' used without include \"stdgates.inc\""), nspan));
        }
        let mut operands = vec![self.qarg()?];
        while self.eat_p(",") {
            operands.push(self.qarg()?);
        }
        self.expect_p(";")?;
        if operands.len() != ctrl + arity {
            return Err(syntax(
                format!("gate '{name}' with {ctrl} control(s) needs {} operand(s), found {}", ctrl + arity, operands.len()),
                span,
            ));
        }
        let whole = operands.iter().filter(|a| a.index.is_none()).count();
        if whole > 0 && operands.len() > 1 {
            return Err(unsupported("register broadcast on multi-qubit gates", span));
        }
        for (i, a) in operands.iter().enumerate() {
            if operands[..i].contains(a) {
                return Err(syntax("repeated qubit operand", span));
            }
        }
        Ok(QStmt::Gate(GateOp { name, ctrl, operands }))
    }

    fn assign_or_expr(&mut self) -> Result<QStmt, Diagnostic> {
        let is_assign = {
            let mut j = self.pos + 1;
            if matches!(self.toks[j].t, T::P("[")) {
                let mut depth = 0;
                while j < self.toks.len() {
                    match self.toks[j].t {
                        T::P("[") => depth += 1,
                        T::P("]") => {
                            depth -= 1;
                            if depth == 0 {
                                break;
                            }
                        }
                        T::Eof => break,
                        _ => {}
                    }
                    j += 1;
                }
                j += 1;
            }
            matches!(self.toks.get(j).map(|t| &t.t), Some(T::P("=")))
        };
        if !is_assign {
            let e = self.expr()?;
            if matches!(self.peek(), T::P("+=" | "-=" | "*=" | "/=" | "++")) {
                return Err(unsupported("compound assignment", self.span()));
            }
            self.expect_p(";")?;
            return Ok(QStmt::Expr(e));
        }
        let (name, span) = self.ident()?;
        let kind = self.resolve(&name, span)?;
        let index = if self.eat_p("[") {
            let i = self.expr()?;
            self.expect_p("]")?;
            Some(i)
        } else {
            None
        };
        self.expect_p("=")?;
        if self.is_kw("measure") {
            let mspan = self.bump().span;
            let (q, qspan) = self.ident()?;
            let qkind = self.resolve(&q, qspan)?;
            self.expect_p(";")?;
            if index.is_some() || self.is_p("[") {
                return Err(unsupported("measurement of single qubits", mspan));
            }
            if let (Some(Kind::Var(QType::Bit(b))), Some(Kind::Var(QType::Qubit(n)))) = (kind, qkind) {
                if b != n {
                    return Err(syntax("measurement register sizes differ", mspan));
                }
            } else if self.scopes.is_some() {
                return Err(syntax("measure needs a bit register target and a qubit register source", mspan));
            }
            return Ok(QStmt::Measure { bits: name, qubits: q });
        }
        if matches!(kind, Some(Kind::Func)) {
            return Err(syntax(format!("cannot assign to subroutine '{name}'"), span));
        }
        let value = self.expr()?;
        self.expect_p(";")?;
        Ok(QStmt::Assign { target: LValue { name, index }, value })
    }

    // ---- expressions ----

    pub fn expr(&mut self) -> Result<QExpr, Diagnostic> {
        self.binary(1)
    }

    fn peek_binop(&self) -> Option<QBinOp> {
        let T::P(p) = self.peek() else { return None };
        QBinOp::ALL.iter().copied().find(|op| op.symbol() == *p)
    }

    fn binary(&mut self, min_prec: u8) -> Result<QExpr, Diagnostic> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.peek_binop() {
            let prec = op.precedence();
            if prec < min_prec || op == QBinOp::Pow {
                break;
            }
            self.bump();
            let rhs = self.binary(prec + 1)?;
            lhs = QExpr::binary(op, lhs, rhs);
        }
        if let T::P(p @ ("<<" | ">>" | "&" | "|" | "^" | "~")) = self.peek() {
            return Err(unsupported(format!("operator '{p}'"), self.span()));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<QExpr, Diagnostic> {
        if self.eat_p("-") {
            return Ok(QExpr::Unary(QUnOp::Neg, Box::new(self.unary()?)));
        }
        if self.eat_p("!") {
            return Ok(QExpr::Unary(QUnOp::Not, Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<QExpr, Diagnostic> {
        let base = self.atom()?;
        if self.eat_p("**") {
            let exp = self.unary()?;
            return Ok(QExpr::binary(QBinOp::Pow, base, exp));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<QExpr, Diagnostic> {
        let span = self.span();
        match self.peek().clone() {
            T::Int(v) => {
                self.bump();
                Ok(QExpr::Int(v))
            }
            T::Float(v) => {
                self.bump();
                Ok(QExpr::Float(v))
            }
            T::P("(") => {
                self.bump();
                let e = self.expr()?;
                self.expect_p(")")?;
                Ok(QExpr::paren(e))
            }
            T::Ident(s) if s == "true" || s == "false" => {
                self.bump();
                Ok(QExpr::Bool(s == "true"))
            }
            T::Ident(s) if s == "measure" => Err(unsupported("measure inside an expression", span)),
            T::Ident(_) if self.type_start() => {
                let t = self.qtype()?;
                if !t.is_scalar() {
                    return Err(unsupported("cast to a non-scalar type", span));
                }
                self.expect_p("(")?;
                let e = self.expr()?;
                self.expect_p(")")?;
                Ok(QExpr::Cast(t, Box::new(e)))
            }
            T::Ident(_) => {
                let (name, nspan) = self.ident()?;
                let kind = self.resolve(&name, nspan)?;
                if self.eat_p("(") {
                    if matches!(kind, Some(Kind::Var(_))) {
                        return Err(syntax(format!("'{name}' is not a subroutine"), nspan));
                    }
                    let mut args = vec![];
                    if !self.is_p(")") {
                        loop {
                            args.push(self.expr()?);
                            if !self.eat_p(",") {
                                break;
                            }
                        }
                    }
                    self.expect_p(")")?;
                    return Ok(QExpr::Call(name, args));
                }
                if matches!(kind, Some(Kind::Func)) {
                    return Err(syntax(format!("subroutine '{name}' used as a value"), nspan));
                }
                if matches!(kind, Some(Kind::Var(QType::Qubit(_)))) {
                    return Err(syntax(format!("qubit register '{name}' used as a classical value"), nspan));
                }
                if self.eat_p("[") {
                    let i = self.expr()?;
                    if self.is_p(":") || self.is_p(",") {
                        return Err(unsupported("slicing", self.span()));
                    }
                    self.expect_p("]")?;
                    return Ok(QExpr::Index(name, Box::new(i)));
                }
                Ok(QExpr::Ident(name))
            }
            _ => Err(syntax(format!("expected an expression, found {}", self.describe()), span)),
        }
    }
}
