//! Recursive-descent parser for CliqLang.
//!
//! Precedence, loosest first: `or`, `and`, `not`, comparisons, `+ -`,
//! `* / // %`, unary `-`, `**` (right-assoc), call/index.

use crate::diag::{Diagnostic, SourceModule, Span};
use crate::frontend::ast::*;
use crate::frontend::lexer::{self, Kw, Tok, Token};

type PResult<T> = Result<T, Diagnostic>;

pub fn parse_module(src: &SourceModule) -> Result<Module, Vec<Diagnostic>> {
    let lexed = lexer::lex(&src.text).map_err(|d| vec![d])?;
    let mut p = Parser::new(lexed.tokens);
    let body = p.module_body().map_err(|d| vec![d])?;
    Ok(Module { body, span: Span::new(0, src.text.len()), directives: lexed.directives })
}

/// Parses a standalone expression. Spans are relative to `text`.
pub fn parse_expr(text: &str) -> Result<Expr, Diagnostic> {
    let tokens = lexer::lex_expr(text)?;
    let mut p = Parser::new(tokens);
    let e = p.expr()?;
    if !matches!(p.peek(), Tok::Eof) {
        return Err(p.unexpected("end of expression"));
    }
    Ok(e)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    next_id: NodeId,
    loop_depth: usize,
    in_function: bool,
}

impl Parser {
    fn new(tokens: Vec<Token>) -> Self {
        Parser { tokens, pos: 0, next_id: 1, loop_depth: 0, in_function: false }
    }

    fn id(&mut self) -> NodeId {
        let id = self.next_id;
        self.next_id += 1;
        id
    }

    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.tokens[(self.pos + k).min(self.tokens.len() - 1)].tok
    }

    fn span(&self) -> Span {
        self.tokens[self.pos].span
    }

    fn prev_end(&self) -> usize {
        self.tokens[self.pos.saturating_sub(1)].span.end
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn is_kw(&self, kw: Kw) -> bool {
        matches!(self.peek(), Tok::Kw(k) if *k == kw)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: &str) -> PResult<Span> {
        if self.is_punct(p) {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&format!("'{p}'")))
        }
    }

    fn unexpected(&self, wanted: &str) -> Diagnostic {
        let t = &self.tokens[self.pos];
        if let Tok::Reserved(r) = t.tok {
            return unsupported(r, t.span);
        }
        let found = match &t.tok {
            Tok::Ident(s) => format!("identifier '{s}'"),
            Tok::Int(v) => format!("integer {v}"),
            Tok::Float(v) => format!("float {v}"),
            Tok::Kw(k) => format!("keyword {k:?}").to_lowercase(),
            Tok::Reserved(r) => r.to_string(),
            Tok::Punct(p) => format!("'{p}'"),
            Tok::Newline => "end of line".into(),
            Tok::Indent => "unexpected indent".into(),
            Tok::Dedent => "dedent".into(),
            Tok::Eof => "end of file".into(),
        };
        Diagnostic::error("E001", format!("syntax error: expected {wanted}, found {found}"), t.span)
    }

    fn ident(&mut self) -> PResult<Ident> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                let span = self.bump().span;
                Ok(Ident { id: self.id(), name, span })
            }
            _ => Err(self.unexpected("identifier")),
        }
    }

    // ---- statements ----

    fn module_body(&mut self) -> PResult<Vec<Stmt>> {
        let mut body = vec![];
        while !matches!(self.peek(), Tok::Eof) {
            if matches!(self.peek(), Tok::Newline) {
                self.bump();
                continue;
            }
            body.extend(self.statement()?);
        }
        Ok(body)
    }

    /// One logical line or compound statement; simple lines may hold
    /// several `;`-separated statements.
    fn statement(&mut self) -> PResult<Vec<Stmt>> {
        match self.peek() {
            Tok::Kw(Kw::Def) => Ok(vec![self.funcdef()?]),
            Tok::Kw(Kw::If) => Ok(vec![self.if_stmt()?]),
            Tok::Kw(Kw::While) => Ok(vec![self.while_stmt()?]),
            Tok::Kw(Kw::For) => Ok(vec![self.for_stmt()?]),
            Tok::Reserved(r) => Err(unsupported(r, self.span())),
            Tok::Indent => Err(Diagnostic::error("E001", "syntax error: unexpected indent", self.span())),
            _ => self.simple_line(),
        }
    }

    fn simple_line(&mut self) -> PResult<Vec<Stmt>> {
        let mut out = vec![self.small_stmt()?];
        while self.eat_punct(";") {
            if matches!(self.peek(), Tok::Newline | Tok::Eof) {
                break;
            }
            out.push(self.small_stmt()?);
        }
        match self.peek() {
            Tok::Newline => {
                self.bump();
            }
            Tok::Eof | Tok::Dedent => {}
            Tok::Punct(",") => return Err(unsupported("tuples", self.span())),
            _ => return Err(self.unexpected("end of statement")),
        }
        Ok(out)
    }

    fn small_stmt(&mut self) -> PResult<Stmt> {
        let start = self.span();
        let kind = match self.peek() {
            Tok::Kw(Kw::Pass) => {
                self.bump();
                StmtKind::Pass
            }
            Tok::Kw(Kw::Break) | Tok::Kw(Kw::Continue) => {
                let is_break = self.is_kw(Kw::Break);
                if self.loop_depth == 0 {
                    let what = if is_break { "break" } else { "continue" };
                    return Err(Diagnostic::error("E001", format!("syntax error: '{what}' outside loop"), start));
                }
                self.bump();
                if is_break {
                    StmtKind::Break
                } else {
                    StmtKind::Continue
                }
            }
            Tok::Kw(Kw::Return) => {
                if !self.in_function {
                    return Err(Diagnostic::error("E001", "syntax error: 'return' outside function", start));
                }
                self.bump();
                if matches!(self.peek(), Tok::Newline | Tok::Eof | Tok::Punct(";") | Tok::Dedent) {
                    StmtKind::Return(None)
                } else {
                    StmtKind::Return(Some(self.expr()?))
                }
            }
            Tok::Reserved(r) => return Err(unsupported(r, start)),
            Tok::Kw(Kw::Def | Kw::If | Kw::While | Kw::For) => {
                return Err(self.unexpected("simple statement"));
            }
            _ => {
                let lhs = self.expr()?;
                if self.is_punct(",") {
                    return Err(unsupported("tuples", self.span()));
                }
                if self.is_punct(":") {
                    return Err(unsupported("annotated assignment", self.span()));
                }
                let aug = match self.peek() {
                    Tok::Punct("+=") => Some(BinOp::Add),
                    Tok::Punct("-=") => Some(BinOp::Sub),
                    Tok::Punct("*=") => Some(BinOp::Mul),
                    Tok::Punct("/=") => Some(BinOp::Div),
                    Tok::Punct("//=") => Some(BinOp::FloorDiv),
                    Tok::Punct("%=") => Some(BinOp::Mod),
                    Tok::Punct("**=") => Some(BinOp::Pow),
                    _ => None,
                };
                if let Some(op) = aug {
                    self.bump();
                    let target = self.assign_target(lhs)?;
                    let value = self.expr()?;
                    StmtKind::AugAssign { target, op, value }
                } else if self.eat_punct("=") {
                    let target = self.assign_target(lhs)?;
                    let value = self.expr()?;
                    if self.is_punct("=") {
                        return Err(unsupported("chained assignment", self.span()));
                    }
                    StmtKind::Assign { target, value }
                } else {
                    StmtKind::Expr(lhs)
                }
            }
        };
        let span = Span::new(start.start, self.prev_end());
        Ok(Stmt { id: self.id(), kind, span })
    }

    fn assign_target(&mut self, e: Expr) -> PResult<Target> {
        match e.kind {
            ExprKind::Name(name) => Ok(Target::Name(Ident { id: e.id, name, span: e.span })),
            ExprKind::Index { array, index } => match array.kind {
                ExprKind::Name(name) => {
                    Ok(Target::Index { id: e.id, array: Ident { id: array.id, name, span: array.span }, index: *index, span: e.span })
                }
                _ => Err(Diagnostic::error("E001", "syntax error: cannot assign to this expression", e.span)),
            },
            _ => Err(Diagnostic::error("E001", "syntax error: cannot assign to this expression", e.span)),
        }
    }

    /// `:` followed by either an inline simple line or an indented block.
    fn suite(&mut self) -> PResult<Vec<Stmt>> {
        self.expect_punct(":")?;
        if !matches!(self.peek(), Tok::Newline) {
            return self.simple_line();
        }
        self.bump();
        if !matches!(self.peek(), Tok::Indent) {
            return Err(self.unexpected("an indented block"));
        }
        self.bump();
        let mut body = vec![];
        while !matches!(self.peek(), Tok::Dedent | Tok::Eof) {
            if matches!(self.peek(), Tok::Newline) {
                self.bump();
                continue;
            }
            body.extend(self.statement()?);
        }
        if matches!(self.peek(), Tok::Dedent) {
            self.bump();
        }
        Ok(body)
    }

    fn body_end(body: &[Stmt], fallback: usize) -> usize {
        body.last().map(|s| s.span.end).unwrap_or(fallback)
    }

    fn funcdef(&mut self) -> PResult<Stmt> {
        let start = self.bump().span;
        if self.in_function {
            return Err(unsupported("nested function definitions", start));
        }
        let name = self.ident()?;
        self.expect_punct("(")?;
        let mut params = vec![];
        while !self.is_punct(")") {
            let pname = self.ident()?;
            if !self.is_punct(":") {
                return Err(Diagnostic::error(
                    "E001",
                    format!("syntax error: parameter '{}' needs a type annotation", pname.name),
                    pname.span,
                ));
            }
            self.bump();
            let ty = self.type_ann()?;
            let ty = ty.ok_or_else(|| Diagnostic::error("E001", "syntax error: parameter type cannot be None", pname.span))?;
            params.push(Param { name: pname, ty });
            if !self.eat_punct(",") {
                break;
            }
        }
        self.expect_punct(")")?;
        if !self.is_punct("->") {
            return Err(Diagnostic::error(
                "E001",
                format!("syntax error: function '{}' needs a return annotation", name.name),
                self.span(),
            ));
        }
        self.bump();
        let ret = self.type_ann()?;
        let saved_loop = std::mem::replace(&mut self.loop_depth, 0);
        self.in_function = true;
        let body = self.suite();
        self.in_function = false;
        self.loop_depth = saved_loop;
        let body = body?;
        let span = Span::new(start.start, Self::body_end(&body, self.prev_end()));
        Ok(Stmt { id: self.id(), kind: StmtKind::FuncDef(FuncDef { name, params, ret, body }), span })
    }

    fn type_ann(&mut self) -> PResult<Option<TypeAnn>> {
        let t = self.bump();
        match &t.tok {
            Tok::Ident(s) if s == "int" => Ok(Some(TypeAnn::Int)),
            Tok::Ident(s) if s == "float" => Ok(Some(TypeAnn::Float)),
            Tok::Ident(s) if s == "bool" => Ok(Some(TypeAnn::Bool)),
            Tok::Kw(Kw::None) => Ok(None),
            Tok::Ident(s) if s == "list" => Err(unsupported("array parameters and return values", t.span)),
            _ => Err(Diagnostic::error("E001", "syntax error: expected one of int, float, bool, None", t.span)),
        }
    }

    fn if_stmt(&mut self) -> PResult<Stmt> {
        let start = self.bump().span;
        let cond = self.expr()?;
        let then_body = self.suite()?;
        let mut end = Self::body_end(&then_body, self.prev_end());
        let else_body = if self.is_kw(Kw::Elif) {
            let nested = self.if_stmt()?;
            end = nested.span.end;
            vec![nested]
        } else if self.is_kw(Kw::Else) {
            let else_span = self.bump().span;
            let body = self.suite()?;
            end = Self::body_end(&body, else_span.end);
            body
        } else {
            vec![]
        };
        Ok(Stmt { id: self.id(), kind: StmtKind::If { cond, then_body, else_body }, span: Span::new(start.start, end) })
    }

    fn loop_body(&mut self) -> PResult<Vec<Stmt>> {
        self.loop_depth += 1;
        let body = self.suite();
        self.loop_depth -= 1;
        let body = body?;
        if self.is_kw(Kw::Else) {
            return Err(unsupported("else clause on loops", self.span()));
        }
        Ok(body)
    }

    fn while_stmt(&mut self) -> PResult<Stmt> {
        let start = self.bump().span;
        let cond = self.expr()?;
        let body = self.loop_body()?;
        let span = Span::new(start.start, Self::body_end(&body, self.prev_end()));
        Ok(Stmt { id: self.id(), kind: StmtKind::While { cond, body }, span })
    }

    fn for_stmt(&mut self) -> PResult<Stmt> {
        let start = self.bump().span;
        let var = self.ident()?;
        if self.is_punct(",") {
            return Err(unsupported("tuple unpacking in for loops", self.span()));
        }
        if !self.is_kw(Kw::In) {
            return Err(self.unexpected("'in'"));
        }
        self.bump();
        let iter_span = self.span();
        match self.peek() {
            Tok::Ident(n) if n == "range" && matches!(self.peek_at(1), Tok::Punct("(")) => {}
            _ => return Err(unsupported("iteration over anything but range()", iter_span)),
        }
        self.bump();
        self.bump();
        let mut args = vec![];
        while !self.is_punct(")") {
            args.push(self.expr()?);
            if !self.eat_punct(",") {
                break;
            }
        }
        let close = self.expect_punct(")")?;
        let (start_e, stop) = match args.len() {
            1 => (None, args.pop().unwrap()),
            2 => {
                let stop = args.pop().unwrap();
                (Some(args.pop().unwrap()), stop)
            }
            3 => return Err(unsupported("range() with a step argument", iter_span.to(close))),
            _ => return Err(Diagnostic::error("E001", "syntax error: range() takes one or two arguments", iter_span.to(close))),
        };
        let body = self.loop_body()?;
        let span = Span::new(start.start, Self::body_end(&body, self.prev_end()));
        Ok(Stmt { id: self.id(), kind: StmtKind::ForRange { var, start: start_e, stop, body }, span })
    }

    // ---- expressions ----

    fn expr(&mut self) -> PResult<Expr> {
        let e = self.or_expr()?;
        if self.is_kw(Kw::If) {
            return Err(unsupported("conditional expressions", self.span()));
        }
        if self.is_kw(Kw::For) {
            return Err(unsupported("comprehensions", self.span()));
        }
        Ok(e)
    }

    fn mk(&mut self, kind: ExprKind, span: Span) -> Expr {
        Expr { id: self.id(), kind, span }
    }

    fn or_expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.and_expr()?;
        while self.is_kw(Kw::Or) {
            self.bump();
            let rhs = self.and_expr()?;
            let span = lhs.span.to(rhs.span);
            lhs = self.mk(ExprKind::BoolOp { op: BoolOpKind::Or, lhs: Box::new(lhs), rhs: Box::new(rhs) }, span);
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.not_expr()?;
        while self.is_kw(Kw::And) {
            self.bump();
            let rhs = self.not_expr()?;
            let span = lhs.span.to(rhs.span);
            lhs = self.mk(ExprKind::BoolOp { op: BoolOpKind::And, lhs: Box::new(lhs), rhs: Box::new(rhs) }, span);
        }
        Ok(lhs)
    }

    fn not_expr(&mut self) -> PResult<Expr> {
        if self.is_kw(Kw::Not) {
            let start = self.bump().span;
            let operand = self.not_expr()?;
            let span = start.to(operand.span);
            return Ok(self.mk(ExprKind::UnaryOp { op: UnaryOp::Not, operand: Box::new(operand) }, span));
        }
        self.comparison()
    }

    fn cmp_op(&self) -> Option<CmpOp> {
        Some(match self.peek() {
            Tok::Punct("==") => CmpOp::Eq,
            Tok::Punct("!=") => CmpOp::Ne,
            Tok::Punct("<") => CmpOp::Lt,
            Tok::Punct("<=") => CmpOp::Le,
            Tok::Punct(">") => CmpOp::Gt,
            Tok::Punct(">=") => CmpOp::Ge,
            _ => return None,
        })
    }

    fn comparison(&mut self) -> PResult<Expr> {
        let lhs = self.arith()?;
        if self.is_kw(Kw::In) || matches!(self.peek(), Tok::Reserved("is")) {
            return Err(unsupported("membership and identity tests", self.span()));
        }
        let Some(op) = self.cmp_op() else { return Ok(lhs) };
        self.bump();
        let rhs = self.arith()?;
        if self.cmp_op().is_some() {
            return Err(unsupported("chained comparisons", self.span()));
        }
        let span = lhs.span.to(rhs.span);
        Ok(self.mk(ExprKind::Compare { op, lhs: Box::new(lhs), rhs: Box::new(rhs) }, span))
    }

    fn arith(&mut self) -> PResult<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Punct("+") => BinOp::Add,
                Tok::Punct("-") => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            let span = lhs.span.to(rhs.span);
            lhs = self.mk(ExprKind::BinOp { op, lhs: Box::new(lhs), rhs: Box::new(rhs) }, span);
        }
    }

    fn term(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Punct("*") => BinOp::Mul,
                Tok::Punct("/") => BinOp::Div,
                Tok::Punct("//") => BinOp::FloorDiv,
                Tok::Punct("%") => BinOp::Mod,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            let span = lhs.span.to(rhs.span);
            lhs = self.mk(ExprKind::BinOp { op, lhs: Box::new(lhs), rhs: Box::new(rhs) }, span);
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.is_punct("-") {
            let start = self.bump().span;
            let operand = self.unary()?;
            let span = start.to(operand.span);
            return Ok(self.mk(ExprKind::UnaryOp { op: UnaryOp::Neg, operand: Box::new(operand) }, span));
        }
        if self.is_punct("+") {
            return Err(unsupported("unary plus", self.span()));
        }
        self.power()
    }

    fn power(&mut self) -> PResult<Expr> {
        let base = self.postfix()?;
        if self.is_punct("**") {
            self.bump();
            let exp = self.unary()?;
            let span = base.span.to(exp.span);
            return Ok(self.mk(ExprKind::BinOp { op: BinOp::Pow, lhs: Box::new(base), rhs: Box::new(exp) }, span));
        }
        Ok(base)
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut e = self.primary()?;
        loop {
            if self.is_punct("(") {
                let ExprKind::Name(name) = &e.kind else {
                    return Err(Diagnostic::error("E001", "syntax error: only named functions can be called", e.span));
                };
                let func = Ident { id: e.id, name: name.clone(), span: e.span };
                self.bump();
                let mut args = vec![];
                while !self.is_punct(")") {
                    if matches!(self.peek(), Tok::Ident(_)) && matches!(self.peek_at(1), Tok::Punct("=")) {
                        return Err(unsupported("keyword arguments", self.span()));
                    }
                    args.push(self.expr()?);
                    if !self.eat_punct(",") {
                        break;
                    }
                }
                let close = self.expect_punct(")")?;
                let span = e.span.to(close);
                e = self.mk(ExprKind::Call { func, args }, span);
            } else if self.is_punct("[") {
                self.bump();
                let index = self.expr()?;
                if self.is_punct(":") {
                    return Err(unsupported("slicing", self.span()));
                }
                let close = self.expect_punct("]")?;
                let span = e.span.to(close);
                e = self.mk(ExprKind::Index { array: Box::new(e), index: Box::new(index) }, span);
            } else {
                return Ok(e);
            }
        }
    }

    fn primary(&mut self) -> PResult<Expr> {
        let t = self.bump();
        let kind = match t.tok {
            Tok::Int(v) => ExprKind::IntLit(v),
            Tok::Float(v) => ExprKind::FloatLit(v),
            Tok::Kw(Kw::True) => ExprKind::BoolLit(true),
            Tok::Kw(Kw::False) => ExprKind::BoolLit(false),
            Tok::Kw(Kw::None) => return Err(unsupported("None values", t.span)),
            Tok::Ident(name) => ExprKind::Name(name),
            Tok::Reserved(r) => return Err(unsupported(r, t.span)),
            Tok::Punct("(") => {
                let mut inner = self.expr()?;
                if self.is_punct(",") {
                    return Err(unsupported("tuples", self.span()));
                }
                let close = self.expect_punct(")")?;
                inner.span = t.span.to(close);
                return Ok(inner);
            }
            Tok::Punct("[") => {
                let mut items = vec![];
                while !self.is_punct("]") {
                    items.push(self.expr()?);
                    if !self.eat_punct(",") {
                        break;
                    }
                }
                let close = self.expect_punct("]")?;
                return Ok(self.mk(ExprKind::ArrayLit(items), t.span.to(close)));
            }
            _ => {
                self.pos -= 1;
                return Err(self.unexpected("an expression"));
            }
        };
        Ok(self.mk(kind, t.span))
    }
}

fn unsupported(what: &str, span: Span) -> Diagnostic {
    let what = match what {
        "class" => "class definitions (objects are not supported)",
        "import" | "from" => "imports",
        "lambda" => "lambda expressions",
        other => other,
    };
    Diagnostic::error("E002", format!("unsupported construct: {what}"), span)
}
