//! CliqLang syntax tree.

use std::fmt::Write as _;

use serde::Serialize;

use crate::diag::Span;
use crate::qplp::GroverParams;

pub type NodeId = u32;

/// The node kinds a CliqLang tree can contain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum NodeKind {
    Module,
    FuncDef,
    Assign,
    AugAssign,
    If,
    While,
    ForRange,
    Break,
    Continue,
    Pass,
    Return,
    ExprStmt,
    QuantumBlock,
    BinOp,
    UnaryOp,
    Compare,
    BoolOp,
    Call,
    Name,
    IntLit,
    FloatLit,
    BoolLit,
    ArrayLit,
    Index,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    FloorDiv,
    Mod,
    Pow,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::FloorDiv => "//",
            BinOp::Mod => "%",
            BinOp::Pow => "**",
        }
    }

    /// Suffix used in mapping-rule keys, e.g. `binop.add`.
    pub fn key(self) -> &'static str {
        match self {
            BinOp::Add => "add",
            BinOp::Sub => "sub",
            BinOp::Mul => "mul",
            BinOp::Div => "div",
            BinOp::FloorDiv => "floordiv",
            BinOp::Mod => "mod",
            BinOp::Pow => "pow",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum UnaryOp {
    Neg,
    Not,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    pub fn key(self) -> &'static str {
        match self {
            CmpOp::Eq => "eq",
            CmpOp::Ne => "ne",
            CmpOp::Lt => "lt",
            CmpOp::Le => "le",
            CmpOp::Gt => "gt",
            CmpOp::Ge => "ge",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum BoolOpKind {
    And,
    Or,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ident {
    pub id: NodeId,
    pub name: String,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    pub id: NodeId,
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExprKind {
    Name(String),
    /// Unsigned literal text; negative numbers are `UnaryOp(Neg, ..)`.
    IntLit(u64),
    FloatLit(f64),
    BoolLit(bool),
    ArrayLit(Vec<Expr>),
    BinOp {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    UnaryOp {
        op: UnaryOp,
        operand: Box<Expr>,
    },
    Compare {
        op: CmpOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    BoolOp {
        op: BoolOpKind,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Call {
        func: Ident,
        args: Vec<Expr>,
    },
    Index {
        array: Box<Expr>,
        index: Box<Expr>,
    },
}

impl Expr {
    pub fn node_kind(&self) -> NodeKind {
        match &self.kind {
            ExprKind::Name(_) => NodeKind::Name,
            ExprKind::IntLit(_) => NodeKind::IntLit,
            ExprKind::FloatLit(_) => NodeKind::FloatLit,
            ExprKind::BoolLit(_) => NodeKind::BoolLit,
            ExprKind::ArrayLit(_) => NodeKind::ArrayLit,
            ExprKind::BinOp { .. } => NodeKind::BinOp,
            ExprKind::UnaryOp { .. } => NodeKind::UnaryOp,
            ExprKind::Compare { .. } => NodeKind::Compare,
            ExprKind::BoolOp { .. } => NodeKind::BoolOp,
            ExprKind::Call { .. } => NodeKind::Call,
            ExprKind::Index { .. } => NodeKind::Index,
        }
    }

    pub fn children(&self) -> Vec<&Expr> {
        match &self.kind {
            ExprKind::Name(_) | ExprKind::IntLit(_) | ExprKind::FloatLit(_) | ExprKind::BoolLit(_) => {
                vec![]
            }
            ExprKind::ArrayLit(xs) => xs.iter().collect(),
            ExprKind::BinOp { lhs, rhs, .. } | ExprKind::Compare { lhs, rhs, .. } | ExprKind::BoolOp { lhs, rhs, .. } => vec![lhs, rhs],
            ExprKind::UnaryOp { operand, .. } => vec![operand],
            ExprKind::Call { args, .. } => args.iter().collect(),
            ExprKind::Index { array, index } => vec![array, index],
        }
    }

    pub fn as_name(&self) -> Option<&str> {
        match &self.kind {
            ExprKind::Name(n) => Some(n),
            _ => None,
        }
    }

    /// Calls `f` on this node and every descendant, parents first.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Expr)) {
        f(self);
        for c in self.children() {
            c.walk(f);
        }
    }

    /// Id- and span-free rendering used for structural comparison.
    pub fn shape(&self) -> String {
        let mut s = String::new();
        self.write_shape(&mut s);
        s
    }

    fn write_shape(&self, out: &mut String) {
        match &self.kind {
            ExprKind::Name(n) => out.push_str(n),
            ExprKind::IntLit(v) => {
                let _ = write!(out, "{v}");
            }
            ExprKind::FloatLit(v) => {
                let _ = write!(out, "{v:?}");
            }
            ExprKind::BoolLit(b) => out.push_str(if *b { "True" } else { "False" }),
            ExprKind::ArrayLit(xs) => {
                out.push_str("(list");
                for x in xs {
                    out.push(' ');
                    x.write_shape(out);
                }
                out.push(')');
            }
            ExprKind::BinOp { op, lhs, rhs } => write_node(out, op.symbol(), &[lhs, rhs]),
            ExprKind::Compare { op, lhs, rhs } => write_node(out, op.symbol(), &[lhs, rhs]),
            ExprKind::BoolOp { op, lhs, rhs } => {
                let name = if *op == BoolOpKind::And { "and" } else { "or" };
                write_node(out, name, &[lhs, rhs])
            }
            ExprKind::UnaryOp { op, operand } => {
                let name = if *op == UnaryOp::Neg { "neg" } else { "not" };
                write_node(out, name, &[operand])
            }
            ExprKind::Call { func, args } => {
                let _ = write!(out, "(call {}", func.name);
                for a in args {
                    out.push(' ');
                    a.write_shape(out);
                }
                out.push(')');
            }
            ExprKind::Index { array, index } => write_node(out, "index", &[array, index]),
        }
    }
}

fn write_node(out: &mut String, head: &str, children: &[&Expr]) {
    out.push('(');
    out.push_str(head);
    for c in children {
        out.push(' ');
        c.write_shape(out);
    }
    out.push(')');
}

#[derive(Clone, Debug, PartialEq)]
pub enum Target {
    Name(Ident),
    /// `array[index] = ...`; `id` and `span` describe the subscript node.
    Index {
        id: NodeId,
        array: Ident,
        index: Expr,
        span: Span,
    },
}

impl Target {
    pub fn base(&self) -> &Ident {
        match self {
            Target::Name(id) => id,
            Target::Index { array, .. } => array,
        }
    }

    pub fn span(&self) -> Span {
        match self {
            Target::Name(id) => id.span,
            Target::Index { span, .. } => *span,
        }
    }

    fn shape(&self) -> String {
        match self {
            Target::Name(id) => id.name.clone(),
            Target::Index { array, index, .. } => format!("(index {} {})", array.name, index.shape()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum TypeAnn {
    Int,
    Float,
    Bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Param {
    pub name: Ident,
    pub ty: TypeAnn,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FuncDef {
    pub name: Ident,
    pub params: Vec<Param>,
    /// `None` for `-> None`.
    pub ret: Option<TypeAnn>,
    pub body: Vec<Stmt>,
}

/// A block replaced by an instantiated quantum search subroutine.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumBlock {
    pub entry: String,
    /// Position of the originating site in the optimization report.
    pub site: usize,
    pub params: GroverParams,
    pub found: Ident,
    pub array: String,
    pub target: i32,
    pub replaced: Vec<Stmt>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Stmt {
    pub id: NodeId,
    pub kind: StmtKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub enum StmtKind {
    FuncDef(FuncDef),
    Assign {
        target: Target,
        value: Expr,
    },
    AugAssign {
        target: Target,
        op: BinOp,
        value: Expr,
    },
    /// `elif` chains nest as a single `If` inside `else_body`.
    If {
        cond: Expr,
        then_body: Vec<Stmt>,
        else_body: Vec<Stmt>,
    },
    While {
        cond: Expr,
        body: Vec<Stmt>,
    },
    ForRange {
        var: Ident,
        start: Option<Expr>,
        stop: Expr,
        body: Vec<Stmt>,
    },
    Break,
    Continue,
    Pass,
    Return(Option<Expr>),
    Expr(Expr),
    QuantumBlock(Box<QuantumBlock>),
}

impl Stmt {
    pub fn node_kind(&self) -> NodeKind {
        match &self.kind {
            StmtKind::FuncDef(_) => NodeKind::FuncDef,
            StmtKind::Assign { .. } => NodeKind::Assign,
            StmtKind::AugAssign { .. } => NodeKind::AugAssign,
            StmtKind::If { .. } => NodeKind::If,
            StmtKind::While { .. } => NodeKind::While,
            StmtKind::ForRange { .. } => NodeKind::ForRange,
            StmtKind::Break => NodeKind::Break,
            StmtKind::Continue => NodeKind::Continue,
            StmtKind::Pass => NodeKind::Pass,
            StmtKind::Return(_) => NodeKind::Return,
            StmtKind::Expr(_) => NodeKind::ExprStmt,
            StmtKind::QuantumBlock(_) => NodeKind::QuantumBlock,
        }
    }

    /// Nested statement lists, in source order.
    pub fn bodies(&self) -> Vec<&Vec<Stmt>> {
        match &self.kind {
            StmtKind::FuncDef(f) => vec![&f.body],
            StmtKind::If { then_body, else_body, .. } => vec![then_body, else_body],
            StmtKind::While { body, .. } | StmtKind::ForRange { body, .. } => vec![body],
            _ => vec![],
        }
    }

    pub fn bodies_mut(&mut self) -> Vec<&mut Vec<Stmt>> {
        match &mut self.kind {
            StmtKind::FuncDef(f) => vec![&mut f.body],
            StmtKind::If { then_body, else_body, .. } => vec![then_body, else_body],
            StmtKind::While { body, .. } | StmtKind::ForRange { body, .. } => vec![body],
            _ => vec![],
        }
    }

    /// Expressions owned directly by this statement (not by nested bodies).
    pub fn exprs(&self) -> Vec<&Expr> {
        match &self.kind {
            StmtKind::Assign { target, value } | StmtKind::AugAssign { target, value, .. } => {
                let mut v = vec![];
                if let Target::Index { index, .. } = target {
                    v.push(index);
                }
                v.push(value);
                v
            }
            StmtKind::If { cond, .. } | StmtKind::While { cond, .. } => vec![cond],
            StmtKind::ForRange { start, stop, .. } => start.iter().chain(std::iter::once(stop)).collect(),
            StmtKind::Return(Some(e)) | StmtKind::Expr(e) => vec![e],
            _ => vec![],
        }
    }

    pub fn shape(&self) -> String {
        let mut out = String::new();
        write_stmt_shape(self, &mut out);
        out
    }
}

fn write_body_shape(body: &[Stmt], out: &mut String) {
    out.push('[');
    for (i, s) in body.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        write_stmt_shape(s, out);
    }
    out.push(']');
}

fn write_stmt_shape(s: &Stmt, out: &mut String) {
    match &s.kind {
        StmtKind::FuncDef(f) => {
            let _ = write!(out, "(def {} (", f.name.name);
            for (i, p) in f.params.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                let _ = write!(out, "{}:{:?}", p.name.name, p.ty);
            }
            let _ = write!(out, ") {:?} ", f.ret);
            write_body_shape(&f.body, out);
            out.push(')');
        }
        StmtKind::Assign { target, value } => {
            let _ = write!(out, "(= {} {})", target.shape(), value.shape());
        }
        StmtKind::AugAssign { target, op, value } => {
            let _ = write!(out, "({}= {} {})", op.symbol(), target.shape(), value.shape());
        }
        StmtKind::If { cond, then_body, else_body } => {
            let _ = write!(out, "(if {} ", cond.shape());
            write_body_shape(then_body, out);
            out.push(' ');
            write_body_shape(else_body, out);
            out.push(')');
        }
        StmtKind::While { cond, body } => {
            let _ = write!(out, "(while {} ", cond.shape());
            write_body_shape(body, out);
            out.push(')');
        }
        StmtKind::ForRange { var, start, stop, body } => {
            let start = start.as_ref().map(|e| e.shape()).unwrap_or_else(|| "_".into());
            let _ = write!(out, "(for {} {} {} ", var.name, start, stop.shape());
            write_body_shape(body, out);
            out.push(')');
        }
        StmtKind::Break => out.push_str("break"),
        StmtKind::Continue => out.push_str("continue"),
        StmtKind::Pass => out.push_str("pass"),
        StmtKind::Return(e) => {
            let _ = write!(out, "(return{})", e.as_ref().map(|e| format!(" {}", e.shape())).unwrap_or_default());
        }
        StmtKind::Expr(e) => out.push_str(&e.shape()),
        StmtKind::QuantumBlock(q) => {
            let _ = write!(out, "(quantum {} {} {:?})", q.entry, q.found.name, q.params);
        }
    }
}

/// A `# qplp: <id>` comment directive.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Directive {
    pub entry: String,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Module {
    pub body: Vec<Stmt>,
    pub span: Span,
    pub directives: Vec<Directive>,
}

impl Module {
    pub fn shape(&self) -> String {
        let mut out = String::from("(module ");
        write_body_shape(&self.body, &mut out);
        out.push(')');
        out
    }

    /// Visits every statement (pre-order, source order).
    pub fn walk_stmts<'a>(&'a self, f: &mut dyn FnMut(&'a Stmt)) {
        fn go<'a>(body: &'a [Stmt], f: &mut dyn FnMut(&'a Stmt)) {
            for s in body {
                f(s);
                for b in s.bodies() {
                    go(b, f);
                }
            }
        }
        go(&self.body, f);
    }

    /// Visits every expression node in the module.
    pub fn walk_exprs<'a>(&'a self, f: &mut dyn FnMut(&'a Expr)) {
        self.walk_stmts(&mut |s| {
            for e in s.exprs() {
                e.walk(f);
            }
        });
    }
}
