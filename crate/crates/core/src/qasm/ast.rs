//! The OpenQASM 3.0 subset produced by the backend.

use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Default, Serialize)]
pub struct QasmProgram {
    pub includes: Vec<String>,
    pub decls: Vec<Decl>,
    pub stmts: Vec<QStmt>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum QType {
    Int32,
    Float64,
    Bool,
    Bit(usize),
    IntArray(usize),
    Qubit(usize),
}

impl QType {
    pub fn is_quantum(self) -> bool {
        matches!(self, QType::Qubit(_))
    }

    /// Scalar types usable in casts, parameters and return positions.
    pub fn is_scalar(self) -> bool {
        matches!(self, QType::Int32 | QType::Float64 | QType::Bool)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Decl {
    pub ty: QType,
    pub name: String,
    pub output: bool,
    pub init: Option<QExpr>,
}

impl Decl {
    pub fn new(ty: QType, name: impl Into<String>) -> Self {
        Decl { ty, name: name.into(), output: false, init: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QArg {
    pub reg: String,
    pub index: Option<usize>,
}

impl QArg {
    pub fn reg(reg: impl Into<String>) -> Self {
        QArg { reg: reg.into(), index: None }
    }

    pub fn bit(reg: impl Into<String>, index: usize) -> Self {
        QArg { reg: reg.into(), index: Some(index) }
    }
}

pub const GATES: &[(&str, usize)] = &[("h", 1), ("x", 1), ("z", 1), ("cx", 2)];

pub fn gate_arity(name: &str) -> Option<usize> {
    GATES.iter().find(|(g, _)| *g == name).map(|(_, a)| *a)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GateOp {
    pub name: String,
    pub ctrl: usize,
    pub operands: Vec<QArg>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LValue {
    pub name: String,
    pub index: Option<QExpr>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum QStmt {
    Decl(Decl),
    Assign {
        target: LValue,
        value: QExpr,
    },
    /// `bits = measure qubits;` over whole registers.
    Measure {
        bits: String,
        qubits: String,
    },
    Reset(QArg),
    Gate(GateOp),
    If {
        cond: QExpr,
        then_body: Vec<QStmt>,
        else_body: Option<Vec<QStmt>>,
    },
    While {
        cond: QExpr,
        body: Vec<QStmt>,
    },
    /// `for int[32] var in [start:end] { ... }`, end inclusive.
    For {
        var: String,
        start: QExpr,
        end: QExpr,
        body: Vec<QStmt>,
    },
    Break,
    Continue,
    Return(Option<QExpr>),
    Expr(QExpr),
    Def {
        name: String,
        params: Vec<(QType, String)>,
        ret: Option<QType>,
        body: Vec<QStmt>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum QBinOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Pow,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

impl QBinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            QBinOp::Add => "+",
            QBinOp::Sub => "-",
            QBinOp::Mul => "*",
            QBinOp::Div => "/",
            QBinOp::Mod => "%",
            QBinOp::Pow => "**",
            QBinOp::Eq => "==",
            QBinOp::Ne => "!=",
            QBinOp::Lt => "<",
            QBinOp::Le => "<=",
            QBinOp::Gt => ">",
            QBinOp::Ge => ">=",
            QBinOp::And => "&&",
            QBinOp::Or => "||",
        }
    }

    /// Binding strength; higher binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            QBinOp::Or => 1,
            QBinOp::And => 2,
            QBinOp::Eq | QBinOp::Ne => 3,
            QBinOp::Lt | QBinOp::Le | QBinOp::Gt | QBinOp::Ge => 4,
            QBinOp::Add | QBinOp::Sub => 5,
            QBinOp::Mul | QBinOp::Div | QBinOp::Mod => 6,
            QBinOp::Pow => 8,
        }
    }

    pub const ALL: [QBinOp; 14] = [
        QBinOp::Add,
        QBinOp::Sub,
        QBinOp::Mul,
        QBinOp::Div,
        QBinOp::Mod,
        QBinOp::Pow,
        QBinOp::Eq,
        QBinOp::Ne,
        QBinOp::Lt,
        QBinOp::Le,
        QBinOp::Gt,
        QBinOp::Ge,
        QBinOp::And,
        QBinOp::Or,
    ];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum QUnOp {
    Neg,
    Not,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum QExpr {
    Int(u64),
    Float(f64),
    Bool(bool),
    Ident(String),
    Index(String, Box<QExpr>),
    Binary(QBinOp, Box<QExpr>, Box<QExpr>),
    Unary(QUnOp, Box<QExpr>),
    Paren(Box<QExpr>),
    Call(String, Vec<QExpr>),
    Cast(QType, Box<QExpr>),
}

impl QExpr {
    pub fn ident(name: impl Into<String>) -> Self {
        QExpr::Ident(name.into())
    }

    pub fn paren(e: QExpr) -> Self {
        QExpr::Paren(Box::new(e))
    }

    pub fn binary(op: QBinOp, l: QExpr, r: QExpr) -> Self {
        QExpr::Binary(op, Box::new(l), Box::new(r))
    }

    /// A signed integer literal; negatives are written `(-n)`.
    pub fn int(v: i64) -> Self {
        if v < 0 {
            QExpr::paren(QExpr::Unary(QUnOp::Neg, Box::new(QExpr::Int(v.unsigned_abs()))))
        } else {
            QExpr::Int(v as u64)
        }
    }

    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a QExpr)) {
        f(self);
        match self {
            QExpr::Index(_, i) => i.walk(f),
            QExpr::Binary(_, l, r) => {
                l.walk(f);
                r.walk(f);
            }
            QExpr::Unary(_, e) | QExpr::Paren(e) | QExpr::Cast(_, e) => e.walk(f),
            QExpr::Call(_, args) => args.iter().for_each(|a| a.walk(f)),
            _ => {}
        }
    }
}

impl QStmt {
    pub fn bodies(&self) -> Vec<&Vec<QStmt>> {
        match self {
            QStmt::If { then_body, else_body, .. } => {
                let mut v = vec![then_body];
                if let Some(e) = else_body {
                    v.push(e);
                }
                v
            }
            QStmt::While { body, .. } | QStmt::For { body, .. } | QStmt::Def { body, .. } => vec![body],
            _ => vec![],
        }
    }
}

impl QasmProgram {
    pub fn walk_stmts<'a>(&'a self, f: &mut dyn FnMut(&'a QStmt)) {
        fn go<'a>(body: &'a [QStmt], f: &mut dyn FnMut(&'a QStmt)) {
            for s in body {
                f(s);
                for b in s.bodies() {
                    go(b, f);
                }
            }
        }
        go(&self.stmts, f);
    }

    pub fn qubit_count(&self) -> usize {
        self.decls
            .iter()
            .map(|d| match d.ty {
                QType::Qubit(n) => n,
                _ => 0,
            })
            .sum()
    }

    /// Names of `output` declarations in declaration order.
    pub fn outputs(&self) -> Vec<&Decl> {
        self.decls.iter().filter(|d| d.output).collect()
    }
}
