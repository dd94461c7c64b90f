//! Name resolution, type inference and constant folding.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::Serialize;

use crate::diag::{Diagnostic, Span};
use crate::frontend::ast::*;
use crate::value::{self, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum CliqType {
    Int,
    Float,
    Bool,
    /// Fixed-size array of Int; the size is at least 1.
    IntArray(usize),
}

impl CliqType {
    pub fn is_numeric(self) -> bool {
        matches!(self, CliqType::Int | CliqType::Float)
    }

    /// Name used in mapping-rule signatures.
    pub fn sig_name(self) -> &'static str {
        match self {
            CliqType::Int => "int",
            CliqType::Float => "float",
            CliqType::Bool => "bool",
            CliqType::IntArray(_) => "intarray",
        }
    }

    /// Whether a value of type `from` may be stored in a slot of this type.
    /// The only implicit conversion is Int widening to Float.
    pub fn accepts(self, from: CliqType) -> bool {
        self == from || (self == CliqType::Float && from == CliqType::Int)
    }
}

impl From<TypeAnn> for CliqType {
    fn from(t: TypeAnn) -> Self {
        match t {
            TypeAnn::Int => CliqType::Int,
            TypeAnn::Float => CliqType::Float,
            TypeAnn::Bool => CliqType::Bool,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Symbol {
    pub ty: CliqType,
    /// Assigned exactly once, unconditionally, to a compile-time constant.
    pub is_const: bool,
    pub value: Option<Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FunctionInfo {
    pub params: Vec<(String, CliqType)>,
    pub ret: Option<CliqType>,
    pub locals: BTreeMap<String, Symbol>,
}

pub const BUILTINS: &[&str] = &["len", "abs", "min", "max", "sum", "range", "print"];

/// A checked module: every expression node carries a type, and every
/// literal-only (or const-symbol-only) expression carries its folded value.
#[derive(Clone, Debug, PartialEq)]
pub struct TypedProgram {
    pub module: Module,
    pub types: HashMap<NodeId, CliqType>,
    pub consts: HashMap<NodeId, Value>,
    /// Module-scope variables.
    pub symbols: BTreeMap<String, Symbol>,
    pub functions: BTreeMap<String, FunctionInfo>,
    /// Statement ids of `print(...)` calls in source order; index k is
    /// materialized as output variable `__out_k`.
    pub prints: Vec<NodeId>,
}

impl TypedProgram {
    pub fn type_of(&self, e: &Expr) -> CliqType {
        self.types[&e.id]
    }

    pub fn const_of(&self, e: &Expr) -> Option<&Value> {
        self.consts.get(&e.id)
    }

    pub fn print_index(&self, stmt: NodeId) -> Option<usize> {
        self.prints.iter().position(|id| *id == stmt)
    }

    pub fn print_type(&self, k: usize) -> CliqType {
        let id = self.prints[k];
        let mut ty = CliqType::Int;
        self.module.walk_stmts(&mut |s| {
            if s.id == id {
                if let StmtKind::Expr(Expr { kind: ExprKind::Call { args, .. }, .. }) = &s.kind {
                    ty = self.types[&args[0].id];
                }
            }
        });
        ty
    }
}

pub fn check_program(module: Module) -> Result<TypedProgram, Vec<Diagnostic>> {
    let mut c = Checker { diags: vec![], types: HashMap::new(), consts: HashMap::new(), functions: BTreeMap::new(), prints: vec![] };
    let writes = WriteScan::of(&module.body);
    let mut scope = Scope::module(&module.body, writes);
    for s in &module.body {
        c.stmt(&mut scope, s);
    }
    if !c.diags.is_empty() {
        return Err(c.diags);
    }
    Ok(TypedProgram { module, types: c.types, consts: c.consts, symbols: scope.vars, functions: c.functions, prints: c.prints })
}

/// Per-scope summary of which names are written and how.
#[derive(Default)]
struct WriteScan {
    /// Number of writes (assignment, aug-assignment, element store).
    count: HashMap<String, usize>,
    /// Names written by something other than a plain top-level `name = ...`.
    irregular: HashSet<String>,
    loop_vars: HashSet<String>,
}

impl WriteScan {
    fn of(body: &[Stmt]) -> Self {
        let mut w = WriteScan::default();
        w.scan(body, true);
        w
    }

    fn scan(&mut self, body: &[Stmt], top: bool) {
        for s in body {
            match &s.kind {
                StmtKind::Assign { target, .. } => {
                    let name = target.base().name.clone();
                    *self.count.entry(name.clone()).or_default() += 1;
                    if !top || matches!(target, Target::Index { .. }) {
                        self.irregular.insert(name);
                    }
                }
                StmtKind::AugAssign { target, .. } => {
                    let name = target.base().name.clone();
                    *self.count.entry(name.clone()).or_default() += 1;
                    self.irregular.insert(name);
                }
                StmtKind::QuantumBlock(q) => {
                    *self.count.entry(q.found.name.clone()).or_default() += 1;
                    self.irregular.insert(q.found.name.clone());
                }
                StmtKind::ForRange { var, body, .. } => {
                    self.loop_vars.insert(var.name.clone());
                    self.scan(body, false);
                }
                StmtKind::If { then_body, else_body, .. } => {
                    self.scan(then_body, false);
                    self.scan(else_body, false);
                }
                StmtKind::While { body, .. } => self.scan(body, false),
                // Function bodies are their own scope.
                _ => {}
            }
        }
    }

    fn may_be_const(&self, name: &str) -> bool {
        self.count.get(name) == Some(&1) && !self.irregular.contains(name)
    }
}

struct FnCtx {
    ret: Option<CliqType>,
}

struct Scope {
    vars: BTreeMap<String, Symbol>,
    loop_vars: Vec<String>,
    writes: WriteScan,
    func: Option<FnCtx>,
}

impl Scope {
    fn module(_body: &[Stmt], writes: WriteScan) -> Self {
        Scope { vars: BTreeMap::new(), loop_vars: vec![], writes, func: None }
    }
}

struct Checker {
    diags: Vec<Diagnostic>,
    types: HashMap<NodeId, CliqType>,
    consts: HashMap<NodeId, Value>,
    functions: BTreeMap<String, FunctionInfo>,
    prints: Vec<NodeId>,
}

fn mismatch(msg: impl Into<String>, span: Span) -> Diagnostic {
    Diagnostic::error("E010", format!("type mismatch: {}", msg.into()), span)
}

fn type_name(t: CliqType) -> String {
    match t {
        CliqType::IntArray(n) => format!("int array of size {n}"),
        other => other.sig_name().to_string(),
    }
}

fn always_returns(body: &[Stmt]) -> bool {
    body.iter().any(|s| match &s.kind {
        StmtKind::Return(_) => true,
        StmtKind::If { then_body, else_body, .. } => always_returns(then_body) && always_returns(else_body),
        _ => false,
    })
}

impl Checker {
    fn err(&mut self, d: Diagnostic) -> Option<CliqType> {
        self.diags.push(d);
        None
    }

    fn record(&mut self, id: NodeId, ty: CliqType, value: Option<Value>) -> Option<CliqType> {
        self.types.insert(id, ty);
        if let Some(v) = value {
            self.consts.insert(id, v);
        }
        Some(ty)
    }

    fn is_function_or_builtin(&self, name: &str) -> bool {
        self.functions.contains_key(name) || BUILTINS.contains(&name)
    }

    fn stmt(&mut self, scope: &mut Scope, s: &Stmt) {
        match &s.kind {
            StmtKind::FuncDef(f) => self.funcdef(scope, s, f),
            StmtKind::Assign { target, value } => self.assign(scope, s, target, value),
            StmtKind::AugAssign { target, op, value } => self.aug_assign(scope, target, *op, value),
            StmtKind::If { cond, then_body, else_body } => {
                self.condition(scope, cond);
                self.body(scope, then_body);
                self.body(scope, else_body);
            }
            StmtKind::While { cond, body } => {
                self.condition(scope, cond);
                self.body(scope, body);
            }
            StmtKind::ForRange { var, start, stop, body } => {
                let clash = scope.vars.contains_key(&var.name)
                    || scope.writes.count.contains_key(&var.name)
                    || scope.loop_vars.contains(&var.name)
                    || self.is_function_or_builtin(&var.name);
                if clash {
                    self.diags.push(Diagnostic::error(
                        "E014",
                        format!("loop variable '{}' must not be assigned, reused or shadow another name", var.name),
                        var.span,
                    ));
                }
                for bound in start.iter().chain(std::iter::once(stop)) {
                    if let Some(t) = self.expr(scope, bound, false) {
                        if t != CliqType::Int {
                            self.diags.push(mismatch(format!("range bound must be int, found {}", type_name(t)), bound.span));
                        }
                    }
                }
                self.types.insert(var.id, CliqType::Int);
                scope.loop_vars.push(var.name.clone());
                self.body(scope, body);
                scope.loop_vars.pop();
            }
            StmtKind::Break | StmtKind::Continue | StmtKind::Pass => {}
            StmtKind::Return(value) => {
                let Some(ctx) = &scope.func else { return };
                let ret = ctx.ret;
                match (value, ret) {
                    (None, None) => {}
                    (Some(e), None) => {
                        self.expr(scope, e, false);
                        self.diags.push(mismatch("function declared '-> None' returns a value", e.span));
                    }
                    (None, Some(t)) => {
                        self.diags.push(mismatch(format!("missing return value of type {}", type_name(t)), s.span));
                    }
                    (Some(e), Some(t)) => {
                        if let Some(vt) = self.expr(scope, e, false) {
                            if !t.accepts(vt) {
                                self.diags.push(mismatch(
                                    format!("returns {} from a function declared -> {}", type_name(vt), type_name(t)),
                                    e.span,
                                ));
                            }
                        }
                    }
                }
            }
            StmtKind::Expr(e) => {
                if let ExprKind::Call { func, args } = &e.kind {
                    if func.name == "print" {
                        self.print(scope, s, e, args);
                        return;
                    }
                    if let Some(info) = self.functions.get(&func.name) {
                        if info.ret.is_none() {
                            self.call_user(scope, e, func, args, true);
                            return;
                        }
                    }
                }
                self.expr(scope, e, false);
            }
            StmtKind::QuantumBlock(q) => {
                match scope.vars.get(&q.found.name) {
                    Some(sym) if sym.ty != CliqType::Int => {
                        self.diags.push(mismatch(format!("'{}' must be int", q.found.name), q.found.span));
                    }
                    Some(_) => {}
                    None => {
                        let sym = Symbol { ty: CliqType::Int, is_const: false, value: None };
                        scope.vars.insert(q.found.name.clone(), sym);
                    }
                }
                self.types.insert(q.found.id, CliqType::Int);
            }
        }
    }

    fn body(&mut self, scope: &mut Scope, body: &[Stmt]) {
        for s in body {
            self.stmt(scope, s);
        }
    }

    fn condition(&mut self, scope: &mut Scope, cond: &Expr) {
        if let Some(t) = self.expr(scope, cond, false) {
            if t != CliqType::Bool {
                self.diags.push(Diagnostic::error(
                    "E013",
                    format!("condition must be bool, found {} (no implicit conversion)", type_name(t)),
                    cond.span,
                ));
            }
        }
    }

    fn print(&mut self, scope: &mut Scope, s: &Stmt, call: &Expr, args: &[Expr]) {
        if scope.func.is_some() {
            self.diags.push(Diagnostic::error("E002", "unsupported construct: print() inside a function body", call.span));
            return;
        }
        if args.len() != 1 {
            self.diags.push(mismatch("print() takes exactly one argument", call.span));
            return;
        }
        if let Some(t) = self.expr(scope, &args[0], false) {
            if matches!(t, CliqType::IntArray(_)) {
                self.diags.push(mismatch("print() takes a scalar", args[0].span));
                return;
            }
            self.types.insert(call.id, t);
            self.prints.push(s.id);
        }
    }

    fn funcdef(&mut self, scope: &mut Scope, s: &Stmt, f: &FuncDef) {
        let name = &f.name.name;
        if self.is_function_or_builtin(name) || scope.writes.count.contains_key(name) || scope.writes.loop_vars.contains(name) {
            self.diags.push(Diagnostic::error("E014", format!("redefinition of '{name}'"), f.name.span));
            return;
        }
        let ret = f.ret.map(CliqType::from);
        let mut inner = Scope { vars: BTreeMap::new(), loop_vars: vec![], writes: WriteScan::of(&f.body), func: Some(FnCtx { ret }) };
        let mut params = vec![];
        for p in &f.params {
            let ty = CliqType::from(p.ty);
            if inner.vars.contains_key(&p.name.name) || self.is_function_or_builtin(&p.name.name) {
                self.diags.push(Diagnostic::error("E014", format!("duplicate or reserved parameter '{}'", p.name.name), p.name.span));
            }
            self.types.insert(p.name.id, ty);
            inner.vars.insert(p.name.name.clone(), Symbol { ty, is_const: false, value: None });
            params.push((p.name.name.clone(), ty));
        }
        self.functions.insert(name.clone(), FunctionInfo { params: params.clone(), ret, locals: Default::default() });
        for st in &f.body {
            self.stmt(&mut inner, st);
        }
        if let Some(t) = ret {
            if !always_returns(&f.body) {
                self.diags.push(Diagnostic::error(
                    "E015",
                    format!("function '{name}' may finish without returning a {}", type_name(t)),
                    s.span,
                ));
            }
        }
        let locals = inner.vars.into_iter().filter(|(k, _)| !params.iter().any(|(p, _)| p == k)).collect();
        self.functions.insert(name.clone(), FunctionInfo { params, ret, locals });
    }

    fn assign(&mut self, scope: &mut Scope, s: &Stmt, target: &Target, value: &Expr) {
        match target {
            Target::Name(id) => {
                if scope.loop_vars.contains(&id.name) || scope.writes.loop_vars.contains(&id.name) || self.is_function_or_builtin(&id.name)
                {
                    self.diags.push(Diagnostic::error(
                        "E014",
                        format!("cannot assign to '{}' (loop variable, function or builtin)", id.name),
                        id.span,
                    ));
                    return;
                }
                let Some(vt) = self.expr(scope, value, true) else { return };
                if let CliqType::IntArray(_) = vt {
                    if scope.func.is_some() {
                        self.diags.push(Diagnostic::error("E002", "unsupported construct: arrays inside a function body", value.span));
                        return;
                    }
                    if !matches!(value.kind, ExprKind::ArrayLit(_) | ExprKind::BinOp { .. }) {
                        self.diags.push(Diagnostic::error(
                            "E002",
                            "unsupported construct: array aliasing (assign a list literal instead)",
                            value.span,
                        ));
                        return;
                    }
                }
                let folded = self.consts.get(&value.id).cloned();
                match scope.vars.get(&id.name) {
                    Some(sym) => {
                        let ty = sym.ty;
                        if !ty.accepts(vt) {
                            self.diags.push(mismatch(
                                format!("'{}' has type {} but is assigned {}", id.name, type_name(ty), type_name(vt)),
                                s.span,
                            ));
                        }
                        self.types.insert(id.id, ty);
                    }
                    None => {
                        let is_const = scope.func.is_none() && scope.writes.may_be_const(&id.name) && folded.is_some();
                        let value = if is_const { folded } else { None };
                        scope.vars.insert(id.name.clone(), Symbol { ty: vt, is_const, value });
                        self.types.insert(id.id, vt);
                    }
                }
            }
            Target::Index { id, array, index, .. } => {
                let at = self.array_name(scope, array);
                let it = self.expr(scope, index, false);
                let vt = self.expr(scope, value, false);
                if let Some(it) = it {
                    if it != CliqType::Int {
                        self.diags.push(mismatch(format!("array index must be int, found {}", type_name(it)), index.span));
                    }
                }
                if let Some(vt) = vt {
                    if vt != CliqType::Int {
                        self.diags.push(mismatch(format!("array elements are int, found {}", type_name(vt)), value.span));
                    }
                }
                if at.is_some() {
                    self.types.insert(*id, CliqType::Int);
                }
            }
        }
    }

    fn array_name(&mut self, scope: &Scope, array: &Ident) -> Option<usize> {
        match self.lookup(scope, &array.name, array.span)? {
            (CliqType::IntArray(n), _) => {
                self.types.insert(array.id, CliqType::IntArray(n));
                Some(n)
            }
            (t, _) => self.err(mismatch(format!("'{}' is {}, not an array", array.name, type_name(t)), array.span)).map(|_| 0),
        }
    }

    fn aug_assign(&mut self, scope: &mut Scope, target: &Target, op: BinOp, value: &Expr) {
        let (tt, span) = match target {
            Target::Name(id) => {
                if scope.loop_vars.contains(&id.name) || scope.writes.loop_vars.contains(&id.name) {
                    self.diags.push(Diagnostic::error("E014", format!("cannot assign to loop variable '{}'", id.name), id.span));
                    return;
                }
                let Some((t, _)) = self.lookup(scope, &id.name, id.span) else { return };
                self.types.insert(id.id, t);
                (t, id.span)
            }
            Target::Index { id, array, index, span } => {
                if self.array_name(scope, array).is_none() {
                    return;
                }
                if let Some(it) = self.expr(scope, index, false) {
                    if it != CliqType::Int {
                        self.diags.push(mismatch("array index must be int", index.span));
                    }
                }
                self.types.insert(*id, CliqType::Int);
                (CliqType::Int, *span)
            }
        };
        let Some(vt) = self.expr(scope, value, false) else { return };
        if let Some(rt) = self.binop_type(op, tt, vt, span.to(value.span)) {
            if !tt.accepts(rt) {
                self.diags.push(mismatch(
                    format!("augmented assignment would change type {} to {}", type_name(tt), type_name(rt)),
                    span.to(value.span),
                ));
            }
        }
    }

    fn lookup(&mut self, scope: &Scope, name: &str, span: Span) -> Option<(CliqType, Option<Value>)> {
        if scope.loop_vars.iter().any(|v| v == name) {
            return Some((CliqType::Int, None));
        }
        if let Some(sym) = scope.vars.get(name) {
            return Some((sym.ty, sym.value.clone().filter(|_| sym.is_const)));
        }
        if self.is_function_or_builtin(name) {
            self.err(mismatch(format!("function '{name}' used as a value"), span));
            return None;
        }
        let hint = if scope.func.is_some() { " (module variables are not visible inside functions)" } else { "" };
        self.err(Diagnostic::error("E011", format!("undefined name '{name}'{hint}"), span));
        None
    }

    fn binop_type(&mut self, op: BinOp, l: CliqType, r: CliqType, span: Span) -> Option<CliqType> {
        if !l.is_numeric() || !r.is_numeric() {
            return self.err(mismatch(
                format!("operator '{}' needs numeric operands, found {} and {}", op.symbol(), type_name(l), type_name(r)),
                span,
            ));
        }
        let both_int = l == CliqType::Int && r == CliqType::Int;
        Some(match op {
            BinOp::Div => CliqType::Float,
            BinOp::FloorDiv | BinOp::Mod => {
                if !both_int {
                    return self.err(mismatch(format!("operator '{}' needs int operands", op.symbol()), span));
                }
                CliqType::Int
            }
            _ if both_int => CliqType::Int,
            _ => CliqType::Float,
        })
    }

    /// Types an expression. `array_ok` admits array-valued results (only the
    /// right-hand side of a plain assignment).
    fn expr(&mut self, scope: &Scope, e: &Expr, array_ok: bool) -> Option<CliqType> {
        let ty = self.expr_inner(scope, e, array_ok)?;
        if matches!(ty, CliqType::IntArray(_)) && !array_ok {
            self.types.remove(&e.id);
            return self.err(mismatch("an array value is not allowed here", e.span));
        }
        Some(ty)
    }

    fn expr_inner(&mut self, scope: &Scope, e: &Expr, array_ok: bool) -> Option<CliqType> {
        match &e.kind {
            ExprKind::IntLit(v) => {
                if *v > i32::MAX as u64 {
                    return self.err(mismatch("integer literal does not fit in 32 bits", e.span));
                }
                self.record(e.id, CliqType::Int, Some(Value::Int(*v as i32)))
            }
            ExprKind::FloatLit(v) => self.record(e.id, CliqType::Float, Some(Value::Float(*v))),
            ExprKind::BoolLit(b) => self.record(e.id, CliqType::Bool, Some(Value::Bool(*b))),
            ExprKind::Name(name) => {
                let (ty, value) = self.lookup(scope, name, e.span)?;
                self.record(e.id, ty, value)
            }
            ExprKind::ArrayLit(items) => {
                if !array_ok {
                    return self.err(mismatch("array literals may only appear as an assignment value", e.span));
                }
                if items.is_empty() {
                    return self.err(Diagnostic::error("E012", "array size must be at least 1", e.span));
                }
                let mut values = Some(vec![]);
                for item in items {
                    match self.expr(scope, item, false) {
                        Some(CliqType::Int) => {}
                        Some(t) => {
                            self.diags.push(mismatch(format!("array elements are int, found {}", type_name(t)), item.span));
                        }
                        None => {}
                    }
                    match (self.consts.get(&item.id), values.as_mut()) {
                        (Some(Value::Int(v)), Some(vs)) => vs.push(*v),
                        _ => values = None,
                    }
                }
                self.record(e.id, CliqType::IntArray(items.len()), values.map(Value::IntArray))
            }
            ExprKind::BinOp { op: BinOp::Mul, lhs, rhs } if matches!(lhs.kind, ExprKind::ArrayLit(_)) => {
                let lt = self.expr(scope, lhs, array_ok)?;
                let CliqType::IntArray(n) = lt else { return None };
                let rt = self.expr(scope, rhs, false)?;
                if rt != CliqType::Int {
                    return self.err(mismatch("array repetition count must be int", rhs.span));
                }
                let Some(Value::Int(count)) = self.consts.get(&rhs.id).cloned() else {
                    return self.err(Diagnostic::error("E012", "array size is not a compile-time constant", rhs.span));
                };
                if count < 1 {
                    return self.err(Diagnostic::error("E012", "array size must be at least 1", rhs.span));
                }
                let size = n * count as usize;
                let value = match self.consts.get(&lhs.id) {
                    Some(Value::IntArray(xs)) => Some(Value::IntArray(xs.iter().cycle().take(size).copied().collect())),
                    _ => None,
                };
                self.record(e.id, CliqType::IntArray(size), value)
            }
            ExprKind::BinOp { op, lhs, rhs } => {
                let lt = self.expr(scope, lhs, false);
                let rt = self.expr(scope, rhs, false);
                let ty = self.binop_type(*op, lt?, rt?, e.span)?;
                let value = self.fold2(lhs, rhs, |a, b| value::apply_binop(*op, a, b).ok());
                self.record(e.id, ty, value)
            }
            ExprKind::UnaryOp { op, operand } => {
                let t = self.expr(scope, operand, false)?;
                match op {
                    UnaryOp::Neg if t.is_numeric() => {
                        let v = self.consts.get(&operand.id).map(value::negate);
                        self.record(e.id, t, v)
                    }
                    UnaryOp::Not if t == CliqType::Bool => {
                        let v = self.consts.get(&operand.id).and_then(Value::as_bool).map(|b| Value::Bool(!b));
                        self.record(e.id, t, v)
                    }
                    UnaryOp::Neg => self.err(mismatch(format!("cannot negate {}", type_name(t)), e.span)),
                    UnaryOp::Not => self.err(mismatch(format!("'not' needs a bool, found {}", type_name(t)), e.span)),
                }
            }
            ExprKind::Compare { op, lhs, rhs } => {
                let lt = self.expr(scope, lhs, false);
                let rt = self.expr(scope, rhs, false);
                let (lt, rt) = (lt?, rt?);
                let ok = (lt.is_numeric() && rt.is_numeric())
                    || (lt == CliqType::Bool && rt == CliqType::Bool && matches!(op, CmpOp::Eq | CmpOp::Ne));
                if !ok {
                    return self.err(mismatch(format!("cannot compare {} {} {}", type_name(lt), op.symbol(), type_name(rt)), e.span));
                }
                let value = self.fold2(lhs, rhs, |a, b| Some(Value::Bool(value::apply_compare(*op, a, b))));
                self.record(e.id, CliqType::Bool, value)
            }
            ExprKind::BoolOp { op, lhs, rhs } => {
                let lt = self.expr(scope, lhs, false);
                let rt = self.expr(scope, rhs, false);
                if lt? != CliqType::Bool || rt? != CliqType::Bool {
                    return self.err(mismatch("'and'/'or' need bool operands", e.span));
                }
                let value = self.fold2(lhs, rhs, |a, b| {
                    let (a, b) = (a.as_bool()?, b.as_bool()?);
                    Some(Value::Bool(if *op == BoolOpKind::And { a && b } else { a || b }))
                });
                self.record(e.id, CliqType::Bool, value)
            }
            ExprKind::Index { array, index } => {
                let Some(name) = array.as_name() else {
                    return self.err(mismatch("only named arrays can be indexed", array.span));
                };
                let ident = Ident { id: array.id, name: name.to_string(), span: array.span };
                let n = self.array_name(scope, &ident);
                let it = self.expr(scope, index, false);
                n?;
                if it? != CliqType::Int {
                    return self.err(mismatch("array index must be int", index.span));
                }
                if let Some(Value::IntArray(_)) = self.consts.get(&array.id) {
                } else if let Some((_, Some(v))) = self.lookup_quiet(scope, name) {
                    self.consts.insert(array.id, v);
                }
                let value = self.fold2(array, index, |a, i| match (a, i) {
                    (Value::IntArray(xs), Value::Int(i)) if *i >= 0 => xs.get(*i as usize).map(|v| Value::Int(*v)),
                    _ => None,
                });
                self.record(e.id, CliqType::Int, value)
            }
            ExprKind::Call { func, args } => self.call(scope, e, func, args),
        }
    }

    fn lookup_quiet(&self, scope: &Scope, name: &str) -> Option<(CliqType, Option<Value>)> {
        scope.vars.get(name).map(|s| (s.ty, s.value.clone().filter(|_| s.is_const)))
    }

    fn fold2(&self, a: &Expr, b: &Expr, f: impl FnOnce(&Value, &Value) -> Option<Value>) -> Option<Value> {
        f(self.consts.get(&a.id)?, self.consts.get(&b.id)?)
    }

    fn call(&mut self, scope: &Scope, e: &Expr, func: &Ident, args: &[Expr]) -> Option<CliqType> {
        let arity = |c: &mut Checker, ok: bool| {
            if !ok {
                c.err(mismatch(format!("wrong number of arguments to {}()", func.name), e.span));
            }
            ok
        };
        match func.name.as_str() {
            "print" => self.err(mismatch("print() returns no value", e.span)),
            "range" => self.err(mismatch("range() may only appear in a for loop header", e.span)),
            "len" => {
                if !arity(self, args.len() == 1) {
                    return None;
                }
                let n = self.array_arg(scope, &args[0])?;
                self.record(e.id, CliqType::Int, Some(Value::Int(n as i32)))
            }
            "sum" => {
                if !arity(self, args.len() == 1) {
                    return None;
                }
                self.array_arg(scope, &args[0])?;
                let v = match self.consts.get(&args[0].id) {
                    Some(Value::IntArray(xs)) => Some(Value::Int(xs.iter().fold(0i32, |a, x| a.wrapping_add(*x)))),
                    _ => None,
                };
                self.record(e.id, CliqType::Int, v)
            }
            "abs" => {
                if !arity(self, args.len() == 1) {
                    return None;
                }
                let t = self.expr(scope, &args[0], false)?;
                if !t.is_numeric() {
                    return self.err(mismatch(format!("abs() needs a number, found {}", type_name(t)), args[0].span));
                }
                let v = self.consts.get(&args[0].id).map(value::abs_value);
                self.record(e.id, t, v)
            }
            "min" | "max" => {
                let want_max = func.name == "max";
                if args.is_empty() {
                    return self.err(mismatch(format!("{}() needs at least one argument", func.name), e.span));
                }
                if args.len() == 1 {
                    self.array_arg(scope, &args[0])?;
                    let v = match self.consts.get(&args[0].id) {
                        Some(Value::IntArray(xs)) => {
                            let vals: Vec<Value> = xs.iter().map(|x| Value::Int(*x)).collect();
                            value::extreme(&vals, want_max)
                        }
                        _ => None,
                    };
                    return self.record(e.id, CliqType::Int, v);
                }
                let mut tys = vec![];
                for a in args {
                    tys.push(self.expr(scope, a, false));
                }
                let tys: Option<Vec<CliqType>> = tys.into_iter().collect();
                let tys = tys?;
                let first = tys[0];
                if !first.is_numeric() || tys.iter().any(|t| *t != first) {
                    return self.err(mismatch(format!("{}() arguments must all be int or all be float", func.name), e.span));
                }
                let vals: Option<Vec<Value>> = args.iter().map(|a| self.consts.get(&a.id).cloned()).collect();
                let v = vals.and_then(|vs| value::extreme(&vs, want_max));
                self.record(e.id, first, v)
            }
            _ => self.call_user(scope, e, func, args, false),
        }
    }

    fn array_arg(&mut self, scope: &Scope, arg: &Expr) -> Option<usize> {
        let Some(name) = arg.as_name() else {
            return self.err(mismatch("expected an array variable", arg.span)).map(|_| 0);
        };
        let ident = Ident { id: arg.id, name: name.to_string(), span: arg.span };
        let n = self.array_name(scope, &ident)?;
        if let Some((_, Some(v))) = self.lookup_quiet(scope, name) {
            self.consts.insert(arg.id, v);
        }
        Some(n)
    }

    fn call_user(&mut self, scope: &Scope, e: &Expr, func: &Ident, args: &[Expr], as_stmt: bool) -> Option<CliqType> {
        let Some(info) = self.functions.get(&func.name).cloned() else {
            let hint = if scope.vars.contains_key(&func.name) { " (not a function)" } else { "" };
            return self.err(Diagnostic::error("E011", format!("undefined function '{}'{hint}", func.name), func.span));
        };
        if info.params.len() != args.len() {
            return self.err(mismatch(format!("{}() takes {} argument(s), {} given", func.name, info.params.len(), args.len()), e.span));
        }
        let mut ok = true;
        for (a, (pname, pt)) in args.iter().zip(&info.params) {
            match self.expr(scope, a, false) {
                Some(t) if pt.accepts(t) => {}
                Some(t) => {
                    ok = false;
                    self.diags.push(mismatch(
                        format!("argument '{pname}' of {}() expects {}, found {}", func.name, type_name(*pt), type_name(t)),
                        a.span,
                    ));
                }
                None => ok = false,
            }
        }
        if !ok {
            return None;
        }
        match info.ret {
            Some(t) => self.record(e.id, t, None),
            None if as_stmt => None,
            None => self.err(mismatch(format!("{}() returns no value", func.name), e.span)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diag::SourceModule;
    use crate::frontend::analyze;

    fn tp(text: &str) -> TypedProgram {
        analyze(&SourceModule::new("t.cliq", text)).unwrap_or_else(|d| panic!("{d:?}"))
    }

    fn codes(text: &str) -> Vec<&'static str> {
        analyze(&SourceModule::new("t.cliq", text)).expect_err("expected diagnostics").codes()
    }

    fn ty(tp: &TypedProgram, name: &str) -> CliqType {
        tp.symbols[name].ty
    }

    #[test]
    fn int_arithmetic_stays_int() {
        let p = tp("x = 1\ny = x + 2\n");
        assert_eq!(ty(&p, "x"), CliqType::Int);
        assert_eq!(ty(&p, "y"), CliqType::Int);
    }

    #[test]
    fn true_division_is_float() {
        assert_eq!(ty(&tp("x = 1 / 2\n"), "x"), CliqType::Float);
        assert_eq!(ty(&tp("x = 7 // 2\n"), "x"), CliqType::Int);
        assert_eq!(ty(&tp("x = 1 + 0.5\n"), "x"), CliqType::Float);
    }

    #[test]
    fn arrays_carry_their_size() {
        let p = tp("a = [1, 2, 3]\nb = [0] * (2 + 2)\n");
        assert_eq!(ty(&p, "a"), CliqType::IntArray(3));
        assert_eq!(ty(&p, "b"), CliqType::IntArray(4));
    }

    #[test]
    fn literal_expressions_fold() {
        let p = tp("n = 2 * 3 + 1\n");
        assert!(p.symbols["n"].is_const);
        assert_eq!(p.symbols["n"].value, Some(Value::Int(7)));
    }

    #[test]
    fn error_codes() {
        assert_eq!(codes("if 3:\n    x = 1\n"), ["E013"]);
        assert_eq!(codes("x = 1\nx = True\n"), ["E010"]);
        assert_eq!(codes("print(y)\n"), ["E011"]);
        assert!(codes("n = 0\nn = n + 3\na = [0] * n\n").contains(&"E012"));
        assert_eq!(codes("def f(x: int) -> int:\n    if x > 0:\n        return 1\n"), ["E015"]);
    }

    #[test]
    fn functions_may_recurse() {
        let p = tp("def f(n: int) -> int:\n    if n < 2:\n        return 1\n    return n * f(n - 1)\n\nprint(f(5))\n");
        assert_eq!(p.functions["f"].ret, Some(CliqType::Int));
    }

    #[test]
    fn functions_do_not_see_module_variables() {
        assert_eq!(codes("g = 3\ndef f(x: int) -> int:\n    return x + g\n"), ["E011"]);
    }
}
