//! Big-step reference interpreter for checked CliqLang.
//!
//! Values follow the static types: an Int stored into a Float-typed
//! variable, parameter or return slot is widened on the way in.

use std::collections::{HashMap, VecDeque};

use crate::diag::{Diagnostic, Span};
use crate::frontend::ast::*;
use crate::frontend::{CliqType, TypedProgram};
use crate::value::{abs_value, apply_binop, apply_compare, extreme, negate, Value};

use super::exec::{Branch, ExecutionResult, Mode};
use super::interp::STEP_LIMIT;

const MAX_CALL_DEPTH: usize = 512;

/// Final outputs and the full print log of one reference run.
#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceRun {
    /// Last value printed by each `print` site, indexed like `__out_k`.
    pub outputs: Vec<Option<Value>>,
    /// Every value printed, in execution order, with its site index.
    pub printed: Vec<(usize, Value)>,
}

/// `found` values handed to quantum blocks, keyed by site index and
/// consumed in execution order.
pub type FoundScript = HashMap<usize, VecDeque<i32>>;

enum Flow {
    Normal,
    Break,
    Continue,
    Return(Option<Value>),
}

struct Ref<'a> {
    tp: &'a TypedProgram,
    funcs: HashMap<&'a str, &'a FuncDef>,
    globals: HashMap<String, Value>,
    frames: Vec<HashMap<String, Value>>,
    outputs: Vec<Option<Value>>,
    printed: Vec<(usize, Value)>,
    script: FoundScript,
    steps: u64,
}

fn rt(msg: impl Into<String>, span: Span) -> Diagnostic {
    Diagnostic::error("E060", msg, span)
}

fn widen(v: Value, ty: CliqType) -> Value {
    match (v, ty) {
        (Value::Int(x), CliqType::Float) => Value::Float(x as f64),
        (v, _) => v,
    }
}

impl<'a> Ref<'a> {
    fn vars(&mut self) -> &mut HashMap<String, Value> {
        self.frames.last_mut().unwrap_or(&mut self.globals)
    }

    fn step(&mut self, span: Span) -> Result<(), Diagnostic> {
        self.steps += 1;
        if self.steps > STEP_LIMIT {
            return Err(rt(format!("step limit of {STEP_LIMIT} exceeded"), span));
        }
        Ok(())
    }

    fn read(&mut self, name: &str, span: Span) -> Result<Value, Diagnostic> {
        self.vars().get(name).cloned().ok_or_else(|| rt(format!("'{name}' read before assignment"), span))
    }

    fn index_of(&mut self, array: &str, index: &Expr) -> Result<usize, Diagnostic> {
        let i = self.eval(index)?.as_int().expect("checked int index");
        let len = match self.vars().get(array) {
            Some(Value::IntArray(xs)) => xs.len(),
            _ => return Err(rt(format!("'{array}' read before assignment"), index.span)),
        };
        match usize::try_from(i) {
            Ok(u) if u < len => Ok(u),
            _ => Err(rt(format!("index {i} out of range for '{array}' of length {len}"), index.span)),
        }
    }

    fn array(&mut self, e: &Expr) -> Result<Vec<i32>, Diagnostic> {
        match self.eval(e)? {
            Value::IntArray(xs) => Ok(xs),
            _ => unreachable!("checked array operand"),
        }
    }

    fn eval(&mut self, e: &Expr) -> Result<Value, Diagnostic> {
        let ty = self.tp.type_of(e);
        Ok(match &e.kind {
            ExprKind::IntLit(v) => Value::Int(*v as u32 as i32),
            ExprKind::FloatLit(v) => Value::Float(*v),
            ExprKind::BoolLit(b) => Value::Bool(*b),
            ExprKind::Name(n) => self.read(n, e.span)?,
            ExprKind::ArrayLit(items) => {
                let mut xs = vec![];
                for it in items {
                    xs.push(self.eval(it)?.as_int().expect("checked int element"));
                }
                Value::IntArray(xs)
            }
            ExprKind::Index { array, index } => {
                let name = array.as_name().expect("checked array name");
                let i = self.index_of(name, index)?;
                let Some(Value::IntArray(xs)) = self.vars().get(name) else { unreachable!() };
                Value::Int(xs[i])
            }
            ExprKind::BinOp { op: BinOp::Mul, lhs, rhs } if matches!(ty, CliqType::IntArray(_)) => {
                let xs = self.array(lhs)?;
                let n = self.eval(rhs)?.as_int().expect("checked repeat count");
                Value::IntArray(xs.iter().copied().cycle().take(xs.len() * n.max(0) as usize).collect())
            }
            ExprKind::BinOp { op, lhs, rhs } => {
                let a = self.eval(lhs)?;
                let b = self.eval(rhs)?;
                apply_binop(*op, &a, &b).map_err(|err| rt(err.to_string(), e.span))?
            }
            ExprKind::UnaryOp { op: UnaryOp::Neg, operand } => negate(&self.eval(operand)?),
            ExprKind::UnaryOp { op: UnaryOp::Not, operand } => Value::Bool(!self.eval(operand)?.as_bool().unwrap()),
            ExprKind::Compare { op, lhs, rhs } => {
                let a = self.eval(lhs)?;
                let b = self.eval(rhs)?;
                Value::Bool(apply_compare(*op, &a, &b))
            }
            ExprKind::BoolOp { op, lhs, rhs } => {
                let a = self.eval(lhs)?.as_bool().unwrap();
                let short = match op {
                    BoolOpKind::And => !a,
                    BoolOpKind::Or => a,
                };
                Value::Bool(if short { a } else { self.eval(rhs)?.as_bool().unwrap() })
            }
            ExprKind::Call { func, args } => self.call(func, args, ty, e.span)?.unwrap_or(Value::Bool(false)),
        })
    }

    fn call(&mut self, func: &Ident, args: &[Expr], ty: CliqType, span: Span) -> Result<Option<Value>, Diagnostic> {
        let scalars = |me: &mut Self| -> Result<Vec<Value>, Diagnostic> {
            if args.len() == 1 && matches!(me.tp.type_of(&args[0]), CliqType::IntArray(_)) {
                return Ok(me.array(&args[0])?.into_iter().map(Value::Int).collect());
            }
            args.iter().map(|a| me.eval(a)).collect()
        };
        Ok(Some(match func.name.as_str() {
            "len" => Value::Int(self.array(&args[0])?.len() as i32),
            "sum" => Value::Int(self.array(&args[0])?.iter().fold(0i32, |a, x| a.wrapping_add(*x))),
            "abs" => abs_value(&self.eval(&args[0])?),
            "min" | "max" => {
                let vals: Vec<Value> = scalars(self)?.into_iter().map(|v| widen(v, ty)).collect();
                extreme(&vals, func.name == "max").ok_or_else(|| rt(format!("{}() of an empty array", func.name), span))?
            }
            "print" => unreachable!("print is a statement"),
            name => {
                let f = self.funcs[name];
                let info = &self.tp.functions[name];
                let mut frame = HashMap::new();
                for (a, (p, pt)) in args.iter().zip(&info.params) {
                    let v = self.eval(a)?;
                    frame.insert(p.clone(), widen(v, *pt));
                }
                if self.frames.len() >= MAX_CALL_DEPTH {
                    return Err(rt("maximum call depth exceeded", span));
                }
                self.frames.push(frame);
                let flow = self.body(&f.body);
                self.frames.pop();
                let ret = match flow? {
                    Flow::Return(v) => v,
                    _ => None,
                };
                return Ok(match (info.ret, ret) {
                    (Some(t), Some(v)) => Some(widen(v, t)),
                    (Some(_), None) => return Err(rt(format!("'{name}' ended without returning a value"), span)),
                    (None, _) => None,
                });
            }
        }))
    }

    fn body(&mut self, body: &[Stmt]) -> Result<Flow, Diagnostic> {
        for s in body {
            match self.stmt(s)? {
                Flow::Normal => {}
                other => return Ok(other),
            }
        }
        Ok(Flow::Normal)
    }

    fn store(&mut self, target: &Target, v: Value) -> Result<(), Diagnostic> {
        match target {
            Target::Name(id) => {
                let v = widen(v, self.tp.types[&id.id]);
                self.vars().insert(id.name.clone(), v);
            }
            Target::Index { array, index, .. } => {
                let i = self.index_of(&array.name, index)?;
                let Some(Value::IntArray(xs)) = self.vars().get_mut(&array.name) else { unreachable!() };
                xs[i] = v.as_int().expect("checked int element");
            }
        }
        Ok(())
    }

    fn stmt(&mut self, s: &Stmt) -> Result<Flow, Diagnostic> {
        self.step(s.span)?;
        match &s.kind {
            StmtKind::FuncDef(_) => {}
            StmtKind::Assign { target, value } => {
                let v = self.eval(value)?;
                self.store(target, v)?;
            }
            StmtKind::AugAssign { target, op, value } => {
                let cur = match target {
                    Target::Name(id) => self.read(&id.name, id.span)?,
                    Target::Index { array, index, .. } => {
                        let i = self.index_of(&array.name, index)?;
                        let Some(Value::IntArray(xs)) = self.vars().get(&array.name) else { unreachable!() };
                        Value::Int(xs[i])
                    }
                };
                let v = self.eval(value)?;
                let r = apply_binop(*op, &cur, &v).map_err(|e| rt(e.to_string(), s.span))?;
                self.store(target, r)?;
            }
            StmtKind::If { cond, then_body, else_body } => {
                return if self.eval(cond)?.as_bool().unwrap() { self.body(then_body) } else { self.body(else_body) };
            }
            StmtKind::While { cond, body } => {
                while self.eval(cond)?.as_bool().unwrap() {
                    match self.body(body)? {
                        Flow::Break => break,
                        Flow::Return(v) => return Ok(Flow::Return(v)),
                        _ => {}
                    }
                    self.step(s.span)?;
                }
            }
            StmtKind::ForRange { var, start, stop, body } => {
                let a = match start {
                    Some(e) => self.eval(e)?.as_int().unwrap(),
                    None => 0,
                };
                let b = self.eval(stop)?.as_int().unwrap();
                for i in a..b {
                    self.vars().insert(var.name.clone(), Value::Int(i));
                    match self.body(body)? {
                        Flow::Break => break,
                        Flow::Return(v) => return Ok(Flow::Return(v)),
                        _ => {}
                    }
                    self.step(s.span)?;
                }
            }
            StmtKind::Break => return Ok(Flow::Break),
            StmtKind::Continue => return Ok(Flow::Continue),
            StmtKind::Pass => {}
            StmtKind::Return(e) => {
                let v = match e {
                    Some(e) => Some(self.eval(e)?),
                    None => None,
                };
                return Ok(Flow::Return(v));
            }
            StmtKind::Expr(e) => {
                if let Some(k) = self.tp.print_index(s.id) {
                    let ExprKind::Call { args, .. } = &e.kind else { unreachable!() };
                    let v = self.eval(&args[0])?;
                    self.outputs[k] = Some(v.clone());
                    self.printed.push((k, v));
                } else if let ExprKind::Call { func, args } = &e.kind {
                    let ty = self.tp.types.get(&e.id).copied().unwrap_or(CliqType::Bool);
                    self.call(func, args, ty, e.span)?;
                } else {
                    self.eval(e)?;
                }
            }
            StmtKind::QuantumBlock(q) => {
                let found = self
                    .script
                    .get_mut(&q.site)
                    .and_then(|v| v.pop_front())
                    .ok_or_else(|| rt(format!("no scripted outcome for quantum block {}", q.site), s.span))?;
                self.vars().insert(q.found.name.clone(), Value::Int(found));
            }
        }
        Ok(Flow::Normal)
    }
}

/// Runs `tp`; quantum blocks take their `found` values from `script`.
pub fn reference_run(tp: &TypedProgram, script: FoundScript) -> Result<ReferenceRun, Diagnostic> {
    let mut funcs = HashMap::new();
    for s in &tp.module.body {
        if let StmtKind::FuncDef(f) = &s.kind {
            funcs.insert(f.name.name.as_str(), f);
        }
    }
    let mut r =
        Ref { tp, funcs, globals: HashMap::new(), frames: vec![], outputs: vec![None; tp.prints.len()], printed: vec![], script, steps: 0 };
    for s in &tp.module.body {
        if let Flow::Return(_) = r.stmt(s)? {
            break;
        }
    }
    Ok(ReferenceRun { outputs: r.outputs, printed: r.printed })
}

/// Evaluates a classical program.
pub fn reference_eval(tp: &TypedProgram) -> Result<ExecutionResult, Diagnostic> {
    let run = reference_run(tp, FoundScript::new())?;
    Ok(ExecutionResult {
        mode: Mode::Exact,
        output_names: (0..tp.prints.len()).map(|k| format!("__out_{k}")).collect(),
        branches: vec![Branch { choices: vec![], measurements: vec![], probability: 1.0, count: None, outputs: run.outputs }],
        quantum_trace: vec![],
    })
}
