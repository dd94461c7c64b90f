//! Interpreter for the OpenQASM subset.
//!
//! Classical semantics follow OpenQASM 3: 32-bit wrapping ints, truncating
//! `/` and `%`, IEEE doubles. Division by zero is a runtime error rather than
//! undefined behaviour, and `&&`/`||` short-circuit.

use std::collections::HashMap;

use crate::diag::{Diagnostic, Span};
use crate::qasm::{Decl, GateOp, LValue, QArg, QBinOp, QExpr, QStmt, QType, QUnOp, QasmProgram};
use crate::value::{float_pow, int_pow, true_div, Value};

use super::exec::{execute, finish, runtime, Chooser, ExecutionResult, Halt, Mode, Step, TraceMap};
use super::statevector::{Gate, StateVector, MAX_QUBITS};

/// Statement executions allowed per run.
pub const STEP_LIMIT: u64 = 20_000_000;
const MAX_CALL_DEPTH: usize = 512;

#[derive(Clone, Debug, PartialEq)]
enum V {
    Int(i32),
    Float(f64),
    Bool(bool),
    Bits(u64),
    Array(Vec<i32>),
}

impl V {
    fn to_value(&self) -> Value {
        match self {
            V::Int(v) => Value::Int(*v),
            V::Float(v) => Value::Float(*v),
            V::Bool(b) => Value::Bool(*b),
            V::Bits(b) => Value::Int(*b as u32 as i32),
            V::Array(xs) => Value::IntArray(xs.clone()),
        }
    }

    fn type_name(&self) -> &'static str {
        match self {
            V::Int(_) => "int[32]",
            V::Float(_) => "float[64]",
            V::Bool(_) => "bool",
            V::Bits(_) => "bit",
            V::Array(_) => "array",
        }
    }
}

#[derive(Clone, Debug)]
struct Slot {
    ty: QType,
    value: Option<V>,
}

enum Flow {
    Normal,
    Break,
    Continue,
    Return(Option<V>),
}

struct Func<'p> {
    params: &'p [(QType, String)],
    ret: Option<QType>,
    body: &'p [QStmt],
}

struct Machine<'p, 'c> {
    /// frames[0] is the global frame; each frame is a stack of block scopes.
    frames: Vec<Vec<HashMap<String, Slot>>>,
    funcs: HashMap<String, Func<'p>>,
    qregs: HashMap<String, (usize, usize)>,
    next_qubit: usize,
    state: StateVector,
    chooser: Chooser<'c>,
    steps: u64,
}

fn err<T>(msg: impl Into<String>) -> Result<T, Halt> {
    Err(runtime(msg, Span::default()))
}

fn coerce(ty: QType, v: V) -> Result<V, Halt> {
    match (ty, v) {
        (QType::Int32, V::Int(x)) => Ok(V::Int(x)),
        (QType::Float64, V::Float(x)) => Ok(V::Float(x)),
        (QType::Float64, V::Int(x)) => Ok(V::Float(x as f64)),
        (QType::Bool, V::Bool(b)) => Ok(V::Bool(b)),
        (QType::Bit(n), V::Bits(b)) => Ok(V::Bits(b & mask(n))),
        (QType::Bit(n), V::Int(x)) => Ok(V::Bits(x as u32 as u64 & mask(n))),
        (QType::Bit(1), V::Bool(b)) => Ok(V::Bits(b as u64)),
        (t, v) => err(format!("cannot store a {} value in a {t:?} variable", v.type_name())),
    }
}

fn mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn cast(ty: QType, v: V) -> Result<V, Halt> {
    Ok(match (ty, v) {
        (QType::Float64, V::Int(x)) => V::Float(x as f64),
        (QType::Float64, V::Float(x)) => V::Float(x),
        (QType::Float64, V::Bool(b)) => V::Float(b as i32 as f64),
        (QType::Int32, V::Int(x)) => V::Int(x),
        (QType::Int32, V::Float(x)) => V::Int(x as i32),
        (QType::Int32, V::Bool(b)) => V::Int(b as i32),
        (QType::Int32, V::Bits(b)) => V::Int(b as u32 as i32),
        (QType::Bool, V::Int(x)) => V::Bool(x != 0),
        (QType::Bool, V::Float(x)) => V::Bool(x != 0.0),
        (QType::Bool, V::Bool(b)) => V::Bool(b),
        (QType::Bool, V::Bits(b)) => V::Bool(b != 0),
        (t, v) => return err(format!("cannot cast {} to {t:?}", v.type_name())),
    })
}

fn arith(op: QBinOp, a: V, b: V) -> Result<V, Halt> {
    let arith_err = |e: crate::value::ArithError| runtime(e.to_string(), Span::default());
    if let (V::Int(x), V::Int(y)) = (&a, &b) {
        let (x, y) = (*x, *y);
        return Ok(V::Int(match op {
            QBinOp::Add => x.wrapping_add(y),
            QBinOp::Sub => x.wrapping_sub(y),
            QBinOp::Mul => x.wrapping_mul(y),
            QBinOp::Div if y == 0 => return err("integer division by zero"),
            QBinOp::Div => x.wrapping_div(y),
            QBinOp::Mod if y == 0 => return err("integer modulo by zero"),
            QBinOp::Mod => x.wrapping_rem(y),
            QBinOp::Pow => int_pow(x, y).map_err(arith_err)?,
            _ => unreachable!(),
        }));
    }
    let num = |v: &V| match v {
        V::Int(x) => Ok(*x as f64),
        V::Float(x) => Ok(*x),
        other => err(format!("arithmetic on a {} value", other.type_name())),
    };
    let (x, y) = (num(&a)?, num(&b)?);
    Ok(V::Float(match op {
        QBinOp::Add => x + y,
        QBinOp::Sub => x - y,
        QBinOp::Mul => x * y,
        QBinOp::Div => true_div(x, y).map_err(arith_err)?,
        QBinOp::Pow => float_pow(x, y).map_err(arith_err)?,
        QBinOp::Mod => return err("'%' on float operands"),
        _ => unreachable!(),
    }))
}

fn compare(op: QBinOp, a: V, b: V) -> Result<V, Halt> {
    use std::cmp::Ordering;
    let ord: Option<Ordering> = match (&a, &b) {
        (V::Int(x), V::Int(y)) => Some(x.cmp(y)),
        (V::Bool(x), V::Bool(y)) => Some(x.cmp(y)),
        (V::Bits(x), V::Bits(y)) => Some(x.cmp(y)),
        (V::Int(_) | V::Float(_), V::Int(_) | V::Float(_)) => {
            let f = |v: &V| {
                if let V::Int(x) = v {
                    *x as f64
                } else if let V::Float(x) = v {
                    *x
                } else {
                    0.0
                }
            };
            f(&a).partial_cmp(&f(&b))
        }
        _ => return err(format!("cannot compare {} with {}", a.type_name(), b.type_name())),
    };
    let r = match op {
        QBinOp::Eq => ord == Some(Ordering::Equal),
        QBinOp::Ne => ord != Some(Ordering::Equal),
        QBinOp::Lt => ord == Some(Ordering::Less),
        QBinOp::Le => matches!(ord, Some(Ordering::Less | Ordering::Equal)),
        QBinOp::Gt => ord == Some(Ordering::Greater),
        QBinOp::Ge => matches!(ord, Some(Ordering::Greater | Ordering::Equal)),
        _ => unreachable!(),
    };
    Ok(V::Bool(r))
}

fn truthy(v: V) -> Result<bool, Halt> {
    match v {
        V::Bool(b) => Ok(b),
        other => err(format!("condition is {}, not bool", other.type_name())),
    }
}

impl<'p, 'c> Machine<'p, 'c> {
    fn step(&mut self) -> Result<(), Halt> {
        self.steps += 1;
        if self.steps > STEP_LIMIT {
            return err(format!("step limit of {STEP_LIMIT} exceeded"));
        }
        Ok(())
    }

    fn frame(&mut self) -> &mut Vec<HashMap<String, Slot>> {
        self.frames.last_mut().unwrap()
    }

    fn lookup(&mut self, name: &str) -> Result<&mut Slot, Halt> {
        for scope in self.frames.last_mut().unwrap().iter_mut().rev() {
            if let Some(s) = scope.get_mut(name) {
                return Ok(s);
            }
        }
        err(format!("undeclared identifier '{name}'"))
    }

    fn declare(&mut self, name: &str, ty: QType, value: Option<V>) -> Result<(), Halt> {
        let value = match (ty, value) {
            (QType::IntArray(n), _) => Some(V::Array(vec![0; n])),
            (_, Some(v)) => Some(coerce(ty, v)?),
            (_, None) => None,
        };
        self.frame().last_mut().unwrap().insert(name.to_string(), Slot { ty, value });
        Ok(())
    }

    fn qubits_of(&self, arg: &QArg) -> Result<Vec<usize>, Halt> {
        let Some(&(offset, n)) = self.qregs.get(&arg.reg) else {
            return err(format!("'{}' is not a qubit register", arg.reg));
        };
        match arg.index {
            None => Ok((offset..offset + n).collect()),
            Some(i) if i < n => Ok(vec![offset + i]),
            Some(i) => err(format!("qubit index {i} out of range for '{}'", arg.reg)),
        }
    }

    fn eval(&mut self, e: &QExpr) -> Result<V, Halt> {
        Ok(match e {
            QExpr::Int(v) => V::Int(*v as u32 as i32),
            QExpr::Float(v) => V::Float(*v),
            QExpr::Bool(b) => V::Bool(*b),
            QExpr::Ident(n) => match &self.lookup(n)?.value {
                Some(v) => v.clone(),
                None => return err(format!("'{n}' read before assignment")),
            },
            QExpr::Index(n, i) => {
                let i = self.eval(i)?;
                let V::Int(i) = i else { return err("index must be int[32]") };
                let slot = self.lookup(n)?;
                match (&slot.value, slot.ty) {
                    (Some(V::Array(xs)), _) => match usize::try_from(i).ok().and_then(|i| xs.get(i)) {
                        Some(x) => V::Int(*x),
                        None => return err(format!("index {i} out of range for '{n}'")),
                    },
                    (Some(V::Bits(b)), QType::Bit(w)) => {
                        if i < 0 || i as usize >= w {
                            return err(format!("index {i} out of range for '{n}'"));
                        }
                        V::Bool(b >> i & 1 == 1)
                    }
                    (None, _) => return err(format!("'{n}' read before assignment")),
                    _ => return err(format!("'{n}' is not indexable")),
                }
            }
            QExpr::Paren(e) => self.eval(e)?,
            QExpr::Unary(op, e) => match (op, self.eval(e)?) {
                (QUnOp::Neg, V::Int(x)) => V::Int(x.wrapping_neg()),
                (QUnOp::Neg, V::Float(x)) => V::Float(-x),
                (QUnOp::Not, V::Bool(b)) => V::Bool(!b),
                (_, v) => return err(format!("bad operand {} for unary operator", v.type_name())),
            },
            QExpr::Binary(op, l, r) => match op {
                QBinOp::And => V::Bool(truthy(self.eval(l)?)? && truthy(self.eval(r)?)?),
                QBinOp::Or => V::Bool(truthy(self.eval(l)?)? || truthy(self.eval(r)?)?),
                QBinOp::Eq | QBinOp::Ne | QBinOp::Lt | QBinOp::Le | QBinOp::Gt | QBinOp::Ge => {
                    let a = self.eval(l)?;
                    let b = self.eval(r)?;
                    compare(*op, a, b)?
                }
                _ => {
                    let a = self.eval(l)?;
                    let b = self.eval(r)?;
                    arith(*op, a, b)?
                }
            },
            QExpr::Cast(t, e) => {
                let v = self.eval(e)?;
                cast(*t, v)?
            }
            QExpr::Call(name, args) => {
                let mut vals = vec![];
                for a in args {
                    vals.push(self.eval(a)?);
                }
                match self.call(name, vals)? {
                    Some(v) => v,
                    None => return err(format!("subroutine '{name}' returned no value")),
                }
            }
        })
    }

    fn call(&mut self, name: &str, args: Vec<V>) -> Result<Option<V>, Halt> {
        let Some(f) = self.funcs.get(name) else { return err(format!("undefined subroutine '{name}'")) };
        let (params, ret, body) = (f.params, f.ret, f.body);
        if params.len() != args.len() {
            return err(format!("'{name}' takes {} arguments, got {}", params.len(), args.len()));
        }
        if self.frames.len() > MAX_CALL_DEPTH {
            return err("maximum call depth exceeded");
        }
        let mut scope = HashMap::new();
        for ((ty, p), v) in params.iter().zip(args) {
            scope.insert(p.clone(), Slot { ty: *ty, value: Some(coerce(*ty, v)?) });
        }
        self.frames.push(vec![scope]);
        let flow = self.block(body);
        self.frames.pop();
        let value = match flow? {
            Flow::Return(v) => v,
            _ => None,
        };
        match (ret, value) {
            (Some(t), Some(v)) => Ok(Some(coerce(t, v)?)),
            (Some(_), None) => err(format!("'{name}' ended without returning a value")),
            (None, _) => Ok(None),
        }
    }

    fn block(&mut self, body: &'p [QStmt]) -> Result<Flow, Halt> {
        self.frame().push(HashMap::new());
        let r = self.stmts(body);
        self.frame().pop();
        r
    }

    fn stmts(&mut self, body: &'p [QStmt]) -> Result<Flow, Halt> {
        for s in body {
            match self.stmt(s)? {
                Flow::Normal => {}
                other => return Ok(other),
            }
        }
        Ok(Flow::Normal)
    }

    fn assign(&mut self, target: &LValue, v: V) -> Result<(), Halt> {
        match &target.index {
            None => {
                let slot = self.lookup(&target.name)?;
                slot.value = Some(coerce(slot.ty, v)?);
            }
            Some(i) => {
                let V::Int(i) = self.eval(i)? else { return err("index must be int[32]") };
                let slot = self.lookup(&target.name)?;
                let name = &target.name;
                match (&mut slot.value, slot.ty) {
                    (Some(V::Array(xs)), _) => {
                        let Some(cell) = usize::try_from(i).ok().and_then(|i| xs.get_mut(i)) else {
                            return err(format!("index {i} out of range for '{name}'"));
                        };
                        match v {
                            V::Int(x) => *cell = x,
                            other => return err(format!("cannot store {} in an int array", other.type_name())),
                        }
                    }
                    (bits, QType::Bit(w)) => {
                        if i < 0 || i as usize >= w {
                            return err(format!("index {i} out of range for '{name}'"));
                        }
                        let on = match v {
                            V::Bool(b) => b,
                            V::Int(x) => x & 1 == 1,
                            V::Bits(b) => b & 1 == 1,
                            other => return err(format!("cannot store {} in a bit", other.type_name())),
                        };
                        let cur = match bits {
                            Some(V::Bits(b)) => *b,
                            _ => 0,
                        };
                        *bits = Some(V::Bits(if on { cur | 1 << i } else { cur & !(1 << i) }));
                    }
                    _ => return err(format!("'{name}' is not indexable")),
                }
            }
        }
        Ok(())
    }

    fn gate(&mut self, g: &GateOp) -> Result<(), Halt> {
        let gate = match g.name.as_str() {
            "h" => Gate::H,
            "x" | "cx" => Gate::X,
            "z" => Gate::Z,
            other => return err(format!("unsupported gate '{other}'")),
        };
        if g.ctrl == 0 && g.name != "cx" && g.operands.len() == 1 {
            for q in self.qubits_of(&g.operands[0])? {
                self.state.apply(gate, &[], q);
            }
            return Ok(());
        }
        let mut qs = vec![];
        for a in &g.operands {
            let v = self.qubits_of(a)?;
            if v.len() != 1 {
                return err(format!("register '{}' used as a single qubit", a.reg));
            }
            qs.push(v[0]);
        }
        let (target, controls) = qs.split_last().expect("gate has operands");
        if controls.contains(target) {
            return err("gate operands must be distinct");
        }
        self.state.apply(gate, controls, *target);
        Ok(())
    }

    fn decl(&mut self, d: &Decl) -> Result<(), Halt> {
        if let QType::Qubit(n) = d.ty {
            if self.next_qubit + n > self.state.qubits() {
                return Err(Halt::Error(Diagnostic::error("E063", "qubit limit exceeded", Span::default())));
            }
            self.qregs.insert(d.name.clone(), (self.next_qubit, n));
            self.next_qubit += n;
            return Ok(());
        }
        let init = match &d.init {
            Some(e) => Some(self.eval(e)?),
            None => None,
        };
        self.declare(&d.name, d.ty, init)
    }

    fn stmt(&mut self, s: &'p QStmt) -> Result<Flow, Halt> {
        self.step()?;
        match s {
            QStmt::Decl(d) => self.decl(d)?,
            QStmt::Assign { target, value } => {
                let v = self.eval(value)?;
                self.assign(target, v)?;
            }
            QStmt::Measure { bits, qubits } => {
                let qs = self.qubits_of(&QArg::reg(qubits.clone()))?;
                let dist = self.state.distribution(&qs);
                let outcome = self.chooser.choose(&dist, Some(bits))?;
                self.state.collapse(&qs, outcome);
                self.assign(&LValue { name: bits.clone(), index: None }, V::Bits(outcome as u64))?;
            }
            QStmt::Reset(arg) => {
                let qs = self.qubits_of(arg)?;
                let dist = self.state.distribution(&qs);
                let outcome = self.chooser.choose(&dist, None)?;
                self.state.collapse(&qs, outcome);
                for (j, q) in qs.iter().enumerate() {
                    if outcome >> j & 1 == 1 {
                        self.state.apply(Gate::X, &[], *q);
                    }
                }
            }
            QStmt::Gate(g) => self.gate(g)?,
            QStmt::If { cond, then_body, else_body } => {
                let c = self.eval(cond)?;
                if truthy(c)? {
                    return self.block(then_body);
                } else if let Some(e) = else_body {
                    return self.block(e);
                }
            }
            QStmt::While { cond, body } => loop {
                let c = self.eval(cond)?;
                if !truthy(c)? {
                    break;
                }
                match self.block(body)? {
                    Flow::Break => break,
                    Flow::Return(v) => return Ok(Flow::Return(v)),
                    _ => {}
                }
                self.step()?;
            },
            QStmt::For { var, start, end, body } => {
                let (V::Int(a), V::Int(b)) = (self.eval(start)?, self.eval(end)?) else {
                    return err("range bounds must be int[32]");
                };
                let mut i = a as i64;
                while i <= b as i64 {
                    let mut scope = HashMap::new();
                    scope.insert(var.clone(), Slot { ty: QType::Int32, value: Some(V::Int(i as i32)) });
                    self.frame().push(scope);
                    let flow = self.stmts(body);
                    self.frame().pop();
                    match flow? {
                        Flow::Break => break,
                        Flow::Return(v) => return Ok(Flow::Return(v)),
                        _ => {}
                    }
                    self.step()?;
                    i += 1;
                }
            }
            QStmt::Break => return Ok(Flow::Break),
            QStmt::Continue => return Ok(Flow::Continue),
            QStmt::Return(e) => {
                let v = match e {
                    Some(e) => Some(self.eval(e)?),
                    None => None,
                };
                return Ok(Flow::Return(v));
            }
            QStmt::Expr(QExpr::Call(name, args)) => {
                let mut vals = vec![];
                for a in args {
                    vals.push(self.eval(a)?);
                }
                self.call(name, vals)?;
            }
            QStmt::Expr(e) => {
                self.eval(e)?;
            }
            QStmt::Def { name, params, ret, body } => {
                self.funcs.insert(name.clone(), Func { params, ret: *ret, body });
            }
        }
        Ok(Flow::Normal)
    }
}

fn run_once(qp: &QasmProgram, script: &[usize], trace: &mut TraceMap) -> Result<Step, Diagnostic> {
    let mut m = Machine {
        frames: vec![vec![HashMap::new()]],
        funcs: HashMap::new(),
        qregs: HashMap::new(),
        next_qubit: 0,
        state: StateVector::new(qp.qubit_count()),
        chooser: Chooser::new(script),
        steps: 0,
    };
    let r = (|| {
        for d in &qp.decls {
            m.decl(d)?;
        }
        for s in &qp.stmts {
            if let Flow::Return(_) = m.stmt(s)? {
                return err("return outside a subroutine");
            }
        }
        let globals = &m.frames[0][0];
        Ok(qp.outputs().iter().map(|d| globals.get(&d.name).and_then(|s| s.value.as_ref()).map(V::to_value)).collect())
    })();
    let Machine { chooser, .. } = m;
    finish(r, chooser, trace)
}

/// Runs a parsed program. Exact mode explores every measurement outcome;
/// sampled mode draws `shots` executions from the seeded generator.
pub fn interpret_qasm(qp: &QasmProgram, mode: Mode) -> Result<ExecutionResult, Diagnostic> {
    let n = qp.qubit_count();
    if n > MAX_QUBITS {
        return Err(Diagnostic::error(
            "E063",
            format!("program declares {n} qubits; the simulator limit is {MAX_QUBITS}"),
            Span::default(),
        ));
    }
    let names = qp.outputs().iter().map(|d| d.name.clone()).collect();
    execute(mode, names, &mut |script, trace| run_once(qp, script, trace))
}
