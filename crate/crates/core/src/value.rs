//! Runtime values and the CliqLang arithmetic rules.
//!
//! Ints are 32-bit two's complement and wrap on overflow. `//` floors and
//! `%` takes the sign of the divisor, as in Python. The same functions back
//! constant folding and the reference interpreter so the two cannot drift.

use std::fmt;

use serde::Serialize;

use crate::frontend::ast::{BinOp, CmpOp};

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Int(i32),
    Float(f64),
    Bool(bool),
    IntArray(Vec<i32>),
}

impl Value {
    pub fn as_int(&self) -> Option<i32> {
        match self {
            Value::Int(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Int(v) => Some(*v as f64),
            Value::Float(v) => Some(*v),
            _ => None,
        }
    }

    /// Output comparison: bit-exact for Int/Bool/arrays, relative tolerance
    /// for floats (NaN matches NaN).
    pub fn matches(&self, other: &Value, rel_tol: f64) -> bool {
        match (self, other) {
            (Value::Float(a), Value::Float(b)) => float_close(*a, *b, rel_tol),
            _ => self == other,
        }
    }
}

pub fn float_close(a: f64, b: f64, rel_tol: f64) -> bool {
    if a == b || (a.is_nan() && b.is_nan()) {
        return true;
    }
    (a - b).abs() <= rel_tol * a.abs().max(b.abs())
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Float(v) => write!(f, "{v:?}"),
            Value::Bool(b) => write!(f, "{}", if *b { "True" } else { "False" }),
            Value::IntArray(xs) => {
                write!(f, "[")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, "]")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ArithError {
    DivisionByZero,
    NegativeExponent,
    ComplexResult,
    Overflow,
}

impl fmt::Display for ArithError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArithError::DivisionByZero => write!(f, "division by zero"),
            ArithError::NegativeExponent => write!(f, "negative integer exponent"),
            ArithError::ComplexResult => write!(f, "negative number raised to a fractional power"),
            ArithError::Overflow => write!(f, "numerical result out of range"),
        }
    }
}

pub fn floor_div(a: i32, b: i32) -> Result<i32, ArithError> {
    if b == 0 {
        return Err(ArithError::DivisionByZero);
    }
    let (a, b) = (a as i64, b as i64);
    let q = a / b;
    Ok(if a % b != 0 && ((a < 0) != (b < 0)) { q - 1 } else { q } as i32)
}

pub fn floor_mod(a: i32, b: i32) -> Result<i32, ArithError> {
    if b == 0 {
        return Err(ArithError::DivisionByZero);
    }
    let (a, b) = (a as i64, b as i64);
    let r = a % b;
    Ok(if r != 0 && ((r < 0) != (b < 0)) { r + b } else { r } as i32)
}

pub fn int_pow(base: i32, exp: i32) -> Result<i32, ArithError> {
    if exp < 0 {
        return Err(ArithError::NegativeExponent);
    }
    let mut acc: i32 = 1;
    for _ in 0..exp {
        acc = acc.wrapping_mul(base);
    }
    Ok(acc)
}

pub fn true_div(a: f64, b: f64) -> Result<f64, ArithError> {
    if b == 0.0 {
        return Err(ArithError::DivisionByZero);
    }
    Ok(a / b)
}

/// Float `**` with Python's error cases: zero to a negative power, a
/// negative base with a fractional exponent, and overflow.
pub fn float_pow(x: f64, y: f64) -> Result<f64, ArithError> {
    if x == 0.0 && y < 0.0 {
        return Err(ArithError::DivisionByZero);
    }
    if x < 0.0 && y.is_finite() && y.fract() != 0.0 {
        return Err(ArithError::ComplexResult);
    }
    let r = x.powf(y);
    if r.is_infinite() && x.is_finite() && y.is_finite() {
        return Err(ArithError::Overflow);
    }
    Ok(r)
}

/// Arithmetic on scalar values. An Int mixed with a Float promotes to Float;
/// `/` always yields Float. Operand types are assumed already checked.
pub fn apply_binop(op: BinOp, a: &Value, b: &Value) -> Result<Value, ArithError> {
    if let (Value::Int(x), Value::Int(y)) = (a, b) {
        let (x, y) = (*x, *y);
        return Ok(match op {
            BinOp::Add => Value::Int(x.wrapping_add(y)),
            BinOp::Sub => Value::Int(x.wrapping_sub(y)),
            BinOp::Mul => Value::Int(x.wrapping_mul(y)),
            BinOp::Div => Value::Float(true_div(x as f64, y as f64)?),
            BinOp::FloorDiv => Value::Int(floor_div(x, y)?),
            BinOp::Mod => Value::Int(floor_mod(x, y)?),
            BinOp::Pow => Value::Int(int_pow(x, y)?),
        });
    }
    let (x, y) = (a.as_f64().unwrap_or(f64::NAN), b.as_f64().unwrap_or(f64::NAN));
    Ok(Value::Float(match op {
        BinOp::Add => x + y,
        BinOp::Sub => x - y,
        BinOp::Mul => x * y,
        BinOp::Div => true_div(x, y)?,
        BinOp::Pow => float_pow(x, y)?,
        BinOp::FloorDiv | BinOp::Mod => f64::NAN,
    }))
}

pub fn apply_compare(op: CmpOp, a: &Value, b: &Value) -> bool {
    if let (Value::Bool(x), Value::Bool(y)) = (a, b) {
        return match op {
            CmpOp::Eq => x == y,
            CmpOp::Ne => x != y,
            _ => false,
        };
    }
    if let (Value::Int(x), Value::Int(y)) = (a, b) {
        return match op {
            CmpOp::Eq => x == y,
            CmpOp::Ne => x != y,
            CmpOp::Lt => x < y,
            CmpOp::Le => x <= y,
            CmpOp::Gt => x > y,
            CmpOp::Ge => x >= y,
        };
    }
    let (x, y) = (a.as_f64().unwrap_or(f64::NAN), b.as_f64().unwrap_or(f64::NAN));
    match op {
        CmpOp::Eq => x == y,
        CmpOp::Ne => x != y,
        CmpOp::Lt => x < y,
        CmpOp::Le => x <= y,
        CmpOp::Gt => x > y,
        CmpOp::Ge => x >= y,
    }
}

pub fn negate(a: &Value) -> Value {
    match a {
        Value::Int(v) => Value::Int(v.wrapping_neg()),
        Value::Float(v) => Value::Float(-v),
        other => other.clone(),
    }
}

pub fn abs_value(a: &Value) -> Value {
    match a {
        Value::Int(v) => Value::Int(v.wrapping_abs()),
        Value::Float(v) => Value::Float(v.abs()),
        other => other.clone(),
    }
}

/// `min`/`max` over scalars of one type; returns the first extreme element.
pub fn extreme(values: &[Value], want_max: bool) -> Option<Value> {
    let mut best = values.first()?.clone();
    for v in &values[1..] {
        let better = if want_max { apply_compare(CmpOp::Gt, v, &best) } else { apply_compare(CmpOp::Lt, v, &best) };
        if better {
            best = v.clone();
        }
    }
    Some(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Small operands divide exactly in f64, so floor() is the true floor.
    fn floor_oracle(a: i64, b: i64) -> (i64, i64) {
        let q = (a as f64 / b as f64).floor() as i64;
        (q, a - q * b)
    }

    #[test]
    fn floor_div_and_mod_follow_python() {
        for a in -20..=20 {
            for b in (-7..=7).filter(|b| *b != 0) {
                let (q, r) = floor_oracle(a, b);
                assert_eq!(floor_div(a as i32, b as i32).unwrap() as i64, q, "{a} // {b}");
                assert_eq!(floor_mod(a as i32, b as i32).unwrap() as i64, r, "{a} % {b}");
            }
        }
        assert_eq!(floor_div(5, 2), Ok(2));
        assert_eq!(floor_div(-7, 2), Ok(-4));
        assert_eq!(floor_mod(-7, 2), Ok(1));
        assert_eq!(floor_mod(7, -2), Ok(-1));
    }

    #[test]
    fn extremes_wrap() {
        assert_eq!(floor_div(i32::MIN, -1), Ok(i32::MIN));
        assert_eq!(floor_mod(i32::MIN, -1), Ok(0));
        assert_eq!(int_pow(2, 31), Ok(i32::MIN));
        assert_eq!(int_pow(3, 0), Ok(1));
        assert_eq!(floor_div(1, 0), Err(ArithError::DivisionByZero));
    }
}
