use alloc::format;
use alloc::vec::Vec;

use super::{SemError, Trace};
use crate::dictionary::{VarKind, VariableDictionary};
use crate::syntax::{BinOp, Expr, ExprKind, UnOp};
use crate::value::Value;

/// Where variables are read from: trace columns first, then dictionary
/// values of constants and calibratables.
#[derive(Debug, Clone, Copy)]
pub struct EvalContext<'a> {
    pub trace: &'a Trace,
    pub dict: &'a VariableDictionary,
}

impl<'a> EvalContext<'a> {
    pub fn new(trace: &'a Trace, dict: &'a VariableDictionary) -> Self {
        EvalContext { trace, dict }
    }

    /// Value of `name` at step `t`, or before the first step when `t` is
    /// `None` (signals read their initial value there).
    pub fn read(&self, name: &str, t: Option<usize>) -> Result<Value, SemError> {
        let decl = self.dict.lookup(name);
        if t.is_none() {
            if let Some(d) = decl.filter(|d| d.kind == VarKind::Signal) {
                return Ok(d.initial_value());
            }
        }
        if let Some(col) = self.trace.column(name) {
            let v = col[t.unwrap_or(0)];
            return Ok(decl.and_then(|d| v.coerce(d.data_type)).unwrap_or(v));
        }
        match decl {
            Some(d) if d.kind != VarKind::Signal => d.value.ok_or_else(|| SemError::Unbound(name.into())),
            _ => Err(SemError::Unbound(name.into())),
        }
    }
}

/// Value of `e` at step `t`. Every operand is evaluated, so errors do not
/// depend on evaluation order.
pub fn eval_event(e: &Expr, trace: &Trace, dict: &VariableDictionary, t: usize) -> Result<Value, SemError> {
    eval_at(&EvalContext::new(trace, dict), e, Some(t), t)
}

/// Boolean value of `e` at every step of the trace.
pub fn event_series(e: &Expr, trace: &Trace, dict: &VariableDictionary) -> Result<Vec<bool>, SemError> {
    let cx = EvalContext::new(trace, dict);
    (0..trace.len())
        .map(|t| match eval_at(&cx, e, Some(t), t)? {
            Value::Bool(b) => Ok(b),
            v => Err(SemError::Type { step: t, message: format!("event evaluated to {v}") }),
        })
        .collect()
}

/// `at` is the step being read (`None` = before the trace); `step` is the
/// step reported in errors.
fn eval_at(cx: &EvalContext<'_>, e: &Expr, at: Option<usize>, step: usize) -> Result<Value, SemError> {
    let ev = |x: &Expr| eval_at(cx, x, at, step);
    match &e.kind {
        ExprKind::Bool(b) => Ok(Value::Bool(*b)),
        ExprKind::Int(i) => Ok(Value::Int(*i)),
        ExprKind::Float(x) => Ok(Value::Float(*x)),
        ExprKind::Var(n) => cx.read(n, at),
        ExprKind::Not(x) => unary_not(ev(x)?, step),
        ExprKind::Sign(op, x) => sign(*op, ev(x)?, step),
        ExprKind::Abs(x) => abs(ev(x)?, step),
        ExprKind::Min(a, b) => min_max(true, ev(a)?, ev(b)?, step),
        ExprKind::Max(a, b) => min_max(false, ev(a)?, ev(b)?, step),
        ExprKind::LastUnary(x) => eval_at(cx, x, back(at, 1), step),
        ExprKind::LastN(x, n) => eval_at(cx, x, back(at, *n as usize), step),
        ExprKind::ExtractBit { index, value } => extract_bit(ev(index)?, ev(value)?, step),
        ExprKind::Binary(op, l, r) => binary(*op, ev(l)?, ev(r)?, step),
    }
}

fn back(at: Option<usize>, n: usize) -> Option<usize> {
    at.and_then(|t| t.checked_sub(n))
}

fn type_error(step: usize, message: alloc::string::String) -> SemError {
    SemError::Type { step, message }
}

pub(crate) fn unary_not(v: Value, step: usize) -> Result<Value, SemError> {
    match v {
        Value::Bool(b) => Ok(Value::Bool(!b)),
        v => Err(type_error(step, format!("'not' applied to {v}"))),
    }
}

pub(crate) fn sign(op: UnOp, v: Value, step: usize) -> Result<Value, SemError> {
    match (op, v) {
        (UnOp::Plus, Value::Int(_) | Value::Float(_)) => Ok(v),
        (UnOp::Minus, Value::Int(i)) => i.checked_neg().map(Value::Int).ok_or(SemError::IntOverflow { step }),
        (UnOp::Minus, Value::Float(x)) => Ok(Value::Float(-x)),
        (_, v) => Err(type_error(step, format!("sign applied to {v}"))),
    }
}

pub(crate) fn abs(v: Value, step: usize) -> Result<Value, SemError> {
    match v {
        Value::Int(i) => i.checked_abs().map(Value::Int).ok_or(SemError::IntOverflow { step }),
        Value::Float(x) => Ok(Value::Float(x.abs())),
        v => Err(type_error(step, format!("abs applied to {v}"))),
    }
}

pub(crate) fn min_max(is_min: bool, a: Value, b: Value, step: usize) -> Result<Value, SemError> {
    match (a, b) {
        (Value::Int(x), Value::Int(y)) => Ok(Value::Int(if is_min { x.min(y) } else { x.max(y) })),
        _ => {
            let (x, y) = numeric_pair(a, b, step)?;
            Ok(Value::Float(if is_min { x.min(y) } else { x.max(y) }))
        }
    }
}

pub(crate) fn extract_bit(index: Value, value: Value, step: usize) -> Result<Value, SemError> {
    match (index, value) {
        (Value::Int(i), Value::Int(v)) => {
            if !(0..64).contains(&i) {
                return Err(SemError::BitIndex { step, index: i });
            }
            Ok(Value::Bool((v >> i) & 1 == 1))
        }
        (i, v) => Err(type_error(step, format!("bit extraction needs ints, got {i} and {v}"))),
    }
}

fn numeric_pair(a: Value, b: Value, step: usize) -> Result<(f64, f64), SemError> {
    match (a.as_f64(), b.as_f64()) {
        (Some(x), Some(y)) => Ok((x, y)),
        _ => Err(type_error(step, format!("numeric operands expected, got {a} and {b}"))),
    }
}

fn bools(op: BinOp, a: Value, b: Value, step: usize) -> Result<(bool, bool), SemError> {
    match (a, b) {
        (Value::Bool(x), Value::Bool(y)) => Ok((x, y)),
        _ => Err(type_error(step, format!("'{}' needs booleans, got {a} and {b}", op.text()))),
    }
}

pub(crate) fn binary(op: BinOp, a: Value, b: Value, step: usize) -> Result<Value, SemError> {
    use core::cmp::Ordering;
    match op {
        BinOp::And => bools(op, a, b, step).map(|(x, y)| Value::Bool(x && y)),
        BinOp::Or => bools(op, a, b, step).map(|(x, y)| Value::Bool(x || y)),
        BinOp::Implies => bools(op, a, b, step).map(|(x, y)| Value::Bool(!x || y)),
        BinOp::Eq | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
            let ord = match (a, b) {
                (Value::Bool(x), Value::Bool(y)) if op == BinOp::Eq => Some(x.cmp(&y)),
                (Value::Int(x), Value::Int(y)) => Some(x.cmp(&y)),
                _ => {
                    let (x, y) = numeric_pair(a, b, step)?;
                    x.partial_cmp(&y)
                }
            };
            let r = match op {
                BinOp::Eq => ord == Some(Ordering::Equal),
                BinOp::Lt => ord == Some(Ordering::Less),
                BinOp::Le => matches!(ord, Some(Ordering::Less | Ordering::Equal)),
                BinOp::Gt => ord == Some(Ordering::Greater),
                _ => matches!(ord, Some(Ordering::Greater | Ordering::Equal)),
            };
            Ok(Value::Bool(r))
        }
        BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div => match (a, b) {
            (Value::Int(x), Value::Int(y)) => {
                let r = match op {
                    BinOp::Add => x.checked_add(y),
                    BinOp::Sub => x.checked_sub(y),
                    BinOp::Mul => x.checked_mul(y),
                    _ => {
                        if y == 0 {
                            return Err(SemError::DivisionByZero { step });
                        }
                        x.checked_div(y)
                    }
                };
                r.map(Value::Int).ok_or(SemError::IntOverflow { step })
            }
            _ => {
                let (x, y) = numeric_pair(a, b, step)?;
                Ok(Value::Float(match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    _ => {
                        if y == 0.0 {
                            return Err(SemError::DivisionByZero { step });
                        }
                        x / y
                    }
                }))
            }
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dictionary::VariableDecl;
    use crate::syntax::parse_event;
    use crate::value::ValueType;
    use alloc::vec;

    fn setup() -> (Trace, VariableDictionary) {
        let dict = VariableDictionary::from_decls([
            VariableDecl::new("x", VarKind::Signal, ValueType::Int).with_initial(Value::Int(-9)),
            VariableDecl::new("c", VarKind::Signal, ValueType::Int),
            VariableDecl::new("k", VarKind::Constant, ValueType::Int).with_value(Value::Int(3)),
            VariableDecl::new("f", VarKind::Signal, ValueType::Float),
        ])
        .unwrap();
        let trace = Trace::from_columns(
            10,
            [
                ("x", (10..16).map(Value::Int).collect::<Vec<_>>()),
                ("c", vec![Value::Int(-4), Value::Int(0), Value::Int(5), Value::Int(7), Value::Int(0), Value::Int(1)]),
                ("f", vec![Value::Float(1.5); 6]),
            ],
        )
        .unwrap();
        (trace, dict)
    }

    fn at(s: &str, t: usize) -> Result<Value, SemError> {
        let (trace, dict) = setup();
        let e = parse_event(s).unwrap();
        eval_event(&e, &trace, &dict, t)
    }

    fn arith(s: &str, t: usize) -> Result<Value, SemError> {
        let (trace, dict) = setup();
        let ExprKind::Binary(BinOp::Eq, l, _) = parse_event(&format!("{s} = 0")).unwrap().kind else { panic!() };
        eval_event(&l, &trace, &dict, t)
    }

    #[test]
    fn functions() {
        assert_eq!(arith("abs(c)", 0), Ok(Value::Int(4)));
        assert_eq!(at("extractBit(0, 5)", 0), Ok(Value::Bool(true)));
        assert_eq!(at("bit 1 of 5", 0), Ok(Value::Bool(false)));
        assert_eq!(at("bit 63 of c", 0), Ok(Value::Bool(true)));
        assert_eq!(arith("min(x, f)", 0), Ok(Value::Float(1.5)));
        assert_eq!(arith("max(x, k)", 0), Ok(Value::Int(10)));
        assert_eq!(arith("-7 / 2", 0), Ok(Value::Int(-3)));
        assert_eq!(arith("7 / 2.0", 0), Ok(Value::Float(3.5)));
    }

    #[test]
    fn last_reads_initial_values_before_start() {
        assert_eq!(arith("last(x, 4)", 2), Ok(Value::Int(-9)));
        assert_eq!(arith("last(x, 4)", 5), Ok(Value::Int(11)));
        assert_eq!(arith("last(x)", 0), Ok(Value::Int(-9)));
        assert_eq!(arith("last(c, 2)", 1), Ok(Value::Int(0)));
        assert_eq!(arith("last(last(x, 2) + k, 3)", 4), Ok(Value::Int(-6)));
        assert_eq!(arith("last(k, 3)", 0), Ok(Value::Int(3)));
    }

    #[test]
    fn errors_name_the_step() {
        assert_eq!(arith("x / c", 1), Err(SemError::DivisionByZero { step: 1 }));
        assert_eq!(arith("f / (c - c)", 3), Err(SemError::DivisionByZero { step: 3 }));
        assert_eq!(at("bit c of x", 2), Ok(Value::Bool(false)));
        assert_eq!(at("bit c - 10 of x", 1), Err(SemError::BitIndex { step: 1, index: -10 }));
        assert_eq!(at("bit 64 of x", 2), Err(SemError::BitIndex { step: 2, index: 64 }));
        assert_eq!(arith("9223372036854775807 + 1", 0), Err(SemError::IntOverflow { step: 0 }));
    }

    #[test]
    fn strict_evaluation_reports_errors_in_dead_branches() {
        assert!(at("FALSE & x / c > 1", 1).is_err());
        assert!(at("TRUE | x / c > 1", 1).is_err());
    }

    #[test]
    fn referentially_transparent() {
        let (trace, dict) = setup();
        let e = parse_event("last(x, 2) + abs(c) > k").unwrap();
        for t in 0..trace.len() {
            assert_eq!(eval_event(&e, &trace, &dict, t), eval_event(&e, &trace, &dict, t));
        }
    }
}
