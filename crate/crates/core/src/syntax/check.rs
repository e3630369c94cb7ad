//! Name resolution and type checking against a variable dictionary.

use alloc::format;
use alloc::vec::Vec;

use super::ast::*;
use super::diag::Diagnostic;
use crate::dictionary::VariableDictionary;
use crate::value::ValueType;

/// Checks a requirement. The result is empty iff the requirement is
/// well-formed; warnings never block later stages.
pub fn check(req: &Requirement, dict: &VariableDictionary) -> Vec<Diagnostic> {
    let src = req.source_text.as_str();
    let mut out = Vec::new();
    match &req.pattern {
        Pattern::Invariant { event } => check_event_into(src, event, dict, &mut out),
        Pattern::Response { trigger, trigger_duration, response, response_duration, .. } => {
            check_event_into(src, trigger, dict, &mut out);
            check_event_into(src, response, dict, &mut out);
            for (d, what) in [(trigger_duration, "trigger"), (response_duration, "response")] {
                if d.magnitude == 0 {
                    out.push(Diagnostic::error(src, d.span, format!("{what} duration must be at least 1")));
                }
            }
        }
    }
    out
}

/// Checks a stand-alone boolean event whose spans point into `source`.
pub fn check_event(source: &str, e: &Expr, dict: &VariableDictionary) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    check_event_into(source, e, dict, &mut out);
    out
}

fn check_event_into(src: &str, e: &Expr, dict: &VariableDictionary, out: &mut Vec<Diagnostic>) {
    let mut cx = Cx { src, dict, out };
    if let Some(t) = cx.ty(e) {
        if t != ValueType::Bool {
            cx.err(e, format!("event must be boolean, found {t}"));
        }
    }
}

/// Type of a well-formed expression; `None` if it does not type-check.
pub fn infer_type(e: &Expr, dict: &VariableDictionary) -> Option<ValueType> {
    let mut sink = Vec::new();
    let t = Cx { src: "", dict, out: &mut sink }.ty(e);
    if sink.iter().any(Diagnostic::is_error) {
        None
    } else {
        t
    }
}

struct Cx<'a> {
    src: &'a str,
    dict: &'a VariableDictionary,
    out: &'a mut Vec<Diagnostic>,
}

impl Cx<'_> {
    fn err(&mut self, e: &Expr, msg: alloc::string::String) {
        self.out.push(Diagnostic::error(self.src, e.span, msg));
    }

    fn expect(&mut self, e: &Expr, want: &str, ok: fn(ValueType) -> bool) -> Option<ValueType> {
        let t = self.ty(e)?;
        if ok(t) {
            Some(t)
        } else {
            self.err(e, format!("expected {want} operand, found {t}"));
            None
        }
    }

    fn numeric(&mut self, e: &Expr) -> Option<ValueType> {
        self.expect(e, "numeric", ValueType::is_numeric)
    }

    fn boolean(&mut self, e: &Expr) -> Option<ValueType> {
        self.expect(e, "boolean", |t| t == ValueType::Bool)
    }

    fn int(&mut self, e: &Expr) -> Option<ValueType> {
        self.expect(e, "int", |t| t == ValueType::Int)
    }

    /// Both operands are always visited so every error is reported.
    fn ty(&mut self, e: &Expr) -> Option<ValueType> {
        match &e.kind {
            ExprKind::Bool(_) => Some(ValueType::Bool),
            ExprKind::Int(_) => Some(ValueType::Int),
            ExprKind::Float(_) => Some(ValueType::Float),
            ExprKind::Var(name) => match self.dict.lookup(name) {
                None => {
                    self.err(e, format!("unknown identifier '{name}'"));
                    None
                }
                Some(d) if !d.is_scalar() => {
                    self.err(
                        e,
                        format!("'{name}' has dimensions {}x{} and cannot be used in an event", d.dims.0, d.dims.1),
                    );
                    None
                }
                Some(d) => Some(d.data_type),
            },
            ExprKind::Not(x) => self.boolean(x).map(|_| ValueType::Bool),
            ExprKind::Sign(_, x) | ExprKind::Abs(x) => self.numeric(x),
            ExprKind::LastUnary(x) | ExprKind::LastN(x, _) => self.ty(x),
            ExprKind::Min(a, b) | ExprKind::Max(a, b) => {
                let (ta, tb) = (self.numeric(a), self.numeric(b));
                Some(ta?.promote(tb?))
            }
            ExprKind::ExtractBit { index, value } => {
                let (ti, tv) = (self.int(index), self.int(value));
                ti?;
                tv?;
                if let ExprKind::Int(i) = index.kind {
                    if !(0..64).contains(&i) {
                        self.err(index, format!("bit index {i} outside 0..63"));
                        return None;
                    }
                }
                Some(ValueType::Bool)
            }
            ExprKind::Binary(op, l, r) if op.is_logical() => {
                let (tl, tr) = (self.boolean(l), self.boolean(r));
                tl?;
                tr?;
                Some(ValueType::Bool)
            }
            ExprKind::Binary(BinOp::Eq, l, r) => {
                let (tl, tr) = (self.ty(l), self.ty(r));
                let (tl, tr) = (tl?, tr?);
                if (tl == ValueType::Bool) != (tr == ValueType::Bool) {
                    self.err(e, format!("cannot compare {tl} with {tr}"));
                    return None;
                }
                if tl == ValueType::Float || tr == ValueType::Float {
                    self.out.push(Diagnostic::warning(
                        self.src,
                        e.span,
                        "exact equality on float values is fragile",
                    ));
                }
                Some(ValueType::Bool)
            }
            ExprKind::Binary(op, l, r) if op.is_relational() => {
                let (tl, tr) = (self.numeric(l), self.numeric(r));
                tl?;
                tr?;
                Some(ValueType::Bool)
            }
            ExprKind::Binary(op, l, r) => {
                let (tl, tr) = (self.numeric(l), self.numeric(r));
                let t = tl?.promote(tr?);
                if *op == BinOp::Div {
                    if let ExprKind::Int(0) = r.kind {
                        self.err(r, "division by constant zero".into());
                        return None;
                    }
                }
                Some(t)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::parser::{parse_event, parse_requirement};
    use super::*;
    use crate::dictionary::{VarKind, VariableDecl};
    use crate::value::Value;

    fn dict() -> VariableDictionary {
        VariableDictionary::from_decls([
            VariableDecl::new("b", VarKind::Signal, ValueType::Bool),
            VariableDecl::new("c", VarKind::Signal, ValueType::Bool),
            VariableDecl::new("i", VarKind::Signal, ValueType::Int),
            VariableDecl::new("x", VarKind::Signal, ValueType::Float),
            VariableDecl::new("k", VarKind::Constant, ValueType::Int).with_value(Value::Int(3)),
            VariableDecl { dims: (2, 2), ..VariableDecl::new("m", VarKind::Signal, ValueType::Int) },
        ])
        .unwrap()
    }

    fn errors(s: &str) -> Vec<Diagnostic> {
        let e = parse_event(s).unwrap();
        check_event(s, &e, &dict()).into_iter().filter(Diagnostic::is_error).collect()
    }

    #[test]
    fn well_typed_events() {
        for s in [
            "b & not c",
            "b = c",
            "i + k * 2 > x",
            "bit 3 of i",
            "last(b) = c",
            "the value of i 2 steps ago < k",
            "abs(i) / 2 >= min(x, 1.5)",
        ] {
            assert!(errors(s).is_empty(), "{s}: {:?}", errors(s));
        }
    }

    #[test]
    fn unknown_identifier_has_locus() {
        let d = errors("b and sig_X");
        assert_eq!(d.len(), 1);
        assert!(d[0].message.contains("unknown identifier"));
        assert_eq!(d[0].col, 7);
    }

    #[test]
    fn type_errors() {
        assert_eq!(errors("b = 3").len(), 1);
        assert_eq!(errors("b < 1").len(), 1);
        assert_eq!(errors("bit 1 of x").len(), 1);
        assert_eq!(errors("i + 1 = b").len(), 1);
        assert_eq!(errors("not i").len(), 1);
        assert_eq!(errors("m > 1").len(), 1);
        assert_eq!(errors("bit 70 of i").len(), 1);
        assert_eq!(errors("zz & yy").len(), 2);
    }

    #[test]
    fn float_equality_is_a_warning() {
        let s = "x = 1.0";
        let all = check_event(s, &parse_event(s).unwrap(), &dict());
        assert_eq!(all.len(), 1);
        assert!(!all[0].is_error());
    }

    #[test]
    fn zero_durations() {
        let ok = parse_requirement(
            "At each time step, if [b] has been valid for [1 step], then in response, after a delay of [0 steps], [c] is valid for [1 step].",
        )
        .unwrap();
        assert!(check(&ok, &dict()).is_empty());
        let bad = parse_requirement(
            "At each time step, if [b] has been valid for [0 steps], then in response, after a delay of [0 steps], [c] is valid for [0 steps].",
        )
        .unwrap();
        assert_eq!(check(&bad, &dict()).len(), 2);
    }
}
