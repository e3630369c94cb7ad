//! English rendering of requirements.
//!
//! With `parenthesize` on, every non-atomic subterm is wrapped, the top-level
//! event included. With it off, only the parentheses needed to re-parse to
//! the same tree are emitted. Both modes use the textual operator spellings.

use alloc::string::String;

use super::ast::*;
use crate::value::format_float;

/// Renders `req` as a requirement sentence that re-parses to an equal AST.
pub fn render_textual(req: &Requirement, parenthesize: bool) -> String {
    let mut out = String::from(match req.scope {
        Scope::Initially => "At system start, ",
        Scope::Globally => "At each time step, ",
    });
    match &req.pattern {
        Pattern::Invariant { event } => {
            out.push('[');
            out.push_str(&render_event(event, parenthesize));
            out.push_str("] holds.");
        }
        Pattern::Response { trigger, trigger_duration, delay, response, response_duration } => {
            out.push_str("if [");
            out.push_str(&render_event(trigger, parenthesize));
            out.push_str("] has been valid for [");
            out.push_str(&render_duration(trigger_duration));
            out.push_str("], then in response, after a delay of [");
            out.push_str(&render_duration(delay));
            out.push_str("], [");
            out.push_str(&render_event(response, parenthesize));
            out.push_str("] is valid for [");
            out.push_str(&render_duration(response_duration));
            out.push_str("].");
        }
    }
    out
}

pub fn render_duration(d: &Duration) -> String {
    alloc::format!("{d}")
}

/// Renders a boolean event.
pub fn render_event(e: &Expr, parenthesize: bool) -> String {
    let mut r = Renderer { out: String::new(), all: parenthesize };
    r.boolean(e, 0);
    r.out
}

struct Renderer {
    out: String,
    all: bool,
}

/// Nodes that the grammar also admits in arithmetic position.
fn arith_capable(e: &Expr) -> bool {
    !matches!(
        e.kind,
        ExprKind::Bool(_) | ExprKind::Not(_) | ExprKind::ExtractBit { .. }
    ) && !matches!(&e.kind, ExprKind::Binary(op, ..) if !op.is_arithmetic())
}

fn bool_level(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::Binary(BinOp::Implies, ..) => 1,
        ExprKind::Binary(BinOp::Or, ..) => 2,
        ExprKind::Binary(BinOp::And, ..) => 3,
        ExprKind::Binary(BinOp::Eq, ..) => 4,
        _ => 5,
    }
}

/// Textual functions whose last argument extends as far as possible.
fn greedy(e: &Expr) -> bool {
    matches!(e.kind, ExprKind::Abs(_) | ExprKind::LastUnary(_) | ExprKind::Min(..) | ExprKind::Max(..))
}

fn arith_level(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
        ExprKind::Binary(BinOp::Mul | BinOp::Div, ..) => 2,
        _ if greedy(e) => 0,
        _ => 3,
    }
}

impl Renderer {
    fn push(&mut self, s: &str) {
        self.out.push_str(s);
    }

    fn wrap(&mut self, e: &Expr, needed: bool, f: impl FnOnce(&mut Self)) {
        let wrap = !e.is_atomic() && (self.all || needed);
        if wrap {
            self.push("(");
        }
        f(self);
        if wrap {
            self.push(")");
        }
    }

    fn atom(&mut self, e: &Expr) {
        match &e.kind {
            ExprKind::Bool(true) => self.push("TRUE"),
            ExprKind::Bool(false) => self.push("FALSE"),
            ExprKind::Int(i) => self.out.push_str(&alloc::format!("{i}")),
            ExprKind::Float(x) => self.out.push_str(&format_float(*x)),
            ExprKind::Var(n) => self.push(n),
            _ => unreachable!("not an atom"),
        }
    }

    fn boolean(&mut self, e: &Expr, min: u8) {
        if !self.all && arith_capable(e) && !e.is_atomic() {
            // Only reachable for ill-formed trees; a parenthesized arithmetic
            // term is the closest rendering.
            self.push("(");
            self.arith(e, 0);
            self.push(")");
            return;
        }
        self.wrap(e, bool_level(e) < min, |r| match &e.kind {
            ExprKind::Not(x) => {
                r.push("not ");
                r.boolean(x, 5);
            }
            ExprKind::Binary(BinOp::Eq, l, rr) if arith_capable(l) && arith_capable(rr) => {
                r.arith(l, 0);
                r.push(" is equal to ");
                r.arith(rr, 0);
            }
            ExprKind::Binary(op, l, rr) if op.is_logical() || *op == BinOp::Eq => {
                let lvl = bool_level(e);
                r.boolean(l, lvl);
                r.push(" ");
                r.push(op.text());
                r.push(" ");
                r.boolean(rr, lvl + 1);
            }
            ExprKind::Binary(op, l, rr) => {
                r.arith(l, 0);
                r.push(" ");
                r.push(op.text());
                r.push(" ");
                r.arith(rr, 0);
            }
            ExprKind::ExtractBit { index, value } => {
                r.push("bit ");
                r.arith(index, 0);
                r.push(" of ");
                r.arith(value, 0);
            }
            _ if e.is_atomic() => r.atom(e),
            _ => r.arith(e, 0),
        });
    }

    fn arith(&mut self, e: &Expr, min: u8) {
        if !arith_capable(e) {
            self.push("(");
            self.boolean(e, 0);
            self.push(")");
            return;
        }
        self.wrap(e, arith_level(e) < min, |r| match &e.kind {
            ExprKind::Sign(op, x) => {
                r.push(if *op == UnOp::Minus { "minus " } else { "plus " });
                r.arith(x, 3);
            }
            ExprKind::Binary(op, l, rr) => {
                let lvl = arith_level(e);
                r.arith(l, lvl);
                r.push(" ");
                r.push(op.text());
                r.push(" ");
                r.arith(rr, lvl + 1);
            }
            ExprKind::Abs(x) => {
                r.push("the absolute value of ");
                r.arith(x, 0);
            }
            ExprKind::Min(a, b) | ExprKind::Max(a, b) => {
                r.push(if matches!(e.kind, ExprKind::Min(..)) { "the minimum of " } else { "the maximum of " });
                r.arith(a, 0);
                r.push(" and ");
                r.arith(b, 0);
            }
            ExprKind::LastUnary(x) => {
                r.push("the previous value of ");
                r.arith(x, 0);
            }
            ExprKind::LastN(x, n) => {
                r.push("the value of ");
                r.arith(x, 0);
                r.out.push_str(&alloc::format!(" {n} steps ago"));
            }
            _ => r.atom(e),
        });
    }
}

#[cfg(test)]
mod tests {
    use super::super::parser::{parse_event, parse_requirement};
    use super::*;

    fn v(n: &str) -> Expr {
        Expr::var(n)
    }

    #[test]
    fn invariant_with_parentheses() {
        let r = Requirement::new("r", Scope::Globally, Pattern::Invariant { event: Expr::and(v("a"), v("b")) });
        assert_eq!(render_textual(&r, true), "At each time step, [(a and b)] holds.");
        assert_eq!(render_textual(&r, false), "At each time step, [a and b] holds.");
    }

    #[test]
    fn constants_use_canonical_spelling() {
        assert_eq!(render_event(&Expr::bool(true), true), "TRUE");
        assert_eq!(render_event(&Expr::eq(v("x"), Expr::float(2.0)), true), "(x is equal to 2.0)");
    }

    #[test]
    fn response_sentence() {
        let r = Requirement::new(
            "r",
            Scope::Globally,
            Pattern::Response {
                trigger: v("a"),
                trigger_duration: Duration::millis(50),
                delay: Duration::steps(0),
                response: v("b"),
                response_duration: Duration::steps(1),
            },
        );
        let s = render_textual(&r, true);
        assert_eq!(
            s,
            "At each time step, if [a] has been valid for [50 milliseconds], then in response, \
             after a delay of [0 simulation steps], [b] is valid for [1 simulation step]."
        );
        assert!(parse_requirement(&s).unwrap().same_formula(&r));
    }

    #[test]
    fn minimal_mode_keeps_needed_parentheses() {
        let cases = [
            Expr::implies(v("a"), Expr::implies(v("b"), v("c"))),
            Expr::not(Expr::eq(v("a"), v("b"))),
            Expr::eq(v("a"), Expr::eq(v("b"), v("c"))),
            Expr::binary(
                BinOp::Lt,
                Expr::binary(BinOp::Add, Expr::abs(v("x")), Expr::int(1)),
                Expr::binary(BinOp::Sub, v("y"), Expr::binary(BinOp::Sub, v("z"), Expr::int(2))),
            ),
            Expr::binary(BinOp::Gt, Expr::neg(Expr::binary(BinOp::Mul, v("x"), v("y"))), Expr::int(0)),
            Expr::eq(Expr::last_n(Expr::binary(BinOp::Sub, v("x"), Expr::int(4)), 4), Expr::int(1)),
        ];
        for e in cases {
            for on in [false, true] {
                let s = render_event(&e, on);
                assert_eq!(parse_event(&s).unwrap(), e, "{s}");
            }
        }
    }
}
