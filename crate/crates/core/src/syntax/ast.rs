use alloc::boxed::Box;
use alloc::string::String;
use core::fmt;

use serde::{Deserialize, Serialize};

/// Byte range into the requirement's source text.
///
/// Spans never take part in structural equality: two ASTs parsed from
/// differently formatted text compare equal.
#[derive(Debug, Clone, Copy, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn join(self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }
}

impl PartialEq for Span {
    fn eq(&self, _: &Span) -> bool {
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BinOp {
    Implies,
    Or,
    And,
    /// Generic equality; boolean vs numeric reading is decided by `check`.
    Eq,
    Lt,
    Le,
    Gt,
    Ge,
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    pub fn is_logical(self) -> bool {
        matches!(self, BinOp::Implies | BinOp::Or | BinOp::And)
    }

    pub fn is_relational(self) -> bool {
        matches!(self, BinOp::Eq | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge)
    }

    pub fn is_arithmetic(self) -> bool {
        matches!(self, BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div)
    }

    /// English spelling used by the textual renderer.
    pub fn text(self) -> &'static str {
        match self {
            BinOp::Implies => "implies",
            BinOp::Or => "or",
            BinOp::And => "and",
            BinOp::Eq => "is equal to",
            BinOp::Lt => "is less than",
            BinOp::Le => "is less or equal to",
            BinOp::Gt => "is greater than",
            BinOp::Ge => "is greater or equal to",
            BinOp::Add => "plus",
            BinOp::Sub => "minus",
            BinOp::Mul => "multiplied with",
            BinOp::Div => "divided by",
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Implies => "=>",
            BinOp::Or => "|",
            BinOp::And => "&",
            BinOp::Eq => "=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UnOp {
    Plus,
    Minus,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Bool(bool),
    Int(i64),
    Float(f64),
    Var(String),
    Not(Box<Expr>),
    Sign(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Abs(Box<Expr>),
    Min(Box<Expr>, Box<Expr>),
    Max(Box<Expr>, Box<Expr>),
    /// `last(x)`: the value one step ago.
    LastUnary(Box<Expr>),
    /// `last(x, n)`: the value `n` steps ago; `n` is a positive literal.
    LastN(Box<Expr>, u32),
    /// `bit i of x`.
    ExtractBit { index: Box<Expr>, value: Box<Expr> },
}

/// An event expression node.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Expr { kind, span }
    }

    fn bare(kind: ExprKind) -> Self {
        Expr { kind, span: Span::default() }
    }

    pub fn var(name: &str) -> Self {
        Self::bare(ExprKind::Var(name.into()))
    }

    pub fn bool(b: bool) -> Self {
        Self::bare(ExprKind::Bool(b))
    }

    pub fn int(i: i64) -> Self {
        Self::bare(ExprKind::Int(i))
    }

    pub fn float(x: f64) -> Self {
        Self::bare(ExprKind::Float(x))
    }

    pub fn binary(op: BinOp, l: Expr, r: Expr) -> Self {
        Self::bare(ExprKind::Binary(op, Box::new(l), Box::new(r)))
    }

    pub fn and(l: Expr, r: Expr) -> Self {
        Self::binary(BinOp::And, l, r)
    }

    pub fn or(l: Expr, r: Expr) -> Self {
        Self::binary(BinOp::Or, l, r)
    }

    pub fn implies(l: Expr, r: Expr) -> Self {
        Self::binary(BinOp::Implies, l, r)
    }

    pub fn eq(l: Expr, r: Expr) -> Self {
        Self::binary(BinOp::Eq, l, r)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: Expr) -> Self {
        Self::bare(ExprKind::Not(Box::new(e)))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(e: Expr) -> Self {
        Self::bare(ExprKind::Sign(UnOp::Minus, Box::new(e)))
    }

    pub fn abs(e: Expr) -> Self {
        Self::bare(ExprKind::Abs(Box::new(e)))
    }

    pub fn min(a: Expr, b: Expr) -> Self {
        Self::bare(ExprKind::Min(Box::new(a), Box::new(b)))
    }

    pub fn max(a: Expr, b: Expr) -> Self {
        Self::bare(ExprKind::Max(Box::new(a), Box::new(b)))
    }

    pub fn last(e: Expr) -> Self {
        Self::bare(ExprKind::LastUnary(Box::new(e)))
    }

    pub fn last_n(e: Expr, n: u32) -> Self {
        Self::bare(ExprKind::LastN(Box::new(e), n))
    }

    pub fn extract_bit(index: Expr, value: Expr) -> Self {
        Self::bare(ExprKind::ExtractBit { index: Box::new(index), value: Box::new(value) })
    }

    pub fn is_atomic(&self) -> bool {
        matches!(
            self.kind,
            ExprKind::Bool(_) | ExprKind::Int(_) | ExprKind::Float(_) | ExprKind::Var(_)
        )
    }

    /// Direct children in evaluation order.
    pub fn children(&self) -> impl Iterator<Item = &Expr> {
        let (a, b): (Option<&Expr>, Option<&Expr>) = match &self.kind {
            ExprKind::Bool(_) | ExprKind::Int(_) | ExprKind::Float(_) | ExprKind::Var(_) => (None, None),
            ExprKind::Not(e) | ExprKind::Sign(_, e) | ExprKind::Abs(e) | ExprKind::LastUnary(e) => {
                (Some(e), None)
            }
            ExprKind::LastN(e, _) => (Some(e), None),
            ExprKind::Binary(_, l, r) | ExprKind::Min(l, r) | ExprKind::Max(l, r) => (Some(l), Some(r)),
            ExprKind::ExtractBit { index, value } => (Some(index), Some(value)),
        };
        a.into_iter().chain(b)
    }

    /// Pre-order visit.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children().map(Expr::size).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children().map(Expr::depth).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeUnit {
    SimulationSteps,
    Milliseconds,
    Seconds,
    Minutes,
    Hours,
}

impl TimeUnit {
    pub fn as_str(self) -> &'static str {
        match self {
            TimeUnit::SimulationSteps => "simulation_steps",
            TimeUnit::Milliseconds => "milliseconds",
            TimeUnit::Seconds => "seconds",
            TimeUnit::Minutes => "minutes",
            TimeUnit::Hours => "hours",
        }
    }

    pub fn parse(s: &str) -> Option<TimeUnit> {
        match s {
            "simulation_steps" => Some(TimeUnit::SimulationSteps),
            "milliseconds" => Some(TimeUnit::Milliseconds),
            "seconds" => Some(TimeUnit::Seconds),
            "minutes" => Some(TimeUnit::Minutes),
            "hours" => Some(TimeUnit::Hours),
            _ => None,
        }
    }

    /// Milliseconds per unit; `None` for simulation steps.
    pub fn millis(self) -> Option<u64> {
        match self {
            TimeUnit::SimulationSteps => None,
            TimeUnit::Milliseconds => Some(1),
            TimeUnit::Seconds => Some(1_000),
            TimeUnit::Minutes => Some(60_000),
            TimeUnit::Hours => Some(3_600_000),
        }
    }

    pub fn text(self, plural: bool) -> &'static str {
        match (self, plural) {
            (TimeUnit::SimulationSteps, false) => "simulation step",
            (TimeUnit::SimulationSteps, true) => "simulation steps",
            (TimeUnit::Milliseconds, false) => "millisecond",
            (TimeUnit::Milliseconds, true) => "milliseconds",
            (TimeUnit::Seconds, false) => "second",
            (TimeUnit::Seconds, true) => "seconds",
            (TimeUnit::Minutes, false) => "minute",
            (TimeUnit::Minutes, true) => "minutes",
            (TimeUnit::Hours, false) => "hour",
            (TimeUnit::Hours, true) => "hours",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Duration {
    pub magnitude: u64,
    pub unit: TimeUnit,
    pub span: Span,
}

impl Duration {
    pub fn new(magnitude: u64, unit: TimeUnit) -> Self {
        Duration { magnitude, unit, span: Span::default() }
    }

    pub fn steps(magnitude: u64) -> Self {
        Self::new(magnitude, TimeUnit::SimulationSteps)
    }

    pub fn millis(magnitude: u64) -> Self {
        Self::new(magnitude, TimeUnit::Milliseconds)
    }
}

impl fmt::Display for Duration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.magnitude, self.unit.text(self.magnitude != 1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    /// Evaluated once, at step 0.
    Initially,
    /// Evaluated at every step after the first.
    Globally,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Pattern {
    Invariant {
        event: Expr,
    },
    Response {
        trigger: Expr,
        trigger_duration: Duration,
        delay: Duration,
        response: Expr,
        response_duration: Duration,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Requirement {
    pub id: String,
    pub scope: Scope,
    pub pattern: Pattern,
    pub source_text: String,
}

impl Requirement {
    pub fn new(id: &str, scope: Scope, pattern: Pattern) -> Self {
        Requirement { id: id.into(), scope, pattern, source_text: String::new() }
    }

    /// Structural equality of the formula, ignoring id and source text.
    pub fn same_formula(&self, other: &Requirement) -> bool {
        self.scope == other.scope && self.pattern == other.pattern
    }

    pub fn events(&self) -> impl Iterator<Item = &Expr> {
        let (a, b) = match &self.pattern {
            Pattern::Invariant { event } => (event, None),
            Pattern::Response { trigger, response, .. } => (trigger, Some(response)),
        };
        core::iter::once(a).chain(b)
    }
}
