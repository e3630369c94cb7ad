//! Deterministic random requirements and traces for differential testing.
//!
//! Cases use a fixed dictionary of small-domain variables and the
//! supported operators except division, so evaluation never fails.

use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dictionary::{VarKind, VariableDecl, VariableDictionary};
use crate::semantics::{StepConfig, Trace};
use crate::syntax::{BinOp, Duration, Expr, ExprKind, Pattern, Requirement, Scope, TimeUnit, UnOp};
use crate::value::{Value, ValueType};

pub const BOOL_VARS: [&str; 3] = ["b0", "b1", "b2"];
pub const INT_VARS: [&str; 3] = ["i0", "i1", "i2"];
/// Inclusive range of the int signals: eight values.
pub const INT_RANGE: (i64, i64) = (-3, 4);
pub const STEP_MS: u64 = 10;
pub const MAX_TRACE: usize = 40;

#[derive(Debug, Clone)]
pub struct FuzzCase {
    pub requirement: Requirement,
    pub dict: VariableDictionary,
    pub trace: Trace,
    pub cfg: StepConfig,
}

/// The dictionary every case is written against.
pub fn dictionary() -> VariableDictionary {
    let mut decls = Vec::new();
    for (k, b) in BOOL_VARS.iter().enumerate() {
        let d = VariableDecl::new(b, VarKind::Signal, ValueType::Bool);
        decls.push(if k == 1 { d.with_initial(Value::Bool(true)) } else { d });
    }
    for (k, i) in INT_VARS.iter().enumerate() {
        let d = VariableDecl::new(i, VarKind::Signal, ValueType::Int)
            .with_range(Value::Int(INT_RANGE.0), Value::Int(INT_RANGE.1));
        decls.push(if k == 2 { d.with_initial(Value::Int(-2)) } else { d });
    }
    decls.push(VariableDecl::new("k", VarKind::Constant, ValueType::Int).with_value(Value::Int(2)));
    decls.push(VariableDecl::new("flag", VarKind::Constant, ValueType::Bool).with_value(Value::Bool(true)));
    decls.push(
        VariableDecl::new("cal", VarKind::Calibratable, ValueType::Int)
            .with_range(Value::Int(0), Value::Int(3))
            .with_value(Value::Int(1)),
    );
    VariableDictionary::from_decls(decls).expect("fuzz dictionary is valid")
}

pub struct Generator {
    rng: ChaCha8Rng,
}

impl Generator {
    pub fn new(seed: u64) -> Self {
        Generator { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    fn pick<'a>(&mut self, xs: &[&'a str]) -> &'a str {
        xs[self.rng.gen_range(0..xs.len())]
    }

    /// A well-typed boolean event of depth at most `depth`.
    pub fn bool_expr(&mut self, depth: u32) -> Expr {
        if depth <= 1 || self.rng.gen_ratio(1, 5) {
            return match self.rng.gen_range(0..10) {
                0 => Expr::bool(self.rng.gen()),
                1 => Expr::var("flag"),
                _ => Expr::var(self.pick(&BOOL_VARS)),
            };
        }
        let d = depth - 1;
        match self.rng.gen_range(0..9) {
            0 => Expr::not(self.bool_expr(d)),
            1 => Expr::and(self.bool_expr(d), self.bool_expr(d)),
            2 => Expr::or(self.bool_expr(d), self.bool_expr(d)),
            3 => Expr::implies(self.bool_expr(d), self.bool_expr(d)),
            4 => Expr::eq(self.bool_expr(d), self.bool_expr(d)),
            5 => {
                let op = [BinOp::Eq, BinOp::Lt, BinOp::Le, BinOp::Gt, BinOp::Ge][self.rng.gen_range(0..5)];
                Expr::binary(op, self.int_expr(d), self.int_expr(d))
            }
            6 => Expr::extract_bit(Expr::int(self.rng.gen_range(0..8)), self.int_expr(d)),
            7 if depth >= 3 => {
                let b = Expr::var(self.pick(&BOOL_VARS));
                let last = if self.rng.gen() { Expr::last(b) } else { Expr::last_n(b, self.rng.gen_range(1..4)) };
                Expr::eq(last, Expr::var(self.pick(&BOOL_VARS)))
            }
            _ => {
                let op = [BinOp::Lt, BinOp::Ge][self.rng.gen_range(0..2)];
                Expr::binary(op, self.int_expr(d), self.int_expr(d))
            }
        }
    }

    /// A well-typed int term of depth at most `depth`.
    pub fn int_expr(&mut self, depth: u32) -> Expr {
        if depth <= 1 || self.rng.gen_ratio(1, 4) {
            return match self.rng.gen_range(0..10) {
                0 | 1 => Expr::int(self.rng.gen_range(0..6)),
                2 => Expr::var("k"),
                3 => Expr::var("cal"),
                _ => Expr::var(self.pick(&INT_VARS)),
            };
        }
        let d = depth - 1;
        match self.rng.gen_range(0..10) {
            0 => Expr::binary(BinOp::Add, self.int_expr(d), self.int_expr(d)),
            1 => Expr::binary(BinOp::Sub, self.int_expr(d), self.int_expr(d)),
            2 => Expr::binary(BinOp::Mul, self.int_expr(d), self.int_expr(d)),
            3 => Expr::neg(self.int_expr(d)),
            4 => Expr::new(ExprKind::Sign(UnOp::Plus, self.int_expr(d).into()), Default::default()),
            5 => Expr::abs(self.int_expr(d)),
            6 => Expr::min(self.int_expr(d), self.int_expr(d)),
            7 => Expr::max(self.int_expr(d), self.int_expr(d)),
            8 => Expr::last(self.int_expr(d)),
            _ => Expr::last_n(self.int_expr(d), self.rng.gen_range(1..4)),
        }
    }

    fn duration(&mut self, min: u64, max: u64) -> Duration {
        let n = self.rng.gen_range(min..=max);
        if self.rng.gen_ratio(1, 3) {
            Duration::new(n * STEP_MS, TimeUnit::Milliseconds)
        } else {
            Duration::steps(n)
        }
    }

    pub fn requirement(&mut self, id: &str) -> Requirement {
        let scope = if self.rng.gen_ratio(1, 4) { Scope::Initially } else { Scope::Globally };
        let pattern = if self.rng.gen_ratio(1, 3) {
            Pattern::Invariant { event: self.bool_expr(4) }
        } else {
            Pattern::Response {
                trigger: self.bool_expr(4),
                trigger_duration: self.duration(1, 4),
                delay: self.duration(0, 3),
                response: self.bool_expr(4),
                response_duration: self.duration(1, 4),
            }
        };
        Requirement::new(id, scope, pattern)
    }

    /// A trace of `1..=MAX_TRACE` steps over every fuzz signal.
    pub fn trace(&mut self) -> Trace {
        let len = self.rng.gen_range(1..=MAX_TRACE);
        let mut t = Trace::new(STEP_MS, len);
        // biased towards true so that long triggers actually occur
        let p_true = [0.5, 0.8, 0.95][self.rng.gen_range(0..3)];
        for b in BOOL_VARS {
            let col = (0..len).map(|_| Value::Bool(self.rng.gen_bool(p_true))).collect();
            t.insert(b, col).expect("length matches");
        }
        for i in INT_VARS {
            let col = (0..len).map(|_| Value::Int(self.rng.gen_range(INT_RANGE.0..=INT_RANGE.1))).collect();
            t.insert(i, col).expect("length matches");
        }
        if self.rng.gen() {
            let c = Value::Int(self.rng.gen_range(0..=3));
            t.insert("cal", alloc::vec![c; len]).expect("length matches");
        }
        t
    }
}

/// Case number `index` of the corpus seeded by `seed`.
pub fn case(seed: u64, index: u64) -> FuzzCase {
    let mut g = Generator::new(seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let requirement = g.requirement(&alloc::format!("fuzz_{index}"));
    let trace = g.trace();
    FuzzCase { requirement, dict: dictionary(), trace, cfg: StepConfig { step_ms: STEP_MS } }
}

/// Every variable the fuzz dictionary declares, by type.
pub fn variable_names(ty: ValueType) -> Vec<String> {
    dictionary().iter().filter(|d| d.data_type == ty).map(|d| d.name.clone()).collect()
}
