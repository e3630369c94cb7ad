//! SV-COMP style C harness.
//!
//! Calibratables get one nondeterministic value constrained to their range,
//! signals get fresh nondeterministic values every step, and the monitor is
//! a counter automaton that calls `__VERIFIER_error()` exactly on the steps
//! where the past-time reading of the requirement fails.
//!
//! [`CounterMonitor`] is that automaton; the emitter prints its update rule
//! and tests run it directly. C arithmetic replaces the checked arithmetic
//! of the evaluator, so overflow and division by zero are undefined
//! behaviour in the harness rather than reported errors.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use super::{ExportBundle, ExportError, Format};
use crate::dictionary::{VarKind, VariableDecl, VariableDictionary};
use crate::semantics::{normalize, MonitorForm, StepConfig};
use crate::syntax::{infer_type, render_textual, BinOp, Expr, ExprKind, Requirement, Scope, UnOp};
use crate::value::{format_float, Value, ValueType};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FloatType {
    Float,
    #[default]
    Double,
}

/// C types used for the three value types.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WidthConfig {
    pub bool_type: &'static str,
    /// Signed integer width: 8, 16, 32 or 64.
    pub int_bits: u8,
    pub float_type: FloatType,
}

impl Default for WidthConfig {
    fn default() -> Self {
        WidthConfig { bool_type: "unsigned char", int_bits: 32, float_type: FloatType::Double }
    }
}

impl WidthConfig {
    fn c_type(&self, t: ValueType) -> String {
        match t {
            ValueType::Bool => self.bool_type.into(),
            ValueType::Int => format!("int{}_t", self.int_bits),
            ValueType::Float => match self.float_type {
                FloatType::Float => "float".into(),
                FloatType::Double => "double".into(),
            },
        }
    }

    fn nondet(&self, t: ValueType) -> &'static str {
        match t {
            ValueType::Bool => "__VERIFIER_nondet_bool",
            ValueType::Int => match self.int_bits {
                8 => "__VERIFIER_nondet_char",
                16 => "__VERIFIER_nondet_short",
                32 => "__VERIFIER_nondet_int",
                _ => "__VERIFIER_nondet_longlong",
            },
            ValueType::Float => match self.float_type {
                FloatType::Float => "__VERIFIER_nondet_float",
                FloatType::Double => "__VERIFIER_nondet_double",
            },
        }
    }

    fn nondet_decl(&self, t: ValueType) -> String {
        let ret = match t {
            ValueType::Bool => "_Bool",
            ValueType::Int => match self.int_bits {
                8 => "char",
                16 => "short",
                32 => "int",
                _ => "long long",
            },
            ValueType::Float => match self.float_type {
                FloatType::Float => "float",
                FloatType::Double => "double",
            },
        };
        format!("extern {ret} {}(void);", self.nondet(t))
    }

    fn int_range(&self) -> (i64, i64) {
        match self.int_bits {
            64 => (i64::MIN, i64::MAX),
            b => (-(1i64 << (b - 1)), (1i64 << (b - 1)) - 1),
        }
    }
}

/// Step-synchronous violation detector for one requirement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CounterMonitor {
    /// Fails on a step in scope whose event is false.
    Invariant { scope: Scope },
    /// Trigger run-length counter `p_run` saturating at `t_p`, response
    /// run-length counter `q_run` saturating at `t_q`, and a ring of
    /// `t_d + t_q` fire flags: a fire at step `s` is due at `s + t_d + t_q`
    /// and fails unless the response held on the last `t_q` steps.
    Response { scope: Scope, t_p: u64, t_d: u64, t_q: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonitorState {
    /// Step number, saturating once no comparison depends on it.
    pub step: u64,
    pub p_run: u64,
    pub q_run: u64,
    pub fired: Vec<bool>,
    pub head: usize,
}

impl CounterMonitor {
    pub fn from_form(form: &MonitorForm) -> Self {
        match form {
            MonitorForm::Invariant { scope, .. } => CounterMonitor::Invariant { scope: *scope },
            MonitorForm::Response { scope, nr } => {
                CounterMonitor::Response { scope: *scope, t_p: nr.t_p, t_d: nr.t_d, t_q: nr.t_q }
            }
        }
    }

    fn ring_len(&self) -> usize {
        match self {
            CounterMonitor::Invariant { .. } => 0,
            CounterMonitor::Response { t_d, t_q, .. } => (t_d + t_q) as usize,
        }
    }

    fn step_cap(&self) -> u64 {
        match self {
            CounterMonitor::Invariant { .. } => 1,
            CounterMonitor::Response { t_p, .. } => *t_p,
        }
    }

    pub fn start(&self) -> MonitorState {
        MonitorState { step: 0, p_run: 0, q_run: 0, fired: vec![false; self.ring_len()], head: 0 }
    }

    /// Advances one step with the current trigger and response values (the
    /// event value for invariants, `q` unused). Returns whether the step is
    /// a violation.
    pub fn step(&self, st: &mut MonitorState, p: bool, q: bool) -> bool {
        let violated = match *self {
            CounterMonitor::Invariant { scope } => {
                let in_scope = match scope {
                    Scope::Globally => st.step >= 1,
                    Scope::Initially => st.step == 0,
                };
                in_scope && !p
            }
            CounterMonitor::Response { scope, t_p, t_q, .. } => {
                let counting = scope == Scope::Initially || st.step >= 1;
                st.p_run = if counting && p { (st.p_run + 1).min(t_p) } else { 0 };
                st.q_run = if q { (st.q_run + 1).min(t_q) } else { 0 };
                let fire = st.p_run >= t_p && (scope == Scope::Globally || st.step == t_p - 1);
                let due = st.fired[st.head];
                st.fired[st.head] = fire;
                st.head = (st.head + 1) % st.fired.len();
                due && st.q_run < t_q
            }
        };
        if st.step < self.step_cap() {
            st.step += 1;
        }
        violated
    }

    /// Violating steps over the given event series.
    pub fn violations(&self, p: &[bool], q: &[bool]) -> Vec<usize> {
        let mut st = self.start();
        (0..p.len()).filter(|&t| self.step(&mut st, p[t], q.get(t).copied().unwrap_or(true))).collect()
    }
}

const C_KEYWORDS: &[&str] = &[
    "auto", "break", "case", "char", "const", "continue", "default", "do", "double", "else", "enum", "extern",
    "float", "for", "goto", "if", "inline", "int", "long", "main", "register", "restrict", "return", "short",
    "signed", "sizeof", "static", "struct", "switch", "typedef", "union", "unsigned", "void", "volatile", "while",
];

fn c_name(name: &str) -> String {
    if C_KEYWORDS.contains(&name) || name.starts_with("reqc_") || name.starts_with("__") {
        format!("u_{name}")
    } else {
        name.into()
    }
}

fn c_value(v: Value) -> String {
    match v {
        Value::Bool(b) => if b { "1" } else { "0" }.into(),
        Value::Int(i64::MIN) => "(-9223372036854775807LL - 1)".into(),
        Value::Int(i) if i < 0 && i32::try_from(i).is_ok() => format!("({i})"),
        Value::Int(i) if i32::try_from(i).is_ok() => i.to_string(),
        Value::Int(i) if i < 0 => format!("({i}LL)"),
        Value::Int(i) => format!("{i}LL"),
        Value::Float(x) if x.is_sign_negative() => format!("({})", format_float(x)),
        Value::Float(x) => format_float(x),
    }
}

struct LastSlot<'e> {
    n: u32,
    arg: &'e Expr,
    ty: ValueType,
}

struct Emitter<'e> {
    dict: &'e VariableDictionary,
    lasts: Vec<LastSlot<'e>>,
    slot_of: BTreeMap<usize, usize>,
}

impl<'e> Emitter<'e> {
    /// Registers every `last` node, inner ones first.
    fn collect(&mut self, e: &'e Expr) {
        for c in e.children() {
            self.collect(c);
        }
        let (arg, n) = match &e.kind {
            ExprKind::LastUnary(x) => (&**x, 1),
            ExprKind::LastN(x, n) => (&**x, *n),
            _ => return,
        };
        let ty = infer_type(arg, self.dict).unwrap_or(ValueType::Float);
        self.slot_of.insert(e as *const Expr as usize, self.lasts.len());
        self.lasts.push(LastSlot { n, arg, ty });
    }

    /// C expression for `e`; with `initial` set, signals read their initial
    /// value and `last` is transparent.
    fn expr(&self, e: &Expr, initial: bool) -> String {
        let x = |c: &Expr| self.expr(c, initial);
        match &e.kind {
            ExprKind::Bool(b) => c_value(Value::Bool(*b)),
            ExprKind::Int(i) => c_value(Value::Int(*i)),
            ExprKind::Float(f) => c_value(Value::Float(*f)),
            ExprKind::Var(n) => match self.dict.lookup(n) {
                Some(d) if initial && d.kind == VarKind::Signal => c_value(d.initial_value()),
                _ => c_name(n),
            },
            ExprKind::Not(a) => format!("(!{})", x(a)),
            ExprKind::Sign(UnOp::Minus, a) => format!("(-{})", x(a)),
            ExprKind::Sign(UnOp::Plus, a) => format!("(+{})", x(a)),
            ExprKind::Abs(a) => {
                let a = x(a);
                format!("({a} < 0 ? -{a} : {a})")
            }
            ExprKind::Min(a, b) | ExprKind::Max(a, b) => {
                let (a, b) = (x(a), x(b));
                let cmp = if matches!(e.kind, ExprKind::Min(..)) { "<=" } else { ">=" };
                format!("({a} {cmp} {b} ? {a} : {b})")
            }
            ExprKind::LastUnary(a) | ExprKind::LastN(a, _) => {
                if initial {
                    x(a)
                } else {
                    let k = self.slot_of[&(e as *const Expr as usize)];
                    format!("reqc_last_{k}[reqc_last_{k}_head]")
                }
            }
            ExprKind::ExtractBit { index, value } => {
                format!("((int)(((uint64_t){} >> {}) & 1u))", x(value), x(index))
            }
            ExprKind::Binary(BinOp::Implies, a, b) => format!("(!{} || {})", x(a), x(b)),
            ExprKind::Binary(op, a, b) => {
                let sym = match op {
                    BinOp::And => "&&",
                    BinOp::Or => "||",
                    BinOp::Eq => "==",
                    _ => op.symbol(),
                };
                format!("({} {sym} {})", x(a), x(b))
            }
        }
    }
}

fn check_width(d: &VariableDecl, w: &WidthConfig) -> Result<(), ExportError> {
    if d.data_type != ValueType::Int {
        return Ok(());
    }
    let (lo, hi) = w.int_range();
    for v in [d.min, d.max, d.value, d.initial].into_iter().flatten() {
        if let Value::Int(i) = v {
            if i < lo || i > hi {
                return Err(ExportError::WidthTooNarrow { name: d.name.clone(), value: i.to_string(), bits: w.int_bits });
            }
        }
    }
    Ok(())
}

fn assume_range(out: &mut String, d: &VariableDecl, indent: &str) {
    let name = c_name(&d.name);
    let mut conds = Vec::new();
    if d.data_type == ValueType::Bool {
        conds.push(format!("{name} <= 1"));
    } else {
        if let Some(lo) = d.min {
            conds.push(format!("{name} >= {}", c_value(lo)));
        }
        if let Some(hi) = d.max {
            conds.push(format!("{name} <= {}", c_value(hi)));
        }
    }
    if !conds.is_empty() {
        let _ = writeln!(out, "{indent}__VERIFIER_assume({});", conds.join(" && "));
    }
}

pub fn export_c_harness(
    req: &Requirement,
    dict: &VariableDictionary,
    cfg: StepConfig,
    widths: &WidthConfig,
) -> Result<ExportBundle, ExportError> {
    if ![8, 16, 32, 64].contains(&widths.int_bits) {
        return Err(ExportError::BadWidth(widths.int_bits));
    }
    let form = normalize(req, cfg)?;
    let monitor = CounterMonitor::from_form(&form);
    let (p_event, q_event) = match &form {
        MonitorForm::Invariant { event, .. } => (event, None),
        MonitorForm::Response { nr, .. } => (&nr.trigger, Some(&nr.response)),
    };

    // referenced variables in first-use order
    let mut used: Vec<&VariableDecl> = Vec::new();
    for e in req.events() {
        e.visit(&mut |n| {
            if let ExprKind::Var(name) = &n.kind {
                if let Some(d) = dict.lookup(name) {
                    if !used.iter().any(|u| u.name == d.name) {
                        used.push(d);
                    }
                }
            }
        });
    }
    for d in &used {
        check_width(d, widths)?;
    }
    let mut em = Emitter { dict, lasts: Vec::new(), slot_of: BTreeMap::new() };
    em.collect(p_event);
    if let Some(q) = q_event {
        em.collect(q);
    }

    let of = |k: VarKind| used.iter().copied().filter(move |d| d.kind == k);
    let mut s = String::new();
    let _ = writeln!(s, "/* Requirement {}", req.id.replace("*/", "* /"));
    let _ = writeln!(s, " * {}", render_textual(req, true).replace("*/", "* /"));
    let _ = writeln!(s, " * Step size: {} ms. */", cfg.step_ms);
    s.push_str("#include <stdint.h>\n\n");
    s.push_str("extern void __VERIFIER_error(void);\n");
    s.push_str("extern void __VERIFIER_assume(int cond);\n");
    let mut nondet_types: Vec<ValueType> =
        used.iter().filter(|d| d.kind != VarKind::Constant).map(|d| d.data_type).collect();
    nondet_types.sort();
    nondet_types.dedup();
    for t in &nondet_types {
        let _ = writeln!(s, "{}", widths.nondet_decl(*t));
    }

    s.push('\n');
    for d in of(VarKind::Constant) {
        let v = d.value.unwrap_or(d.data_type.default_value());
        let _ = writeln!(s, "static const {} {} = {};", widths.c_type(d.data_type), c_name(&d.name), c_value(v));
    }
    for d in of(VarKind::Calibratable) {
        let _ = writeln!(s, "static {} {};", widths.c_type(d.data_type), c_name(&d.name));
    }
    for d in of(VarKind::Signal) {
        let _ = writeln!(s, "static {} {};", widths.c_type(d.data_type), c_name(&d.name));
    }
    for (k, l) in em.lasts.iter().enumerate() {
        let _ = writeln!(s, "static {} reqc_last_{k}[{}];", widths.c_type(l.ty), l.n);
        let _ = writeln!(s, "static uint32_t reqc_last_{k}_head;");
    }
    s.push_str("static uint64_t reqc_step;\n");
    if let CounterMonitor::Response { .. } = monitor {
        s.push_str("static uint64_t reqc_p_run;\nstatic uint64_t reqc_q_run;\n");
        let _ = writeln!(s, "static unsigned char reqc_fired[{}];", monitor.ring_len());
        s.push_str("static uint64_t reqc_fired_head;\n");
    }

    s.push_str("\nstatic void reqc_init(void)\n{\n");
    for d in of(VarKind::Calibratable) {
        let _ = writeln!(s, "    {} = {}();", c_name(&d.name), widths.nondet(d.data_type));
        assume_range(&mut s, d, "    ");
    }
    for (k, l) in em.lasts.iter().enumerate() {
        let _ = writeln!(s, "    for (uint32_t i = 0; i < {}; i++) {{", l.n);
        let _ = writeln!(s, "        reqc_last_{k}[i] = {};", em.expr(l.arg, true));
        s.push_str("    }\n");
    }
    s.push_str("}\n");

    s.push_str("\nstatic void reqc_read_inputs(void)\n{\n");
    for d in of(VarKind::Signal) {
        let _ = writeln!(s, "    {} = {}();", c_name(&d.name), widths.nondet(d.data_type));
        assume_range(&mut s, d, "    ");
    }
    s.push_str("}\n");

    s.push_str("\nstatic void reqc_monitor(void)\n{\n");
    for (k, l) in em.lasts.iter().enumerate() {
        let _ = writeln!(s, "    {} reqc_arg_{k} = {};", widths.c_type(l.ty), em.expr(l.arg, false));
    }
    match monitor {
        CounterMonitor::Invariant { scope } => {
            let guard = match scope {
                Scope::Globally => "reqc_step > 0",
                Scope::Initially => "reqc_step == 0",
            };
            let _ = writeln!(s, "    if ({guard}) {{");
            let _ = writeln!(s, "        if (!({})) __VERIFIER_error();", em.expr(p_event, false));
            s.push_str("    }\n");
        }
        CounterMonitor::Response { scope, t_p, t_q, .. } => {
            let q_event = q_event.expect("response pattern");
            let _ = writeln!(s, "    int reqc_p = {};", em.expr(p_event, false));
            let _ = writeln!(s, "    int reqc_q = {};", em.expr(q_event, false));
            let counting = match scope {
                Scope::Globally => "reqc_step >= 1 && reqc_p",
                Scope::Initially => "reqc_p",
            };
            let _ = writeln!(s, "    if ({counting}) {{");
            let _ = writeln!(s, "        if (reqc_p_run < {t_p}) reqc_p_run++;");
            s.push_str("    } else {\n        reqc_p_run = 0;\n    }\n");
            s.push_str("    if (reqc_q) {\n");
            let _ = writeln!(s, "        if (reqc_q_run < {t_q}) reqc_q_run++;");
            s.push_str("    } else {\n        reqc_q_run = 0;\n    }\n");
            match scope {
                Scope::Globally => {
                    let _ = writeln!(s, "    int reqc_fire = reqc_p_run >= {t_p};");
                }
                Scope::Initially => {
                    let _ = writeln!(s, "    int reqc_fire = reqc_p_run >= {t_p} && reqc_step == {};", t_p - 1);
                }
            }
            s.push_str("    int reqc_due = reqc_fired[reqc_fired_head];\n");
            s.push_str("    reqc_fired[reqc_fired_head] = (unsigned char)reqc_fire;\n");
            let _ = writeln!(s, "    reqc_fired_head = (reqc_fired_head + 1) % {};", monitor.ring_len());
            let _ = writeln!(s, "    if (reqc_due && reqc_q_run < {t_q}) __VERIFIER_error();");
        }
    }
    for (k, l) in em.lasts.iter().enumerate() {
        let _ = writeln!(s, "    reqc_last_{k}[reqc_last_{k}_head] = reqc_arg_{k};");
        let _ = writeln!(s, "    reqc_last_{k}_head = (reqc_last_{k}_head + 1) % {};", l.n);
    }
    let _ = writeln!(s, "    if (reqc_step < {}) reqc_step++;", monitor.step_cap());
    s.push_str("}\n");

    s.push_str("\nint main(void)\n{\n    reqc_init();\n    for (;;) {\n");
    s.push_str("        reqc_read_inputs();\n        reqc_monitor();\n    }\n    return 0;\n}\n");
    Ok(ExportBundle { requirement: req.id.clone(), format: Format::CHarness, payload: s, warnings: Vec::new() })
}
