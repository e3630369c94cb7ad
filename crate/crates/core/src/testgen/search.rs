//! Vector search: exhaustive enumeration when the input space is small,
//! otherwise a seeded hill climb over mutated traces.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::report::{build_report, witnesses, CoverageReport, Reason};
use super::{AnnotatedGraph, TestVector};
use crate::block_ir::{simulate, BlockKind, Role, SimOutput};
use crate::dictionary::VariableDictionary;
use crate::semantics::{SemError, Trace};
use crate::value::{Value, ValueType};

/// Search domain of a numeric variable without declared bounds.
pub const UNBOUNDED_RANGE: (i64, i64) = (-1000, 1000);

/// Int ranges up to this many values count as finite for enumeration.
const FINITE_INT_LIMIT: i64 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CalibrationMode {
    /// Calibratables keep their dictionary value.
    #[default]
    Fixed,
    /// Each vector chooses its own calibration within the declared range.
    Search,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenConfig {
    pub horizon: usize,
    /// Hill-climbing attempts after enumeration is ruled out.
    pub budget: usize,
    pub seed: u64,
    /// Largest number of candidate vectors enumerated exhaustively.
    pub exhaustive_bound: u64,
    pub calibration: CalibrationMode,
    pub include_timing: bool,
    pub step_ms: u64,
}

impl GenConfig {
    pub fn new(horizon: usize, step_ms: u64) -> Self {
        GenConfig {
            horizon,
            budget: 20_000,
            seed: 0,
            exhaustive_bound: 1 << 12,
            calibration: CalibrationMode::Fixed,
            include_timing: false,
            step_ms,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TestgenError {
    #[error("horizon {horizon} is too small: this requirement needs at least {need} steps")]
    HorizonTooSmall { horizon: usize, need: usize },
    #[error(transparent)]
    Semantics(#[from] SemError),
}

#[derive(Debug, Clone)]
struct Domain {
    ty: ValueType,
    lo: f64,
    hi: f64,
    boundary: Vec<Value>,
    finite: Option<Vec<Value>>,
}

impl Domain {
    fn of(dict: &VariableDictionary, name: &str) -> Result<Domain, SemError> {
        let d = dict.lookup(name).ok_or_else(|| SemError::Unbound(name.into()))?;
        if d.data_type == ValueType::Bool {
            let both = vec![Value::Bool(false), Value::Bool(true)];
            return Ok(Domain { ty: ValueType::Bool, lo: 0.0, hi: 1.0, boundary: both.clone(), finite: Some(both) });
        }
        let span = (UNBOUNDED_RANGE.1 - UNBOUNDED_RANGE.0) as f64;
        let (lo, hi) = match (d.lower_bound(), d.upper_bound()) {
            (Some(lo), Some(hi)) => (lo, hi),
            (Some(lo), None) => (lo, lo.max(UNBOUNDED_RANGE.1 as f64).max(lo + span)),
            (None, Some(hi)) => (hi.min(UNBOUNDED_RANGE.0 as f64).min(hi - span), hi),
            (None, None) => (UNBOUNDED_RANGE.0 as f64, UNBOUNDED_RANGE.1 as f64),
        };
        let mut boundary = Vec::new();
        let mut add = |v: Value| {
            let x = v.as_f64().unwrap_or(0.0);
            if x >= lo && x <= hi && !boundary.contains(&v) {
                boundary.push(v);
            }
        };
        if d.data_type == ValueType::Int {
            let (l, h) = (ceil(lo) as i64, floor(hi) as i64);
            for v in [l, l.saturating_add(1), 0, h.saturating_sub(1), h] {
                add(Value::Int(v));
            }
            let finite = (h - l < FINITE_INT_LIMIT).then(|| (l..=h).map(Value::Int).collect());
            Ok(Domain { ty: ValueType::Int, lo: l as f64, hi: h as f64, boundary, finite })
        } else {
            for v in [lo, 0.0, hi, lo + (hi - lo) / 2.0] {
                add(Value::Float(v));
            }
            Ok(Domain { ty: ValueType::Float, lo, hi, boundary, finite: None })
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Value {
        if rng.gen_bool(0.5) {
            return self.boundary[rng.gen_range(0..self.boundary.len())];
        }
        match self.ty {
            ValueType::Bool => Value::Bool(rng.gen()),
            ValueType::Int => Value::Int(rng.gen_range(self.lo as i64..=self.hi as i64)),
            ValueType::Float => Value::Float(self.lo + (self.hi - self.lo) * rng.gen::<f64>()),
        }
    }
}

fn floor(x: f64) -> f64 {
    let t = x as i64 as f64;
    if t > x {
        t - 1.0
    } else {
        t
    }
}

fn ceil(x: f64) -> f64 {
    -floor(-x)
}

/// Finite value sets, one per input.
type Columns = Vec<Vec<Value>>;

#[derive(Debug, Clone, PartialEq)]
struct Candidate {
    /// `rows[t][i]`: signal `i` at step `t`.
    rows: Vec<Vec<Value>>,
    cal: Vec<Value>,
}

struct Search<'a> {
    ag: &'a AnnotatedGraph,
    dict: &'a VariableDictionary,
    cfg: GenConfig,
    signals: Vec<(String, Domain)>,
    cals: Vec<(String, Domain)>,
    fixed_cal: Vec<Value>,
    /// Per objective and target: index of the witnessing selected vector.
    covered: Vec<Vec<Option<usize>>>,
    selected: Vec<Candidate>,
    remaining: usize,
}

impl Search<'_> {
    fn vector(&self, c: &Candidate, id: usize, len: usize) -> TestVector {
        let mut trace = Trace::new(self.cfg.step_ms, len);
        for (i, (name, _)) in self.signals.iter().enumerate() {
            trace.insert(name.clone(), c.rows[..len].iter().map(|r| r[i]).collect()).expect("row length");
        }
        let calibration = self.cals.iter().zip(&c.cal).map(|((n, _), v)| (n.clone(), *v)).collect();
        TestVector { id, trace, calibration }
    }

    fn simulate(&self, c: &Candidate) -> Option<SimOutput> {
        let v = self.vector(c, 0, c.rows.len());
        simulate(&self.ag.graph, &v.simulation_trace().ok()?, self.dict).ok()
    }

    fn hits(sim: &SimOutput, observed: crate::block_ir::BlockId, target: bool) -> bool {
        sim.series(observed).contains(&Value::Bool(target))
    }

    /// Selects the candidate if it reaches an uncovered target.
    fn offer(&mut self, c: &Candidate, sim: &SimOutput) -> bool {
        let idx = self.selected.len();
        let mut gain = false;
        for (o, slots) in self.ag.objectives.iter().zip(self.covered.iter_mut()) {
            for (k, &target) in o.targets.iter().enumerate() {
                if slots[k].is_none() && Self::hits(sim, o.observed, target) {
                    slots[k] = Some(idx);
                    self.remaining -= 1;
                    gain = true;
                }
            }
        }
        if gain {
            self.selected.push(c.clone());
        }
        gain
    }

    /// Closeness to the uncovered targets; higher is closer.
    fn heuristic(&self, sim: &SimOutput) -> f64 {
        let g = &self.ag.graph;
        let as_bool = |v: Value| v == Value::Bool(true);
        let max_run = |s: &[Value]| {
            let (mut best, mut run) = (0usize, 0usize);
            for v in s {
                run = if as_bool(*v) { run + 1 } else { 0 };
                best = best.max(run);
            }
            best as f64
        };
        let mut h = 0.0;
        for (o, slots) in self.ag.objectives.iter().zip(&self.covered) {
            for (&target, slot) in o.targets.iter().zip(slots) {
                if slot.is_some() {
                    continue;
                }
                let b = g.block(o.observed);
                let input = |k: usize| sim.series(b.inputs[k]);
                let pair_score = |want0: bool, want1: bool| {
                    (0..sim.len)
                        .map(|t| {
                            (as_bool(input(0)[t]) == want0) as u8 as f64 + (as_bool(input(1)[t]) == want1) as u8 as f64
                        })
                        .fold(0.0, f64::max)
                        / 2.0
                };
                h += match (&b.kind, target) {
                    (BlockKind::DurationCheck { n }, true) => max_run(input(0)) / *n as f64,
                    (BlockKind::Detector { detect_n, .. }, true) => max_run(input(0)) / *detect_n as f64,
                    (BlockKind::DelayLine { n }, true) => match input(0).iter().position(|v| as_bool(*v)) {
                        Some(s) => 1.0 / (2.0 + (s as f64 + *n as f64 - sim.len as f64)),
                        None => 0.0,
                    },
                    (BlockKind::And, true) => pair_score(true, true),
                    (BlockKind::Or, false) => pair_score(false, false),
                    (BlockKind::Implies, false) => pair_score(true, false),
                    _ => 0.0,
                };
            }
        }
        h
    }

    fn fresh(&self, rng: &mut ChaCha8Rng) -> Candidate {
        let mut rows: Vec<Vec<Value>> = Vec::with_capacity(self.cfg.horizon);
        for t in 0..self.cfg.horizon {
            let row = self
                .signals
                .iter()
                .enumerate()
                .map(|(i, (_, d))| if t > 0 && rng.gen_bool(0.7) { rows[t - 1][i] } else { d.sample(rng) })
                .collect();
            rows.push(row);
        }
        Candidate { rows, cal: self.calibration(rng) }
    }

    fn calibration(&self, rng: &mut ChaCha8Rng) -> Vec<Value> {
        match self.cfg.calibration {
            CalibrationMode::Fixed => self.fixed_cal.clone(),
            CalibrationMode::Search => self.cals.iter().map(|(_, d)| d.sample(rng)).collect(),
        }
    }

    fn mutate(&self, c: &Candidate, rng: &mut ChaCha8Rng) -> Candidate {
        let h = self.cfg.horizon;
        let n = self.signals.len();
        let mut c = c.clone();
        let roll = rng.gen_range(0..100);
        if roll < 10 || n == 0 {
            return self.fresh(rng);
        }
        match roll {
            10..=44 => {
                let (t, i) = (rng.gen_range(0..h), rng.gen_range(0..n));
                c.rows[t][i] = self.signals[i].1.sample(rng);
            }
            45..=74 => {
                let t = rng.gen_range(0..h);
                let k = rng.gen_range(1..=h);
                let row = c.rows[t].clone();
                for r in c.rows.iter_mut().skip(t + 1).take(k) {
                    r.clone_from(&row);
                }
            }
            75..=94 => {
                let i = rng.gen_range(0..n);
                let a = rng.gen_range(0..h);
                let b = rng.gen_range(a..h);
                let v = self.signals[i].1.sample(rng);
                for r in &mut c.rows[a..=b] {
                    r[i] = v;
                }
            }
            _ => c.cal = self.calibration(rng),
        }
        c
    }

    /// Size and value sets of the enumerable input space, or `None` if it
    /// is not finite or exceeds the bound.
    fn enumeration(&self) -> Option<(u64, Columns, Columns)> {
        let step: Vec<Vec<Value>> = self.signals.iter().map(|(_, d)| d.finite.clone()).collect::<Option<_>>()?;
        let cal: Vec<Vec<Value>> = match self.cfg.calibration {
            CalibrationMode::Fixed => self.fixed_cal.iter().map(|v| vec![*v]).collect(),
            CalibrationMode::Search => self.cals.iter().map(|(_, d)| d.finite.clone()).collect::<Option<_>>()?,
        };
        let mut total: u64 = 1;
        for d in step.iter().flat_map(|d| core::iter::repeat_n(d, self.cfg.horizon)).chain(&cal) {
            total = total.checked_mul(d.len() as u64)?;
            if total > self.cfg.exhaustive_bound {
                return None;
            }
        }
        Some((total, step, cal))
    }

    /// Candidate number `index` in mixed-radix order.
    fn nth(&self, mut index: u64, step: &[Vec<Value>], cal: &[Vec<Value>]) -> Candidate {
        let mut rows = vec![Vec::with_capacity(step.len()); self.cfg.horizon];
        // first step varies slowest so short prefixes are tried first
        for row in rows.iter_mut().rev() {
            let mut vals = Vec::with_capacity(step.len());
            for d in step.iter().rev() {
                vals.push(d[(index % d.len() as u64) as usize]);
                index /= d.len() as u64;
            }
            vals.reverse();
            *row = vals;
        }
        let mut c = Vec::with_capacity(cal.len());
        for d in cal.iter().rev() {
            c.push(d[(index % d.len() as u64) as usize]);
            index /= d.len() as u64;
        }
        c.reverse();
        Candidate { rows, cal: c }
    }
}

/// Searches for vectors reaching every target of `ag`.
///
/// Deterministic for a given configuration. Each selected vector is cut
/// after the last step that witnesses a target, and the returned report is
/// the replay of the returned vectors, with unreached targets marked as
/// [`Reason::SearchExhausted`].
pub fn generate(
    ag: &AnnotatedGraph,
    dict: &VariableDictionary,
    cfg: &GenConfig,
) -> Result<(Vec<TestVector>, CoverageReport), TestgenError> {
    let g = &ag.graph;
    let timed = g.blocks.iter().any(|b| b.role == Role::Logic && b.kind.is_timing());
    let need = if timed { g.shift as usize + 1 } else { 1 };
    if cfg.horizon < need {
        return Err(TestgenError::HorizonTooSmall { horizon: cfg.horizon, need });
    }
    let mut signals = Vec::new();
    let mut cals = Vec::new();
    for b in &g.blocks {
        match &b.kind {
            BlockKind::Inport { name } if !signals.iter().any(|(n, _)| n == name) => {
                signals.push((name.clone(), Domain::of(dict, name)?));
            }
            BlockKind::Calibration { name } if !cals.iter().any(|(n, _)| n == name) => {
                cals.push((name.clone(), Domain::of(dict, name)?));
            }
            _ => {}
        }
    }
    let fixed_cal = cals
        .iter()
        .map(|(n, d)| dict.lookup(n).and_then(|x| x.value).unwrap_or(d.boundary[0]))
        .collect();
    let covered: Vec<Vec<Option<usize>>> = ag.objectives.iter().map(|o| vec![None; o.targets.len()]).collect();
    let remaining = covered.iter().map(Vec::len).sum();
    let mut s = Search { ag, dict, cfg: *cfg, signals, cals, fixed_cal, covered, selected: Vec::new(), remaining };

    if let Some((total, step, cal)) = s.enumeration() {
        for i in 0..total {
            if s.remaining == 0 {
                break;
            }
            let c = s.nth(i, &step, &cal);
            if let Some(sim) = s.simulate(&c) {
                s.offer(&c, &sim);
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut cur = s.fresh(&mut rng);
        let mut cur_h = f64::NEG_INFINITY;
        let mut stale = 0;
        for _ in 0..cfg.budget {
            if s.remaining == 0 {
                break;
            }
            let cand = if stale > 400 {
                stale = 0;
                cur_h = f64::NEG_INFINITY;
                s.fresh(&mut rng)
            } else {
                s.mutate(&cur, &mut rng)
            };
            let Some(sim) = s.simulate(&cand) else { continue };
            let gained = s.offer(&cand, &sim);
            let h = s.heuristic(&sim);
            if gained || h >= cur_h {
                if gained || h > cur_h {
                    stale = 0;
                }
                cur = cand;
                cur_h = h;
            }
            stale += 1;
        }
    }

    // cut each vector after its last witness step
    let mut vectors: Vec<TestVector> = Vec::new();
    for (idx, c) in s.selected.iter().enumerate() {
        let sim = s.simulate(c).expect("selected vectors simulate");
        let mut last = 0;
        for (o, slots) in ag.objectives.iter().zip(&s.covered) {
            for (&target, slot) in o.targets.iter().zip(slots) {
                if *slot == Some(idx) {
                    let step = sim.series(o.observed).iter().position(|v| *v == Value::Bool(target));
                    last = last.max(step.expect("witness reproduces"));
                }
            }
        }
        vectors.push(s.vector(c, idx, last + 1));
    }
    let found = witnesses(ag, dict, &vectors);
    let report = build_report(ag, vectors.len(), &found, cfg.include_timing, Reason::SearchExhausted);
    Ok((vectors, report))
}
