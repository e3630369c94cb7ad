use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{event_series, normalize, MonitorForm, NormalizedResponse, SemError, StepConfig, Trace};
use crate::dictionary::VariableDictionary;
use crate::syntax::{Expr, Requirement, Scope};

/// Kleene truth value; steps beyond the trace are `Unknown`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Truth {
    False,
    Unknown,
    True,
}

impl Truth {
    pub fn implies(self, other: Truth) -> Truth {
        match (self, other) {
            (Truth::False, _) | (_, Truth::True) => Truth::True,
            (Truth::True, Truth::False) => Truth::False,
            _ => Truth::Unknown,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    PassWithPending,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::PassWithPending => "pass_with_pending",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    /// First step of the failing instance (the trigger window start for
    /// responses, the offending step for invariants).
    pub anchor_step: usize,
    /// Last step the instance depends on.
    pub check_step: usize,
    /// In-trace steps at which the obligation was false.
    pub failing_steps: Vec<usize>,
    pub explanation: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    pub violations: Vec<Violation>,
    /// Number of instances that neither fail nor pass within the trace.
    pub pending: usize,
    pub pending_anchors: Vec<usize>,
}

impl Verdict {
    fn build(violations: Vec<Violation>, pending_anchors: Vec<usize>) -> Verdict {
        let status = if !violations.is_empty() {
            Status::Fail
        } else if !pending_anchors.is_empty() {
            Status::PassWithPending
        } else {
            Status::Pass
        };
        Verdict { status, violations, pending: pending_anchors.len(), pending_anchors }
    }

    pub fn violation_anchors(&self) -> Vec<usize> {
        self.violations.iter().map(|v| v.anchor_step).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Form {
    Future,
    Past,
}

/// Normalizes and evaluates `req` in the given form.
pub fn evaluate(
    req: &Requirement,
    trace: &Trace,
    dict: &VariableDictionary,
    cfg: StepConfig,
    form: Form,
) -> Result<Verdict, SemError> {
    match normalize(req, cfg)? {
        MonitorForm::Invariant { scope, event } => eval_invariant(scope, &event, trace, dict),
        MonitorForm::Response { scope, nr } => match form {
            Form::Future => eval_response_future(scope, &nr, trace, dict),
            Form::Past => eval_response_past(scope, &nr, trace, dict),
        },
    }
}

pub fn eval_invariant(
    scope: Scope,
    event: &Expr,
    trace: &Trace,
    dict: &VariableDictionary,
) -> Result<Verdict, SemError> {
    let e = event_series(event, trace, dict)?;
    let steps = match scope {
        Scope::Initially => 0..e.len().min(1),
        Scope::Globally => 1.min(e.len())..e.len(),
    };
    let violations = steps
        .filter(|&t| !e[t])
        .map(|t| Violation {
            anchor_step: t,
            check_step: t,
            failing_steps: alloc::vec![t],
            explanation: format!("event is false at step {t}"),
        })
        .collect();
    Ok(Verdict::build(violations, Vec::new()))
}

fn anchors(scope: Scope, len: usize) -> core::ops::Range<usize> {
    match scope {
        Scope::Initially => 0..len.min(1),
        Scope::Globally => 1.min(len)..len,
    }
}

/// Truth of "`series` holds at every step of `start..start + len`".
fn window_future(series: &[bool], start: usize, len: u64) -> Truth {
    let mut unknown = false;
    for k in 0..len {
        match usize::try_from(start as u64 + k).ok().and_then(|t| series.get(t)) {
            Some(false) => return Truth::False,
            Some(true) => {}
            None => {
                unknown = true;
                break;
            }
        }
    }
    if unknown {
        // later in-trace steps cannot exist once one step is beyond the end
        Truth::Unknown
    } else {
        Truth::True
    }
}

fn falses_in(series: &[bool], start: u64, len: u64) -> Vec<usize> {
    let end = (start + len).min(series.len() as u64);
    (start..end).map(|t| t as usize).filter(|&t| !series[t]).collect()
}

/// Future form: an instance anchored at `a` requires that if the trigger
/// holds on `a .. a+t_p-1` then the response holds on
/// `a+t_p+t_d .. a+t_p+t_d+t_q-1`.
pub fn eval_response_future(
    scope: Scope,
    nr: &NormalizedResponse,
    trace: &Trace,
    dict: &VariableDictionary,
) -> Result<Verdict, SemError> {
    let p = event_series(&nr.trigger, trace, dict)?;
    let q = event_series(&nr.response, trace, dict)?;
    let mut violations = Vec::new();
    let mut pending = Vec::new();
    for a in anchors(scope, trace.len()) {
        let obligation_start = a as u64 + nr.t_p + nr.t_d;
        let outcome = window_future(&p, a, nr.t_p).implies(window_future(&q, obligation_start as usize, nr.t_q));
        match outcome {
            Truth::True => {}
            Truth::Unknown => pending.push(a),
            Truth::False => violations.push(Violation {
                anchor_step: a,
                check_step: (a as u64 + nr.shift() - 1) as usize,
                failing_steps: falses_in(&q, obligation_start, nr.t_q),
                explanation: format!(
                    "trigger held on steps {a}..{} but the response was not held on steps {obligation_start}..{}",
                    a as u64 + nr.t_p - 1,
                    obligation_start + nr.t_q - 1
                ),
            }),
        }
    }
    Ok(Verdict::build(violations, pending))
}

/// For each step, the latest step at or before it where the series is false.
fn last_false(series: &[bool]) -> Vec<Option<usize>> {
    let mut out = Vec::with_capacity(series.len());
    let mut last = None;
    for (t, &b) in series.iter().enumerate() {
        if !b {
            last = Some(t);
        }
        out.push(last);
    }
    out
}

/// Truth of "held for the `len` steps ending at `end`", from the
/// last-false table. The window never starts before step 0.
fn window_past(lf: &[Option<usize>], end: u64, len: u64) -> Truth {
    let start = end + 1 - len;
    let n = lf.len() as u64;
    if start >= n {
        return Truth::Unknown;
    }
    let seen = end.min(n - 1) as usize;
    if lf[seen].is_some_and(|f| f as u64 >= start) {
        Truth::False
    } else if end < n {
        Truth::True
    } else {
        Truth::Unknown
    }
}

/// Past-form check at step `u` (`u + 1 >= shift`): if the trigger held for
/// the `t_p` steps ending at `u - t_d - t_q`, the response held for the
/// `t_q` steps ending at `u`.
pub fn past_check_at(nr: &NormalizedResponse, trigger: &[bool], response: &[bool], u: u64) -> Truth {
    past_check(nr, &last_false(trigger), &last_false(response), u)
}

fn past_check(nr: &NormalizedResponse, lp: &[Option<usize>], lq: &[Option<usize>], u: u64) -> Truth {
    window_past(lp, u - nr.t_d - nr.t_q, nr.t_p).implies(window_past(lq, u, nr.t_q))
}

/// Past form: checks at every step `u` from `shift - 1` (initially) or
/// `shift` (globally) on, up to the last step whose instance starts inside
/// the trace.
pub fn eval_response_past(
    scope: Scope,
    nr: &NormalizedResponse,
    trace: &Trace,
    dict: &VariableDictionary,
) -> Result<Verdict, SemError> {
    let p = event_series(&nr.trigger, trace, dict)?;
    let q = event_series(&nr.response, trace, dict)?;
    let (lp, lq) = (last_false(&p), last_false(&q));
    let shift = nr.shift();
    let n = trace.len() as u64;
    let checks = match scope {
        Scope::Initially => (shift - 1)..(shift - 1 + n.min(1)),
        Scope::Globally => shift..(n + shift - 1).max(shift),
    };
    let mut violations = Vec::new();
    let mut pending = Vec::new();
    for u in checks {
        let anchor = (u + 1 - shift) as usize;
        match past_check(nr, &lp, &lq, u) {
            Truth::True => {}
            Truth::Unknown => pending.push(anchor),
            Truth::False => {
                let q_start = u + 1 - nr.t_q;
                violations.push(Violation {
                    anchor_step: anchor,
                    check_step: u as usize,
                    failing_steps: falses_in(&q, q_start, nr.t_q),
                    explanation: format!(
                        "at step {u}: trigger held for {} step(s) ending at step {} but the response did not hold for {} step(s) ending at step {u}",
                        nr.t_p,
                        u - nr.t_d - nr.t_q,
                        nr.t_q
                    ),
                });
            }
        }
    }
    Ok(Verdict::build(violations, pending))
}
