//! Executable meaning of requirements over finite traces.
//!
//! Durations are normalized to steps, events are evaluated strictly per
//! step, and response patterns are monitored in two independent ways: a
//! future-time scan over trigger anchors and a past-time scan over check
//! steps that looks back `t_p + t_d + t_q` steps. Steps past the end of the
//! trace are unknown, which yields the `pass_with_pending` verdict.

pub(crate) mod eval;
mod monitor;
mod trace;

use alloc::string::String;

use thiserror::Error;

use crate::syntax::{Duration, Expr, Pattern, Requirement, Scope};

pub use eval::{eval_event, event_series, EvalContext};
pub use monitor::{
    eval_invariant, eval_response_future, eval_response_past, evaluate, past_check_at, Form, Status, Truth,
    Verdict, Violation,
};
pub use trace::Trace;

/// Controller step size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StepConfig {
    pub step_ms: u64,
}

impl StepConfig {
    pub fn new(step_ms: u64) -> Result<Self, SemError> {
        if step_ms == 0 {
            Err(SemError::ZeroStep)
        } else {
            Ok(StepConfig { step_ms })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemError {
    #[error("step size must be at least 1 ms")]
    ZeroStep,
    #[error("duration {0} is not a multiple of the {1} ms step")]
    NotMultiple(String, u64),
    #[error("duration {0} is too large")]
    DurationOverflow(String),
    #[error("{0} duration must be at least 1 step")]
    EmptyWindow(&'static str),
    #[error("division by zero at step {step}")]
    DivisionByZero { step: usize },
    #[error("integer overflow at step {step}")]
    IntOverflow { step: usize },
    #[error("bit index {index} outside 0..63 at step {step}")]
    BitIndex { step: usize, index: i64 },
    #[error("type error at step {step}: {message}")]
    Type { step: usize, message: String },
    #[error("variable '{0}' has neither a trace column nor a dictionary value")]
    Unbound(String),
    #[error("trace column '{0}' is not declared in the dictionary")]
    UndeclaredColumn(String),
    #[error("trace column '{name}' has {got} rows, expected {want}")]
    ColumnLength { name: String, got: usize, want: usize },
    #[error("trace column '{name}' at step {step}: {value} is not a {ty}")]
    ColumnType { name: String, step: usize, value: String, ty: &'static str },
    #[error("a trace must have at least one step")]
    EmptyTrace,
}

/// `d` in steps. Milliseconds, seconds, minutes and hours must be exact
/// multiples of the step size.
pub fn to_steps(d: &Duration, cfg: StepConfig) -> Result<u64, SemError> {
    let Some(per_unit) = d.unit.millis() else {
        return Ok(d.magnitude);
    };
    let ms = d
        .magnitude
        .checked_mul(per_unit)
        .ok_or_else(|| SemError::DurationOverflow(alloc::format!("{d}")))?;
    if ms % cfg.step_ms != 0 {
        return Err(SemError::NotMultiple(alloc::format!("{d}"), cfg.step_ms));
    }
    Ok(ms / cfg.step_ms)
}

/// A response pattern with all durations in steps.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedResponse {
    pub t_p: u64,
    pub t_d: u64,
    pub t_q: u64,
    pub trigger: Expr,
    pub response: Expr,
}

impl NormalizedResponse {
    /// `t_p + t_d + t_q`: distance between a trigger anchor and the last
    /// step of its obligation, plus one.
    pub fn shift(&self) -> u64 {
        self.t_p + self.t_d + self.t_q
    }

    pub fn steps(t_p: u64, t_d: u64, t_q: u64, trigger: Expr, response: Expr) -> Self {
        NormalizedResponse { t_p, t_d, t_q, trigger, response }
    }
}

/// A requirement lowered to step-based form.
#[derive(Debug, Clone, PartialEq)]
pub enum MonitorForm {
    Invariant { scope: Scope, event: Expr },
    Response { scope: Scope, nr: NormalizedResponse },
}

impl MonitorForm {
    pub fn scope(&self) -> Scope {
        match self {
            MonitorForm::Invariant { scope, .. } | MonitorForm::Response { scope, .. } => *scope,
        }
    }

    /// Steps between an anchor and the step that decides it, plus one.
    pub fn shift(&self) -> u64 {
        match self {
            MonitorForm::Invariant { .. } => 1,
            MonitorForm::Response { nr, .. } => nr.shift(),
        }
    }
}

pub fn normalize(req: &Requirement, cfg: StepConfig) -> Result<MonitorForm, SemError> {
    Ok(match &req.pattern {
        Pattern::Invariant { event } => MonitorForm::Invariant { scope: req.scope, event: event.clone() },
        Pattern::Response { trigger, trigger_duration, delay, response, response_duration } => {
            let t_p = to_steps(trigger_duration, cfg)?;
            let t_d = to_steps(delay, cfg)?;
            let t_q = to_steps(response_duration, cfg)?;
            if t_p == 0 {
                return Err(SemError::EmptyWindow("trigger"));
            }
            if t_q == 0 {
                return Err(SemError::EmptyWindow("response"));
            }
            if t_p.checked_add(t_d).and_then(|s| s.checked_add(t_q)).is_none_or(|s| s > u32::MAX as u64) {
                return Err(SemError::DurationOverflow(alloc::format!("{trigger_duration} + {delay} + {response_duration}")));
            }
            MonitorForm::Response {
                scope: req.scope,
                nr: NormalizedResponse { t_p, t_d, t_q, trigger: trigger.clone(), response: response.clone() },
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::TimeUnit;

    fn cfg(ms: u64) -> StepConfig {
        StepConfig::new(ms).unwrap()
    }

    #[test]
    fn durations_in_steps() {
        assert_eq!(to_steps(&Duration::new(2, TimeUnit::Seconds), cfg(10)), Ok(200));
        assert_eq!(to_steps(&Duration::millis(50), cfg(10)), Ok(5));
        assert_eq!(to_steps(&Duration::steps(7), cfg(13)), Ok(7));
        assert!(matches!(to_steps(&Duration::millis(50), cfg(20)), Err(SemError::NotMultiple(..))));
        assert_eq!(to_steps(&Duration::new(1, TimeUnit::Hours), cfg(1)), Ok(3_600_000));
        assert!(StepConfig::new(0).is_err());
    }

    #[test]
    fn linear_in_magnitude() {
        for unit in [TimeUnit::Milliseconds, TimeUnit::Seconds, TimeUnit::Minutes, TimeUnit::Hours] {
            for step in [1, 4, 10, 25, 1000] {
                let one = to_steps(&Duration::new(1, unit), cfg(step));
                for n in 0..40 {
                    if let (Ok(a), Ok(b)) = (to_steps(&Duration::new(n, unit), cfg(step)), one.clone()) {
                        assert_eq!(a, n * b);
                    }
                }
            }
        }
    }
}
