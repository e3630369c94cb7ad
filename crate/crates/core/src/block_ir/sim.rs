use alloc::vec;
use alloc::vec::Vec;

use super::{BlockGraph, BlockId, BlockKind, Retrigger};
use crate::dictionary::{VarKind, VariableDictionary};
use crate::semantics::eval::{abs, binary, extract_bit, min_max, sign, unary_not};
use crate::semantics::{SemError, Trace};
use crate::syntax::{BinOp, UnOp};
use crate::value::Value;

/// Output of every block at every step.
#[derive(Debug, Clone, PartialEq)]
pub struct SimOutput {
    pub len: usize,
    values: Vec<Vec<Value>>,
}

impl SimOutput {
    pub fn value(&self, id: BlockId, t: usize) -> Value {
        self.values[id.0][t]
    }

    pub fn series(&self, id: BlockId) -> &[Value] {
        &self.values[id.0]
    }
}

#[derive(Debug, Clone)]
enum State {
    None,
    Run(u64),
    Detector { run: u64, fire_at: Option<u64>, fires: Vec<u64> },
}

fn truthy(v: Value) -> bool {
    match v {
        Value::Bool(b) => b,
        Value::Int(i) => i != 0,
        Value::Float(x) => x != 0.0,
    }
}

fn read_var(
    name: &str,
    trace: &Trace,
    dict: &VariableDictionary,
    t: Option<usize>,
    fallback: Option<Value>,
) -> Result<Value, SemError> {
    let decl = dict.lookup(name);
    if t.is_none() {
        if let Some(d) = decl.filter(|d| d.kind == VarKind::Signal) {
            return Ok(d.initial_value());
        }
    }
    if let Some(col) = trace.column(name) {
        let v = col[t.unwrap_or(0)];
        return Ok(decl.and_then(|d| v.coerce(d.data_type)).unwrap_or(v));
    }
    match decl {
        Some(d) if d.kind != VarKind::Signal => d.value.or(fallback).ok_or_else(|| SemError::Unbound(name.into())),
        _ => Err(SemError::Unbound(name.into())),
    }
}

/// Stateless part of a block: its output from its input values.
fn combinational(kind: &BlockKind, x: &[Value], step: usize) -> Result<Value, SemError> {
    let bin = |op| binary(op, x[0], x[1], step);
    match kind {
        BlockKind::Not => unary_not(x[0], step),
        BlockKind::And => bin(BinOp::And),
        BlockKind::Or => bin(BinOp::Or),
        BlockKind::Implies => bin(BinOp::Implies),
        BlockKind::Add => bin(BinOp::Add),
        BlockKind::Sub => bin(BinOp::Sub),
        BlockKind::Mul => bin(BinOp::Mul),
        BlockKind::Div => bin(BinOp::Div),
        BlockKind::Lt => bin(BinOp::Lt),
        BlockKind::Le => bin(BinOp::Le),
        BlockKind::Gt => bin(BinOp::Gt),
        BlockKind::Ge => bin(BinOp::Ge),
        BlockKind::Eq => bin(BinOp::Eq),
        BlockKind::Neg => sign(UnOp::Minus, x[0], step),
        BlockKind::Abs => abs(x[0], step),
        BlockKind::Min => min_max(true, x[0], x[1], step),
        BlockKind::Max => min_max(false, x[0], x[1], step),
        BlockKind::ExtractBit => extract_bit(x[0], x[1], step),
        BlockKind::ScopeInitially => Ok(Value::Bool(!truthy(x[0]) || truthy(x[1]))),
        BlockKind::ProofObjective | BlockKind::TestObjective { .. } => Ok(x[0]),
        _ => unreachable!("stateful or source block"),
    }
}

/// Values before the first step, for the blocks feeding `DelayN` blocks
/// without a fixed initial value.
fn initial_values(graph: &BlockGraph, trace: &Trace, dict: &VariableDictionary) -> Result<Vec<Option<Value>>, SemError> {
    let n = graph.blocks.len();
    let mut needed = vec![false; n];
    for b in graph.blocks.iter().rev() {
        if needed[b.id.0] || matches!(b.kind, BlockKind::DelayN { initial: None, .. }) {
            for i in &b.inputs {
                needed[i.0] = true;
            }
        }
    }
    let mut init: Vec<Option<Value>> = vec![None; n];
    for b in &graph.blocks {
        if !needed[b.id.0] {
            continue;
        }
        let x: Vec<Value> = b.inputs.iter().map(|i| init[i.0].expect("inputs precede")).collect();
        init[b.id.0] = Some(match &b.kind {
            BlockKind::Inport { name } | BlockKind::Calibration { name } => read_var(name, trace, dict, None, None)?,
            BlockKind::Constant { value, name: Some(name) } => read_var(name, trace, dict, None, Some(*value))?,
            BlockKind::Constant { value, name: None } => *value,
            BlockKind::DelayN { initial, .. } => initial.unwrap_or(x[0]),
            BlockKind::DurationCheck { .. } | BlockKind::DelayLine { .. } | BlockKind::Detector { .. } => {
                Value::Bool(false)
            }
            BlockKind::ScopeGlobally { .. } => Value::Bool(true),
            k => combinational(k, &x, 0)?,
        });
    }
    Ok(init)
}

/// Output of every block feeding a `DelayN` without a fixed initial value,
/// evaluated before the first step from the dictionary alone.
pub fn initial_outputs(graph: &BlockGraph, dict: &VariableDictionary) -> Result<Vec<Option<Value>>, SemError> {
    initial_values(graph, &Trace::new(1, 0), dict)
}

/// Runs the graph over the trace. Blocks are evaluated in id order each
/// step; stateful blocks see their inputs' current values.
pub fn simulate(graph: &BlockGraph, trace: &Trace, dict: &VariableDictionary) -> Result<SimOutput, SemError> {
    let len = trace.len();
    let init = initial_values(graph, trace, dict)?;
    let mut values: Vec<Vec<Value>> = graph.blocks.iter().map(|_| Vec::with_capacity(len)).collect();
    let mut state: Vec<State> = graph
        .blocks
        .iter()
        .map(|b| match b.kind {
            BlockKind::DurationCheck { .. } => State::Run(0),
            BlockKind::Detector { .. } => State::Detector { run: 0, fire_at: None, fires: Vec::new() },
            _ => State::None,
        })
        .collect();
    let mut x = Vec::with_capacity(2);
    for t in 0..len {
        for b in &graph.blocks {
            x.clear();
            x.extend(b.inputs.iter().map(|i| values[i.0][t]));
            let t64 = t as u64;
            let out = match &b.kind {
                BlockKind::Inport { name } | BlockKind::Calibration { name } => {
                    read_var(name, trace, dict, Some(t), None)?
                }
                BlockKind::Constant { value, name: Some(name) } => read_var(name, trace, dict, Some(t), Some(*value))?,
                BlockKind::Constant { value, name: None } => *value,
                BlockKind::DelayN { n, initial } => {
                    let n = *n as usize;
                    if t >= n {
                        values[b.inputs[0].0][t - n]
                    } else {
                        initial.or(init[b.inputs[0].0]).expect("initial value computed")
                    }
                }
                BlockKind::DelayLine { n } => {
                    let src = &values[b.inputs[0].0];
                    Value::Bool(t64 >= *n && truthy(src[(t64 - n) as usize]))
                }
                BlockKind::DurationCheck { n } => {
                    let State::Run(run) = &mut state[b.id.0] else { unreachable!() };
                    *run = if truthy(x[0]) { *run + 1 } else { 0 };
                    Value::Bool(*run >= *n)
                }
                BlockKind::Detector { detect_n, delay, out_dur, retrigger } => {
                    let State::Detector { run, fire_at, fires } = &mut state[b.id.0] else { unreachable!() };
                    let span = delay + out_dur;
                    let within = |s: u64| s + delay <= t64 && t64 < s + span;
                    match retrigger {
                        Retrigger::AfterPulse => {
                            let busy = fire_at.is_some_and(|s| t64 < s + span);
                            if !busy {
                                *run = if truthy(x[0]) { *run + 1 } else { 0 };
                                if *run >= *detect_n {
                                    *fire_at = Some(t64);
                                    *run = 0;
                                }
                            }
                            Value::Bool(fire_at.is_some_and(within))
                        }
                        Retrigger::Sliding => {
                            *run = if truthy(x[0]) { *run + 1 } else { 0 };
                            if *run >= *detect_n {
                                fires.push(t64);
                            }
                            fires.retain(|&s| t64 < s + span);
                            Value::Bool(fires.iter().any(|&s| within(s)))
                        }
                    }
                }
                BlockKind::ScopeGlobally { skip } => Value::Bool(t64 < *skip || truthy(x[0])),
                k => combinational(k, &x, t)?,
            };
            values[b.id.0].push(out);
        }
    }
    Ok(SimOutput { len, values })
}

/// Ascending steps at which some proof objective reads false.
pub fn violations_of(graph: &BlockGraph, sim: &SimOutput) -> Vec<usize> {
    (0..sim.len)
        .filter(|&t| graph.proof_objectives.iter().any(|&p| !truthy(sim.value(p, t))))
        .collect()
}
