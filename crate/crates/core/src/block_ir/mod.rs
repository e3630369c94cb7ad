//! Verification block graphs.
//!
//! A requirement compiles to a feed-forward network of typed blocks ending
//! in a proof objective whose input must never be false. The graph is a
//! second, independent semantics: [`simulate`] runs it step by step and
//! [`violations_of`] reads off the failing steps.
//!
//! Block ids are positions in `blocks`, which is a topological order; they
//! print as `b<N>`.

mod build;
mod sim;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::value::{Value, ValueType};

pub use build::{build_graph, build_monitor_graph};
pub use sim::{initial_outputs, simulate, violations_of, SimOutput};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BlockId(pub usize);

impl fmt::Display for BlockId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "b{}", self.0)
    }
}

/// What a detector does when its input keeps satisfying the detection
/// condition while a pulse is scheduled or running.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Retrigger {
    /// Detection restarts from zero once the pulse has completed.
    #[default]
    AfterPulse,
    /// Every step whose trailing run reaches `detect_n` schedules a pulse;
    /// overlapping pulses merge.
    Sliding,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BlockKind {
    /// A signal read from the trace.
    Inport { name: String },
    /// A literal, or a dictionary constant when `name` is set.
    Constant { value: Value, name: Option<String> },
    Calibration { name: String },
    Not,
    And,
    Or,
    Implies,
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Min,
    Max,
    Abs,
    /// Inputs: index, value.
    ExtractBit,
    /// Input delayed by `n` steps. Before that it emits `initial`, or, when
    /// unset, the input's value with every signal at its initial value.
    DelayN { n: u32, initial: Option<Value> },
    /// True iff the input was true on each of the last `n` steps.
    DurationCheck { n: u64 },
    /// Boolean input delayed by `n` steps, false before that.
    DelayLine { n: u64 },
    /// After `detect_n` consecutive true inputs ending at step `s`, true on
    /// steps `s + delay .. s + delay + out_dur - 1`.
    Detector { detect_n: u64, delay: u64, out_dur: u64, retrigger: Retrigger },
    /// Inputs: activation, pattern. True unless active and the pattern fails.
    ScopeInitially,
    /// True on the first `skip` steps, the input afterwards.
    ScopeGlobally { skip: u64 },
    ProofObjective,
    TestObjective { domain: Vec<bool> },
}

impl BlockKind {
    /// Short type name used in exports and inventories.
    pub fn name(&self) -> &'static str {
        match self {
            BlockKind::Inport { .. } => "Inport",
            BlockKind::Constant { .. } => "Constant",
            BlockKind::Calibration { .. } => "Calibration",
            BlockKind::Not => "Not",
            BlockKind::And => "And",
            BlockKind::Or => "Or",
            BlockKind::Implies => "Implies",
            BlockKind::Add => "Add",
            BlockKind::Sub => "Sub",
            BlockKind::Mul => "Mul",
            BlockKind::Div => "Div",
            BlockKind::Neg => "Neg",
            BlockKind::Lt => "Less",
            BlockKind::Le => "LessOrEqual",
            BlockKind::Gt => "Greater",
            BlockKind::Ge => "GreaterOrEqual",
            BlockKind::Eq => "Equal",
            BlockKind::Min => "Min",
            BlockKind::Max => "Max",
            BlockKind::Abs => "Abs",
            BlockKind::ExtractBit => "ExtractBit",
            BlockKind::DelayN { .. } => "Delay",
            BlockKind::DurationCheck { .. } => "DurationCheck",
            BlockKind::DelayLine { .. } => "DelayLine",
            BlockKind::Detector { .. } => "Detector",
            BlockKind::ScopeInitially => "ScopeInitially",
            BlockKind::ScopeGlobally { .. } => "ScopeGlobally",
            BlockKind::ProofObjective => "ProofObjective",
            BlockKind::TestObjective { .. } => "TestObjective",
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            BlockKind::Inport { .. } | BlockKind::Constant { .. } | BlockKind::Calibration { .. } => 0,
            BlockKind::Not
            | BlockKind::Neg
            | BlockKind::Abs
            | BlockKind::DelayN { .. }
            | BlockKind::DurationCheck { .. }
            | BlockKind::DelayLine { .. }
            | BlockKind::Detector { .. }
            | BlockKind::ScopeGlobally { .. }
            | BlockKind::ProofObjective
            | BlockKind::TestObjective { .. } => 1,
            _ => 2,
        }
    }

    pub fn is_logical(&self) -> bool {
        matches!(self, BlockKind::And | BlockKind::Or | BlockKind::Implies | BlockKind::Not)
    }

    pub fn is_relational(&self) -> bool {
        matches!(self, BlockKind::Lt | BlockKind::Le | BlockKind::Gt | BlockKind::Ge | BlockKind::Eq)
    }

    pub fn is_timing(&self) -> bool {
        matches!(self, BlockKind::DurationCheck { .. } | BlockKind::DelayLine { .. } | BlockKind::Detector { .. })
    }

    pub fn is_sink(&self) -> bool {
        matches!(self, BlockKind::ProofObjective | BlockKind::TestObjective { .. })
    }
}

/// Which part of the graph a block belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    /// Event logic and the pattern.
    Logic,
    /// Scope machinery.
    Scope,
    /// Blocks added for test objectives.
    Test,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub id: BlockId,
    pub kind: BlockKind,
    /// Source block of each input port, in port order.
    pub inputs: Vec<BlockId>,
    pub out_type: ValueType,
    pub role: Role,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Wire {
    pub from: BlockId,
    pub to: BlockId,
    pub port: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockGraph {
    pub requirement: String,
    pub blocks: Vec<Block>,
    /// Variable name bound to each reading block, in first-use order.
    pub entries: Vec<(String, BlockId)>,
    pub proof_objectives: Vec<BlockId>,
    pub test_objectives: Vec<BlockId>,
    /// Steps from an instance's anchor to the step its objective decides
    /// it, plus one.
    pub shift: u64,
}

impl BlockGraph {
    pub fn block(&self, id: BlockId) -> &Block {
        &self.blocks[id.0]
    }

    pub fn wires(&self) -> Vec<Wire> {
        self.blocks
            .iter()
            .flat_map(|b| b.inputs.iter().enumerate().map(move |(port, &from)| Wire { from, to: b.id, port }))
            .collect()
    }

    /// Appends a block; inputs must already exist.
    pub fn push(&mut self, kind: BlockKind, inputs: Vec<BlockId>, out_type: ValueType, role: Role) -> BlockId {
        let id = BlockId(self.blocks.len());
        if matches!(kind, BlockKind::TestObjective { .. }) {
            self.test_objectives.push(id);
        }
        if kind == BlockKind::ProofObjective {
            self.proof_objectives.push(id);
        }
        self.blocks.push(Block { id, kind, inputs, out_type, role });
        id
    }

    /// Kind-name multiset of the blocks with the given role, sorted.
    pub fn inventory(&self, role: Role) -> Vec<(&'static str, usize)> {
        let mut m = alloc::collections::BTreeMap::new();
        for b in self.blocks.iter().filter(|b| b.role == role) {
            *m.entry(b.kind.name()).or_insert(0) += 1;
        }
        m.into_iter().collect()
    }

    /// Checks the structural invariants: ids match positions, every input
    /// refers to an earlier block, arities and port types agree, parameters
    /// are in range.
    pub fn well_formed(&self) -> Result<(), String> {
        use BlockKind as K;
        for (i, b) in self.blocks.iter().enumerate() {
            let fail = |m: &str| Err(alloc::format!("{}: {m}", b.id));
            if b.id.0 != i {
                return fail("id does not match position");
            }
            if b.inputs.len() != b.kind.arity() {
                return fail("wrong number of inputs");
            }
            if b.inputs.iter().any(|s| s.0 >= i) {
                return fail("input does not precede the block");
            }
            let ty = |k: usize| self.blocks[b.inputs[k].0].out_type;
            let all = |want: fn(ValueType) -> bool| (0..b.inputs.len()).all(|k| want(ty(k)));
            let is_bool = |t: ValueType| t == ValueType::Bool;
            let ok = match &b.kind {
                K::Not | K::And | K::Or | K::Implies | K::DurationCheck { .. } | K::DelayLine { .. } => {
                    all(is_bool) && b.out_type == ValueType::Bool
                }
                K::ScopeInitially | K::ScopeGlobally { .. } | K::ProofObjective => all(is_bool),
                K::TestObjective { domain } => all(is_bool) && !domain.is_empty(),
                K::Add | K::Sub | K::Mul | K::Div | K::Min | K::Max => {
                    all(ValueType::is_numeric) && b.out_type == ty(0).promote(ty(1))
                }
                K::Neg | K::Abs => all(ValueType::is_numeric) && b.out_type == ty(0),
                K::Lt | K::Le | K::Gt | K::Ge => all(ValueType::is_numeric),
                K::Eq => is_bool(ty(0)) == is_bool(ty(1)),
                K::ExtractBit => all(|t| t == ValueType::Int),
                K::DelayN { n, initial } => *n >= 1 && b.out_type == ty(0) && initial.is_none_or(|v| v.value_type() == ty(0)),
                K::Detector { detect_n, .. } => *detect_n >= 1,
                K::Inport { .. } | K::Constant { .. } | K::Calibration { .. } => true,
            };
            if !ok {
                return fail("port types or parameters do not fit the block");
            }
            if let K::DurationCheck { n } = b.kind {
                if n == 0 {
                    return fail("duration check of zero steps");
                }
            }
        }
        Ok(())
    }
}
