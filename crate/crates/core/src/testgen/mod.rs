//! Test objectives, test-vector generation and coverage measurement.
//!
//! [`annotate`] attaches condition/decision objectives to the event logic
//! of a block graph and a timing objective to every timing block.
//! [`generate`] searches for input traces that make the observed signals
//! take each target value, and [`measure`] replays vectors to report which
//! targets they reach.

mod report;
mod search;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::block_ir::{BlockGraph, BlockId, BlockKind, Role};
use crate::semantics::{SemError, Trace};
use crate::value::{Value, ValueType};

pub use report::{measure, CoverageReport, KindStats, ObjectiveReport, Reason, TargetReport, Unsatisfied, Witness};
pub use search::{generate, CalibrationMode, GenConfig, TestgenError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveKind {
    /// A boolean input of a multi-input logic block.
    Condition,
    /// The boolean output of a logic, relational or bit block.
    Decision,
    /// A timing block output that must become true.
    Timing,
    /// One input combination of a two-input logic block.
    Combination,
}

impl ObjectiveKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ObjectiveKind::Condition => "condition",
            ObjectiveKind::Decision => "decision",
            ObjectiveKind::Timing => "timing",
            ObjectiveKind::Combination => "combination",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Objective {
    pub id: usize,
    /// The annotated block.
    pub block: BlockId,
    /// Input port for condition objectives, `None` for the output.
    pub port: Option<usize>,
    /// Block whose output carries the observed signal.
    pub observed: BlockId,
    pub targets: Vec<bool>,
    pub kind: ObjectiveKind,
    /// The `TestObjective` block added for this objective.
    pub test_block: BlockId,
}

/// A block graph with its test objectives.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotatedGraph {
    pub graph: BlockGraph,
    pub objectives: Vec<Objective>,
}

impl AnnotatedGraph {
    /// Number of (objective, target value) pairs.
    pub fn target_count(&self, include_timing: bool) -> usize {
        self.objectives
            .iter()
            .filter(|o| include_timing || o.kind != ObjectiveKind::Timing)
            .map(|o| o.targets.len())
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AnnotateOptions {
    /// Also demand every input combination of two-input logic blocks. This
    /// approximates MC/DC for those blocks only.
    pub combinations: bool,
}

/// Adds objectives to a graph from `build_graph`.
///
/// Decision objectives go on the outputs of logic, relational and bit
/// extraction blocks; condition objectives on each input of `And`, `Or`
/// and `Implies`; timing objectives on duration checks, delay lines and
/// detectors. Scope machinery is not annotated.
pub fn annotate(graph: &BlockGraph, opts: AnnotateOptions) -> AnnotatedGraph {
    let mut g = graph.clone();
    let mut objectives = Vec::new();
    let mut add = |g: &mut BlockGraph, block: BlockId, port: Option<usize>, observed: BlockId, kind, targets: Vec<bool>| {
        let test_block =
            g.push(BlockKind::TestObjective { domain: targets.clone() }, vec![observed], ValueType::Bool, Role::Test);
        objectives.push(Objective { id: objectives.len(), block, port, observed, targets, kind, test_block });
    };
    let both = || vec![false, true];
    for b in graph.blocks.iter().filter(|b| b.role == Role::Logic) {
        let k = &b.kind;
        if k.is_logical() || k.is_relational() || *k == BlockKind::ExtractBit {
            add(&mut g, b.id, None, b.id, ObjectiveKind::Decision, both());
        }
        if matches!(k, BlockKind::And | BlockKind::Or | BlockKind::Implies) {
            for (port, &src) in b.inputs.iter().enumerate() {
                add(&mut g, b.id, Some(port), src, ObjectiveKind::Condition, both());
            }
            if opts.combinations {
                let (x, y) = (b.inputs[0], b.inputs[1]);
                let nx = g.push(BlockKind::Not, vec![x], ValueType::Bool, Role::Test);
                let ny = g.push(BlockKind::Not, vec![y], ValueType::Bool, Role::Test);
                for (u, v) in [(nx, ny), (nx, y), (x, ny), (x, y)] {
                    let c = g.push(BlockKind::And, vec![u, v], ValueType::Bool, Role::Test);
                    add(&mut g, b.id, None, c, ObjectiveKind::Combination, vec![true]);
                }
            }
        }
        if k.is_timing() {
            add(&mut g, b.id, None, b.id, ObjectiveKind::Timing, vec![true]);
        }
    }
    AnnotatedGraph { graph: g, objectives }
}

/// One generated test: input signals per step plus calibration values.
#[derive(Debug, Clone, PartialEq)]
pub struct TestVector {
    pub id: usize,
    pub trace: Trace,
    pub calibration: BTreeMap<String, Value>,
}

impl TestVector {
    /// The trace the graph is simulated on: inputs plus calibrations as
    /// constant columns.
    pub fn simulation_trace(&self) -> Result<Trace, SemError> {
        let mut t = self.trace.clone();
        for (name, v) in &self.calibration {
            t.insert(name.clone(), vec![*v; t.len()])?;
        }
        Ok(t)
    }
}
