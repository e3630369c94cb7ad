use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{AnnotatedGraph, ObjectiveKind, TestVector};
use crate::block_ir::simulate;
use crate::dictionary::VariableDictionary;
use crate::value::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub vector: usize,
    pub step: usize,
}

/// Why a target has no witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reason {
    /// The generator ran its full search, exhaustive or budgeted, without
    /// reaching the target.
    SearchExhausted,
    /// Not reached by the given vectors; nothing is known about whether it
    /// is reachable at all.
    StaticallyUnreachableUnknown,
}

impl Reason {
    pub fn as_str(self) -> &'static str {
        match self {
            Reason::SearchExhausted => "search-exhausted",
            Reason::StaticallyUnreachableUnknown => "statically-unreachable-unknown",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetReport {
    pub value: bool,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveReport {
    pub id: usize,
    pub kind: ObjectiveKind,
    pub block: String,
    pub block_kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub port: Option<usize>,
    pub targets: Vec<TargetReport>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct KindStats {
    pub total: usize,
    pub satisfied: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Unsatisfied {
    pub objective: usize,
    pub value: bool,
    pub reason: Reason,
}

/// Coverage of a vector set, counted in (objective, value) targets.
///
/// The headline `total`, `satisfied` and `percentage` leave timing
/// objectives out unless `include_timing` is set; `by_kind` always lists
/// every kind present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub requirement: String,
    pub vectors: usize,
    pub include_timing: bool,
    pub total: usize,
    pub satisfied: usize,
    pub percentage: f64,
    pub by_kind: BTreeMap<ObjectiveKind, KindStats>,
    pub objectives: Vec<ObjectiveReport>,
    pub unsatisfied: Vec<Unsatisfied>,
}

impl CoverageReport {
    /// Equal up to the recorded reasons.
    pub fn same_coverage(&self, other: &CoverageReport) -> bool {
        let strip = |r: &CoverageReport| {
            let mut r = r.clone();
            r.unsatisfied.iter_mut().for_each(|u| u.reason = Reason::SearchExhausted);
            r
        };
        strip(self) == strip(other)
    }

    pub fn is_complete(&self) -> bool {
        self.satisfied == self.total
    }

    /// Targets of the headline kinds that have no witness.
    pub fn missing(&self) -> impl Iterator<Item = &Unsatisfied> {
        self.unsatisfied.iter().filter(|u| {
            self.include_timing || self.objectives[u.objective].kind != ObjectiveKind::Timing
        })
    }
}

fn truthy(v: Value) -> Option<bool> {
    match v {
        Value::Bool(b) => Some(b),
        _ => None,
    }
}

/// First witness, in vector order then step order, for every target.
pub(crate) fn witnesses(
    ag: &AnnotatedGraph,
    dict: &VariableDictionary,
    vectors: &[TestVector],
) -> Vec<Vec<Option<Witness>>> {
    let mut found: Vec<Vec<Option<Witness>>> = ag.objectives.iter().map(|o| alloc::vec![None; o.targets.len()]).collect();
    for (vi, v) in vectors.iter().enumerate() {
        let Ok(trace) = v.simulation_trace() else { continue };
        let Ok(sim) = simulate(&ag.graph, &trace, dict) else { continue };
        for (o, slots) in ag.objectives.iter().zip(found.iter_mut()) {
            for (k, &target) in o.targets.iter().enumerate() {
                if slots[k].is_some() {
                    continue;
                }
                let hit = sim.series(o.observed).iter().position(|&x| truthy(x) == Some(target));
                slots[k] = hit.map(|step| Witness { vector: vi, step });
            }
        }
    }
    found
}

pub(crate) fn build_report(
    ag: &AnnotatedGraph,
    vectors: usize,
    found: &[Vec<Option<Witness>>],
    include_timing: bool,
    reason: Reason,
) -> CoverageReport {
    let mut by_kind: BTreeMap<ObjectiveKind, KindStats> = BTreeMap::new();
    let mut objectives = Vec::new();
    let mut unsatisfied = Vec::new();
    let (mut total, mut satisfied) = (0, 0);
    for (o, slots) in ag.objectives.iter().zip(found) {
        let stats = by_kind.entry(o.kind).or_default();
        let headline = include_timing || o.kind != ObjectiveKind::Timing;
        let mut targets = Vec::new();
        for (&value, w) in o.targets.iter().zip(slots) {
            stats.total += 1;
            total += headline as usize;
            if w.is_some() {
                stats.satisfied += 1;
                satisfied += headline as usize;
            } else {
                unsatisfied.push(Unsatisfied { objective: o.id, value, reason });
            }
            targets.push(TargetReport { value, witness: *w });
        }
        objectives.push(ObjectiveReport {
            id: o.id,
            kind: o.kind,
            block: o.block.to_string(),
            block_kind: ag.graph.block(o.block).kind.name().into(),
            port: o.port,
            targets,
        });
    }
    let percentage = if total == 0 { 100.0 } else { 100.0 * satisfied as f64 / total as f64 };
    CoverageReport {
        requirement: ag.graph.requirement.clone(),
        vectors,
        include_timing,
        total,
        satisfied,
        percentage,
        by_kind,
        objectives,
        unsatisfied,
    }
}

/// Replays `vectors` through the annotated graph. Vectors that fail to
/// simulate contribute nothing.
pub fn measure(
    ag: &AnnotatedGraph,
    dict: &VariableDictionary,
    vectors: &[TestVector],
    include_timing: bool,
) -> CoverageReport {
    let found = witnesses(ag, dict, vectors);
    build_report(ag, vectors.len(), &found, include_timing, Reason::StaticallyUnreachableUnknown)
}
