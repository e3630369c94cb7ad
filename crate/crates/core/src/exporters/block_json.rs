//! Block graph as JSON.
//!
//! ```text
//! { "requirement": id, "shift": n,
//!   "blocks": [{"id": "b0", "kind": "inport", "params": {...},
//!               "inputs": ["b.."], "type": "bool", "role": "logic"}],
//!   "wires": [{"from": "b0", "to": "b3", "port": 0}],
//!   "entries": [{"name": "a", "block": "b0"}],
//!   "proof_objectives": ["b9"], "test_objectives": [] }
//! ```

use alloc::string::ToString;
use alloc::vec::Vec;

use serde_json::{json, Map, Value as Json};

use super::{ExportBundle, ExportError, Format};
use crate::block_ir::{build_graph, BlockGraph, BlockId};
use crate::dictionary::VariableDictionary;
use crate::semantics::StepConfig;
use crate::syntax::Requirement;

fn ids(v: &[BlockId]) -> Json {
    Json::Array(v.iter().map(|b| Json::String(b.to_string())).collect())
}

pub fn graph_json(g: &BlockGraph) -> Json {
    let blocks: Vec<Json> = g
        .blocks
        .iter()
        .map(|b| {
            let mut params = match serde_json::to_value(&b.kind) {
                Ok(Json::Object(m)) => m,
                _ => Map::new(),
            };
            let kind = params.remove("kind").unwrap_or(Json::Null);
            json!({
                "id": b.id.to_string(),
                "kind": kind,
                "params": Json::Object(params),
                "inputs": ids(&b.inputs),
                "type": b.out_type.as_str(),
                "role": serde_json::to_value(b.role).unwrap_or(Json::Null),
            })
        })
        .collect();
    let wires: Vec<Json> = g
        .wires()
        .iter()
        .map(|w| json!({"from": w.from.to_string(), "to": w.to.to_string(), "port": w.port}))
        .collect();
    let entries: Vec<Json> =
        g.entries.iter().map(|(n, b)| json!({"name": n, "block": b.to_string()})).collect();
    json!({
        "requirement": g.requirement,
        "shift": g.shift,
        "blocks": blocks,
        "wires": wires,
        "entries": entries,
        "proof_objectives": ids(&g.proof_objectives),
        "test_objectives": ids(&g.test_objectives),
    })
}

pub fn export_block_json(
    req: &Requirement,
    dict: &VariableDictionary,
    cfg: StepConfig,
) -> Result<ExportBundle, ExportError> {
    let g = build_graph(req, dict, cfg)?;
    let mut payload = serde_json::to_string_pretty(&graph_json(&g)).expect("json values serialize");
    payload.push('\n');
    Ok(ExportBundle { requirement: req.id.clone(), format: Format::BlockJson, payload, warnings: Vec::new() })
}
