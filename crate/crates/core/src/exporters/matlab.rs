//! Model-building script for the block graph.
//!
//! The script targets a block library `reqc_lib` whose mask parameters carry
//! the names listed below, plus the proof and test objective blocks of the
//! design verifier library. Blocks are named `<Kind>_b<N>`. Inports are wired
//! to model signals by `addSubsystemConnection(systempath, blockName,
//! signalNames)`, which inserts the data store read/write pairs.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;

use super::{sanitize, ExportBundle, ExportError, Format};
use crate::block_ir::{build_graph, initial_outputs, Block, BlockKind, Retrigger};
use crate::dictionary::VariableDictionary;
use crate::semantics::StepConfig;
use crate::syntax::{render_textual, Requirement};
use crate::value::Value;

fn quote(s: &str) -> String {
    format!("'{}'", s.replace('\'', "''"))
}

fn value(v: Value) -> String {
    match v {
        Value::Bool(b) => if b { "true" } else { "false" }.into(),
        v => v.to_string(),
    }
}

fn retrigger(r: Retrigger) -> &'static str {
    match r {
        Retrigger::AfterPulse => "after pulse",
        Retrigger::Sliding => "sliding",
    }
}

fn detector(n: u64, delay: u64, out: u64, r: Retrigger) -> Vec<(&'static str, String)> {
    alloc::vec![
        ("External reset", "No".into()),
        ("Time steps for input detection", n.to_string()),
        ("Time steps for delay (optional)", delay.to_string()),
        ("Time steps for output duration", out.to_string()),
        ("Retrigger", retrigger(r).into()),
    ]
}

/// Library source and mask parameters of a block.
fn library(b: &Block, port: usize, init: Option<Value>) -> (&'static str, Vec<(&'static str, String)>) {
    use BlockKind as K;
    let op = |o: &str| alloc::vec![("Operator", String::from(o))];
    match &b.kind {
        K::Inport { .. } => ("reqc_lib/Inport", alloc::vec![("Port number", port.to_string())]),
        K::Constant { value: v, .. } => ("reqc_lib/Constant", alloc::vec![("Constant value", value(*v))]),
        K::Calibration { name } => ("reqc_lib/Calibration", alloc::vec![("Calibration parameter", name.clone())]),
        K::Not => ("reqc_lib/Logical Operator", op("NOT")),
        K::And => ("reqc_lib/Logical Operator", op("AND")),
        K::Or => ("reqc_lib/Logical Operator", op("OR")),
        K::Implies => ("reqc_lib/Implies", Vec::new()),
        K::Add => ("reqc_lib/Sum", alloc::vec![("Inputs", "++".into())]),
        K::Sub => ("reqc_lib/Sum", alloc::vec![("Inputs", "+-".into())]),
        K::Mul | K::Div => (
            "reqc_lib/Product",
            alloc::vec![
                ("Number of inputs", if b.kind == K::Mul { "2" } else { "*/" }.into()),
                ("Multiplication", "Element-wise(.*)".into()),
            ],
        ),
        K::Neg => ("reqc_lib/Unary Minus", Vec::new()),
        K::Abs => ("reqc_lib/Abs", Vec::new()),
        K::Lt => ("reqc_lib/Relational Operator", op("<")),
        K::Le => ("reqc_lib/Relational Operator", op("<=")),
        K::Gt => ("reqc_lib/Relational Operator", op(">")),
        K::Ge => ("reqc_lib/Relational Operator", op(">=")),
        K::Eq => ("reqc_lib/Relational Operator", op("==")),
        K::Min | K::Max => (
            "reqc_lib/MinMax",
            alloc::vec![
                ("Function", if b.kind == K::Min { "min" } else { "max" }.into()),
                ("Number of input ports", "2".into()),
            ],
        ),
        K::ExtractBit => ("reqc_lib/Extract Bit", Vec::new()),
        K::DelayN { n, initial } => (
            "reqc_lib/Delay",
            alloc::vec![
                ("Delay length", n.to_string()),
                ("Initial condition", initial.or(init).map_or_else(|| "0".into(), value)),
            ],
        ),
        K::DurationCheck { n } => ("reqc_lib/Detector", detector(*n, 0, 1, Retrigger::Sliding)),
        K::DelayLine { n } => ("reqc_lib/Detector", detector(1, *n, 1, Retrigger::Sliding)),
        K::Detector { detect_n, delay, out_dur, retrigger } => {
            ("reqc_lib/Detector", detector(*detect_n, *delay, *out_dur, *retrigger))
        }
        K::ScopeInitially => ("reqc_lib/Initially", Vec::new()),
        K::ScopeGlobally { skip } => ("reqc_lib/Globally", alloc::vec![("Time shift", skip.to_string())]),
        K::ProofObjective => ("sldvlib/Objectives and Constraints/Proof Objective", Vec::new()),
        K::TestObjective { domain } => {
            let vals: Vec<&str> = domain.iter().map(|b| if *b { "true" } else { "false" }).collect();
            (
                "sldvlib/Objectives and Constraints/Test Objective",
                alloc::vec![("Values", format!("{{{}}}", vals.join(", ")))],
            )
        }
    }
}

pub fn block_name(b: &Block) -> String {
    format!("{}_{}", b.kind.name(), b.id)
}

pub fn export_matlab_script(
    req: &Requirement,
    dict: &VariableDictionary,
    cfg: StepConfig,
) -> Result<ExportBundle, ExportError> {
    let g = build_graph(req, dict, cfg)?;
    let init = initial_outputs(&g, dict)?;
    let sub = format!("REQ_{}", sanitize(&req.id));
    let mut s = String::new();
    let _ = writeln!(s, "% Verification subsystem for requirement {}", req.id);
    let _ = writeln!(s, "% {}", render_textual(req, true));
    s.push_str("if ~exist('systempath', 'var')\n    systempath = gcs;\nend\n");
    let _ = writeln!(s, "sys = [systempath '/{sub}'];");
    s.push_str("add_block('built-in/Subsystem', sys);\n");
    let mut signals = Vec::new();
    for b in &g.blocks {
        if let BlockKind::Inport { name } = &b.kind {
            signals.push(name.as_str());
        }
        let pre = match b.kind {
            BlockKind::DelayN { .. } => b.inputs.first().and_then(|i| init[i.0]),
            _ => None,
        };
        let (src, params) = library(b, signals.len(), pre);
        let _ = writeln!(s, "add_block({}, [sys '/{}']);", quote(src), block_name(b));
        if !params.is_empty() {
            let args: Vec<String> = params.iter().map(|(k, v)| format!("{}, {}", quote(k), quote(v))).collect();
            let _ = writeln!(s, "set_param([sys '/{}'], {});", block_name(b), args.join(", "));
        }
    }
    for w in g.wires() {
        let _ = writeln!(
            s,
            "add_line(sys, '{}/1', '{}/{}', 'autorouting', 'on');",
            block_name(g.block(w.from)),
            block_name(g.block(w.to)),
            w.port + 1
        );
    }
    let names: Vec<String> = signals.iter().map(|n| quote(n)).collect();
    let _ = writeln!(s, "addSubsystemConnection(systempath, {}, {{{}}});", quote(&sub), names.join(", "));
    Ok(ExportBundle { requirement: req.id.clone(), format: Format::MatlabScript, payload: s, warnings: Vec::new() })
}
