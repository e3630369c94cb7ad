//! BTC-style SPEC XML. The schema is our own and carries the same
//! information as a vendor SPEC file; it is not accepted by any vendor tool.
//!
//! ```text
//! <spec-file schema="reqc-spec" version="1">
//!   <requirement id="R1">
//!     <text>...</text>
//!     <scope kind="globally" evaluation-start="after-first-step"/>
//!     <pattern kind="invariant">   <event>E</event> </pattern>
//!     <pattern kind="response">
//!       <trigger steps="5" magnitude="50" unit="milliseconds">E</trigger>
//!       <delay steps="0" magnitude="0" unit="simulation_steps"/>
//!       <response steps="1" magnitude="1" unit="simulation_steps">E</response>
//!     </pattern>
//!   </requirement>
//! </spec-file>
//! ```
//!
//! Events `E` are operator trees. Leaves: `<var name=".."/>`,
//! `<bool value="true"/>`, `<int value=".."/>`, `<float value=".."/>`.
//! Unary: `not`, `neg`, `plus`, `abs`, `last` (one step), `last steps="n"`.
//! Binary: `and or implies eq lt le gt ge add sub mul div min max`, and
//! `extract-bit` with the index first.
//!
//! Evaluation starts after the first computation step, which is where the
//! globally scope places its first anchor; no shift of the durations is
//! needed. An initially scope constrains step 0, which the format cannot
//! address, so it is refused.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;

use super::{ExportBundle, ExportError, Format};
use crate::dictionary::VariableDictionary;
use crate::semantics::{to_steps, StepConfig};
use crate::syntax::{render_textual, BinOp, Duration, Expr, ExprKind, Pattern, Requirement, Scope, UnOp};
use crate::value::format_float;

/// Value of the root `schema` attribute.
pub const SPEC_SCHEMA: &str = "reqc-spec";

fn escape(s: &str) -> String {
    let mut o = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => o.push_str("&amp;"),
            '<' => o.push_str("&lt;"),
            '>' => o.push_str("&gt;"),
            '"' => o.push_str("&quot;"),
            '\'' => o.push_str("&apos;"),
            c => o.push(c),
        }
    }
    o
}

pub fn op_tag(op: BinOp) -> &'static str {
    match op {
        BinOp::Implies => "implies",
        BinOp::Or => "or",
        BinOp::And => "and",
        BinOp::Eq => "eq",
        BinOp::Lt => "lt",
        BinOp::Le => "le",
        BinOp::Gt => "gt",
        BinOp::Ge => "ge",
        BinOp::Add => "add",
        BinOp::Sub => "sub",
        BinOp::Mul => "mul",
        BinOp::Div => "div",
    }
}

fn event(out: &mut String, e: &Expr, indent: usize) {
    let pad = "  ".repeat(indent);
    let open = |out: &mut String, tag: &str, attrs: &str, kids: &[&Expr]| {
        let _ = writeln!(out, "{pad}<{tag}{attrs}>");
        for k in kids {
            event(out, k, indent + 1);
        }
        let _ = writeln!(out, "{pad}</{tag}>");
    };
    match &e.kind {
        ExprKind::Bool(b) => {
            let _ = writeln!(out, "{pad}<bool value=\"{b}\"/>");
        }
        ExprKind::Int(i) => {
            let _ = writeln!(out, "{pad}<int value=\"{i}\"/>");
        }
        ExprKind::Float(x) => {
            let _ = writeln!(out, "{pad}<float value=\"{}\"/>", format_float(*x));
        }
        ExprKind::Var(n) => {
            let _ = writeln!(out, "{pad}<var name=\"{}\"/>", escape(n));
        }
        ExprKind::Not(x) => open(out, "not", "", &[x]),
        ExprKind::Sign(UnOp::Minus, x) => open(out, "neg", "", &[x]),
        ExprKind::Sign(UnOp::Plus, x) => open(out, "plus", "", &[x]),
        ExprKind::Abs(x) => open(out, "abs", "", &[x]),
        ExprKind::LastUnary(x) => open(out, "last", "", &[x]),
        ExprKind::LastN(x, n) => open(out, "last", &alloc::format!(" steps=\"{n}\""), &[x]),
        ExprKind::Min(a, b) => open(out, "min", "", &[a, b]),
        ExprKind::Max(a, b) => open(out, "max", "", &[a, b]),
        ExprKind::Binary(op, a, b) => open(out, op_tag(*op), "", &[a, b]),
        ExprKind::ExtractBit { index, value } => open(out, "extract-bit", "", &[index, value]),
    }
}

fn duration(d: &Duration, cfg: StepConfig) -> Result<String, ExportError> {
    Ok(alloc::format!(
        " steps=\"{}\" magnitude=\"{}\" unit=\"{}\"",
        to_steps(d, cfg)?,
        d.magnitude,
        d.unit.as_str()
    ))
}

pub fn export_spec_xml(
    req: &Requirement,
    _dict: &VariableDictionary,
    cfg: StepConfig,
) -> Result<ExportBundle, ExportError> {
    if req.scope == Scope::Initially {
        return Err(ExportError::InitiallyNotSupported(req.id.clone()));
    }
    let mut s = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(s, "<spec-file schema=\"{SPEC_SCHEMA}\" version=\"1\">");
    let _ = writeln!(s, "  <requirement id=\"{}\">", escape(&req.id));
    let _ = writeln!(s, "    <text>{}</text>", escape(&render_textual(req, true)));
    s.push_str("    <scope kind=\"globally\" evaluation-start=\"after-first-step\"/>\n");
    match &req.pattern {
        Pattern::Invariant { event: e } => {
            s.push_str("    <pattern kind=\"invariant\">\n      <event>\n");
            event(&mut s, e, 4);
            s.push_str("      </event>\n    </pattern>\n");
        }
        Pattern::Response { trigger, trigger_duration, delay, response, response_duration } => {
            s.push_str("    <pattern kind=\"response\">\n");
            let _ = writeln!(s, "      <trigger{}>", duration(trigger_duration, cfg)?);
            event(&mut s, trigger, 4);
            s.push_str("      </trigger>\n");
            let _ = writeln!(s, "      <delay{}/>", duration(delay, cfg)?);
            let _ = writeln!(s, "      <response{}>", duration(response_duration, cfg)?);
            event(&mut s, response, 4);
            s.push_str("      </response>\n    </pattern>\n");
        }
    }
    s.push_str("  </requirement>\n</spec-file>\n");
    Ok(ExportBundle { requirement: req.id.to_string(), format: Format::SpecXml, payload: s, warnings: Vec::new() })
}
