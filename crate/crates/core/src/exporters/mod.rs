//! Emitters for the downstream formats.
//!
//! Every emitter is a pure function of the requirement, the dictionary and
//! the configuration, and produces UTF-8 text with LF line endings.

mod block_json;
mod c_harness;
mod matlab;
mod spec_xml;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::dictionary::VariableDictionary;
use crate::semantics::{SemError, StepConfig};
use crate::syntax::{check, render_textual, Diagnostic, Requirement};

pub use block_json::export_block_json;
pub use c_harness::{export_c_harness, CounterMonitor, FloatType, MonitorState, WidthConfig};
pub use matlab::export_matlab_script;
pub use spec_xml::{export_spec_xml, op_tag, SPEC_SCHEMA};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Format {
    Text,
    MatlabScript,
    SpecXml,
    CHarness,
    BlockJson,
}

impl Format {
    pub const ALL: [Format; 5] =
        [Format::Text, Format::MatlabScript, Format::SpecXml, Format::CHarness, Format::BlockJson];

    pub fn as_str(self) -> &'static str {
        match self {
            Format::Text => "text",
            Format::MatlabScript => "matlab",
            Format::SpecXml => "spec",
            Format::CHarness => "c",
            Format::BlockJson => "blocks",
        }
    }

    pub fn parse(s: &str) -> Option<Format> {
        Format::ALL.into_iter().find(|f| f.as_str() == s)
    }

    /// File extension including the leading dot.
    pub fn extension(self) -> &'static str {
        match self {
            Format::Text => ".txt",
            Format::MatlabScript => ".m",
            Format::SpecXml => ".spec.xml",
            Format::CHarness => ".c",
            Format::BlockJson => ".blocks.json",
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExportBundle {
    pub requirement: String,
    pub format: Format,
    pub payload: String,
    pub warnings: Vec<Diagnostic>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExportError {
    #[error("requirement '{0}' has scope initially, which the SPEC format cannot express")]
    InitiallyNotSupported(String),
    #[error("requirement does not check ({} errors)", .0.len())]
    Check(Vec<Diagnostic>),
    #[error(transparent)]
    Semantics(#[from] SemError),
    #[error("{bits}-bit integers cannot hold {value} declared for '{name}'")]
    WidthTooNarrow { name: String, value: String, bits: u8 },
    #[error("unsupported integer width {0}; use 8, 16, 32 or 64")]
    BadWidth(u8),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExportConfig {
    pub step: StepConfig,
    pub widths: WidthConfig,
}

impl ExportConfig {
    pub fn new(step: StepConfig) -> Self {
        ExportConfig { step, widths: WidthConfig::default() }
    }
}

/// Fully parenthesized sentence plus a trailing newline.
pub fn export_text(req: &Requirement, _dict: &VariableDictionary) -> ExportBundle {
    let mut payload = render_textual(req, true);
    payload.push('\n');
    ExportBundle { requirement: req.id.clone(), format: Format::Text, payload, warnings: Vec::new() }
}

/// Checks `req` and runs the emitter for `format`. Check warnings are
/// attached to the bundle.
pub fn export(
    req: &Requirement,
    dict: &VariableDictionary,
    cfg: &ExportConfig,
    format: Format,
) -> Result<ExportBundle, ExportError> {
    let (errors, warnings): (Vec<_>, Vec<_>) = check(req, dict).into_iter().partition(Diagnostic::is_error);
    if !errors.is_empty() {
        return Err(ExportError::Check(errors));
    }
    let mut bundle = match format {
        Format::Text => export_text(req, dict),
        Format::MatlabScript => export_matlab_script(req, dict, cfg.step)?,
        Format::SpecXml => export_spec_xml(req, dict, cfg.step)?,
        Format::CHarness => export_c_harness(req, dict, cfg.step, &cfg.widths)?,
        Format::BlockJson => export_block_json(req, dict, cfg.step)?,
    };
    bundle.warnings = warnings;
    Ok(bundle)
}

/// Requirement id turned into a name usable in scripts and C.
pub fn sanitize(id: &str) -> String {
    let mut s: String = id.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect();
    if !s.starts_with(|c: char| c.is_ascii_alphabetic()) {
        s.insert_str(0, "R_");
    }
    s
}
