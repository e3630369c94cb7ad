//! `reqc.toml` and the merged run configuration.
//!
//! Every key is optional:
//!
//! ```toml
//! step_ms = 10
//! horizon = 12
//! seed = 0
//! budget = 20000
//! output = "out"
//! dictionary = "dict.json"
//!
//! [widths]
//! int_bits = 32          # 8, 16, 32 or 64
//! float = "double"       # or "float"
//! bool_type = "unsigned char"   # or "_Bool", "int"
//! ```
//!
//! Precedence: command-line flag, then `REQC_SEED` (seed only), then the
//! file, then the built-in default.

use std::path::{Path, PathBuf};

use reqc_core::exporters::{FloatType, WidthConfig};
use serde::Deserialize;
use thiserror::Error;

pub const DEFAULT_STEP_MS: u64 = 10;
pub const DEFAULT_HORIZON: usize = 12;
pub const DEFAULT_BUDGET: usize = 20_000;
pub const SEED_ENV: &str = "REQC_SEED";
const BOOL_TYPES: [&str; 3] = ["unsigned char", "_Bool", "int"];

#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub step_ms: Option<u64>,
    pub horizon: Option<usize>,
    pub seed: Option<u64>,
    pub budget: Option<usize>,
    pub output: Option<PathBuf>,
    pub dictionary: Option<PathBuf>,
    #[serde(default)]
    pub widths: WidthsFile,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WidthsFile {
    pub int_bits: Option<u8>,
    pub float: Option<String>,
    pub bool_type: Option<String>,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("{0}")]
    Invalid(String),
}

impl FileConfig {
    pub fn parse(src: &str, path: &str) -> Result<FileConfig, ConfigError> {
        toml::from_str(src).map_err(|e| ConfigError::Parse { path: path.into(), message: e.message().into() })
    }

    /// Reads `explicit`, or `reqc.toml` in the working directory if present.
    pub fn discover(explicit: Option<&Path>) -> Result<FileConfig, ConfigError> {
        let path = match explicit {
            Some(p) => p.to_path_buf(),
            None => {
                let p = PathBuf::from("reqc.toml");
                if !p.exists() {
                    return Ok(FileConfig::default());
                }
                p
            }
        };
        let shown = path.display().to_string();
        let src = std::fs::read_to_string(&path).map_err(|source| ConfigError::Io { path: shown.clone(), source })?;
        Self::parse(&src, &shown)
    }
}

/// Flags that can override the file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Overrides {
    pub step_ms: Option<u64>,
    pub horizon: Option<usize>,
    pub seed: Option<u64>,
    pub budget: Option<usize>,
    pub output: Option<PathBuf>,
    pub int_bits: Option<u8>,
    pub float: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub step_ms: u64,
    pub horizon: usize,
    pub seed: u64,
    pub budget: usize,
    pub output: PathBuf,
    pub widths: WidthConfig,
}

impl RunConfig {
    /// Merges flags, the seed variable (`env_seed`, the raw value of
    /// `REQC_SEED` if set) and the file.
    pub fn merge(file: &FileConfig, flags: &Overrides, env_seed: Option<&str>) -> Result<RunConfig, ConfigError> {
        let env_seed = match env_seed {
            Some(s) => Some(
                s.trim().parse::<u64>().map_err(|_| ConfigError::Invalid(format!("{SEED_ENV}='{s}' is not a seed")))?,
            ),
            None => None,
        };
        let step_ms = flags.step_ms.or(file.step_ms).unwrap_or(DEFAULT_STEP_MS);
        if step_ms == 0 {
            return Err(ConfigError::Invalid("step_ms must be at least 1".into()));
        }
        let horizon = flags.horizon.or(file.horizon).unwrap_or(DEFAULT_HORIZON);
        if horizon == 0 {
            return Err(ConfigError::Invalid("horizon must be at least 1".into()));
        }
        let mut widths = WidthConfig::default();
        if let Some(b) = flags.int_bits.or(file.widths.int_bits) {
            if ![8, 16, 32, 64].contains(&b) {
                return Err(ConfigError::Invalid(format!("int_bits must be 8, 16, 32 or 64, got {b}")));
            }
            widths.int_bits = b;
        }
        if let Some(f) = flags.float.as_ref().or(file.widths.float.as_ref()) {
            widths.float_type = match f.as_str() {
                "float" => FloatType::Float,
                "double" => FloatType::Double,
                _ => return Err(ConfigError::Invalid(format!("float must be 'float' or 'double', got '{f}'"))),
            };
        }
        if let Some(b) = &file.widths.bool_type {
            widths.bool_type = BOOL_TYPES
                .into_iter()
                .find(|t| t == b)
                .ok_or_else(|| ConfigError::Invalid(format!("bool_type must be one of {BOOL_TYPES:?}, got '{b}'")))?;
        }
        Ok(RunConfig {
            step_ms,
            horizon,
            seed: flags.seed.or(env_seed).or(file.seed).unwrap_or(0),
            budget: flags.budget.or(file.budget).unwrap_or(DEFAULT_BUDGET),
            output: flags.output.clone().or_else(|| file.output.clone()).unwrap_or_else(|| PathBuf::from(".")),
            widths,
        })
    }
}
