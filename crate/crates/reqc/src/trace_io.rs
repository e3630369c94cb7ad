//! Trace files.
//!
//! CSV: an optional `# step_ms=<n>` line, a header `step,<var>,...` and one
//! row per step. Bools are written as `0`/`1`. JSON:
//! `{"step_ms": n, "columns": {"<var>": [...]}}`.

use std::collections::BTreeMap;
use std::path::Path;

use reqc_core::semantics::Trace;
use reqc_core::value::format_float;
use reqc_core::Value;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceFormat {
    Csv,
    Json,
}

impl TraceFormat {
    /// `.json` files are JSON, everything else CSV.
    pub fn from_path(path: &Path) -> TraceFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => TraceFormat::Json,
            _ => TraceFormat::Csv,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct TraceLoadError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> TraceLoadError {
    TraceLoadError { line, message: message.into() }
}

#[derive(Serialize, Deserialize)]
struct JsonTrace {
    step_ms: Option<u64>,
    columns: BTreeMap<String, Vec<Value>>,
}

/// Reads a trace. `default_step_ms` applies when the file names no step.
pub fn load_trace(src: &str, format: TraceFormat, default_step_ms: Option<u64>) -> Result<Trace, TraceLoadError> {
    let no_step = || err(1, "no step size: add a `# step_ms=<n>` line or configure step_ms");
    match format {
        TraceFormat::Json => {
            let j: JsonTrace =
                serde_json::from_str(src).map_err(|e| err(e.line().max(1), e.to_string()))?;
            let step = j.step_ms.or(default_step_ms).ok_or_else(no_step)?;
            Trace::from_columns(step, j.columns).map_err(|e| err(1, e.to_string()))
        }
        TraceFormat::Csv => {
            let mut step = None;
            for (i, line) in src.lines().enumerate() {
                let Some(rest) = line.trim().strip_prefix('#') else { continue };
                if let Some(v) = rest.trim().strip_prefix("step_ms=") {
                    let n = v.trim().parse::<u64>().map_err(|_| err(i + 1, format!("bad step size '{}'", v.trim())))?;
                    step = Some(n);
                }
            }
            let step = step.or(default_step_ms).ok_or_else(no_step)?;
            let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(src.as_bytes());
            let headers = r.headers().map_err(|e| err(1, e.to_string()))?.clone();
            if headers.get(0) != Some("step") {
                return Err(err(1, "the first column must be 'step'"));
            }
            let names: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
            let mut cols: Vec<Vec<Value>> = vec![Vec::new(); names.len()];
            for (k, rec) in r.records().enumerate() {
                let rec = rec.map_err(|e| err(e.position().map_or(0, |p| p.line() as usize), e.to_string()))?;
                let line = rec.position().map_or(0, |p| p.line() as usize);
                if rec.get(0).and_then(|s| s.parse::<usize>().ok()) != Some(k) {
                    return Err(err(line, format!("expected step {k}")));
                }
                for (c, cell) in rec.iter().skip(1).enumerate() {
                    let v = parse_value(cell).ok_or_else(|| err(line, format!("'{cell}' is not a value")))?;
                    cols[c].push(v);
                }
            }
            Trace::from_columns(step, names.into_iter().zip(cols)).map_err(|e| err(1, e.to_string()))
        }
    }
}

/// Untyped cell: `true`/`false` (any case), an integer or a float.
/// Columns are coerced to their declared type later.
fn parse_value(s: &str) -> Option<Value> {
    match s.to_ascii_lowercase().as_str() {
        "true" => return Some(Value::Bool(true)),
        "false" => return Some(Value::Bool(false)),
        _ => {}
    }
    s.parse().map(Value::Int).ok().or_else(|| s.parse().map(Value::Float).ok())
}

fn cell(v: Value) -> String {
    match v {
        Value::Bool(b) => (b as u8).to_string(),
        Value::Int(i) => i.to_string(),
        Value::Float(x) => format_float(x),
    }
}

pub fn write_trace(trace: &Trace, format: TraceFormat) -> String {
    match format {
        TraceFormat::Json => {
            let j = JsonTrace {
                step_ms: Some(trace.step_ms),
                columns: trace.columns().map(|(k, v)| (k.to_string(), v.to_vec())).collect(),
            };
            let mut s = serde_json::to_string_pretty(&j).expect("trace serializes");
            s.push('\n');
            s
        }
        TraceFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let cols: Vec<(&str, &[Value])> = trace.columns().collect();
            w.write_record(std::iter::once("step").chain(cols.iter().map(|(n, _)| *n))).expect("in-memory write");
            for t in 0..trace.len() {
                let row = std::iter::once(t.to_string()).chain(cols.iter().map(|(_, c)| cell(c[t])));
                w.write_record(row).expect("in-memory write");
            }
            let body = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8");
            format!("# step_ms={}\n{body}", trace.step_ms)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let t = Trace::from_columns(
            10,
            [
                ("a", vec![Value::Bool(true), Value::Bool(false)]),
                ("x", vec![Value::Float(-0.5), Value::Float(3.0)]),
                ("n", vec![Value::Int(-2), Value::Int(7)]),
            ],
        )
        .unwrap();
        let s = write_trace(&t, TraceFormat::Csv);
        assert!(s.starts_with("# step_ms=10\nstep,a,n,x\n0,1,-2,-0.5\n"), "{s}");
        // bools come back as ints until conformed to a dictionary
        let back = load_trace(&s, TraceFormat::Csv, None).unwrap();
        assert_eq!(back.column("a").unwrap(), &[Value::Int(1), Value::Int(0)]);
        assert_eq!(back.column("x"), t.column("x"));
        let j = write_trace(&t, TraceFormat::Json);
        assert_eq!(load_trace(&j, TraceFormat::Json, None).unwrap(), t);
    }

    #[test]
    fn csv_needs_step_size_and_ordered_steps() {
        assert!(load_trace("step,a\n0,1\n", TraceFormat::Csv, None).is_err());
        assert_eq!(load_trace("step,a\n0,1\n", TraceFormat::Csv, Some(5)).unwrap().step_ms, 5);
        let e = load_trace("# step_ms=1\nstep,a\n0,1\n2,0\n", TraceFormat::Csv, None).unwrap_err();
        assert_eq!(e.line, 4);
    }
}
