//! Dictionary files: JSON (an array of declaration objects) and CSV.

use std::path::Path;

use reqc_core::{Value, ValueType, VarKind, VariableDecl, VariableDictionary};
use serde_json::value::RawValue;
use thiserror::Error;

pub const CSV_HEADER: [&str; 10] = ["name", "kind", "data_type", "rows", "cols", "min", "max", "value", "initial", "description"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DictFormat {
    Json,
    Csv,
}

impl DictFormat {
    /// `.csv` files are CSV, everything else JSON.
    pub fn from_path(path: &Path) -> DictFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => DictFormat::Csv,
            _ => DictFormat::Json,
        }
    }
}

/// A load failure. `row` is the 1-based entry index (0 for document-level
/// errors) and `line` the 1-based line where that entry starts.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}", self.render())]
pub struct DictLoadError {
    pub row: usize,
    pub line: usize,
    pub message: String,
}

impl DictLoadError {
    fn render(&self) -> String {
        if self.row == 0 {
            format!("line {}: {}", self.line, self.message)
        } else {
            format!("row {} (line {}): {}", self.row, self.line, self.message)
        }
    }
}

pub fn load_dictionary(src: &str, format: DictFormat) -> Result<VariableDictionary, DictLoadError> {
    let rows = match format {
        DictFormat::Json => json_rows(src)?,
        DictFormat::Csv => csv_rows(src)?,
    };
    let mut dict = VariableDictionary::new();
    for (row, (line, decl)) in rows.into_iter().enumerate() {
        let err = |e: &dyn std::fmt::Display| DictLoadError { row: row + 1, line, message: e.to_string() };
        let decl = decl.validated().map_err(|e| err(&e))?;
        dict.insert(decl).map_err(|e| err(&e))?;
    }
    Ok(dict)
}

pub fn serialize_dictionary(dict: &VariableDictionary, format: DictFormat) -> String {
    match format {
        DictFormat::Json => {
            let mut s = serde_json::to_string_pretty(dict.entries()).expect("declarations serialize");
            s.push('\n');
            s
        }
        DictFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(CSV_HEADER).expect("in-memory write");
            let cell = |v: Option<Value>| v.map(|v| v.to_string()).unwrap_or_default();
            for d in dict.iter() {
                w.write_record([
                    d.name.clone(),
                    d.kind.as_str().into(),
                    d.data_type.as_str().into(),
                    d.dims.0.to_string(),
                    d.dims.1.to_string(),
                    cell(d.min),
                    cell(d.max),
                    cell(d.value),
                    cell(d.initial),
                    d.description.clone(),
                ])
                .expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
        }
    }
}

fn line_of(src: &str, offset: usize) -> usize {
    src[..offset.min(src.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

fn json_rows(src: &str) -> Result<Vec<(usize, VariableDecl)>, DictLoadError> {
    let doc = |e: serde_json::Error| DictLoadError { row: 0, line: e.line().max(1), message: e.to_string() };
    let raw: Vec<&RawValue> = serde_json::from_str(src).map_err(doc)?;
    raw.into_iter()
        .enumerate()
        .map(|(i, r)| {
            // the raw slice points into `src`
            let offset = r.get().as_ptr() as usize - src.as_ptr() as usize;
            let line = line_of(src, offset);
            let decl = serde_json::from_str(r.get())
                .map_err(|e| DictLoadError { row: i + 1, line, message: e.to_string() })?;
            Ok((line, decl))
        })
        .collect()
}

/// Parses a CSV cell as a value of `ty`. Bools accept `true`/`false` in
/// any case and `0`/`1`.
pub fn parse_cell(s: &str, ty: ValueType) -> Option<Value> {
    let s = s.trim();
    match ty {
        ValueType::Bool => match s.to_ascii_lowercase().as_str() {
            "true" | "1" => Some(Value::Bool(true)),
            "false" | "0" => Some(Value::Bool(false)),
            _ => None,
        },
        ValueType::Int => s.parse().map(Value::Int).ok().or_else(|| Value::Float(s.parse().ok()?).coerce(ty)),
        ValueType::Float => s.parse().map(Value::Float).ok(),
    }
}

fn csv_rows(src: &str) -> Result<Vec<(usize, VariableDecl)>, DictLoadError> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(src.as_bytes());
    let headers = r.headers().map_err(|e| DictLoadError { row: 0, line: 1, message: e.to_string() })?.clone();
    let col = |name: &str| headers.iter().position(|h| h.trim() == name);
    let cols: Vec<Option<usize>> = CSV_HEADER.iter().map(|h| col(h)).collect();
    for (h, c) in CSV_HEADER.iter().zip(&cols).take(3) {
        if c.is_none() {
            return Err(DictLoadError { row: 0, line: 1, message: format!("missing column '{h}'") });
        }
    }
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| DictLoadError {
            row: i + 1,
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let err = |message: String| DictLoadError { row: i + 1, line, message };
        let get = |k: usize| cols[k].and_then(|c| rec.get(c)).map(str::trim).unwrap_or("");
        let kind = VarKind::parse(get(1)).ok_or_else(|| err(format!("unknown kind '{}'", get(1))))?;
        let ty = ValueType::parse(get(2)).ok_or_else(|| err(format!("unknown data_type '{}'", get(2))))?;
        let dim = |k: usize| -> Result<u32, DictLoadError> {
            match get(k) {
                "" => Ok(1),
                s => s.parse().map_err(|_| err(format!("{} '{s}' is not a positive integer", CSV_HEADER[k]))),
            }
        };
        let val = |k: usize| -> Result<Option<Value>, DictLoadError> {
            match get(k) {
                "" => Ok(None),
                s => parse_cell(s, ty).map(Some).ok_or_else(|| err(format!("{} '{s}' is not a {ty}", CSV_HEADER[k]))),
            }
        };
        let mut d = VariableDecl::new(get(0), kind, ty);
        d.dims = (dim(3)?, dim(4)?);
        d.min = val(5)?;
        d.max = val(6)?;
        d.value = val(7)?;
        d.initial = val(8)?;
        d.description = cols[9].and_then(|c| rec.get(c)).unwrap_or("").to_string();
        out.push((line, d));
    }
    Ok(out)
}
