use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::SemError;
use crate::dictionary::VariableDictionary;
use crate::value::Value;

/// A finite run: `len` steps of `step_ms` each, one column per variable.
///
/// Calibratables and constants may be given as columns too; a column always
/// wins over the dictionary value.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub step_ms: u64,
    len: usize,
    columns: BTreeMap<String, Vec<Value>>,
}

impl Trace {
    pub fn new(step_ms: u64, len: usize) -> Self {
        Trace { step_ms, len, columns: BTreeMap::new() }
    }

    /// Builds a trace whose length is taken from the first column.
    pub fn from_columns<I, S>(step_ms: u64, columns: I) -> Result<Self, SemError>
    where
        I: IntoIterator<Item = (S, Vec<Value>)>,
        S: Into<String>,
    {
        let mut it = columns.into_iter().peekable();
        let len = it.peek().map_or(0, |(_, v)| v.len());
        let mut t = Trace::new(step_ms, len);
        for (name, values) in it {
            t.insert(name, values)?;
        }
        Ok(t)
    }

    pub fn insert(&mut self, name: impl Into<String>, values: Vec<Value>) -> Result<(), SemError> {
        let name = name.into();
        if values.len() != self.len {
            return Err(SemError::ColumnLength { name, got: values.len(), want: self.len });
        }
        self.columns.insert(name, values);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn column(&self, name: &str) -> Option<&[Value]> {
        self.columns.get(name).map(Vec::as_slice)
    }

    pub fn columns(&self) -> impl Iterator<Item = (&str, &[Value])> {
        self.columns.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    /// First `n` steps.
    pub fn truncated(&self, n: usize) -> Trace {
        let n = n.min(self.len);
        Trace {
            step_ms: self.step_ms,
            len: n,
            columns: self.columns.iter().map(|(k, v)| (k.clone(), v[..n].to_vec())).collect(),
        }
    }

    /// Checks every column against the dictionary and coerces its values to
    /// the declared type (so `1` in a bool column becomes `TRUE`).
    pub fn conform(mut self, dict: &VariableDictionary) -> Result<Trace, SemError> {
        if self.len == 0 {
            return Err(SemError::EmptyTrace);
        }
        for (name, values) in self.columns.iter_mut() {
            let decl = dict.lookup(name).ok_or_else(|| SemError::UndeclaredColumn(name.clone()))?;
            for (step, v) in values.iter_mut().enumerate() {
                *v = v.coerce(decl.data_type).ok_or_else(|| SemError::ColumnType {
                    name: name.clone(),
                    step,
                    value: v.to_string(),
                    ty: decl.data_type.as_str(),
                })?;
            }
        }
        Ok(self)
    }
}
