//! The variable dictionary: signals, calibratables and constants that
//! requirements are checked and evaluated against.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::is_identifier;
use crate::value::{Value, ValueType};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarKind {
    Signal,
    Calibratable,
    Constant,
}

impl VarKind {
    pub fn as_str(self) -> &'static str {
        match self {
            VarKind::Signal => "signal",
            VarKind::Calibratable => "calibratable",
            VarKind::Constant => "constant",
        }
    }

    pub fn parse(s: &str) -> Option<VarKind> {
        match s {
            "signal" => Some(VarKind::Signal),
            "calibratable" => Some(VarKind::Calibratable),
            "constant" => Some(VarKind::Constant),
            _ => None,
        }
    }
}

fn default_dims() -> (u32, u32) {
    (1, 1)
}

/// One dictionary row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableDecl {
    pub name: String,
    pub kind: VarKind,
    pub data_type: ValueType,
    #[serde(default = "default_dims")]
    pub dims: (u32, u32),
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<Value>,
    #[serde(default)]
    pub description: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<Value>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DeclError {
    #[error("'{0}' is not a valid identifier")]
    BadName(String),
    #[error("duplicate variable name '{0}'")]
    Duplicate(String),
    #[error("dimensions must be positive, got {0}x{1}")]
    BadDims(u32, u32),
    #[error("field '{field}' value {value} does not fit data type {ty}")]
    TypeMismatch { field: &'static str, value: Value, ty: ValueType },
    #[error("bool variable '{0}' cannot carry min/max bounds")]
    BoolBounds(String),
    #[error("min {min} exceeds max {max}")]
    MinAboveMax { min: Value, max: Value },
    #[error("constant '{0}' has no value")]
    ConstantWithoutValue(String),
    #[error("value {value} of '{name}' lies outside [{lo}, {hi}]")]
    ValueOutOfRange { name: String, value: Value, lo: String, hi: String },
}

impl VariableDecl {
    pub fn new(name: &str, kind: VarKind, data_type: ValueType) -> Self {
        VariableDecl {
            name: name.into(),
            kind,
            data_type,
            dims: (1, 1),
            min: None,
            max: None,
            value: None,
            description: String::new(),
            initial: None,
        }
    }

    pub fn with_range(mut self, min: Value, max: Value) -> Self {
        self.min = Some(min);
        self.max = Some(max);
        self
    }

    pub fn with_value(mut self, value: Value) -> Self {
        self.value = Some(value);
        self
    }

    pub fn with_initial(mut self, initial: Value) -> Self {
        self.initial = Some(initial);
        self
    }

    pub fn is_scalar(&self) -> bool {
        self.dims == (1, 1)
    }

    /// Value read by `last` before step 0.
    ///
    /// Explicit `initial` wins; constants and calibratables fall back to their
    /// value; otherwise the type default.
    pub fn initial_value(&self) -> Value {
        if let Some(v) = self.initial {
            return v;
        }
        if self.kind != VarKind::Signal {
            if let Some(v) = self.value {
                return v;
            }
        }
        self.data_type.default_value()
    }

    pub fn lower_bound(&self) -> Option<f64> {
        self.min.and_then(Value::as_f64)
    }

    pub fn upper_bound(&self) -> Option<f64> {
        self.max.and_then(Value::as_f64)
    }

    pub fn in_range(&self, v: Value) -> bool {
        match v.as_f64() {
            None => true,
            Some(x) => {
                self.lower_bound().is_none_or(|lo| x >= lo)
                    && self.upper_bound().is_none_or(|hi| x <= hi)
            }
        }
    }

    /// Coerces every typed field to `data_type` and checks the row invariants.
    pub fn validated(mut self) -> Result<Self, DeclError> {
        if !is_identifier(&self.name) {
            return Err(DeclError::BadName(self.name));
        }
        if self.dims.0 == 0 || self.dims.1 == 0 {
            return Err(DeclError::BadDims(self.dims.0, self.dims.1));
        }
        let ty = self.data_type;
        let coerce = |field: &'static str, v: Option<Value>| -> Result<Option<Value>, DeclError> {
            match v {
                None => Ok(None),
                Some(v) => v
                    .coerce(ty)
                    .map(Some)
                    .ok_or(DeclError::TypeMismatch { field, value: v, ty }),
            }
        };
        self.min = coerce("min", self.min)?;
        self.max = coerce("max", self.max)?;
        self.value = coerce("value", self.value)?;
        self.initial = coerce("initial", self.initial)?;
        if ty == ValueType::Bool && (self.min.is_some() || self.max.is_some()) {
            return Err(DeclError::BoolBounds(self.name));
        }
        if let (Some(lo), Some(hi)) = (self.lower_bound(), self.upper_bound()) {
            if lo > hi {
                return Err(DeclError::MinAboveMax {
                    min: self.min.unwrap(),
                    max: self.max.unwrap(),
                });
            }
        }
        if self.kind == VarKind::Constant && self.value.is_none() {
            return Err(DeclError::ConstantWithoutValue(self.name));
        }
        if let Some(v) = self.value {
            if !self.in_range(v) {
                let show = |b: Option<Value>| b.map(|v| alloc::format!("{v}")).unwrap_or_default();
                return Err(DeclError::ValueOutOfRange {
                    name: self.name.clone(),
                    value: v,
                    lo: show(self.min),
                    hi: show(self.max),
                });
            }
        }
        Ok(self)
    }
}

/// Immutable, insertion-ordered symbol table.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VariableDictionary {
    entries: Vec<VariableDecl>,
    index: BTreeMap<String, usize>,
}

impl VariableDictionary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Validates each row in order. On failure returns the zero-based row
    /// index alongside the error so callers can attach a file locus.
    pub fn from_decls<I>(decls: I) -> Result<Self, (usize, DeclError)>
    where
        I: IntoIterator<Item = VariableDecl>,
    {
        let mut dict = VariableDictionary::new();
        for (row, decl) in decls.into_iter().enumerate() {
            dict.insert(decl).map_err(|e| (row, e))?;
        }
        Ok(dict)
    }

    pub fn insert(&mut self, decl: VariableDecl) -> Result<(), DeclError> {
        let decl = decl.validated()?;
        if self.index.contains_key(&decl.name) {
            return Err(DeclError::Duplicate(decl.name));
        }
        self.index.insert(decl.name.clone(), self.entries.len());
        self.entries.push(decl);
        Ok(())
    }

    /// Exact, case-sensitive lookup.
    pub fn lookup(&self, name: &str) -> Option<&VariableDecl> {
        self.index.get(name).map(|&i| &self.entries[i])
    }

    pub fn entries(&self) -> &[VariableDecl] {
        &self.entries
    }

    pub fn iter(&self) -> core::slice::Iter<'_, VariableDecl> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl<'a> IntoIterator for &'a VariableDictionary {
    type Item = &'a VariableDecl;
    type IntoIter = core::slice::Iter<'a, VariableDecl>;

    fn into_iter(self) -> Self::IntoIter {
        self.entries.iter()
    }
}
