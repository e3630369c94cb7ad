//! Typed scalar values shared by the dictionary, traces and both evaluators.

use core::fmt;

use serde::{Deserialize, Serialize};

/// The three scalar data types of the requirement language.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValueType {
    Bool,
    Int,
    Float,
}

impl ValueType {
    pub fn is_numeric(self) -> bool {
        matches!(self, ValueType::Int | ValueType::Float)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ValueType::Bool => "bool",
            ValueType::Int => "int",
            ValueType::Float => "float",
        }
    }

    pub fn parse(s: &str) -> Option<ValueType> {
        match s {
            "bool" => Some(ValueType::Bool),
            "int" => Some(ValueType::Int),
            "float" => Some(ValueType::Float),
            _ => None,
        }
    }

    /// Result type of an arithmetic operator over two numeric operands.
    pub fn promote(self, other: ValueType) -> ValueType {
        if self == ValueType::Int && other == ValueType::Int {
            ValueType::Int
        } else {
            ValueType::Float
        }
    }

    pub fn default_value(self) -> Value {
        match self {
            ValueType::Bool => Value::Bool(false),
            ValueType::Int => Value::Int(0),
            ValueType::Float => Value::Float(0.0),
        }
    }
}

impl fmt::Display for ValueType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A scalar value.
///
/// Serialized untagged, so JSON `true`, `3` and `3.5` map to the three
/// variants directly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Bool(bool),
    Int(i64),
    Float(f64),
}

impl Value {
    pub fn value_type(self) -> ValueType {
        match self {
            Value::Bool(_) => ValueType::Bool,
            Value::Int(_) => ValueType::Int,
            Value::Float(_) => ValueType::Float,
        }
    }

    pub fn as_bool(self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(b),
            _ => None,
        }
    }

    pub fn as_f64(self) -> Option<f64> {
        match self {
            Value::Int(i) => Some(i as f64),
            Value::Float(x) => Some(x),
            Value::Bool(_) => None,
        }
    }

    /// Converts the value to `ty` where the conversion is lossless.
    ///
    /// Ints 0/1 become bools, integral floats become ints, ints become floats.
    pub fn coerce(self, ty: ValueType) -> Option<Value> {
        match (self, ty) {
            (Value::Bool(b), ValueType::Bool) => Some(Value::Bool(b)),
            (Value::Int(0), ValueType::Bool) => Some(Value::Bool(false)),
            (Value::Int(1), ValueType::Bool) => Some(Value::Bool(true)),
            (Value::Int(i), ValueType::Int) => Some(Value::Int(i)),
            (Value::Float(x), ValueType::Int) => {
                let i = x as i64;
                if x.is_finite() && i as f64 == x {
                    Some(Value::Int(i))
                } else {
                    None
                }
            }
            (Value::Int(i), ValueType::Float) => Some(Value::Float(i as f64)),
            (Value::Float(x), ValueType::Float) => Some(Value::Float(x)),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(true) => f.write_str("TRUE"),
            Value::Bool(false) => f.write_str("FALSE"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Float(x) => f.write_str(&format_float(*x)),
        }
    }
}

/// Positional decimal rendering with at least one fractional digit and no
/// exponent, e.g. `3.0`, `0.0000001`. Round-trips through `str::parse`.
pub fn format_float(x: f64) -> alloc::string::String {
    let mut s = alloc::format!("{x}");
    if !s.contains('.') && !s.contains("inf") && !s.contains("NaN") {
        s.push_str(".0");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coercions() {
        assert_eq!(Value::Int(1).coerce(ValueType::Bool), Some(Value::Bool(true)));
        assert_eq!(Value::Int(2).coerce(ValueType::Bool), None);
        assert_eq!(Value::Float(3.0).coerce(ValueType::Int), Some(Value::Int(3)));
        assert_eq!(Value::Float(3.5).coerce(ValueType::Int), None);
        assert_eq!(Value::Int(3).coerce(ValueType::Float), Some(Value::Float(3.0)));
        assert_eq!(Value::Bool(true).coerce(ValueType::Int), None);
    }

    #[test]
    fn float_text_has_no_exponent() {
        assert_eq!(format_float(3.0), "3.0");
        assert_eq!(format_float(1e-7), "0.0000001");
        assert_eq!(format_float(1e20), "100000000000000000000.0");
        assert_eq!(format_float(0.1).parse::<f64>().unwrap(), 0.1);
    }
}
