//! Random dictionaries for round-trip tests.

use proptest::prelude::*;
use reqc_core::{Value, ValueType, VarKind, VariableDecl, VariableDictionary};

fn value(ty: ValueType) -> BoxedStrategy<Value> {
    match ty {
        ValueType::Bool => any::<bool>().prop_map(Value::Bool).boxed(),
        ValueType::Int => any::<i64>().prop_map(Value::Int).boxed(),
        ValueType::Float => prop_oneof![
            (-1e6..1e6f64).prop_map(Value::Float),
            any::<f64>().prop_filter("finite", |x| x.is_finite()).prop_map(Value::Float),
            (-1000i64..1000).prop_map(|i| Value::Float(i as f64)),
        ]
        .boxed(),
    }
}

fn decl(index: usize) -> impl Strategy<Value = VariableDecl> {
    let ty = prop_oneof![Just(ValueType::Bool), Just(ValueType::Int), Just(ValueType::Float)];
    let kind = prop_oneof![Just(VarKind::Signal), Just(VarKind::Calibratable), Just(VarKind::Constant)];
    (ty, kind, "[a-zA-Z][a-zA-Z0-9_]{0,6}").prop_flat_map(move |(ty, kind, stem)| {
        let bounds = if ty == ValueType::Bool {
            Just((None, None)).boxed()
        } else {
            (proptest::option::of(value(ty)), proptest::option::of(value(ty))).boxed()
        };
        (
            bounds,
            proptest::option::of(value(ty)),
            proptest::option::of(value(ty)),
            (1u32..4, 1u32..4),
            "[ -~]{0,12}|\"quoted, text\"|line\nbreak",
        )
            .prop_map(move |((lo, hi), val, init, dims, description)| {
                let mut d = VariableDecl::new(&format!("{stem}_{index}"), kind, ty);
                let (lo, hi) = match (lo.and_then(|v| v.as_f64()), hi.and_then(|v| v.as_f64())) {
                    (Some(a), Some(b)) if a > b => (hi, lo),
                    _ => (lo, hi),
                };
                d.min = lo;
                d.max = hi;
                d.value = if kind == VarKind::Constant { val.or(Some(ty.default_value())) } else { val };
                d.initial = init;
                d.dims = dims;
                d.description = description;
                // drop values that fall outside the bounds
                if d.value.is_some_and(|v| !d.in_range(v)) {
                    d.value = if kind == VarKind::Constant { d.min } else { None };
                }
                d
            })
    })
}

/// Valid dictionaries of up to `max` declarations.
pub fn dictionary(max: usize) -> impl Strategy<Value = VariableDictionary> {
    (0..=max).prop_flat_map(|n| (0..n).map(decl).collect::<Vec<_>>()).prop_map(|decls| {
        let mut d = VariableDictionary::new();
        for x in decls {
            if let Ok(x) = x.validated() {
                d.insert(x).expect("names carry a unique suffix");
            }
        }
        d
    })
}
