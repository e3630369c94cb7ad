//! The worked example used across tests, docs and the acceptance suite.

use crate::dictionary::{VarKind, VariableDecl, VariableDictionary};
use crate::value::{Value, ValueType};

/// Globally-scoped response with a five-clause trigger.
pub const EXAMPLE_1: &str = "At each time step, if [(((signal_A is equal to TRUE) and ((not signal_B) is equal to constant_A)) and ((the absolute value of signal_C) is greater than constant_B)) and (signal_D is less than constant_C)] has been valid for [50 milliseconds], then in response, after a delay of [0 steps], [signal_E is equal to TRUE] is valid for [1 step].";

/// Controller step of the example, in milliseconds.
pub const EXAMPLE_1_STEP_MS: u64 = 10;

/// Dictionary declaring every name in [`EXAMPLE_1`].
pub fn example_1_dictionary() -> VariableDictionary {
    let sig = |n: &str, t| VariableDecl::new(n, VarKind::Signal, t);
    let konst = |n: &str, t, v| VariableDecl::new(n, VarKind::Constant, t).with_value(v);
    VariableDictionary::from_decls([
        sig("signal_A", ValueType::Bool),
        sig("signal_B", ValueType::Bool),
        sig("signal_C", ValueType::Float).with_range(Value::Float(-100.0), Value::Float(100.0)),
        sig("signal_D", ValueType::Int).with_range(Value::Int(0), Value::Int(255)),
        sig("signal_E", ValueType::Bool),
        konst("constant_A", ValueType::Bool, Value::Bool(false)),
        konst("constant_B", ValueType::Float, Value::Float(3.5)).with_range(Value::Float(0.0), Value::Float(10.0)),
        konst("constant_C", ValueType::Int, Value::Int(100)),
    ])
    .expect("fixture dictionary is valid")
}
