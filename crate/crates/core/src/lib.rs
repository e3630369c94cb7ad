//! Core of the `reqc` requirement toolkit.
//!
//! Requirements written in a small pattern language (an `initially` or
//! `globally` scope around an invariant or a time-bounded response) are
//! parsed, checked against a variable dictionary, evaluated on finite traces,
//! lowered to a block graph and exported to several formats. Everything here
//! is `no_std` with `alloc`; file IO and the command line live in `reqc`.

#![no_std]

extern crate alloc;

pub mod block_ir;
pub mod dictionary;
pub mod exporters;
pub mod fixtures;
pub mod fuzz;
pub mod semantics;
pub mod syntax;
pub mod testgen;
pub mod value;

pub use dictionary::{DeclError, VarKind, VariableDecl, VariableDictionary};
pub use value::{Value, ValueType};
