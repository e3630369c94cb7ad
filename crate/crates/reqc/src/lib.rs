//! File formats and the command-line front end of the `reqc` toolkit.
//!
//! The analysis itself lives in `reqc_core`; this crate reads and writes
//! dictionaries, traces, requirements files and configuration, and drives
//! the pipeline for the `reqc` binary.

pub mod cli;
pub mod config;
pub mod dict_io;
pub mod reqfile;
pub mod spec_import;
pub mod trace_io;
