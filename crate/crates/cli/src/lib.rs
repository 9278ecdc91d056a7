//! Command-line front end and benchmark harness for `gradkit`.

pub mod args;
pub mod bench;
pub mod commands;
pub mod methods;

pub use commands::{exit_code, run};
