//! Batch front end for `holderscope`: ingest, run, and write JSON and CSV artifacts.

pub mod config;
pub mod error;
pub mod ingest;
pub mod json;
pub mod run;
pub mod spec;

pub use error::{CliError, Result};
