//! File formats, experiment tables and command implementations for the
//! `mbal` command-line tool. The numerical work lives in `mbal-core`.

pub mod commands;
pub mod error;
pub mod experiment;
pub mod format;
pub mod output;

pub use error::{CliError, Result};
