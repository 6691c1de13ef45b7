//! File formats, reports and the command line for `spectra-core`.

pub mod cli;
pub mod corpus;
pub mod dot;
pub mod format;
pub mod report;

pub use format::{parse_model, parse_test, write_model, write_test, FormatError};
