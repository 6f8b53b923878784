//! File formats, reports and the command-line front end for `coflow-core`.

pub mod certify;
pub mod cli;
pub mod format;
pub mod report;
