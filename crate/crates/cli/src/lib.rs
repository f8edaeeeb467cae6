//! File formats, reports and the command-line front end of `segproj`.

pub mod cli;
pub mod commands;
pub mod formats;
pub mod pipeline;
pub mod report;

pub use pipeline::InvariantViolation;
