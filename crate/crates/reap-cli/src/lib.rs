//! Command-line frontend for the privacy-contract experiment suite:
//! configuration parsing, menu file formats and the experiment commands.

pub mod commands;
pub mod config;
pub mod error;
pub mod menu_io;
pub mod output;

/// Format of command summaries printed to stdout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}
