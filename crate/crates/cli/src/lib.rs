//! Command-line front end: argument parsing, `key=value` configuration,
//! report persistence and SVG contour plots.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;
pub mod svg;

pub use commands::{run, Cli};
pub use config::Config;
pub use error::{CliError, Result};
pub use report::{emit_report, parse_csv, Format, ReportRow};
pub use svg::emit_contours;

/// Process exit codes.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const CHECK_FAILURE: i32 = 1;
    pub const USAGE: i32 = 2;
}
