//! Command-line front end: configuration, sweeps, dispatch and CSV output.

pub mod commands;
pub mod config;
pub mod error;
pub mod sweep;
pub mod table;

pub use commands::{provenance, run_command};
pub use config::{CommandKind, RawConfig, RunConfig, Value};
pub use error::{CliError, Origin, Result};
pub use sweep::{grid, Spacing, SweepAxis};
pub use table::{emit_csv, format_number, Cell, ResultTable, Row, Status};
