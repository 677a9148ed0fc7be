//! Cross-validation harness: every check compares two or more independent
//! routes and records the worst residual against a fixed tolerance.

mod commands;
mod config;
mod report;

pub use commands::{cmd_all, cmd_remark_check, cmd_roundtrip, cmd_verify_pair, cmd_volterra, run_command, Command};
pub use config::{InputSeries, RunConfig};
pub use report::{CheckRecord, Environment, Report, SampleResidual};
