//! Command-line front end and file formats for `revmeas-core`.
//!
//! Campaigns draw random states or distributions from a master seed, check
//! every inequality row by row and write a CSV or JSON report.

pub mod campaign;
pub mod cli;
pub mod config;
pub mod error;
pub mod io;
pub mod report;

pub use campaign::{execute, run, CampaignOutcome, Violation};
pub use config::{CampaignConfig, Command};
pub use error::{CliError, Result, SchemaError};
pub use io::{parse_measurement_file, parse_state_file, ParsedMeasurement, ParsedState};
pub use report::{emit_report, CampaignRow, Format};
