use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

use crate::campaign::run;
use crate::config::{CampaignConfig, Options};

/// Exit status when every checked inequality held.
pub const EXIT_OK: i32 = 0;
/// Exit status when at least one check failed; the report is still written.
pub const EXIT_VIOLATION: i32 = 1;
/// Exit status for configuration, input or output errors.
pub const EXIT_ERROR: i32 = 2;

/// Largest number of violations listed individually on standard error.
const LISTED_VIOLATIONS: usize = 20;

#[derive(Debug, Parser)]
#[command(
    name = "revmeas",
    version,
    about = "Verification campaigns for logically reversible measurements"
)]
pub struct Cli {
    #[command(flatten)]
    pub options: Options,
}

/// Parses `args`, runs the campaign and returns the process exit status.
/// Diagnostics go to `stderr`.
pub fn run_cli<I, T>(args: I, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return EXIT_OK;
        }
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return EXIT_ERROR;
        }
    };
    let outcome = CampaignConfig::resolve(&cli.options).and_then(|cfg| run(&cfg));
    match outcome {
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_ERROR
        }
        Ok(o) if o.violations.is_empty() => EXIT_OK,
        Ok(o) => {
            let _ = writeln!(stderr, "{} of {} rows violated a check:", o.violations.len(), o.rows);
            for v in o.violations.iter().take(LISTED_VIOLATIONS) {
                let _ = writeln!(stderr, "  {v}");
            }
            if o.violations.len() > LISTED_VIOLATIONS {
                let _ = writeln!(stderr, "  ... and {} more", o.violations.len() - LISTED_VIOLATIONS);
            }
            EXIT_VIOLATION
        }
    }
}
