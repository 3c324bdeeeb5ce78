//! Campaign configuration: flags, optional JSON config file, defaults.
//!
//! Precedence is flag, then config file, then the per-command default.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Deserialize;

use crate::error::{CliError, Result};
use crate::io::from_json_text;
use crate::report::Format;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Entropy sandwich for reversible outcome statistics.
    EntropyBounds,
    /// Three-weight strong-subadditivity bound.
    Lemma1,
    /// Discord sandwich and gap over random two-party states.
    Theorem1Sweep,
    /// Monte Carlo of measure-then-reverse against the total success bound.
    ReversalSim,
    /// Discord sandwich and gap, optionally for a state file.
    Discord,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::EntropyBounds => "entropy-bounds",
            Self::Lemma1 => "lemma1",
            Self::Theorem1Sweep => "theorem1-sweep",
            Self::ReversalSim => "reversal-sim",
            Self::Discord => "discord",
        }
    }

    fn default_tol(self) -> f64 {
        match self {
            Self::EntropyBounds | Self::Lemma1 => 1e-9,
            Self::ReversalSim => 1e-8,
            Self::Theorem1Sweep | Self::Discord => 2e-3,
        }
    }

    fn uses_a_grid(self) -> bool {
        !matches!(self, Self::Lemma1)
    }
}

/// Raw options as given on the command line; every field optional.
#[derive(Debug, Clone, Default, Args)]
pub struct Options {
    /// Campaign to run; may come from --config instead.
    #[arg(value_enum)]
    pub command: Option<Command>,
    /// Subsystem dimensions `d_AxD_B`, or `n` for single-system commands.
    #[arg(long)]
    pub dims: Option<String>,
    /// `start:stop:step` (stop inclusive, values at or above 1/d_A dropped) or a comma list.
    #[arg(long = "a-grid", allow_hyphen_values = true)]
    pub a_grid: Option<String>,
    /// Number of random states or distributions.
    #[arg(long = "states")]
    pub num_states: Option<usize>,
    /// Rank of random states; support size of random distributions.
    #[arg(long)]
    pub rank: Option<usize>,
    /// Master seed; every state, restart and trial stream derives from it.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Optimizer restarts per infimum.
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Slack allowed in every checked inequality.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Report path; standard output when absent.
    #[arg(long = "out")]
    pub output_path: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Monte Carlo trials per row of reversal-sim.
    #[arg(long)]
    pub trials: Option<usize>,
    /// State file for discord, theorem1-sweep and reversal-sim.
    #[arg(long = "state")]
    pub state_path: Option<PathBuf>,
    /// Measurement file for reversal-sim.
    #[arg(long = "measurement")]
    pub measurement_path: Option<PathBuf>,
    /// JSON file with any of the options above, keyed by field name.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Corrupts every inequality check; exercises the failure path.
    #[arg(long = "inject-violation", hide = true)]
    pub inject_violation: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum GridValue {
    Text(String),
    List(Vec<f64>),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    command: Option<Command>,
    dims: Option<String>,
    a_grid: Option<GridValue>,
    num_states: Option<usize>,
    rank: Option<usize>,
    seed: Option<u64>,
    restarts: Option<usize>,
    tol: Option<f64>,
    output_path: Option<PathBuf>,
    format: Option<Format>,
    trials: Option<usize>,
    state_path: Option<PathBuf>,
    measurement_path: Option<PathBuf>,
}

/// Fully resolved and validated campaign settings.
#[derive(Debug, Clone, PartialEq)]
pub struct CampaignConfig {
    pub command: Command,
    pub dims: (usize, usize),
    /// Every entry lies in `(0, 1/d_A)`.
    pub a_grid: Vec<f64>,
    pub num_states: usize,
    pub rank: usize,
    pub seed: u64,
    pub restarts: usize,
    pub tol: f64,
    pub output_path: Option<PathBuf>,
    pub format: Format,
    pub trials: usize,
    pub state_path: Option<PathBuf>,
    pub measurement_path: Option<PathBuf>,
    pub inject_violation: bool,
}

pub const DEFAULT_A_GRID: &str = "0.05:0.45:0.05";
pub const DEFAULT_TRIALS: usize = 100_000;

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::ConfigInvalid(msg.into())
}

impl CampaignConfig {
    pub fn resolve(opts: &Options) -> Result<Self> {
        let file = match &opts.config {
            Some(path) => read_config_file(path)?,
            None => ConfigFile::default(),
        };
        let command = opts
            .command
            .or(file.command)
            .ok_or_else(|| invalid("no command given"))?;
        let dims_text = opts.dims.clone().or(file.dims).unwrap_or_else(|| "2x2".to_string());
        let dims = parse_dims(&dims_text)?;
        let a_grid = if command.uses_a_grid() {
            let grid = match (&opts.a_grid, file.a_grid) {
                (Some(text), _) => parse_a_grid(text, dims.0)?,
                (None, Some(GridValue::Text(text))) => parse_a_grid(&text, dims.0)?,
                (None, Some(GridValue::List(values))) => check_a_values(values, dims.0)?,
                (None, None) => parse_a_grid(DEFAULT_A_GRID, dims.0)?,
            };
            if grid.is_empty() {
                return Err(invalid(format!("a-grid has no values below 1/d_A = 1/{}", dims.0)));
            }
            grid
        } else {
            Vec::new()
        };
        let full_rank = match command {
            Command::Theorem1Sweep | Command::Discord => dims.0 * dims.1,
            _ => dims.0,
        };
        let cfg = Self {
            command,
            dims,
            a_grid,
            num_states: opts.num_states.or(file.num_states).unwrap_or(10),
            rank: opts.rank.or(file.rank).unwrap_or(full_rank),
            seed: opts.seed.or(file.seed).unwrap_or(1),
            restarts: opts.restarts.or(file.restarts).unwrap_or(8),
            tol: opts.tol.or(file.tol).unwrap_or(command.default_tol()),
            output_path: opts.output_path.clone().or(file.output_path),
            format: opts.format.or(file.format).unwrap_or_default(),
            trials: opts.trials.or(file.trials).unwrap_or(DEFAULT_TRIALS),
            state_path: opts.state_path.clone().or(file.state_path),
            measurement_path: opts.measurement_path.clone().or(file.measurement_path),
            inject_violation: opts.inject_violation,
        };
        cfg.validate(full_rank)?;
        Ok(cfg)
    }

    fn validate(&self, full_rank: usize) -> Result<()> {
        if self.num_states == 0 {
            return Err(invalid("states must be at least 1"));
        }
        if self.rank == 0 || self.rank > full_rank {
            return Err(invalid(format!("rank must lie in 1..={full_rank}, got {}", self.rank)));
        }
        if self.restarts == 0 {
            return Err(invalid("restarts must be at least 1"));
        }
        if self.trials == 0 {
            return Err(invalid("trials must be at least 1"));
        }
        if !(self.tol.is_finite() && self.tol >= 0.0) {
            return Err(invalid(format!("tol must be a nonnegative real, got {}", self.tol)));
        }
        let needs_two = matches!(self.command, Command::EntropyBounds | Command::ReversalSim);
        if needs_two && self.dims.0 < 2 {
            return Err(invalid("a reversible measurement needs at least 2 outcomes"));
        }
        if matches!(self.command, Command::Theorem1Sweep | Command::Discord) {
            let max = revmeas_core::discord::MAX_DIM_A;
            if self.dims.0 < 2 || self.dims.0 > max || self.dims.1 == 0 {
                return Err(invalid(format!("d_A must lie in 2..={max} and d_B must be positive")));
            }
        }
        if self.state_path.is_some() && matches!(self.command, Command::EntropyBounds | Command::Lemma1) {
            return Err(invalid(format!("{} does not take a state file", self.command.name())));
        }
        if self.measurement_path.is_some() && self.command != Command::ReversalSim {
            return Err(invalid("only reversal-sim takes a measurement file"));
        }
        Ok(())
    }
}

fn read_config_file(path: &Path) -> Result<ConfigFile> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    from_json_text(&text).map_err(|err| CliError::Schema {
        path: path.to_path_buf(),
        err,
    })
}

/// `"2x2"` gives `(2, 2)`; a single `"n"` gives `(n, 1)`.
pub fn parse_dims(text: &str) -> Result<(usize, usize)> {
    let bad = || {
        invalid(format!(
            "dims `{text}`: expected `d_AxD_B` or `n` with positive integers"
        ))
    };
    let parse = |s: &str| s.trim().parse::<usize>().ok().filter(|&d| d > 0).ok_or_else(bad);
    match text.split_once(['x', 'X']) {
        Some((a, b)) => Ok((parse(a)?, parse(b)?)),
        None => Ok((parse(text)?, 1)),
    }
}

fn parse_real(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| invalid(format!("a-grid: `{}` is not a finite real", s.trim())))
}

/// Range form keeps `start + k·step ≤ stop` below `1/d_A`; list form rejects
/// anything outside `(0, 1/d_A)`.
pub fn parse_a_grid(text: &str, dim_a: usize) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step) = (parse_real(start)?, parse_real(stop)?, parse_real(step)?);
            if !(start > 0.0 && step > 0.0 && stop >= start) {
                return Err(invalid(format!(
                    "a-grid range needs 0 < start <= stop and step > 0, got `{text}`"
                )));
            }
            let guard = 1.0 / dim_a as f64;
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            Ok((0..count)
                .map(|k| start + k as f64 * step)
                .filter(|&a| a < guard)
                .collect())
        }
        [list] => check_a_values(list.split(',').map(parse_real).collect::<Result<_>>()?, dim_a),
        _ => Err(invalid(format!(
            "a-grid `{text}`: expected start:stop:step or a comma list"
        ))),
    }
}

fn check_a_values(values: Vec<f64>, dim_a: usize) -> Result<Vec<f64>> {
    let guard = 1.0 / dim_a as f64;
    match values.iter().find(|&&a| !(a > 0.0 && a < guard)) {
        Some(a) => Err(invalid(format!("a = {a} lies outside (0, 1/{dim_a})"))),
        None => Ok(values),
    }
}
