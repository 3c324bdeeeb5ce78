//! Flat tabular reports in CSV or JSON.
//!
//! Reals are rendered with 9 significant digits in `%g` style; both formats
//! share that rendering, so values agree exactly after parsing.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Int(u64),
    Real(f64),
    Bool(bool),
    /// An absent real, e.g. an empirical rate with zero trials.
    Missing,
}

impl Cell {
    fn render(self) -> String {
        match self {
            Self::Int(v) => v.to_string(),
            Self::Real(v) => format_sig9(v),
            Self::Bool(b) => b.to_string(),
            Self::Missing => String::new(),
        }
    }

    fn render_json(self) -> String {
        match self {
            Self::Real(v) if !v.is_finite() => "null".to_string(),
            Self::Missing => "null".to_string(),
            other => other.render(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Self::Real(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Self::Bool(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Self::Int(v as u64)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Self::Missing, Self::Real)
    }
}

/// One report record with a fixed column set.
pub trait ReportRow {
    const COLUMNS: &'static [&'static str];
    fn cells(&self) -> Vec<Cell>;
}

/// `%.9g`: fixed notation for decimal exponents in `[-4, 9)`, scientific
/// otherwise, trailing zeros trimmed.
pub fn format_sig9(v: f64) -> String {
    if v.is_nan() {
        return "NaN".to_string();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if v == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{v:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    if (-4..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn render<R: ReportRow>(rows: &[R], format: Format) -> Result<String> {
    if rows.is_empty() {
        return Err(CliError::EmptyReport);
    }
    Ok(match format {
        Format::Csv => render_csv(rows),
        Format::Json => render_json(rows),
    })
}

fn render_csv<R: ReportRow>(rows: &[R]) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(R::COLUMNS).expect("writing to memory");
    for row in rows {
        w.write_record(row.cells().into_iter().map(Cell::render))
            .expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("rendered cells are UTF-8")
}

fn render_json<R: ReportRow>(rows: &[R]) -> String {
    let mut out = String::from("[\n");
    for (i, row) in rows.iter().enumerate() {
        out.push_str("  {");
        for (k, (name, cell)) in R::COLUMNS.iter().zip(row.cells()).enumerate() {
            if k > 0 {
                out.push_str(", ");
            }
            let _ = write!(out, "\"{name}\": {}", cell.render_json());
        }
        out.push('}');
        out.push_str(if i + 1 < rows.len() { ",\n" } else { "\n" });
    }
    out.push_str("]\n");
    out
}

/// Writes the report; nothing is written when `rows` is empty.
pub fn emit_report<R: ReportRow>(rows: &[R], format: Format, path: &Path) -> Result<()> {
    let text = render(rows, format)?;
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// One `(state, a)` record of a discord sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct CampaignRow {
    pub state_id: usize,
    pub a: f64,
    pub d_vn: f64,
    pub d_u: f64,
    pub j_vn: f64,
    pub j_u: f64,
    pub h_pna: f64,
    pub lower: f64,
    pub upper: f64,
    pub gap_lhs: f64,
    pub gap_rhs: f64,
    pub lower_ok: bool,
    pub upper_ok: bool,
    pub gap_ok: bool,
    pub spread_vn: f64,
    pub spread_u: f64,
}

impl ReportRow for CampaignRow {
    const COLUMNS: &'static [&'static str] = &[
        "state_id",
        "a",
        "d_vn",
        "d_u",
        "j_vn",
        "j_u",
        "h_pna",
        "lower",
        "upper",
        "gap_lhs",
        "gap_rhs",
        "lower_ok",
        "upper_ok",
        "gap_ok",
        "spread_vn",
        "spread_u",
    ];

    fn cells(&self) -> Vec<Cell> {
        vec![
            self.state_id.into(),
            self.a.into(),
            self.d_vn.into(),
            self.d_u.into(),
            self.j_vn.into(),
            self.j_u.into(),
            self.h_pna.into(),
            self.lower.into(),
            self.upper.into(),
            self.gap_lhs.into(),
            self.gap_rhs.into(),
            self.lower_ok.into(),
            self.upper_ok.into(),
            self.gap_ok.into(),
            self.spread_vn.into(),
            self.spread_u.into(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyRow {
    pub state_id: usize,
    pub n: usize,
    pub a: f64,
    pub h_base: f64,
    pub h_reversible: f64,
    pub penalty: f64,
    pub lower_slack: f64,
    pub upper_slack: f64,
    pub lower_ok: bool,
    pub upper_ok: bool,
}

impl ReportRow for EntropyRow {
    const COLUMNS: &'static [&'static str] = &[
        "state_id",
        "n",
        "a",
        "h_base",
        "h_reversible",
        "penalty",
        "lower_slack",
        "upper_slack",
        "lower_ok",
        "upper_ok",
    ];

    fn cells(&self) -> Vec<Cell> {
        vec![
            self.state_id.into(),
            self.n.into(),
            self.a.into(),
            self.h_base.into(),
            self.h_reversible.into(),
            self.penalty.into(),
            self.lower_slack.into(),
            self.upper_slack.into(),
            self.lower_ok.into(),
            self.upper_ok.into(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lemma1Row {
    pub state_id: usize,
    pub dim: usize,
    pub p0: f64,
    pub p1: f64,
    pub p2: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub ok: bool,
}

impl ReportRow for Lemma1Row {
    const COLUMNS: &'static [&'static str] = &["state_id", "dim", "p0", "p1", "p2", "lhs", "rhs", "slack", "ok"];

    fn cells(&self) -> Vec<Cell> {
        vec![
            self.state_id.into(),
            self.dim.into(),
            self.p0.into(),
            self.p1.into(),
            self.p2.into(),
            self.lhs.into(),
            self.rhs.into(),
            self.slack.into(),
            self.ok.into(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReversalRow {
    pub state_id: usize,
    pub a: f64,
    pub n: usize,
    pub total_bound: f64,
    pub na: f64,
    pub empirical_total: f64,
    pub trials: usize,
    /// Binomial standard deviation of the empirical rate around `na`.
    pub sigma: f64,
    pub within_3sigma: bool,
    /// Total bound equals `na` at tol and the empirical rate stays below `na + 3σ`.
    pub bound_ok: bool,
    pub fidelity_min: Option<f64>,
    pub fidelity_ok: bool,
}

impl ReportRow for ReversalRow {
    const COLUMNS: &'static [&'static str] = &[
        "state_id",
        "a",
        "n",
        "total_bound",
        "na",
        "empirical_total",
        "trials",
        "sigma",
        "within_3sigma",
        "bound_ok",
        "fidelity_min",
        "fidelity_ok",
    ];

    fn cells(&self) -> Vec<Cell> {
        vec![
            self.state_id.into(),
            self.a.into(),
            self.n.into(),
            self.total_bound.into(),
            self.na.into(),
            self.empirical_total.into(),
            self.trials.into(),
            self.sigma.into(),
            self.within_3sigma.into(),
            self.bound_ok.into(),
            self.fidelity_min.into(),
            self.fidelity_ok.into(),
        ]
    }
}
