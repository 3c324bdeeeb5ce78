//! Randomized verification campaigns.
//!
//! Every row is a pure function of `(seed, state_id, a)`, so reports are
//! byte-identical across runs and thread counts.

use std::fmt;
use std::io::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use revmeas_core::discord::{conditional_weights, minimize_conditional_entropy, Family, Theorem1Report};
use revmeas_core::entropy::{lemma1_check, prop1_check};
use revmeas_core::measurement::{check_mixing, construct_reversible, simulate_reversal, ProjectiveMeasurement};
use revmeas_core::state::random_state;
use revmeas_core::{BipartiteState, DensityMatrix, ProbabilityDistribution};

use crate::config::{CampaignConfig, Command};
use crate::error::{CliError, Result};
use crate::io::{parse_measurement_file, parse_state_file, ParsedMeasurement, ParsedState};
use crate::report::{render, CampaignRow, EntropyRow, Lemma1Row, ReportRow, ReversalRow};

/// `η_{u,x} ≥ a` is checked with this absolute slack.
const ETA_SLACK: f64 = 1e-12;

/// Rendered report plus the failed checks, in row order.
#[derive(Debug, Clone, PartialEq)]
pub struct CampaignOutcome {
    pub report: String,
    pub rows: usize,
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub state_id: usize,
    pub a: Option<f64>,
    pub checks: Vec<&'static str>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "state {}", self.state_id)?;
        if let Some(a) = self.a {
            write!(f, ", a = {a}")?;
        }
        write!(f, ": {}", self.checks.join(", "))
    }
}

/// Inequality checks at a fixed tolerance. The test hook inverts every verdict.
#[derive(Debug, Clone, Copy)]
struct Verifier {
    tol: f64,
    inject: bool,
}

impl Verifier {
    fn le(self, lhs: f64, rhs: f64) -> bool {
        (lhs <= rhs + self.tol) != self.inject
    }

    fn within(self, lhs: f64, rhs: f64) -> bool {
        self.holds((lhs - rhs).abs() <= self.tol)
    }

    fn holds(self, verdict: bool) -> bool {
        verdict != self.inject
    }
}

/// splitmix64 finalizer over `(seed, stream, index)`.
pub fn derive_seed(seed: u64, stream: u64, index: u64) -> u64 {
    let mut z = seed
        .wrapping_add(stream.wrapping_add(1).wrapping_mul(0xD1B5_4A32_D192_ED03))
        .wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const STREAM_STATE: u64 = 0;
const STREAM_OPTIMIZER: u64 = 1;
const STREAM_TRIALS: u64 = 2;

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(text) = std::env::var("REVMEAS_THREADS") {
        let n = text.trim().parse::<usize>().ok().filter(|&n| n > 0).ok_or_else(|| {
            CliError::ConfigInvalid(format!("REVMEAS_THREADS must be a positive integer, got `{text}`"))
        })?;
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| CliError::ConfigInvalid(format!("thread pool: {e}")))
}

/// Runs the campaign and renders its report without touching the filesystem
/// beyond input files.
pub fn execute(cfg: &CampaignConfig) -> Result<CampaignOutcome> {
    let pool = thread_pool()?;
    let verifier = Verifier {
        tol: cfg.tol,
        inject: cfg.inject_violation,
    };
    match cfg.command {
        Command::EntropyBounds => finish(pool.install(|| entropy_rows(cfg, verifier)), cfg),
        Command::Lemma1 => finish(pool.install(|| lemma1_rows(cfg, verifier)), cfg),
        Command::Theorem1Sweep | Command::Discord => {
            let states = bipartite_states(cfg)?;
            finish(pool.install(|| theorem1_rows(cfg, &states, verifier)), cfg)
        }
        Command::ReversalSim => {
            let (states, base, grid) = reversal_inputs(cfg)?;
            finish(
                pool.install(|| reversal_rows(cfg, &states, &base, &grid, verifier)),
                cfg,
            )
        }
    }
}

fn finish<R: ReportRow>(checked: Result<Vec<(R, Option<Violation>)>>, cfg: &CampaignConfig) -> Result<CampaignOutcome> {
    let (rows, violations): (Vec<R>, Vec<Option<Violation>>) = checked?.into_iter().unzip();
    Ok(CampaignOutcome {
        report: render(&rows, cfg.format)?,
        rows: rows.len(),
        violations: violations.into_iter().flatten().collect(),
    })
}

/// Runs the campaign, writes the report and returns the outcome.
pub fn run(cfg: &CampaignConfig) -> Result<CampaignOutcome> {
    let outcome = execute(cfg)?;
    match &cfg.output_path {
        Some(path) => std::fs::write(path, &outcome.report),
        None => std::io::stdout().lock().write_all(outcome.report.as_bytes()),
    }
    .map_err(|source| CliError::Io {
        path: cfg.output_path.clone().unwrap_or_else(|| "<stdout>".into()),
        source,
    })?;
    Ok(outcome)
}

fn violation(state_id: usize, a: Option<f64>, checks: &[(&'static str, bool)]) -> Option<Violation> {
    let failed: Vec<_> = checks.iter().filter(|(_, ok)| !ok).map(|(name, _)| *name).collect();
    (!failed.is_empty()).then_some(Violation {
        state_id,
        a,
        checks: failed,
    })
}

fn random_distribution(n: usize, support: usize, rng: &mut ChaCha8Rng) -> Result<ProbabilityDistribution> {
    let mut positions: Vec<usize> = (0..n).collect();
    positions.shuffle(rng);
    let mut weights = vec![0.0; n];
    for &i in &positions[..support.min(n)] {
        weights[i] = rng.sample::<f64, _>(Exp1);
    }
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    Ok(ProbabilityDistribution::new(weights)?)
}

fn entropy_rows(cfg: &CampaignConfig, v: Verifier) -> Result<Vec<(EntropyRow, Option<Violation>)>> {
    let n = cfg.dims.0;
    let per_state: Vec<Vec<_>> = (0..cfg.num_states)
        .into_par_iter()
        .map(|id| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, STREAM_STATE, id as u64));
            let p = random_distribution(n, cfg.rank, &mut rng)?;
            cfg.a_grid
                .iter()
                .map(|&a| {
                    let r = prop1_check(&p, a)?;
                    let lower_ok = v.le(r.h_reversible - r.penalty, r.h_base);
                    let upper_ok = v.le(r.h_base, r.h_reversible);
                    let bad = violation(
                        id,
                        Some(a),
                        &[("entropy lower bound", lower_ok), ("entropy upper bound", upper_ok)],
                    );
                    let row = EntropyRow {
                        state_id: id,
                        n,
                        a,
                        h_base: r.h_base,
                        h_reversible: r.h_reversible,
                        penalty: r.penalty,
                        lower_slack: r.lower_slack(),
                        upper_slack: r.upper_slack(),
                        lower_ok,
                        upper_ok,
                    };
                    Ok((row, bad))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(per_state.into_iter().flatten().collect())
}

fn lemma1_rows(cfg: &CampaignConfig, v: Verifier) -> Result<Vec<(Lemma1Row, Option<Violation>)>> {
    let dim = cfg.dims.0;
    (0..cfg.num_states)
        .into_par_iter()
        .map(|id| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, STREAM_STATE, id as u64));
            let rho1 = revmeas_core::state::random_state_with(dim, cfg.rank, &mut rng)?;
            let rho2 = revmeas_core::state::random_state_with(dim, cfg.rank, &mut rng)?;
            let p = random_distribution(3, 3, &mut rng)?;
            let [p0, p1, p2] = [p.weights()[0], p.weights()[1], p.weights()[2]];
            let r = lemma1_check(&rho1, &rho2, p0, p1, p2)?;
            let ok = v.le(r.lhs, r.rhs);
            let row = Lemma1Row {
                state_id: id,
                dim,
                p0,
                p1,
                p2,
                lhs: r.lhs,
                rhs: r.rhs,
                slack: r.slack,
                ok,
            };
            Ok((row, violation(id, None, &[("strong-subadditivity bound", ok)])))
        })
        .collect()
}

fn bipartite_states(cfg: &CampaignConfig) -> Result<Vec<BipartiteState>> {
    let (da, db) = cfg.dims;
    let states = match &cfg.state_path {
        Some(path) => {
            let st = match parse_state_file(path)? {
                ParsedState::Bipartite(st) => st,
                ParsedState::Single(rho) => BipartiteState::new(rho, da, db).map_err(|source| CliError::State {
                    path: path.clone(),
                    source,
                })?,
            };
            recheck_grid(&cfg.a_grid, st.dim_a())?;
            vec![st]
        }
        None => (0..cfg.num_states)
            .map(|id| {
                let rho = random_state(da * db, cfg.rank, derive_seed(cfg.seed, STREAM_STATE, id as u64))?;
                Ok(BipartiteState::new(rho, da, db)?)
            })
            .collect::<Result<_>>()?,
    };
    Ok(states)
}

/// Inputs may fix `d_A` differently from `--dims`; the grid must fit them too.
fn recheck_grid(grid: &[f64], n: usize) -> Result<()> {
    for &a in grid {
        check_mixing(a, n).map_err(|_| CliError::ConfigInvalid(format!("a = {a} lies outside (0, 1/{n})")))?;
    }
    Ok(())
}

fn theorem1_rows(
    cfg: &CampaignConfig,
    states: &[BipartiteState],
    v: Verifier,
) -> Result<Vec<(CampaignRow, Option<Violation>)>> {
    let per_state: Vec<Vec<_>> = states
        .par_iter()
        .enumerate()
        .map(|(id, st)| {
            let seed = derive_seed(cfg.seed, STREAM_OPTIMIZER, id as u64);
            let vn = minimize_conditional_entropy(st, Family::VonNeumann, cfg.restarts, seed)?;
            cfg.a_grid
                .par_iter()
                .map(|&a| {
                    let rev = minimize_conditional_entropy(st, Family::Reversible { a }, cfg.restarts, seed)?;
                    let r = Theorem1Report::from_optima(st, &vn, &rev, cfg.tol)?;
                    let povm = construct_reversible(rev.params.measurement()?, a)?;
                    let eta_min = conditional_weights(st, povm.povm())?
                        .into_iter()
                        .fold(f64::INFINITY, f64::min);
                    let eta_ok = v.holds(eta_min >= a - ETA_SLACK);
                    Ok(campaign_row(id, &r, v, eta_ok))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(per_state.into_iter().flatten().collect())
}

fn campaign_row(id: usize, r: &Theorem1Report, v: Verifier, eta_ok: bool) -> (CampaignRow, Option<Violation>) {
    let lower_ok = v.le(r.lower, r.d_vn);
    let upper_ok = v.le(r.d_vn, r.upper);
    let gap_ok = v.le(r.gap_rhs, r.gap_lhs);
    let bad = violation(
        id,
        Some(r.a),
        &[
            ("discord lower bound", lower_ok),
            ("discord upper bound", upper_ok),
            ("discord gap", gap_ok),
            ("outcome weight below a", eta_ok),
        ],
    );
    let row = CampaignRow {
        state_id: id,
        a: r.a,
        d_vn: r.d_vn,
        d_u: r.d_u,
        j_vn: r.j_vn,
        j_u: r.j_u,
        h_pna: r.h_pna,
        lower: r.lower,
        upper: r.upper,
        gap_lhs: r.gap_lhs,
        gap_rhs: r.gap_rhs,
        lower_ok,
        upper_ok,
        gap_ok,
        spread_vn: r.spread_vn,
        spread_u: r.spread_u,
    };
    (row, bad)
}

fn reversal_inputs(cfg: &CampaignConfig) -> Result<(Vec<DensityMatrix>, ProjectiveMeasurement, Vec<f64>)> {
    let states = match &cfg.state_path {
        Some(path) => vec![parse_state_file(path)?.density().clone()],
        None => (0..cfg.num_states)
            .map(|id| {
                Ok(random_state(
                    cfg.dims.0,
                    cfg.rank,
                    derive_seed(cfg.seed, STREAM_STATE, id as u64),
                )?)
            })
            .collect::<Result<_>>()?,
    };
    let dim = states[0].dim();
    let (base, grid) = match &cfg.measurement_path {
        None => (ProjectiveMeasurement::computational(dim), cfg.a_grid.clone()),
        Some(path) => match parse_measurement_file(path)? {
            ParsedMeasurement::Projective(base) => (base, cfg.a_grid.clone()),
            ParsedMeasurement::Reversible(rev) => (rev.base().clone(), vec![rev.mixing()]),
        },
    };
    if base.dim() != dim {
        return Err(CliError::ConfigInvalid(format!(
            "measurement acts on dimension {}, states have dimension {dim}",
            base.dim()
        )));
    }
    recheck_grid(&grid, base.len())?;
    Ok((states, base, grid))
}

fn reversal_rows(
    cfg: &CampaignConfig,
    states: &[DensityMatrix],
    base: &ProjectiveMeasurement,
    grid: &[f64],
    v: Verifier,
) -> Result<Vec<(ReversalRow, Option<Violation>)>> {
    let n = base.len();
    let jobs: Vec<(usize, usize)> = (0..states.len())
        .flat_map(|s| (0..grid.len()).map(move |k| (s, k)))
        .collect();
    jobs.par_iter()
        .map(|&(id, k)| {
            let a = grid[k];
            let meas = construct_reversible(base.clone(), a)?;
            let seed = derive_seed(derive_seed(cfg.seed, STREAM_TRIALS, id as u64), STREAM_TRIALS, k as u64);
            let out = simulate_reversal(&meas, &states[id], cfg.trials, seed)?;
            let na = n as f64 * a;
            let empirical = out.empirical_total.expect("trials >= 1");
            let sigma = (na * (1.0 - na) / cfg.trials as f64).sqrt();
            let within_3sigma = (empirical - na).abs() <= 3.0 * sigma;
            let bound_ok = v.within(out.total_bound, na) && v.holds(empirical <= na + 3.0 * sigma);
            let fidelity_ok = out.recovered_fidelity_min.is_none_or(|f| v.le(1.0, f));
            let bad = violation(
                id,
                Some(a),
                &[("reversal bound", bound_ok), ("recovery fidelity", fidelity_ok)],
            );
            let row = ReversalRow {
                state_id: id,
                a,
                n,
                total_bound: out.total_bound,
                na,
                empirical_total: empirical,
                trials: cfg.trials,
                sigma,
                within_3sigma,
                bound_ok,
                fidelity_min: out.recovered_fidelity_min,
                fidelity_ok,
            };
            Ok((row, bad))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_seeds_differ_across_streams_and_indices() {
        let a = derive_seed(1, 0, 0);
        assert_ne!(a, derive_seed(1, 1, 0));
        assert_ne!(a, derive_seed(1, 0, 1));
        assert_ne!(a, derive_seed(2, 0, 0));
        assert_eq!(a, derive_seed(1, 0, 0));
    }

    #[test]
    fn verifier_hook_inverts() {
        let honest = Verifier {
            tol: 1e-9,
            inject: false,
        };
        let corrupt = Verifier {
            tol: 1e-9,
            inject: true,
        };
        assert!(honest.le(1.0, 1.0));
        assert!(!corrupt.le(1.0, 1.0));
        assert!(corrupt.le(2.0, 1.0));
    }

    #[test]
    fn random_distribution_respects_support() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = random_distribution(6, 2, &mut rng).unwrap();
        assert_eq!(p.weights().iter().filter(|&&w| w > 0.0).count(), 2);
        assert!((p.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
