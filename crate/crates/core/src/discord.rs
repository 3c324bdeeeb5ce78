//! Mutual information, classical correlation and quantum discord, both for
//! von Neumann measurements on A and for the reversible family built on them.
//!
//! All infima run over rank-one projective bases of `H_A`. For the
//! reversible quantities the mixing weight `a` is fixed and only the base
//! varies. Minimizers can only overestimate an infimum, so every reported
//! classical correlation is a lower bound on the true one (and every discord
//! an upper bound) up to optimizer error; `restart_values` and `spread`
//! expose that error.
//!
//! Optimizer, qubit A: each restart evaluates a 64×128 `(θ, φ)` grid with a
//! seed-dependent random offset, refines the three best grid-local minima
//! and one random start with Nelder-Mead, and keeps the best. Larger A: each
//! restart is a Nelder-Mead run from a random point in Givens-angle space.

use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::entropy::{shannon_entropy_of, von_neumann_entropy, xlogx};
use crate::linalg::{eigvalsh, CMatrix, C64};
use crate::measurement::{check_mixing, Povm, ProjectiveMeasurement};
use crate::optimize::NelderMead;
use crate::state::{BipartiteState, Subsystem};
use crate::{tol, Error, Result};

/// Largest subsystem-A dimension accepted by the optimizers.
pub const MAX_DIM_A: usize = 8;

const GRID_THETA: usize = 64;
const GRID_PHI: usize = 128;
const GRID_REFINEMENTS: usize = 3;

/// `x mod 2π` in `[0, 2π)`.
fn wrap_angle(x: f64) -> f64 {
    let r = libm::fmod(x, 2.0 * PI);
    let r = if r < 0.0 { r + 2.0 * PI } else { r };
    if r >= 2.0 * PI {
        0.0
    } else {
        r
    }
}

/// Parametrization of a rank-one projective measurement on `H_A`.
#[derive(Clone, Debug, PartialEq)]
pub enum MeasurementParams {
    /// `{|v⟩⟨v|, 1 - |v⟩⟨v|}` with `|v⟩ = cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`.
    Qubit { theta: f64, phi: f64 },
    /// Columns of `G_1 G_2 ⋯ G_m`, one Givens rotation per pair `i < j`
    /// (row-major pair order) with angle `angles[k]` and phase `phases[k]`.
    Givens {
        dim: usize,
        angles: Vec<f64>,
        phases: Vec<f64>,
    },
}

impl MeasurementParams {
    pub fn dim(&self) -> usize {
        match self {
            Self::Qubit { .. } => 2,
            Self::Givens { dim, .. } => *dim,
        }
    }

    /// Unitary whose columns are the measurement basis.
    pub fn unitary(&self) -> CMatrix {
        match self {
            Self::Qubit { theta, phi } => {
                let (s, c) = libm::sincos(0.5 * theta);
                let e = cis(*phi);
                CMatrix::from_vec(
                    2,
                    2,
                    alloc::vec![C64::new(c, 0.0), -e.conj() * s, e * s, C64::new(c, 0.0)],
                )
            }
            Self::Givens { dim, angles, phases } => {
                let mut u = CMatrix::identity(*dim);
                for (k, (i, j)) in pairs(*dim).enumerate() {
                    let (s, c) = libm::sincos(angles[k]);
                    let e = cis(phases[k]);
                    // u ← u G where G acts on columns i, j
                    for r in 0..*dim {
                        let ui = u[(r, i)];
                        let uj = u[(r, j)];
                        u[(r, i)] = ui * c + uj * e * s;
                        u[(r, j)] = -ui * e.conj() * s + uj * c;
                    }
                }
                u
            }
        }
    }

    /// Rank-one projectors `|v_x⟩⟨v_x|`.
    pub fn projectors(&self) -> Vec<CMatrix> {
        let u = self.unitary();
        (0..u.cols()).map(|j| CMatrix::outer(&u.column(j))).collect()
    }

    pub fn measurement(&self) -> Result<ProjectiveMeasurement> {
        ProjectiveMeasurement::from_unitary(&self.unitary())
    }

    /// Folds qubit angles into `θ ∈ [0, π]`, `φ ∈ [0, 2π)` without changing
    /// the measurement.
    pub fn canonical(self) -> Self {
        match self {
            Self::Qubit { theta, phi } => {
                let mut theta = wrap_angle(theta);
                let mut phi = phi;
                if theta > PI {
                    theta = 2.0 * PI - theta;
                    phi += PI;
                }
                Self::Qubit {
                    theta,
                    phi: wrap_angle(phi),
                }
            }
            other => other,
        }
    }

    fn from_flat(dim: usize, x: &[f64]) -> Self {
        if dim == 2 {
            return Self::Qubit { theta: x[0], phi: x[1] };
        }
        let m = dim * dim.saturating_sub(1) / 2;
        Self::Givens {
            dim,
            angles: x[..m].to_vec(),
            phases: x[m..].to_vec(),
        }
    }
}

fn cis(phi: f64) -> C64 {
    let (s, c) = libm::sincos(phi);
    C64::new(c, s)
}

fn pairs(dim: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..dim).flat_map(move |i| (i + 1..dim).map(move |j| (i, j)))
}

/// `I(A:B) = S(ρ_A) + S(ρ_B) - S(ρ_AB)`.
pub fn mutual_information(state: &BipartiteState) -> f64 {
    let s_a = von_neumann_entropy(&state.reduced(Subsystem::A));
    let s_b = von_neumann_entropy(&state.reduced(Subsystem::B));
    s_a + s_b - von_neumann_entropy(state.state())
}

/// `Σ_x η_x S(ρ_{B|x})` for a measurement on A.
///
/// `η_x = Tr((Λ_x ⊗ 1) ρ_AB)`, `ρ_{B|x} = Tr_A((Λ_x ⊗ 1) ρ_AB) / η_x`;
/// outcomes with `η_x ≤ 1e-12` contribute nothing.
pub fn conditional_entropy_after_measurement(state: &BipartiteState, meas_on_a: &Povm) -> Result<f64> {
    if meas_on_a.dim() != state.dim_a() {
        return Err(Error::DimensionMismatch {
            expected: state.dim_a(),
            found: meas_on_a.dim(),
        });
    }
    Ok(conditional_entropy_raw(
        state,
        meas_on_a.elements().iter().map(|e| e.matrix()),
    ))
}

/// Per-outcome weights `η_x = Tr((Λ_x ⊗ 1) ρ_AB)`.
pub fn conditional_weights(state: &BipartiteState, meas_on_a: &Povm) -> Result<Vec<f64>> {
    if meas_on_a.dim() != state.dim_a() {
        return Err(Error::DimensionMismatch {
            expected: state.dim_a(),
            found: meas_on_a.dim(),
        });
    }
    Ok(meas_on_a
        .elements()
        .iter()
        .map(|e| state.conditional_block(e.matrix()).trace().re)
        .collect())
}

fn conditional_entropy_raw<'a>(state: &BipartiteState, elements: impl Iterator<Item = &'a CMatrix>) -> f64 {
    let mut total = 0.0;
    for el in elements {
        let block = state.conditional_block(el);
        let eta = block.trace().re;
        if eta <= tol::ZERO_PROBABILITY {
            continue;
        }
        // η S(M/η) = Σ -λ log₂ λ + η log₂ η over the eigenvalues λ of M
        let spectrum = eigvalsh(&block);
        total += shannon_entropy_of(&spectrum) - xlogx(eta);
    }
    total
}

/// Which measurement family an optimization runs over.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Family {
    VonNeumann,
    /// Reversible measurements with fixed mixing weight `a`.
    Reversible {
        a: f64,
    },
}

impl Family {
    fn elements(self, projectors: &[CMatrix]) -> Vec<CMatrix> {
        match self {
            Family::VonNeumann => projectors.to_vec(),
            Family::Reversible { a } => {
                let n = projectors.len();
                let heavy = 1.0 - (n as f64 - 1.0) * a;
                (0..n)
                    .map(|x| {
                        let dim = projectors[0].rows();
                        projectors
                            .iter()
                            .enumerate()
                            .fold(CMatrix::zeros(dim, dim), |acc, (y, p)| {
                                &acc + &p.scale(if y == x { heavy } else { a })
                            })
                    })
                    .collect()
            }
        }
    }
}

/// Conditional entropy of B after the rank-one measurement `params` on A
/// (or the reversible measurement built on it).
pub fn conditional_entropy_for_params(state: &BipartiteState, params: &MeasurementParams, family: Family) -> f64 {
    let elements = family.elements(&params.projectors());
    conditional_entropy_raw(state, elements.iter())
}

/// Approximate infimum of the measurement-conditioned entropy.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionalOptimum {
    pub family: Family,
    /// Best conditional entropy over all restarts.
    pub infimum: f64,
    pub params: MeasurementParams,
    /// Best conditional entropy found by each restart.
    pub restart_infima: Vec<f64>,
}

impl ConditionalOptimum {
    pub fn spread(&self) -> f64 {
        spread(&self.restart_infima)
    }
}

fn spread(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if values.is_empty() {
        0.0
    } else {
        max - min
    }
}

fn check_dim(state: &BipartiteState) -> Result<()> {
    if state.dim_a() > MAX_DIM_A {
        return Err(Error::DimensionTooLarge {
            dim: state.dim_a(),
            max: MAX_DIM_A,
        });
    }
    Ok(())
}

/// Seed for restart `index` derived from the master seed.
fn restart_seed(seed: u64, index: usize) -> u64 {
    // splitmix64 step on seed + counter
    let mut z = seed.wrapping_add((index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Minimizes the conditional entropy of B over rank-one bases on A.
///
/// `restarts` below 1 is treated as 1. Deterministic in `seed`; the best
/// restart wins, ties going to the lowest index.
pub fn minimize_conditional_entropy(
    state: &BipartiteState,
    family: Family,
    restarts: usize,
    seed: u64,
) -> Result<ConditionalOptimum> {
    check_dim(state)?;
    let n = state.dim_a();
    if let Family::Reversible { a } = family {
        check_mixing(a, n)?;
    }
    let restarts = restarts.max(1);
    let mut best: Option<(f64, MeasurementParams)> = None;
    let mut restart_infima = Vec::with_capacity(restarts);
    for r in 0..restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(restart_seed(seed, r));
        let (value, params) = match n {
            1 => {
                let p = MeasurementParams::Givens {
                    dim: 1,
                    angles: Vec::new(),
                    phases: Vec::new(),
                };
                (conditional_entropy_for_params(state, &p, family), p)
            }
            2 => qubit_restart(state, family, &mut rng),
            _ => givens_restart(state, family, &mut rng),
        };
        restart_infima.push(value);
        if best.as_ref().is_none_or(|(b, _)| value < *b) {
            best = Some((value, params));
        }
    }
    let (infimum, params) = best.expect("at least one restart");
    Ok(ConditionalOptimum {
        family,
        infimum,
        params: params.canonical(),
        restart_infima,
    })
}

fn qubit_restart(state: &BipartiteState, family: Family, rng: &mut ChaCha8Rng) -> (f64, MeasurementParams) {
    let objective = |x: &[f64]| conditional_entropy_for_params(state, &MeasurementParams::from_flat(2, x), family);
    let h_theta = PI / GRID_THETA as f64;
    let h_phi = 2.0 * PI / GRID_PHI as f64;
    let off_theta = rng.random::<f64>() * h_theta;
    let off_phi = rng.random::<f64>() * h_phi;

    let mut grid = alloc::vec![0.0; GRID_THETA * GRID_PHI];
    for i in 0..GRID_THETA {
        for j in 0..GRID_PHI {
            grid[i * GRID_PHI + j] = objective(&[off_theta + i as f64 * h_theta, off_phi + j as f64 * h_phi]);
        }
    }
    let mut minima: Vec<(f64, usize, usize)> = Vec::new();
    for i in 0..GRID_THETA {
        for j in 0..GRID_PHI {
            let v = grid[i * GRID_PHI + j];
            let is_local_min = (-1isize..=1).all(|di| {
                (-1isize..=1).all(|dj| {
                    let ii = i as isize + di;
                    if (di == 0 && dj == 0) || ii < 0 || ii >= GRID_THETA as isize {
                        return true;
                    }
                    let jj = (j as isize + dj).rem_euclid(GRID_PHI as isize) as usize;
                    v <= grid[ii as usize * GRID_PHI + jj]
                })
            });
            if is_local_min {
                minima.push((v, i, j));
            }
        }
    }
    minima.sort_by(|x, y| x.0.total_cmp(&y.0));

    let nm = NelderMead::with_step(0.5 * h_theta);
    let mut starts: Vec<[f64; 2]> = minima
        .iter()
        .take(GRID_REFINEMENTS)
        .map(|&(_, i, j)| [off_theta + i as f64 * h_theta, off_phi + j as f64 * h_phi])
        .collect();
    // uniform point on the Bloch sphere
    let u: f64 = rng.random();
    starts.push([libm::acos(1.0 - 2.0 * u), 2.0 * PI * rng.random::<f64>()]);

    let mut best = (f64::INFINITY, [0.0, 0.0]);
    for start in &starts {
        let m = nm.minimize(objective, start);
        if m.value < best.0 {
            best = (m.value, [m.x[0], m.x[1]]);
        }
    }
    (best.0, MeasurementParams::from_flat(2, &best.1))
}

fn givens_restart(state: &BipartiteState, family: Family, rng: &mut ChaCha8Rng) -> (f64, MeasurementParams) {
    let n = state.dim_a();
    let m = n * (n - 1) / 2;
    let objective = |x: &[f64]| conditional_entropy_for_params(state, &MeasurementParams::from_flat(n, x), family);
    let start: Vec<f64> = (0..2 * m).map(|_| 2.0 * PI * rng.random::<f64>()).collect();
    let nm = NelderMead {
        step: 0.3,
        max_evals: 4000 * m,
        ..NelderMead::default()
    };
    let best = nm.minimize(objective, &start);
    (best.value, MeasurementParams::from_flat(n, &best.x))
}

/// An optimized correlation quantity with optimizer evidence.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscordResult {
    pub value: f64,
    pub optimal_params: MeasurementParams,
    /// The same quantity evaluated at each restart's optimum.
    pub restart_values: Vec<f64>,
    /// `max - min` of `restart_values`.
    pub spread: f64,
}

impl DiscordResult {
    fn from_optimum(opt: &ConditionalOptimum, offset: f64, sign: f64) -> Self {
        let restart_values: Vec<f64> = opt.restart_infima.iter().map(|h| offset + sign * h).collect();
        Self {
            value: offset + sign * opt.infimum,
            optimal_params: opt.params.clone(),
            spread: spread(&restart_values),
            restart_values,
        }
    }

    /// `J = S(ρ_B) - inf`.
    pub fn classical_correlation(state: &BipartiteState, opt: &ConditionalOptimum) -> Self {
        let s_b = von_neumann_entropy(&state.reduced(Subsystem::B));
        Self::from_optimum(opt, s_b, -1.0)
    }

    /// `D = S(ρ_A) - S(ρ_AB) + inf`.
    pub fn discord(state: &BipartiteState, opt: &ConditionalOptimum) -> Self {
        let s_a = von_neumann_entropy(&state.reduced(Subsystem::A));
        Self::from_optimum(opt, s_a - von_neumann_entropy(state.state()), 1.0)
    }
}

pub fn classical_correlation_vn(state: &BipartiteState, restarts: usize, seed: u64) -> Result<DiscordResult> {
    let opt = minimize_conditional_entropy(state, Family::VonNeumann, restarts, seed)?;
    Ok(DiscordResult::classical_correlation(state, &opt))
}

pub fn discord_vn(state: &BipartiteState, restarts: usize, seed: u64) -> Result<DiscordResult> {
    let opt = minimize_conditional_entropy(state, Family::VonNeumann, restarts, seed)?;
    Ok(DiscordResult::discord(state, &opt))
}

pub fn classical_correlation_reversible(
    state: &BipartiteState,
    a: f64,
    restarts: usize,
    seed: u64,
) -> Result<DiscordResult> {
    let opt = minimize_conditional_entropy(state, Family::Reversible { a }, restarts, seed)?;
    Ok(DiscordResult::classical_correlation(state, &opt))
}

pub fn discord_reversible(state: &BipartiteState, a: f64, restarts: usize, seed: u64) -> Result<DiscordResult> {
    let opt = minimize_conditional_entropy(state, Family::Reversible { a }, restarts, seed)?;
    Ok(DiscordResult::discord(state, &opt))
}

/// `H(p_{n,a})` for `p_{n,a} = (1 - (n-1)a, a, …, a)`.
pub fn h_pna(n: usize, a: f64) -> Result<f64> {
    check_mixing(a, n)?;
    Ok(xlogx(1.0 - (n as f64 - 1.0) * a) + (n as f64 - 1.0) * xlogx(a))
}

/// The discord sandwich
///
/// ```text
/// D_u - na J_u/(1-na) - H(p_{n,a}) ≤ D_vN ≤ D_u - na J_u/(1-na)
/// ```
///
/// and the gap `D_u - D_vN ≥ na J_u/(1-na)`, each checked at `tol`.
#[derive(Clone, Debug, PartialEq)]
pub struct Theorem1Report {
    pub n: usize,
    pub a: f64,
    pub tol: f64,
    pub d_vn: f64,
    pub d_u: f64,
    pub j_vn: f64,
    pub j_u: f64,
    pub h_pna: f64,
    pub lower: f64,
    pub upper: f64,
    /// `D_u - D_vN`.
    pub gap_lhs: f64,
    /// `na J_u / (1 - na)`.
    pub gap_rhs: f64,
    pub lower_ok: bool,
    pub upper_ok: bool,
    pub gap_ok: bool,
    pub spread_vn: f64,
    pub spread_u: f64,
}

impl Theorem1Report {
    pub fn all_ok(&self) -> bool {
        self.lower_ok && self.upper_ok && self.gap_ok
    }

    /// Builds the report from the two optimizations of one state.
    pub fn from_optima(
        state: &BipartiteState,
        vn: &ConditionalOptimum,
        reversible: &ConditionalOptimum,
        tol: f64,
    ) -> Result<Self> {
        let a = match reversible.family {
            Family::Reversible { a } => a,
            Family::VonNeumann => {
                return Err(Error::MixingOutOfRange {
                    a: 0.0,
                    n: state.dim_a(),
                })
            }
        };
        let n = state.dim_a();
        let d_vn = DiscordResult::discord(state, vn);
        let j_vn = DiscordResult::classical_correlation(state, vn);
        let d_u = DiscordResult::discord(state, reversible);
        let j_u = DiscordResult::classical_correlation(state, reversible);
        let h = h_pna(n, a)?;
        let na = n as f64 * a;
        let gap_rhs = na * j_u.value / (1.0 - na);
        let upper = d_u.value - gap_rhs;
        let lower = upper - h;
        let gap_lhs = d_u.value - d_vn.value;
        Ok(Self {
            n,
            a,
            tol,
            d_vn: d_vn.value,
            d_u: d_u.value,
            j_vn: j_vn.value,
            j_u: j_u.value,
            h_pna: h,
            lower,
            upper,
            gap_lhs,
            gap_rhs,
            lower_ok: lower <= d_vn.value + tol,
            upper_ok: d_vn.value <= upper + tol,
            gap_ok: gap_lhs >= gap_rhs - tol,
            spread_vn: vn.spread(),
            spread_u: reversible.spread(),
        })
    }
}

pub fn theorem1_check(state: &BipartiteState, a: f64, restarts: usize, seed: u64, tol: f64) -> Result<Theorem1Report> {
    check_mixing(a, state.dim_a())?;
    let vn = minimize_conditional_entropy(state, Family::VonNeumann, restarts, seed)?;
    let rev = minimize_conditional_entropy(state, Family::Reversible { a }, restarts, seed)?;
    Theorem1Report::from_optima(state, &vn, &rev, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::binary_entropy;
    use crate::measurement::construct_reversible;
    use crate::state::{basis_vector, random_state, tensor_product, DensityMatrix};
    use proptest::prelude::*;

    fn bell() -> BipartiteState {
        let s = 0.5f64.sqrt();
        let z = C64::new(0.0, 0.0);
        let psi = [C64::new(s, 0.0), z, z, C64::new(s, 0.0)];
        BipartiteState::new(DensityMatrix::pure(&psi).unwrap(), 2, 2).unwrap()
    }

    fn classical() -> BipartiteState {
        let m = CMatrix::from_real_diagonal(&[0.5, 0.0, 0.0, 0.5]);
        BipartiteState::new(DensityMatrix::new(m).unwrap(), 2, 2).unwrap()
    }

    fn product(seed: u64) -> BipartiteState {
        tensor_product(
            &random_state(2, 2, seed).unwrap(),
            &random_state(2, 2, seed + 1).unwrap(),
        )
    }

    #[test]
    fn mutual_information_examples() {
        assert!(mutual_information(&product(3)).abs() < 1e-12);
        assert!((mutual_information(&bell()) - 2.0).abs() < 1e-12);
        assert!((mutual_information(&classical()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn conditional_entropy_examples() {
        let z = ProjectiveMeasurement::computational(2);
        assert!(conditional_entropy_after_measurement(&bell(), z.povm()).unwrap().abs() < 1e-12);

        let st = product(8);
        let tau_entropy = von_neumann_entropy(&st.reduced(Subsystem::B));
        let meas = MeasurementParams::Qubit { theta: 1.1, phi: 0.3 }.measurement().unwrap();
        let h = conditional_entropy_after_measurement(&st, meas.povm()).unwrap();
        assert!((h - tau_entropy).abs() < 1e-12);

        let rev = construct_reversible(z, 0.25).unwrap();
        let h = conditional_entropy_after_measurement(&bell(), rev.povm()).unwrap();
        assert!((h - binary_entropy(0.25).unwrap()).abs() < 1e-12);
        assert!((h - 0.8112781).abs() < 1e-7);

        let three = ProjectiveMeasurement::computational(3);
        assert!(matches!(
            conditional_entropy_after_measurement(&bell(), three.povm()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn params_projectors_are_rank_one_bases() {
        for p in [
            MeasurementParams::Qubit { theta: 0.7, phi: 2.0 },
            MeasurementParams::Givens {
                dim: 3,
                angles: alloc::vec![0.1, 0.9, 2.3],
                phases: alloc::vec![0.4, 1.0, 5.0],
            },
        ] {
            let m = p.measurement().unwrap();
            assert_eq!(m.len(), p.dim());
            for proj in m.projectors() {
                assert!((proj.matrix().trace().re - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn canonical_params_keep_the_measurement() {
        let raw = MeasurementParams::Qubit { theta: 4.0, phi: -1.0 };
        let canon = raw.clone().canonical();
        match canon {
            MeasurementParams::Qubit { theta, phi } => {
                assert!((0.0..=PI).contains(&theta));
                assert!((0.0..2.0 * PI).contains(&phi));
            }
            _ => unreachable!(),
        }
        let a = raw.projectors();
        let b = canon.projectors();
        assert!(a[0].max_abs_diff(&b[0]) < 1e-12);
        assert!(a[1].max_abs_diff(&b[1]) < 1e-12);
    }

    #[test]
    fn correlation_examples() {
        let j = classical_correlation_vn(&bell(), 2, 1).unwrap();
        assert!((j.value - 1.0).abs() < 1e-4);
        let d = discord_vn(&bell(), 2, 1).unwrap();
        assert!((d.value - 1.0).abs() < 1e-4);

        let st = product(21);
        assert!(classical_correlation_vn(&st, 2, 1).unwrap().value.abs() < 1e-6);
        assert!(discord_vn(&st, 2, 1).unwrap().value.abs() < 1e-6);

        assert!((classical_correlation_vn(&classical(), 2, 1).unwrap().value - 1.0).abs() < 1e-4);
        assert!(discord_vn(&classical(), 2, 1).unwrap().value.abs() < 1e-4);
    }

    #[test]
    fn reversible_correlation_examples() {
        let h = binary_entropy(0.25).unwrap();
        let j = classical_correlation_reversible(&bell(), 0.25, 2, 4).unwrap();
        assert!((j.value - (1.0 - h)).abs() < 1e-4);
        assert!((j.value - 0.1887219).abs() < 1e-4);
        let d = discord_reversible(&bell(), 0.25, 2, 4).unwrap();
        assert!((d.value - 1.8112781).abs() < 1e-4);

        let st = product(30);
        assert!(classical_correlation_reversible(&st, 0.2, 2, 4).unwrap().value.abs() < 1e-6);
        assert!(discord_reversible(&st, 0.2, 2, 4).unwrap().value.abs() < 1e-6);

        let j_small = classical_correlation_reversible(&bell(), 1e-6, 2, 4).unwrap();
        let j_vn = classical_correlation_vn(&bell(), 2, 4).unwrap();
        assert!((j_small.value - j_vn.value).abs() < 1e-3);
        assert!((discord_reversible(&bell(), 1e-6, 2, 4).unwrap().value - 1.0).abs() < 1e-3);

        assert!(matches!(
            classical_correlation_reversible(&bell(), 0.5, 2, 4),
            Err(Error::MixingOutOfRange { .. })
        ));
    }

    #[test]
    fn dimension_guard() {
        let st = BipartiteState::new(random_state(9, 9, 1).unwrap(), 9, 1).unwrap();
        assert!(matches!(
            discord_vn(&st, 1, 0),
            Err(Error::DimensionTooLarge { dim: 9, max: 8 })
        ));
    }

    #[test]
    fn h_pna_examples() {
        assert!((h_pna(2, 0.25).unwrap() - 0.8112781).abs() < 1e-7);
        assert!(h_pna(2, 1e-300).unwrap() < 1e-290);
        assert!((h_pna(3, 0.2).unwrap() - 1.3709506).abs() < 1e-7);
        assert!(matches!(h_pna(2, 0.5), Err(Error::MixingOutOfRange { .. })));
        assert!(matches!(h_pna(3, 0.0), Err(Error::MixingOutOfRange { .. })));
    }

    #[test]
    fn theorem1_examples() {
        let r = theorem1_check(&bell(), 0.25, 2, 7, 2e-3).unwrap();
        assert!((r.d_vn - 1.0).abs() < 1e-4);
        assert!((r.d_u - 1.8112781).abs() < 1e-4);
        assert!((r.j_u - 0.1887219).abs() < 1e-4);
        assert!((r.h_pna - 0.8112781).abs() < 1e-7);
        assert!((r.upper - 1.6225562).abs() < 1e-4);
        assert!((r.lower - 0.8112781).abs() < 1e-4);
        assert!(r.all_ok());

        let r = theorem1_check(&product(40), 0.3, 2, 7, 2e-3).unwrap();
        assert!(r.d_vn.abs() < 1e-6 && r.d_u.abs() < 1e-6 && r.j_u.abs() < 1e-6);
        assert!(r.all_ok());

        let st = BipartiteState::new(random_state(4, 4, 99).unwrap(), 2, 2).unwrap();
        let r = theorem1_check(&st, 0.1, 4, 99, 2e-3).unwrap();
        assert!(r.all_ok(), "{r:?}");
    }

    #[test]
    fn qutrit_side_optimizes() {
        // |00⟩+|11⟩+|22⟩ over √3: every rank-one basis leaves B pure
        let mut psi = alloc::vec![C64::new(0.0, 0.0); 9];
        for k in 0..3 {
            psi[k * 3 + k] = C64::new(1.0, 0.0);
        }
        let st = BipartiteState::new(DensityMatrix::pure(&psi).unwrap(), 3, 3).unwrap();
        let j = classical_correlation_vn(&st, 2, 3).unwrap();
        assert!((j.value - libm::log2(3.0)).abs() < 1e-6);

        // classical-quantum qutrit: optimum at the computational basis
        let cq = BipartiteState::new(
            DensityMatrix::new(CMatrix::from_real_diagonal(&[
                0.2, 0.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0, 0.3,
            ]))
            .unwrap(),
            3,
            3,
        )
        .unwrap();
        let d = discord_vn(&cq, 4, 3).unwrap();
        assert!(d.value.abs() < 1e-5, "{d:?}");
    }

    #[test]
    fn zero_probability_outcomes_contribute_nothing() {
        let st = BipartiteState::new(DensityMatrix::pure(&basis_vector(4, 0)).unwrap(), 2, 2).unwrap();
        let z = ProjectiveMeasurement::computational(2);
        let w = conditional_weights(&st, z.povm()).unwrap();
        assert_eq!(w[1], 0.0);
        assert_eq!(conditional_entropy_after_measurement(&st, z.povm()).unwrap(), 0.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn concavity_per_fixed_basis(seed: u64, theta in 0.0f64..PI, phi in 0.0f64..(2.0 * PI), frac in 0.01f64..0.99) {
            let a = frac / 2.0;
            let st = BipartiteState::new(random_state(4, 4, seed).unwrap(), 2, 2).unwrap();
            let p = MeasurementParams::Qubit { theta, phi };
            let h_vn = conditional_entropy_for_params(&st, &p, Family::VonNeumann);
            let h_u = conditional_entropy_for_params(&st, &p, Family::Reversible { a });
            let s_b = von_neumann_entropy(&st.reduced(Subsystem::B));
            prop_assert!((1.0 - 2.0 * a) * h_vn + 2.0 * a * s_b <= h_u + 1e-9);

            let rev = construct_reversible(p.measurement().unwrap(), a).unwrap();
            for eta in conditional_weights(&st, rev.povm()).unwrap() {
                prop_assert!(eta >= a - 1e-12 && eta <= 1.0 - a + 1e-12);
            }
            // formula route and generic POVM route agree
            let generic = conditional_entropy_after_measurement(&st, rev.povm()).unwrap();
            prop_assert!((generic - h_u).abs() < 1e-10);
        }

        #[test]
        fn correlations_are_nonnegative(seed: u64) {
            let st = BipartiteState::new(random_state(4, 3, seed).unwrap(), 2, 2).unwrap();
            prop_assert!(mutual_information(&st) >= -1e-9);
            let d = discord_vn(&st, 1, seed).unwrap();
            prop_assert!(d.value >= -2e-3);
            prop_assert!(d.spread >= 0.0);
            prop_assert_eq!(d.value, d.restart_values.iter().copied().fold(f64::INFINITY, f64::min));
        }
    }
}
