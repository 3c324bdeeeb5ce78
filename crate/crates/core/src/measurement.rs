//! Measurements: general POVMs, von Neumann (projective) measurements and
//! the logically reversible family
//!
//! ```text
//! Λ^(a)_x = (1 - (n-1)a) Π_x + a Σ_{y≠x} Π_y,    0 < a < 1/n,
//! ```
//!
//! built on top of an `n`-outcome projective measurement `{Π_x}`.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{CMatrix, C64};
use crate::state::{fidelity, spectral_decompose, DensityMatrix, HermitianOperator, ProbabilityDistribution};
use crate::{tol, Error, Result};

/// Positive operators `Λ_x` summing to the identity.
#[derive(Clone, Debug)]
pub struct Povm {
    elements: Vec<HermitianOperator>,
}

impl Povm {
    pub fn new(elements: Vec<HermitianOperator>) -> Result<Self> {
        let dim = elements.first().ok_or(Error::Empty)?.dim();
        let mut sum = CMatrix::zeros(dim, dim);
        for el in &elements {
            if el.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: el.dim(),
                });
            }
            let min = el.min_eigenvalue();
            if min < -tol::PSD {
                return Err(Error::NotPositive { eigenvalue: min });
            }
            sum = &sum + el.matrix();
        }
        let deviation = sum.max_abs_diff(&CMatrix::identity(dim));
        if deviation > tol::PROJECTOR {
            return Err(Error::NotComplete { deviation });
        }
        Ok(Self { elements })
    }

    /// The trivial one-outcome measurement `{1_H}`.
    pub fn trivial(dim: usize) -> Self {
        Self {
            elements: alloc::vec![HermitianOperator::from_trusted(CMatrix::identity(dim))],
        }
    }

    pub fn elements(&self) -> &[HermitianOperator] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    /// The PSD square root `A_x` of `Λ_x`.
    pub fn kraus(&self, x: usize) -> Result<CMatrix> {
        let el = self.element(x)?;
        Ok(el.eigen().map(|l| libm::sqrt(l.max(0.0))))
    }

    fn element(&self, x: usize) -> Result<&HermitianOperator> {
        self.elements.get(x).ok_or(Error::NoSuchOutcome {
            outcome: x,
            count: self.len(),
        })
    }
}

impl AsRef<Povm> for Povm {
    fn as_ref(&self) -> &Povm {
        self
    }
}

/// Von Neumann measurement: orthogonal projectors summing to the identity.
#[derive(Clone, Debug)]
pub struct ProjectiveMeasurement {
    povm: Povm,
}

impl ProjectiveMeasurement {
    pub fn new(projectors: Vec<HermitianOperator>) -> Result<Self> {
        make_projective(projectors)
    }

    /// Rank-one measurement onto the columns of a unitary.
    pub fn from_unitary(u: &CMatrix) -> Result<Self> {
        let projectors = (0..u.cols())
            .map(|j| HermitianOperator::new(CMatrix::outer(&u.column(j))))
            .collect::<Result<Vec<_>>>()?;
        make_projective(projectors)
    }

    pub fn computational(dim: usize) -> Self {
        Self::from_unitary(&CMatrix::identity(dim)).expect("identity columns are orthonormal")
    }

    pub fn projectors(&self) -> &[HermitianOperator] {
        self.povm.elements()
    }

    pub fn len(&self) -> usize {
        self.povm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.povm.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.povm.dim()
    }

    pub fn povm(&self) -> &Povm {
        &self.povm
    }
}

impl AsRef<Povm> for ProjectiveMeasurement {
    fn as_ref(&self) -> &Povm {
        &self.povm
    }
}

/// Validates a list of operators as a von Neumann measurement.
pub fn make_projective(projectors: Vec<HermitianOperator>) -> Result<ProjectiveMeasurement> {
    let dim = projectors.first().ok_or(Error::Empty)?.dim();
    for (index, p) in projectors.iter().enumerate() {
        if p.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.dim(),
            });
        }
        let deviation = p.matrix().matmul(p.matrix()).max_abs_diff(p.matrix());
        if deviation > tol::PROJECTOR {
            return Err(Error::NotIdempotent { index, deviation });
        }
    }
    let sum = projectors
        .iter()
        .fold(CMatrix::zeros(dim, dim), |acc, p| &acc + p.matrix());
    let deviation = sum.max_abs_diff(&CMatrix::identity(dim));
    if deviation > tol::PROJECTOR {
        return Err(Error::NotComplete { deviation });
    }
    let zero = CMatrix::zeros(dim, dim);
    for first in 0..projectors.len() {
        for second in first + 1..projectors.len() {
            let deviation = projectors[first]
                .matrix()
                .matmul(projectors[second].matrix())
                .max_abs_diff(&zero);
            if deviation > tol::PROJECTOR {
                return Err(Error::NotOrthogonal {
                    first,
                    second,
                    deviation,
                });
            }
        }
    }
    Ok(ProjectiveMeasurement {
        povm: Povm { elements: projectors },
    })
}

/// Logically reversible measurement mixed out of a projective base.
#[derive(Clone, Debug)]
pub struct ReversibleMeasurement {
    base: ProjectiveMeasurement,
    a: f64,
    povm: Povm,
}

impl ReversibleMeasurement {
    pub fn new(base: ProjectiveMeasurement, a: f64) -> Result<Self> {
        construct_reversible(base, a)
    }

    pub fn base(&self) -> &ProjectiveMeasurement {
        &self.base
    }

    /// The mixing weight `a`.
    pub fn mixing(&self) -> f64 {
        self.a
    }

    pub fn len(&self) -> usize {
        self.povm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.povm.is_empty()
    }

    pub fn povm(&self) -> &Povm {
        &self.povm
    }
}

impl AsRef<Povm> for ReversibleMeasurement {
    fn as_ref(&self) -> &Povm {
        &self.povm
    }
}

/// Checks `0 < a < 1/n`.
pub fn check_mixing(a: f64, n: usize) -> Result<()> {
    if n == 0 || !(a > 0.0 && a * (n as f64) < 1.0) {
        return Err(Error::MixingOutOfRange { a, n });
    }
    Ok(())
}

pub fn construct_reversible(base: ProjectiveMeasurement, a: f64) -> Result<ReversibleMeasurement> {
    let n = base.len();
    check_mixing(a, n)?;
    let dim = base.dim();
    let heavy = 1.0 - (n as f64 - 1.0) * a;
    let elements = (0..n)
        .map(|x| {
            let m = base
                .projectors()
                .iter()
                .enumerate()
                .fold(CMatrix::zeros(dim, dim), |acc, (y, p)| {
                    let w = if y == x { heavy } else { a };
                    &acc + &p.matrix().scale(w)
                });
            HermitianOperator::from_trusted(m)
        })
        .collect();
    let povm = Povm::new(elements)?;
    Ok(ReversibleMeasurement { base, a, povm })
}

/// `p(x) = Tr(Λ_x ρ)`.
pub fn outcome_distribution(meas: &Povm, rho: &DensityMatrix) -> Result<ProbabilityDistribution> {
    if meas.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: meas.dim(),
            found: rho.dim(),
        });
    }
    let weights = meas
        .elements()
        .iter()
        .map(|el| trace_product(el.matrix(), rho.matrix()))
        .collect();
    ProbabilityDistribution::from_computed(weights)
}

/// `Re Tr(A B)` for square matrices of equal size.
pub(crate) fn trace_product(a: &CMatrix, b: &CMatrix) -> f64 {
    let n = a.rows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc.re
}

/// `ρ_x = A_x ρ A_x / p(x)` with `A_x = √Λ_x`.
pub fn post_measurement_state(meas: &Povm, rho: &DensityMatrix, x: usize) -> Result<DensityMatrix> {
    let p = outcome_distribution(meas, rho)?;
    let probability = *p.weights().get(x).ok_or(Error::NoSuchOutcome {
        outcome: x,
        count: meas.len(),
    })?;
    if probability <= tol::ZERO_PROBABILITY {
        return Err(Error::ZeroProbabilityOutcome {
            outcome: x,
            probability,
        });
    }
    let ax = meas.kraus(x)?;
    Ok(DensityMatrix::from_trusted(ax.matmul(rho.matrix()).matmul(&ax)))
}

/// Every element invertible (min eigenvalue above `1e-10`).
pub fn is_logically_reversible(meas: &Povm) -> bool {
    first_singular_element(meas).is_none()
}

fn first_singular_element(meas: &Povm) -> Option<(usize, f64)> {
    meas.elements()
        .iter()
        .map(HermitianOperator::min_eigenvalue)
        .enumerate()
        .find(|&(_, l)| l <= tol::INVERTIBLE)
}

/// Reversal success bounds, optionally with Monte Carlo results.
#[derive(Clone, Debug, PartialEq)]
pub struct ReversalOutcome {
    /// `min_i a_x(i) / p(x)`; `None` for outcomes with `p(x) ≤ 1e-12`.
    pub bound_per_outcome: Vec<Option<f64>>,
    /// `Σ_x min_i a_x(i)`, independent of the state.
    pub total_bound: f64,
    pub empirical_total: Option<f64>,
    pub trials: usize,
    pub successes: usize,
    /// Smallest fidelity between `ρ` and a recovered state; `None` without successes.
    pub recovered_fidelity_min: Option<f64>,
}

pub fn reversal_bounds(meas: &Povm, rho: &DensityMatrix) -> Result<ReversalOutcome> {
    if let Some((outcome, eigenvalue)) = first_singular_element(meas) {
        return Err(Error::NotReversible { outcome, eigenvalue });
    }
    let p = outcome_distribution(meas, rho)?;
    let mut total_bound = 0.0;
    let mut bound_per_outcome = Vec::with_capacity(meas.len());
    for (el, &px) in meas.elements().iter().zip(p.weights()) {
        let a_min = spectral_decompose(el).min_eigenvalue();
        total_bound += a_min;
        bound_per_outcome.push((px > tol::ZERO_PROBABILITY).then(|| a_min / px));
    }
    Ok(ReversalOutcome {
        bound_per_outcome,
        total_bound,
        empirical_total: None,
        trials: 0,
        successes: 0,
        recovered_fidelity_min: None,
    })
}

struct ReversalChannel {
    probability: f64,
    success: f64,
    fidelity: f64,
}

/// Monte Carlo of measure-then-reverse.
///
/// Each trial draws an outcome `x` from `p_u`, then applies the two-outcome
/// reversing measurement `{R_x†R_x, 1 - R_x†R_x}` with
/// `R_x = √(min_i a_x(i)) A_x^{-1}` to `ρ_x`. On success the recovered
/// state `R_x ρ_x R_x† / Tr(·)` is compared with `ρ` by fidelity.
pub fn simulate_reversal(
    meas: &ReversibleMeasurement,
    rho: &DensityMatrix,
    trials: usize,
    seed: u64,
) -> Result<ReversalOutcome> {
    if trials == 0 {
        return Err(Error::OutOfRange {
            value: 0.0,
            domain: "trials >= 1",
        });
    }
    let povm = meas.povm();
    let mut outcome = reversal_bounds(povm, rho)?;
    let p = outcome_distribution(povm, rho)?;

    let mut channels = Vec::with_capacity(povm.len());
    for (x, el) in povm.elements().iter().enumerate() {
        let eig = el.eigen();
        let a_min = eig.values[0];
        let ax = eig.map(libm::sqrt);
        let reverse = eig.map(|l| libm::sqrt(a_min / l));
        let post = ax.matmul(rho.matrix()).matmul(&ax).scale(1.0 / p.weights()[x]);
        let recovered = reverse.matmul(&post).matmul(&reverse.adjoint());
        let success = recovered.trace().re;
        let fid = fidelity(rho, &DensityMatrix::from_trusted(recovered));
        channels.push(ReversalChannel {
            probability: p.weights()[x],
            success,
            fidelity: fid,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut successes = 0usize;
    let mut fidelity_min: Option<f64> = None;
    for _ in 0..trials {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut chosen = channels.len() - 1;
        for (x, ch) in channels.iter().enumerate() {
            acc += ch.probability;
            if u < acc {
                chosen = x;
                break;
            }
        }
        let ch = &channels[chosen];
        let v: f64 = rng.random();
        if v < ch.success {
            successes += 1;
            fidelity_min = Some(fidelity_min.map_or(ch.fidelity, |f| f.min(ch.fidelity)));
        }
    }
    outcome.trials = trials;
    outcome.successes = successes;
    outcome.empirical_total = Some(successes as f64 / trials as f64);
    outcome.recovered_fidelity_min = fidelity_min;
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{basis_vector, random_state, random_unitary};
    use alloc::vec;
    use proptest::prelude::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn plus() -> DensityMatrix {
        DensityMatrix::pure(&[c(1.0), c(1.0)]).unwrap()
    }

    fn proj(v: &[C64]) -> HermitianOperator {
        HermitianOperator::new(CMatrix::outer(v)).unwrap()
    }

    #[test]
    fn make_projective_examples() {
        let z = make_projective(vec![proj(&basis_vector(2, 0)), proj(&basis_vector(2, 1))]).unwrap();
        assert_eq!(z.len(), 2);

        let s = 0.5f64.sqrt();
        let x = make_projective(vec![proj(&[c(s), c(s)]), proj(&[c(s), c(-s)])]);
        assert!(x.is_ok());

        let dup = make_projective(vec![proj(&basis_vector(2, 0)), proj(&basis_vector(2, 0))]);
        assert!(matches!(dup, Err(Error::NotComplete { .. })));

        let half = HermitianOperator::new(CMatrix::identity(2).scale(0.5)).unwrap();
        let r = make_projective(vec![half.clone(), half]);
        assert!(matches!(r, Err(Error::NotIdempotent { .. })));
    }

    #[test]
    fn construct_reversible_examples() {
        let base = ProjectiveMeasurement::computational(2);
        let rev = construct_reversible(base.clone(), 0.25).unwrap();
        let e = rev.povm().elements();
        assert!(e[0].matrix().max_abs_diff(&CMatrix::from_real_diagonal(&[0.75, 0.25])) < 1e-12);
        assert!(e[1].matrix().max_abs_diff(&CMatrix::from_real_diagonal(&[0.25, 0.75])) < 1e-12);

        let near = construct_reversible(base.clone(), 1e-9).unwrap();
        for (el, p) in near.povm().elements().iter().zip(base.projectors()) {
            assert!(el.matrix().max_abs_diff(p.matrix()) <= 2e-9);
        }

        assert!(matches!(
            construct_reversible(base.clone(), 0.5),
            Err(Error::MixingOutOfRange { .. })
        ));
        assert!(matches!(
            construct_reversible(base.clone(), 0.0),
            Err(Error::MixingOutOfRange { .. })
        ));
        assert!(matches!(
            construct_reversible(base, -0.1),
            Err(Error::MixingOutOfRange { .. })
        ));
    }

    #[test]
    fn outcome_distribution_examples() {
        let base = ProjectiveMeasurement::computational(2);
        let rev = construct_reversible(base.clone(), 0.25).unwrap();
        let zero = DensityMatrix::pure(&basis_vector(2, 0)).unwrap();
        let p = outcome_distribution(rev.povm(), &zero).unwrap();
        assert!((p.weights()[0] - 0.75).abs() < 1e-15);
        assert!((p.weights()[1] - 0.25).abs() < 1e-15);

        let u = random_unitary(3, 1);
        let rev3 = construct_reversible(ProjectiveMeasurement::from_unitary(&u).unwrap(), 0.1).unwrap();
        let p = outcome_distribution(rev3.povm(), &DensityMatrix::maximally_mixed(3)).unwrap();
        assert!(p.weights().iter().all(|w| (w - 1.0 / 3.0).abs() < 1e-14));

        let p = outcome_distribution(base.povm(), &zero).unwrap();
        assert_eq!(p.weights(), &[1.0, 0.0]);

        let err = outcome_distribution(base.povm(), &DensityMatrix::maximally_mixed(3));
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn post_measurement_examples() {
        let base = ProjectiveMeasurement::computational(2);
        let post = post_measurement_state(base.povm(), &DensityMatrix::maximally_mixed(2), 0).unwrap();
        assert!(post.matrix().max_abs_diff(&CMatrix::outer(&basis_vector(2, 0))) < 1e-15);

        let rev = construct_reversible(base.clone(), 0.25).unwrap();
        let zero = DensityMatrix::pure(&basis_vector(2, 0)).unwrap();
        let post = post_measurement_state(rev.povm(), &zero, 0).unwrap();
        assert!(post.matrix().max_abs_diff(zero.matrix()) < 1e-15);

        let p = outcome_distribution(rev.povm(), &plus()).unwrap();
        assert!((p.weights()[0] - 0.5).abs() < 1e-15);
        let post = post_measurement_state(rev.povm(), &plus(), 0).unwrap();
        let expected = DensityMatrix::pure(&[c(0.75f64.sqrt()), c(0.25f64.sqrt())]).unwrap();
        assert!(post.matrix().max_abs_diff(expected.matrix()) < 1e-14);

        let err = post_measurement_state(base.povm(), &zero, 1);
        assert!(matches!(err, Err(Error::ZeroProbabilityOutcome { outcome: 1, .. })));
    }

    #[test]
    fn logical_reversibility() {
        assert!(!is_logically_reversible(ProjectiveMeasurement::computational(2).povm()));
        assert!(!is_logically_reversible(ProjectiveMeasurement::computational(4).povm()));
        let rev = construct_reversible(ProjectiveMeasurement::computational(3), 0.2).unwrap();
        assert!(is_logically_reversible(rev.povm()));
        assert!(is_logically_reversible(&Povm::trivial(3)));
    }

    #[test]
    fn reversal_bound_examples() {
        let rho = plus();
        let rev = construct_reversible(ProjectiveMeasurement::computational(2), 0.1).unwrap();
        assert!((reversal_bounds(rev.povm(), &rho).unwrap().total_bound - 0.2).abs() < 1e-12);

        let rev = construct_reversible(ProjectiveMeasurement::computational(3), 0.2).unwrap();
        let r = reversal_bounds(rev.povm(), &DensityMatrix::maximally_mixed(3)).unwrap();
        assert!((r.total_bound - 0.6).abs() < 1e-12);

        let r = reversal_bounds(&Povm::trivial(2), &rho).unwrap();
        assert_eq!(r.bound_per_outcome, vec![Some(1.0)]);
        assert!((r.total_bound - 1.0).abs() < 1e-15);

        let err = reversal_bounds(ProjectiveMeasurement::computational(2).povm(), &rho);
        assert!(matches!(err, Err(Error::NotReversible { .. })));
    }

    #[test]
    fn simulation_is_deterministic_and_tight() {
        let rev = construct_reversible(ProjectiveMeasurement::computational(2), 0.1).unwrap();
        let a = simulate_reversal(&rev, &plus(), 1, 42).unwrap();
        let b = simulate_reversal(&rev, &plus(), 1, 42).unwrap();
        assert_eq!(a, b);

        let r = simulate_reversal(&rev, &plus(), 100_000, 5).unwrap();
        let sigma = (0.2f64 * 0.8 / 1e5).sqrt();
        assert!((r.empirical_total.unwrap() - 0.2).abs() <= 3.0 * sigma);
        assert!(r.recovered_fidelity_min.unwrap() >= 1.0 - 1e-8);
        assert!(matches!(
            simulate_reversal(&rev, &plus(), 0, 5),
            Err(Error::OutOfRange { .. })
        ));
    }

    proptest! {
        #[test]
        fn reversible_family_invariants(n in 2usize..6, frac in 0.01f64..0.99, seed: u64) {
            let a = frac / n as f64;
            let u = random_unitary(n, seed);
            let base = ProjectiveMeasurement::from_unitary(&u).unwrap();
            let rev = construct_reversible(base.clone(), a).unwrap();
            let sum = rev.povm().elements().iter().fold(CMatrix::zeros(n, n), |acc, e| &acc + e.matrix());
            prop_assert!(sum.max_abs_diff(&CMatrix::identity(n)) < 1e-10);
            let heavy = 1.0 - (n as f64 - 1.0) * a;
            for el in rev.povm().elements() {
                for p in base.projectors() {
                    let comm = &el.matrix().matmul(p.matrix()) - &p.matrix().matmul(el.matrix());
                    prop_assert!(comm.frobenius_norm() < 1e-10);
                }
                let sd = spectral_decompose(el);
                if (heavy - a).abs() > 1e-9 {
                    prop_assert_eq!(sd.eigenvalues.len(), 2);
                    prop_assert!((sd.eigenvalues[0].min(sd.eigenvalues[1]) - heavy.min(a)).abs() < 1e-10);
                    prop_assert!((sd.eigenvalues[0].max(sd.eigenvalues[1]) - heavy.max(a)).abs() < 1e-10);
                }
                prop_assert!((el.min_eigenvalue() - a.min(heavy)).abs() < 1e-10);
            }
            let rho = random_state(n, n, seed ^ 0x5eed).unwrap();
            let p = outcome_distribution(base.povm(), &rho).unwrap();
            let pu = outcome_distribution(rev.povm(), &rho).unwrap();
            for (q, pq) in p.weights().iter().zip(pu.weights()) {
                prop_assert!(((1.0 - n as f64 * a) * q + a - pq).abs() < 1e-10);
            }
            for x in 0..n {
                let post = post_measurement_state(rev.povm(), &rho, x).unwrap();
                prop_assert!(DensityMatrix::new(post.into_matrix()).is_ok());
            }
        }

        #[test]
        fn total_bound_is_state_independent(n in 2usize..5, frac in 0.01f64..0.99, s1: u64, s2: u64) {
            let a = frac / n as f64;
            let rev = construct_reversible(ProjectiveMeasurement::from_unitary(&random_unitary(n, s1)).unwrap(), a).unwrap();
            let r1 = reversal_bounds(rev.povm(), &random_state(n, n, s1).unwrap()).unwrap();
            let r2 = reversal_bounds(rev.povm(), &random_state(n, 1, s2).unwrap()).unwrap();
            prop_assert!((r1.total_bound - r2.total_bound).abs() < 1e-12);
            prop_assert!((r1.total_bound - n as f64 * a).abs() < 1e-12);
            for b in r1.bound_per_outcome.iter().chain(&r2.bound_per_outcome).flatten() {
                prop_assert!(*b >= 0.0 && *b <= 1.0 + 1e-12);
            }
        }
    }
}
