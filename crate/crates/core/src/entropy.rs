//! Entropies in bits and the entropy inequalities as slack-returning checks.
//!
//! `0 · log₂ 0 = 0` throughout.

use alloc::vec::Vec;

use crate::measurement::check_mixing;
use crate::state::{DensityMatrix, ProbabilityDistribution};
use crate::{tol, Error, Result};

/// `-x log₂ x`, continuous at 0.
#[inline]
pub(crate) fn xlogx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * libm::log2(x)
    }
}

/// Shannon entropy of raw weights; nonpositive weights contribute nothing.
pub fn shannon_entropy_of(weights: &[f64]) -> f64 {
    weights.iter().map(|&p| xlogx(p)).sum()
}

pub fn shannon_entropy(p: &ProbabilityDistribution) -> f64 {
    shannon_entropy_of(p.weights())
}

/// `S(ρ) = -Tr ρ log₂ ρ`, from the spectrum.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    shannon_entropy_of(&rho.eigenvalues())
}

/// `H₀(r) = -r log₂ r - (1 - r) log₂(1 - r)`.
pub fn binary_entropy(r: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::OutOfRange {
            value: r,
            domain: "[0, 1]",
        });
    }
    Ok(xlogx(r) + xlogx(1.0 - r))
}

/// `f(x) = -x log₂ x` on `[0, 1]`.
pub fn f_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfRange {
            value: x,
            domain: "[0, 1]",
        });
    }
    Ok(xlogx(x))
}

/// `[H({η_i}) + Σ η_i S(ρ_i)] - S(Σ η_i ρ_i)`.
///
/// Never below `-1e-9`; zero when the `ρ_i` have mutually orthogonal supports.
pub fn mixing_bound_slack(components: &[(f64, DensityMatrix)]) -> Result<f64> {
    let refs: Vec<(f64, &DensityMatrix)> = components.iter().map(|(w, r)| (*w, r)).collect();
    let mix = DensityMatrix::mixture(&refs)?;
    let weights: Vec<f64> = components.iter().map(|c| c.0).collect();
    let bound = shannon_entropy_of(&weights) + components.iter().map(|(w, r)| w * von_neumann_entropy(r)).sum::<f64>();
    Ok(bound - von_neumann_entropy(&mix))
}

/// The map `p ↦ (1 - n a) p + a`, i.e. the outcome statistics of the
/// reversible measurement in terms of its projective base.
pub fn reversible_distribution(p: &ProbabilityDistribution, a: f64) -> Result<ProbabilityDistribution> {
    let n = p.len();
    check_mixing(a, n)?;
    let k = 1.0 - n as f64 * a;
    ProbabilityDistribution::from_computed(p.weights().iter().map(|&q| k * q + a).collect())
}

/// Both sides of the Shannon-entropy sandwich for the reversible measurement:
///
/// ```text
/// H(p_u) - n·max{f(a), f(1 - na + a)} ≤ H(p) ≤ H(p_u)
/// ```
#[derive(Clone, Debug, PartialEq)]
pub struct Prop1Report {
    pub n: usize,
    pub a: f64,
    pub h_base: f64,
    pub h_reversible: f64,
    pub penalty: f64,
    pub lower_ok: bool,
    pub upper_ok: bool,
}

impl Prop1Report {
    /// `h_base - (h_reversible - penalty)`; nonnegative when the lower side holds.
    pub fn lower_slack(&self) -> f64 {
        self.h_base - (self.h_reversible - self.penalty)
    }

    /// `h_reversible - h_base`; nonnegative when the upper side holds.
    pub fn upper_slack(&self) -> f64 {
        self.h_reversible - self.h_base
    }
}

pub fn prop1_check(p: &ProbabilityDistribution, a: f64) -> Result<Prop1Report> {
    let n = p.len();
    let pu = reversible_distribution(p, a)?;
    let h_base = shannon_entropy(p);
    let h_reversible = shannon_entropy(&pu);
    let penalty = n as f64 * xlogx(a).max(xlogx(1.0 - n as f64 * a + a));
    Ok(Prop1Report {
        n,
        a,
        h_base,
        h_reversible,
        penalty,
        lower_ok: h_reversible - penalty <= h_base + tol::INEQUALITY,
        upper_ok: h_base <= h_reversible + tol::INEQUALITY,
    })
}

/// The three-weight entropy bound obtained from strong subadditivity.
#[derive(Clone, Debug, PartialEq)]
pub struct Lemma1Report {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

impl Lemma1Report {
    pub fn holds(&self) -> bool {
        self.slack >= -tol::INEQUALITY
    }
}

/// For `ρ = (p₀ + p₁)ρ₁ + p₂ρ₂` checks
///
/// ```text
/// S(ρ) ≤ p₀ S(ρ₁) + (p₁+p₂) S(p₁/(p₁+p₂) ρ₁ + p₂/(p₁+p₂) ρ₂)
///        - (p₁+p₂) H₀(p₁/(p₁+p₂)) + H₀(p₂)
/// ```
///
/// The middle terms vanish when `p₁ + p₂ = 0`.
pub fn lemma1_check(rho1: &DensityMatrix, rho2: &DensityMatrix, p0: f64, p1: f64, p2: f64) -> Result<Lemma1Report> {
    if rho1.dim() != rho2.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho1.dim(),
            found: rho2.dim(),
        });
    }
    ProbabilityDistribution::new(alloc::vec![p0, p1, p2])?;
    let lhs = von_neumann_entropy(&DensityMatrix::mixture(&[(p0 + p1, rho1), (p2, rho2)])?);
    let tail = p1 + p2;
    let middle = if tail > 0.0 {
        let r = p1 / tail;
        let sub = DensityMatrix::mixture(&[(r, rho1), (1.0 - r, rho2)])?;
        tail * von_neumann_entropy(&sub) - tail * binary_entropy(r)?
    } else {
        0.0
    };
    let rhs = p0 * von_neumann_entropy(rho1) + middle + binary_entropy(p2)?;
    Ok(Lemma1Report {
        lhs,
        rhs,
        slack: rhs - lhs,
    })
}
