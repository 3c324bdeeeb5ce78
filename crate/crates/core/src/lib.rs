//! Logically reversible measurements built from von Neumann measurements,
//! together with the entropies and quantum discords they induce.
//!
//! The crate is `no_std` and only needs `alloc`. Everything here is a pure
//! function of its inputs; randomness always comes from an explicit seed.
//!
//! Module map:
//!
//! * [`linalg`]: dense complex matrices and a Hermitian Jacobi eigensolver.
//! * [`state`]: density matrices, bipartite states, spectral decompositions,
//!   partial traces and random state sampling.
//! * [`measurement`]: POVMs, projective measurements, the reversible
//!   `Λ^(a)` family, post-measurement states and reversal bounds.
//! * [`entropy`]: Shannon / von Neumann entropies and the entropy
//!   inequalities as slack-returning checks.
//! * [`discord`]: mutual information, classical correlation and discord for
//!   projective and reversible measurements.
//! * [`optimize`]: Nelder-Mead simplex minimizer used by [`discord`].
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod discord;
pub mod entropy;
mod error;
pub mod linalg;
pub mod measurement;
pub mod optimize;
pub mod state;

pub use error::{Error, Result};
pub use linalg::{CMatrix, C64};
pub use state::{BipartiteState, DensityMatrix, HermitianOperator, ProbabilityDistribution};

/// Tolerances shared across modules.
pub mod tol {
    /// Entrywise Hermiticity tolerance.
    pub const HERMITIAN: f64 = 1e-12;
    /// Eigenvalues above `-PSD` are accepted as nonnegative (and clipped).
    pub const PSD: f64 = 1e-10;
    /// Allowed trace drift for states and sum drift for distributions.
    pub const TRACE: f64 = 1e-10;
    /// Distinct-eigenvalue grouping.
    pub const EIGEN_GROUP: f64 = 1e-9;
    /// Projector idempotence, orthogonality and POVM completeness.
    pub const PROJECTOR: f64 = 1e-10;
    /// Outcomes at or below this probability are treated as impossible.
    pub const ZERO_PROBABILITY: f64 = 1e-12;
    /// Slack allowed on entropy inequalities.
    pub const INEQUALITY: f64 = 1e-9;
    /// Invertibility threshold for measurement elements.
    pub const INVERTIBLE: f64 = 1e-10;
}
