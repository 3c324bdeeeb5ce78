//! Quantum states and the operations that build, split and sample them.
//!
//! Bipartite index convention: basis index `a * dim_b + b`, subsystem A is
//! the slow index. Every partial trace and `Π ⊗ 1` embedding in the crate
//! follows it.

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{self, eigh, eigvalsh, CMatrix, HermitianEigen, C64, ZERO};
use crate::{tol, Error, Result};

/// Positive semidefinite, unit-trace Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates `matrix` as a quantum state.
    ///
    /// The Hermitian part is kept, eigenvalues in `[-1e-10, 0)` are clipped
    /// to zero and the trace is renormalized.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        let deviation = matrix.hermitian_deviation();
        if deviation > tol::HERMITIAN {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > tol::TRACE {
            return Err(Error::TraceNotOne { trace });
        }
        let herm = matrix.hermitian_part();
        let eig = eigh(&herm);
        let min = eig.values.first().copied().unwrap_or(0.0);
        if min < -tol::PSD {
            return Err(Error::NotPositive { eigenvalue: min });
        }
        let clipped = if min < 0.0 { eig.map(|l| l.max(0.0)) } else { herm };
        Ok(Self::normalized(clipped))
    }

    /// Wraps a matrix known to be a state up to roundoff.
    pub(crate) fn from_trusted(matrix: CMatrix) -> Self {
        Self::normalized(matrix.hermitian_part())
    }

    fn normalized(matrix: CMatrix) -> Self {
        let trace = matrix.trace().re;
        Self {
            matrix: matrix.scale(1.0 / trace),
        }
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) nonzero vector.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if norm <= 0.0 || !norm.is_finite() {
            return Err(Error::TraceNotOne { trace: norm });
        }
        Ok(Self::from_trusted(CMatrix::outer(psi)))
    }

    /// `I / dim`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim).scale(1.0 / dim as f64),
        }
    }

    /// Diagonal state from a probability vector.
    pub fn diagonal(p: &ProbabilityDistribution) -> Self {
        Self {
            matrix: CMatrix::from_real_diagonal(p.weights()),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// Spectrum, ascending, with the roundoff-negative tail clipped to zero.
    pub fn eigenvalues(&self) -> Vec<f64> {
        eigvalsh(&self.matrix).into_iter().map(|l| l.max(0.0)).collect()
    }

    /// Number of eigenvalues above `1e-10`.
    pub fn rank(&self) -> usize {
        self.eigenvalues().iter().filter(|&&l| l > tol::PSD).count()
    }

    /// Convex combination `Σ w_i ρ_i`. Weights must form a distribution.
    pub fn mixture(components: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let first = components.first().ok_or(Error::BadDistribution {
            reason: "no components",
        })?;
        let dim = first.1.dim();
        let weights: Vec<f64> = components.iter().map(|c| c.0).collect();
        ProbabilityDistribution::new(weights)?;
        let mut acc = CMatrix::zeros(dim, dim);
        for (w, rho) in components {
            if rho.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: rho.dim(),
                });
            }
            acc = &acc + &rho.matrix.scale(*w);
        }
        Ok(Self::from_trusted(acc))
    }
}

/// Hermitian matrix, e.g. a measurement element `Λ_x` or its square root.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    matrix: CMatrix,
}

impl HermitianOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        let deviation = matrix.hermitian_deviation();
        if deviation > tol::HERMITIAN {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self {
            matrix: matrix.hermitian_part(),
        })
    }

    pub(crate) fn from_trusted(matrix: CMatrix) -> Self {
        Self {
            matrix: matrix.hermitian_part(),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn eigen(&self) -> HermitianEigen {
        eigh(&self.matrix)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        eigvalsh(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }
}

impl From<DensityMatrix> for HermitianOperator {
    fn from(rho: DensityMatrix) -> Self {
        Self { matrix: rho.matrix }
    }
}

/// `Σ_i a(i) Π(i)` over the distinct eigenvalues `a(i)` of an operator.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub projectors: Vec<CMatrix>,
}

impl SpectralDecomposition {
    pub fn reconstruct(&self) -> CMatrix {
        let dim = self.projectors.first().map_or(0, |p| p.rows());
        self.eigenvalues
            .iter()
            .zip(&self.projectors)
            .fold(CMatrix::zeros(dim, dim), |acc, (&a, p)| &acc + &p.scale(a))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Groups eigenvalues closer than `1e-9` and builds one projector per group.
pub fn spectral_decompose(op: &HermitianOperator) -> SpectralDecomposition {
    let eig = op.eigen();
    let n = op.dim();
    let mut eigenvalues = Vec::new();
    let mut projectors = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && eig.values[end] - eig.values[end - 1] <= tol::EIGEN_GROUP {
            end += 1;
        }
        let members = &eig.values[start..end];
        eigenvalues.push(members.iter().sum::<f64>() / members.len() as f64);
        let mut proj = CMatrix::zeros(n, n);
        for k in start..end {
            proj = &proj + &CMatrix::outer(&eig.vectors.column(k));
        }
        projectors.push(proj);
        start = end;
    }
    SpectralDecomposition {
        eigenvalues,
        projectors,
    }
}

/// Density matrix on `H_A ⊗ H_B`.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteState {
    state: DensityMatrix,
    dim_a: usize,
    dim_b: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

impl BipartiteState {
    pub fn new(state: DensityMatrix, dim_a: usize, dim_b: usize) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 || dim_a * dim_b != state.dim() {
            return Err(Error::DimensionMismatch {
                expected: state.dim(),
                found: dim_a * dim_b,
            });
        }
        Ok(Self { state, dim_a, dim_b })
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn reduced(&self, keep: Subsystem) -> DensityMatrix {
        partial_trace(self, keep)
    }

    /// `Tr_A((X ⊗ 1_B) ρ_AB)` for an operator `X` on A, without normalization.
    pub fn conditional_block(&self, op_a: &CMatrix) -> CMatrix {
        let (da, db) = (self.dim_a, self.dim_b);
        assert_eq!(op_a.rows(), da);
        let rho = self.state.matrix();
        let mut out = CMatrix::zeros(db, db);
        for i in 0..da {
            for j in 0..da {
                let x = op_a[(i, j)];
                if x == ZERO {
                    continue;
                }
                for b in 0..db {
                    for bp in 0..db {
                        out[(b, bp)] += x * rho[(j * db + b, i * db + bp)];
                    }
                }
            }
        }
        out
    }
}

/// `ρ_A ⊗ ρ_B`.
pub fn tensor_product(a: &DensityMatrix, b: &DensityMatrix) -> BipartiteState {
    BipartiteState {
        state: DensityMatrix::from_trusted(a.matrix.kron(&b.matrix)),
        dim_a: a.dim(),
        dim_b: b.dim(),
    }
}

/// Reduced state of the `keep` subsystem.
pub fn partial_trace(state: &BipartiteState, keep: Subsystem) -> DensityMatrix {
    let (da, db) = (state.dim_a, state.dim_b);
    let rho = state.state.matrix();
    let reduced = match keep {
        Subsystem::A => CMatrix::from_fn(da, da, |i, j| (0..db).map(|b| rho[(i * db + b, j * db + b)]).sum()),
        Subsystem::B => CMatrix::from_fn(db, db, |i, j| (0..da).map(|a| rho[(a * db + i, a * db + j)]).sum()),
    };
    DensityMatrix::from_trusted(reduced)
}

/// Ginibre mixed state: `G G† / Tr(G G†)` with `G` a `dim × rank` matrix of
/// independent standard complex Gaussians.
pub fn random_state(dim: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_state_with(dim, rank, &mut rng)
}

pub fn random_state_with<R: rand::Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> Result<DensityMatrix> {
    if rank == 0 || rank > dim {
        return Err(Error::BadRank { rank, dim });
    }
    let g = CMatrix::from_fn(dim, rank, |_, _| gaussian(rng));
    Ok(DensityMatrix::from_trusted(g.matmul(&g.adjoint())))
}

/// Haar-random unitary from Gram-Schmidt on a Ginibre matrix.
pub fn random_unitary(dim: usize, seed: u64) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_unitary_with(dim, &mut rng)
}

pub fn random_unitary_with<R: rand::Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut v = g.column(j);
        // two passes keep the basis orthonormal to machine precision
        for _ in 0..2 {
            for u in &cols {
                let overlap: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= overlap * ui;
                }
            }
        }
        let norm = libm::sqrt(v.iter().map(|z| z.norm_sqr()).sum::<f64>());
        v.iter_mut().for_each(|z| *z /= norm);
        cols.push(v);
    }
    CMatrix::from_fn(dim, dim, |i, j| cols[j][i])
}

fn gaussian<R: rand::Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}

/// Uhlmann fidelity `(Tr √(√ρ σ √ρ))²`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
    let sqrt_rho = eigh(rho.matrix()).map(|l| libm::sqrt(l.max(0.0)));
    let inner = sqrt_rho.matmul(sigma.matrix()).matmul(&sqrt_rho);
    let root_trace: f64 = eigvalsh(&inner.hermitian_part())
        .iter()
        .map(|&l| libm::sqrt(l.max(0.0)))
        .sum();
    root_trace * root_trace
}

/// Finite nonnegative weights summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityDistribution {
    weights: Vec<f64>,
}

impl ProbabilityDistribution {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::BadDistribution { reason: "empty" });
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::BadDistribution {
                reason: "non-finite weight",
            });
        }
        if weights.iter().any(|&w| w < 0.0) {
            return Err(Error::BadDistribution {
                reason: "negative weight",
            });
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > tol::TRACE {
            return Err(Error::BadDistribution {
                reason: "weights do not sum to 1",
            });
        }
        Ok(Self { weights })
    }

    /// Accepts computed probabilities, flushing roundoff negatives to zero.
    pub(crate) fn from_computed(mut weights: Vec<f64>) -> Result<Self> {
        for w in &mut weights {
            if *w < 0.0 && *w >= -tol::ZERO_PROBABILITY {
                *w = 0.0;
            }
        }
        Self::new(weights)
    }

    pub fn uniform(n: usize) -> Self {
        Self {
            weights: alloc::vec![1.0 / n as f64; n],
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Convenience for tests and the CLI: the computational basis vector `|k⟩`.
pub fn basis_vector(dim: usize, k: usize) -> Vec<C64> {
    let mut v = alloc::vec![ZERO; dim];
    v[k] = linalg::ONE;
    v
}
