use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {rows} rows, row of length {cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (max |A - A†| entry {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:e})")]
    NotPositive { eigenvalue: f64 },
    #[error("trace is {trace}, expected 1")]
    TraceNotOne { trace: f64 },
    #[error("rank {rank} must lie in 1..={dim}")]
    BadRank { rank: usize, dim: usize },
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid probability distribution: {reason}")]
    BadDistribution { reason: &'static str },
    #[error("projector {index} is not idempotent (deviation {deviation:e})")]
    NotIdempotent { index: usize, deviation: f64 },
    #[error("projectors {first} and {second} are not orthogonal (deviation {deviation:e})")]
    NotOrthogonal {
        first: usize,
        second: usize,
        deviation: f64,
    },
    #[error("measurement elements do not sum to identity (deviation {deviation:e})")]
    NotComplete { deviation: f64 },
    #[error("mixing parameter a = {a} outside (0, 1/{n})")]
    MixingOutOfRange { a: f64, n: usize },
    #[error("outcome {outcome} has probability {probability:e}")]
    ZeroProbabilityOutcome { outcome: usize, probability: f64 },
    #[error("measurement is not logically reversible (element {outcome} min eigenvalue {eigenvalue:e})")]
    NotReversible { outcome: usize, eigenvalue: f64 },
    #[error("value {value} outside the domain {domain}")]
    OutOfRange { value: f64, domain: &'static str },
    #[error("subsystem dimension {dim} exceeds the optimizer limit {max}")]
    DimensionTooLarge { dim: usize, max: usize },
    #[error("outcome index {outcome} out of range for {count} outcomes")]
    NoSuchOutcome { outcome: usize, count: usize },
    #[error("measurement has no elements")]
    Empty,
}
