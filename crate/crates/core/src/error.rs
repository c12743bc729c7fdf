use thiserror::Error;

/// Errors shared by all modules of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("f({lo}) and f({hi}) have the same sign; no root bracketed")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("no convergence after {iterations} iterations (best residual {residual:e})")]
    NoConvergence { iterations: u32, residual: f64 },

    #[error("operation requires a finite number of measurements")]
    InfiniteSteps,

    #[error("readout must be 0 or 1, got {0}")]
    BadReadout(u8),

    #[error("measurement index {k} outside 0..={max}")]
    IndexOutOfRange { k: u64, max: u64 },

    #[error("state has zero norm")]
    NullState,

    #[error("phase ill-defined near theta = {theta}: amplitude magnitude {magnitude:e} (critical point)")]
    UndefinedAtCriticalPoint { theta: f64, magnitude: f64 },

    #[error("endpoint phase {endpoint} is not a multiple of 2*pi to 1e-3; branch tracking failed")]
    NotQuantized { endpoint: f64 },

    #[error("averaged amplitude magnitude {magnitude:e} below cutoff; dephasing diverges")]
    UndefinedPhase { magnitude: f64 },

    #[error("brute-force enumeration limited to N <= {max}, got N = {n}")]
    TooLargeForBruteForce { n: u64, max: u64 },

    #[error("exact surviving-weight sum limited to N <= {max}, got N = {n}")]
    TooLargeForExactS { n: u64, max: u64 },

    #[error("averaged large-C correction divides by A + pi*d*cos(theta) = {denominator:e}")]
    DegenerateDenominator { denominator: f64 },

    #[error("consecutive trajectory states orthogonal at step {k}; geodesic undefined")]
    OrthogonalNeighbors { k: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

pub type Result<T> = std::result::Result<T, Error>;
