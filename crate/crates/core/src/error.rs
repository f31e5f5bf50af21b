use std::path::PathBuf;

use crate::numat::C64;

/// Every failure mode surfaced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix has a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix dimension must be positive")]
    EmptyMatrix,

    #[error("at least one nonzero matrix is required")]
    EmptyFamily,

    #[error("invalid tolerance (atol={atol}, rtol={rtol})")]
    InvalidTolerance { atol: f64, rtol: f64 },

    #[error("eigensolver did not converge for a {dim}x{dim} matrix")]
    EigenNonConvergence { dim: usize },

    #[error("singular value decomposition did not converge")]
    SvdNonConvergence,

    #[error("arithmetic overflow while computing {0}")]
    Overflow(&'static str),

    #[error("mu = {mu} lies within {distance:e} of the spectrum (tolerance {tolerance:e})")]
    SingularResolvent { mu: C64, distance: f64, tolerance: f64 },

    #[error("matrix {what} is numerically singular")]
    Singular { what: &'static str },

    #[error(
        "nilpotency undecided: eigenvalue test says {by_eigenvalues}, power test says {by_power} \
         (spectral radius {radius:e}, power norm {power_norm:e})"
    )]
    NilpotencyUndecided {
        by_eigenvalues: bool,
        by_power: bool,
        radius: f64,
        power_norm: f64,
    },

    #[error("polynomial interpolation is ill-conditioned (reconstruction error {error:e} > {bound:e})")]
    InterpolationIllConditioned { error: f64, bound: f64 },

    #[error("probe set invalid: {0}")]
    InvalidProbes(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no eigenvalue within {tolerance:e} of {target}")]
    NoMatchingEigenvalue { target: C64, tolerance: f64 },

    #[error("eigenvalue cluster at {center} is separated by {gap:e}, need more than {required:e}")]
    ClusterNotSeparated { center: C64, gap: f64, required: f64 },

    #[error("eigenvalue pairing search exceeded {nodes} nodes")]
    PairingSearchExhausted { nodes: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: parse error at line {line}, column {column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{path}: matrix '{name}': {message}")]
    InvalidMatrixSet {
        path: PathBuf,
        name: String,
        message: String,
    },

    #[error("no matrix named '{0}' in the set")]
    UnknownMatrix(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
