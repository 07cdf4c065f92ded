//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by the library. Numerical "failures" (a condition check
/// that does not hold, a run that blows up) are results, not errors; only
/// misuse and I/O problems end up here.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("field/grid dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("grids differ between operands: {0}")]
    GridMismatch(String),

    #[error("symbol has {found} columns, field has {expected} components")]
    ComponentMismatch { expected: usize, found: usize },

    #[error("symbol evaluated to a non-finite entry at grid mode {mode:?}")]
    NonFiniteSymbol { mode: Vec<i64> },

    #[error("invalid system description: {0}")]
    InvalidSystem(String),

    #[error("eigenvalue clustering is ambiguous at xi={xi:?}: gaps {gaps:?} straddle the tolerance {tol}")]
    ClusterAmbiguity {
        xi: Vec<f64>,
        gaps: Vec<f64>,
        tol: f64,
    },

    #[error("refined splitting needs a constant eigenvalue branch for ({j},{jp},{p}); neither branch is constant")]
    NoConstantBranch { j: usize, jp: usize, p: i64 },

    #[error("operator norm {norm:.3e} exceeds the Neumann-series safety margin 0.5")]
    NeumannDivergent { norm: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("operator returned a field with {found} components, expected {expected}")]
    OperatorShape { expected: usize, found: usize },

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed field container: {0}")]
    BadContainer(String),

    #[error("config parse: {0}")]
    TomlParse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
