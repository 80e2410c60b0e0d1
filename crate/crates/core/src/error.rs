use thiserror::Error;

/// Errors surfaced by the lattice, path, and propagator operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: space has d={expected}, point has d={got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("operation not supported on this space: {0}")]
    UnsupportedSpace(&'static str),

    #[error("axes of symmetry undefined for n={n} with d={d} spatial dimensions")]
    UnsupportedAxes { n: u32, d: usize },

    #[error("time runs backwards: dt={0}")]
    ReversedTime(i64),

    #[error("time span {requested} exceeds the enumeration cap {limit}")]
    Capacity { limit: i64, requested: i64 },

    #[error("displacement not generable from the axes of symmetry")]
    NonGenerable,

    #[error("endpoint is not a member of the space")]
    Membership,

    #[error("series did not converge: achieved tail bound {achieved}, requested {requested}")]
    Truncation { achieved: f64, requested: f64 },

    #[error("quadrature failed to converge: last refinement moved the value by {last_delta}")]
    QuadratureDiverged { last_delta: f64 },

    #[error("potential bucket overflow; retry with bucket size >= {suggested}")]
    Resolution { suggested: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
