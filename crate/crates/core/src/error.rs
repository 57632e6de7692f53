use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("matrix has rank {rank} but full row rank {rows} is required")]
    RankDeficient { rank: usize, rows: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid degree matrix: {0}")]
    InvalidGrading(String),

    #[error("degenerate grading: {0}")]
    DegenerateGrading(String),

    #[error("lattice of the quasi-polynomial does not refine the chamber lattice")]
    LatticeNotRefining,

    #[error("quasi-polynomials live on different lattices; refine them to a common sublattice first")]
    LatticeMismatch,

    #[error("no quasi-polynomial of degree <= {max_degree} fits the counts on chamber {chamber}")]
    InterpolationInconsistent { chamber: usize, max_degree: usize },

    #[error("fitted value {fitted} differs from count {expected} at {point:?}")]
    ValidationFailed {
        point: Vec<i64>,
        expected: String,
        fitted: String,
    },

    #[error("t = {t} lies below the stable range t >= {t0}; evaluate the module Hilbert function directly")]
    PreStableRange { t: i64, t0: i64 },

    #[error("complete-intersection shift data is only generated for 2 or 3 generators (got {0}); ingest externally computed data instead")]
    UnsupportedRank(usize),

    #[error("parse error at `{path}`: {message}")]
    Parse { path: String, message: String },

    #[error("invalid data: {0}")]
    InvalidData(String),
}
