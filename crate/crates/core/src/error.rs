use thiserror::Error;

use crate::linalg::Int;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("vector does not lie in the lattice spanned by the basis")]
    NotInSpan,

    #[error("vector is not primitive in the lattice (coefficient gcd {0})")]
    NotPrimitive(Int),

    #[error("base locus: linear form {form} (row {row}) vanishes at the given point")]
    BaseLocus { row: usize, form: String },

    #[error("zero vector is not a valid point of projective space")]
    ZeroVector,

    #[error("coordinate {0} is zero; point is not in the torus")]
    ZeroCoordinate(usize),

    #[error("rank {actual} is below the required rank {required}")]
    RankDeficient { required: usize, actual: usize },

    #[error("polynomial has degree zero in variable {0}")]
    DegreeZero(usize),

    #[error("polynomial is not univariate")]
    NotUnivariate,

    #[error("polynomial division is not exact")]
    InexactDivision,

    #[error("root finder did not converge: {0}")]
    NoConvergence(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
