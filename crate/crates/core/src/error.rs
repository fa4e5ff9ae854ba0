use thiserror::Error;

/// Errors raised by the library. Every variant is a domain error: the
/// inputs were well-formed but the requested computation is undefined or
/// refused.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("linear system is singular or inconsistent")]
    SingularOrInconsistent,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("generators have gcd {0}, conductor undefined")]
    GcdNotOne(u64),

    #[error("invalid generators: {0}")]
    InvalidGenerators(String),

    #[error("explicit enumeration limit exceeded: {count} exponents (limit {limit})")]
    EnumerationLimit { count: usize, limit: usize },

    #[error("degree {k} is below the conductor {conductor}")]
    OutOfRegime { k: u64, conductor: u64 },

    #[error("polynomial degree {poly} exceeds truncation degree {degree}")]
    DegreeOverflow { poly: u32, degree: u32 },

    #[error("{0}")]
    InvalidArgument(String),

    #[error("grid of {points} points exceeds the cap of {cap}")]
    GridCapExceeded { points: u128, cap: u64 },

    #[error("candidate stream exhausted at rank {achieved} of {required}")]
    StreamExhausted { achieved: usize, required: usize },

    #[error("nonpositive weight {0} at atom {1}")]
    NonPositiveWeight(String, usize),

    #[error("ill-conditioned Hankel block (condition estimate {0:e})")]
    IllConditioned(f64),

    #[error("root finder did not converge after {0} iterations")]
    NoConvergence(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable machine-readable identifier.
    pub fn code(&self) -> &'static str {
        match self {
            Error::SingularOrInconsistent => "singular",
            Error::DimensionMismatch(_) => "dimension_mismatch",
            Error::GcdNotOne(_) => "gcd_not_one",
            Error::InvalidGenerators(_) => "invalid_generators",
            Error::EnumerationLimit { .. } => "enumeration_limit",
            Error::OutOfRegime { .. } => "out_of_regime",
            Error::DegreeOverflow { .. } => "degree_overflow",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::GridCapExceeded { .. } => "grid_cap_exceeded",
            Error::StreamExhausted { .. } => "stream_exhausted",
            Error::NonPositiveWeight(..) => "nonpositive_weight",
            Error::IllConditioned(_) => "ill_conditioned",
            Error::NoConvergence(_) => "no_convergence",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
        }
    }
}
