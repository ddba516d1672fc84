use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("tangent vector based at a different point")]
    BaseMismatch,
    #[error("vector is not tangent to the sphere (residual {0:e})")]
    NotTangent(f64),
    #[error("point within {distance:e} of the singular locus of {spec}")]
    NearSingularLocus { spec: String, distance: f64 },
    #[error("near-singular horizontal differential (|det| = {0:e})")]
    SingularDifferential(f64),
    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { what: &'static str, iterations: usize, residual: f64 },
    #[error("enumeration exceeds memory guard of {0} elements")]
    MemoryGuard(usize),
    #[error("exponential growth detected")]
    ExponentialGrowth,
    #[error("empty boundary for a nonempty subset (disconnected net?)")]
    EmptyBoundary,
}

pub type Result<T> = std::result::Result<T, Error>;
