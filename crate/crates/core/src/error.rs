use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("gamma function pole at nonpositive integer {0}")]
    GammaPole(f64),
    #[error("invalid interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("pole at {pole} coincides with a quadrature node")]
    PoleOnNode { pole: f64 },
    #[error("poles {first} and {second} closer than twice the excision radius")]
    PolesTooClose { first: f64, second: f64 },
    #[error("linear system is numerically singular (condition estimate {condition:e})")]
    SingularSystem { condition: f64 },
    #[error("grid refinement did not converge: m0 changed by {change:e} on doubling n")]
    NotConverged { change: f64 },
    #[error("operation requires {expected} statistics")]
    WrongStatistics { expected: &'static str },
    #[error("could not bracket a root for gamma = {gamma}")]
    BracketFailure { gamma: f64 },
    #[error("point {0} lies outside the strip |Im xi| < pi")]
    OutsideStrip(String),
    #[error("point {0} lies in the wrong half-plane for this factor")]
    WrongHalfPlane(String),
    #[error("expansion depth {0} exceeds the implemented maximum 4")]
    DepthExceeded(usize),
    #[error("functions live on different grids")]
    GridMismatch,
    #[error("Neumann series terms do not decrease (|term {order}| = {magnitude:e})")]
    ContractionFailure { order: usize, magnitude: f64 },
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
}

impl Error {
    /// Errors caused by the caller's input rather than by the numerics.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidInterval { .. }
                | Error::InvalidArgument(_)
                | Error::WrongStatistics { .. }
                | Error::OutsideStrip(_)
                | Error::WrongHalfPlane(_)
                | Error::DepthExceeded(_)
                | Error::GammaPole(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
