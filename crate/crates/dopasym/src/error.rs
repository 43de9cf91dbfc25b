//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by construction and evaluation routines.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("node density is non-positive at x = {x}")]
    NonPositiveDensity { x: f64 },
    #[error("node density does not integrate to 1 (got {mass})")]
    Unnormalized { mass: f64 },
    #[error("invalid parameters: {0}")]
    BadParams(String),
    #[error("family requires uniform nodes on (0,1), but node set is not uniform")]
    NodeMismatch,
    #[error("working precision exhausted at degree k = {k}; retry with more bits")]
    PrecisionExhausted { k: usize },
    #[error("degree out of range: {0}")]
    DegreeOutOfRange(String),
    #[error("eigenvalue bisection failed to converge")]
    ConvergenceFailure,
    #[error("quadrature failed: {0}")]
    QuadratureFailure(String),
    #[error("c = {c} is within {radius} of an exceptional value")]
    ExceptionalC { c: f64, radius: f64 },
    #[error("solver did not converge: {0}")]
    NoConvergence(String),
    #[error("no interior run found during band detection")]
    DegenerateBandDetection,
    #[error("equilibrium measure has {0} bands; exactly one required")]
    MultiBand(usize),
    #[error("requested edge map contradicts the measure's gap type: {0}")]
    EdgeMismatch(String),
    #[error("point does not lie in the requested region: {0}")]
    RegionMismatch(String),
    #[error("point too close to a band edge for the band-interior formula")]
    TooCloseToEdge,
    #[error("edge type mismatch: {0}")]
    EdgeTypeMismatch(String),
    #[error("kernel numerical rank {rank} differs from expected {expected}")]
    RankDeficiency { rank: usize, expected: usize },
    #[error("invalid hexagon specification: {0}")]
    BadSpec(String),
    #[error("enumeration too large: {0} tilings exceed the cap")]
    TooLarge(u128),
    #[error("top gap has the wrong type for edge statistics: {0}")]
    WrongGapType(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
