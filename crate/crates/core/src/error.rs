use thiserror::Error;

/// Errors surfaced by the exact computation pipeline.
///
/// Every variant corresponds to a precondition failure that callers can act
/// on (resample, escalate a degree bound, pick a different point, ...).
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero in the scalar field")]
    DegenerateScalar,
    #[error("rational function evaluated at a pole")]
    PoleHit,
    #[error("samples are inconsistent with the degree bound")]
    InterpolationMismatch,
    #[error("matrix does not square to zero")]
    NotADifferential,
    #[error("internal Lie algebra fails Jacobi or invariance: {0}")]
    InvalidInternalAlgebra(String),
    #[error("kinematic sampling exhausted its retry budget")]
    SamplingFailure,
    #[error("perturbation is too large for the homological perturbation step")]
    PerturbationTooLarge,
    #[error("internal line is on shell")]
    OnShellInternalLine,
    #[error("point is not a regular homology point")]
    NotRegularHomologyPoint,
    #[error("operator is not a homotopy for the differential")]
    NotAHomotopy,
    #[error("middle complex of the short exact sequence is not exact here")]
    MiddleNotExact,
    #[error("momentum vanishes; no helicity state exists")]
    SingularMomentum,
    #[error("three-point branch does not support this helicity pattern")]
    WrongBranch,
    #[error("base point does not lie on the requested divisor")]
    WrongDivisor,
    #[error("homotopy assignment is missing an internal line")]
    IncompleteAssignment,
    #[error("{0}")]
    Construction(String),
}

pub type Result<T> = std::result::Result<T, Error>;
