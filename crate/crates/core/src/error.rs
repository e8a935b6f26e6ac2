use thiserror::Error;

/// Errors raised by the channel-geometry routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NonHermitianInput(f64),

    #[error("bad dimension: expected {expected}, got {got}")]
    BadDimension { expected: usize, got: usize },

    #[error("eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("Bloch vector has norm {0} > 1")]
    UnphysicalBloch(f64),

    #[error("not a density matrix: {0}")]
    InvalidState(String),

    #[error("channel is not unital (|b| = {0:e})")]
    NotUnital(f64),

    #[error("channel is not completely positive (min Choi eigenvalue {0:e})")]
    NotCP(f64),

    #[error("unknown map name `{0}`")]
    UnknownName(String),

    #[error("Pauli weights sum to {0}, not 1")]
    WeightsNotNormalized(f64),

    #[error("constraint slice does not intersect the tetrahedron")]
    EmptyIntersection,

    #[error("point lies outside the positive cube (max |eta_i| = {0})")]
    OutsideCube(f64),

    #[error("coupling weights must be nonnegative and sum to 1 (got sum {0})")]
    InvalidCoupling(f64),

    #[error("eta does not have the protocol symmetry: {0}")]
    SymmetryViolation(String),

    #[error("disturbance {0} outside [0, 1/2]")]
    DisturbanceOutOfRange(f64),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Stable machine-readable name of the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonHermitianInput(_) => "NonHermitianInput",
            Error::BadDimension { .. } => "BadDimension",
            Error::NoConvergence(_) => "NoConvergence",
            Error::UnphysicalBloch(_) => "UnphysicalBloch",
            Error::InvalidState(_) => "InvalidState",
            Error::NotUnital(_) => "NotUnital",
            Error::NotCP(_) => "NotCP",
            Error::UnknownName(_) => "UnknownName",
            Error::WeightsNotNormalized(_) => "WeightsNotNormalized",
            Error::EmptyIntersection => "EmptyIntersection",
            Error::OutsideCube(_) => "OutsideCube",
            Error::InvalidCoupling(_) => "InvalidCoupling",
            Error::SymmetryViolation(_) => "SymmetryViolation",
            Error::DisturbanceOutOfRange(_) => "DisturbanceOutOfRange",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }

    /// Internal faults, as opposed to problems with the caller's input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::NoConvergence(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
