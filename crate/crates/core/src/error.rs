use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("axis index {axis} out of range for a {dim}-dimensional mesh")]
    AxisOutOfRange { axis: usize, dim: usize },

    #[error("expected {expected} coefficients, got {got}")]
    CoefficientCount { expected: usize, got: usize },

    #[error("fields are defined on different meshes")]
    MeshMismatch,

    #[error("a line system needs at least one interior unknown")]
    EmptyLineSystem,

    #[error("coefficient a_{axis} must be positive, got {value}")]
    NonPositiveCoefficient { axis: usize, value: f64 },

    #[error("invalid medium: {0}")]
    InvalidMedium(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("the source term cannot be evaluated at half time steps")]
    HalfStepUnavailable,

    #[error("state at level {0} has no previous level")]
    MissingPreviousLevel(usize),

    #[error("scenario `{0}` has no exact solution")]
    NoExactSolution(String),

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("unknown case tag `{0}`")]
    UnknownCase(String),

    #[error("point {0} lies outside the layered domain [0, 3]")]
    OutOfDomain(f64),

    #[error("config error: {0}")]
    Config(String),

    #[error("I/O error at {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
