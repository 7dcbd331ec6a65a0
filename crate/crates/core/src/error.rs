use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("argument on a branch cut: {0}")]
    BranchCut(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("singular limit: {0}")]
    SingularLimit(String),
    #[error("ill-conditioned: {0}")]
    IllConditioned(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("finite-difference step {h:e} exceeds {limit:e}")]
    StepTooLarge { h: f64, limit: f64 },
    #[error("spectral tail {achieved:e} above the required floor {required:e}")]
    TailFloor { achieved: f64, required: f64 },
    #[error("growing multiplier {0} needs a regularizer")]
    MissingRegularizer(String),
    #[error("no threshold crossing: {0}")]
    NoCrossing(String),
    #[error("invalid Cauchy data: {0}")]
    InvalidCauchyData(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
