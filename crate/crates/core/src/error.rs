use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{0}")]
    InvalidArgument(String),

    #[error("{0}")]
    Unsupported(String),

    #[error(
        "|nu| = {nu:e} is below the transform floor {floor:e}; use `tomogram`, which switches to the scaling form"
    )]
    UseScalingBranch { nu: f64, floor: f64 },

    #[error("{message}; try n_points >= {suggested_points}")]
    Resolution { message: String, suggested_points: usize },

    #[error("{0}")]
    NumericalFailure(String),

    #[error("covariance is not admissible: {0}")]
    InvalidCovariance(String),

    #[error("need at least {required} additional slices, got {supplied}")]
    InsufficientData { required: usize, supplied: usize },

    #[error("{0}")]
    InconsistentTomograms(String),

    #[error("Wronskian drift {drift:e} at t = {time} exceeds {limit:e}; reduce dt")]
    StepSizeTooLarge { time: f64, drift: f64, limit: f64 },

    #[error("{what} = {value} outside [{min}, {max}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("transformed direction (mu, nu) collapsed to (0, 0)")]
    DegenerateDirection,

    #[error("slice at (mu, nu) = ({mu}, {nu}) is not Gaussian: KS distance {distance:.3e}")]
    ModelMismatch { mu: f64, nu: f64, distance: f64 },

    #[error("{file}:{line}: {message}")]
    Parse { file: String, line: usize, message: String },

    #[error("{0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable identifier for this error class.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid-argument",
            Error::Unsupported(_) => "unsupported",
            Error::UseScalingBranch { .. } => "use-scaling-branch",
            Error::Resolution { .. } => "resolution-error",
            Error::NumericalFailure(_) => "numerical-failure",
            Error::InvalidCovariance(_) => "invalid-covariance",
            Error::InsufficientData { .. } => "insufficient-data",
            Error::InconsistentTomograms(_) => "inconsistent-tomograms",
            Error::StepSizeTooLarge { .. } => "step-size-too-large",
            Error::OutOfRange { .. } => "out-of-range",
            Error::DegenerateDirection => "degenerate-direction",
            Error::ModelMismatch { .. } => "model-mismatch",
            Error::Parse { .. } => "parse-error",
            Error::Io(_) => "io-error",
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
