use thiserror::Error;

/// Errors raised by the numerical kernels and the experiment harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numeric failure: {message} (achieved error {achieved_error:e}, seed {seed:?})")]
    NumericFailure {
        message: String,
        achieved_error: f64,
        seed: Option<u64>,
    },

    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),

    #[error("point {0} lies on the branch cut")]
    BranchCut(String),

    #[error("out of regime: {0}")]
    OutOfRegime(String),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("infeasible regime: {0}")]
    InfeasibleRegime(String),

    #[error("all {0} trials failed")]
    AllTrialsFailed(usize),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>, achieved_error: f64) -> Self {
        Error::NumericFailure {
            message: msg.into(),
            achieved_error,
            seed: None,
        }
    }

    /// Attach the sampling seed to a numeric failure so the trial can be replayed.
    pub fn with_seed(self, seed: u64) -> Self {
        match self {
            Error::NumericFailure {
                message,
                achieved_error,
                ..
            } => Error::NumericFailure {
                message,
                achieved_error,
                seed: Some(seed),
            },
            other => other,
        }
    }

    /// Stable short tag used in serialized trial records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid-argument",
            Error::NumericFailure { .. } => "numeric-failure",
            Error::DegenerateSpectrum(_) => "degenerate-spectrum",
            Error::BranchCut(_) => "branch-cut",
            Error::OutOfRegime(_) => "out-of-regime",
            Error::PreconditionViolated(_) => "precondition-violated",
            Error::InfeasibleRegime(_) => "infeasible-regime",
            Error::AllTrialsFailed(_) => "all-trials-failed",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
        }
    }
}

impl Error {
    /// Re-labels an argument error raised while validating a configuration.
    pub fn into_config(self) -> Error {
        match self {
            Error::InvalidArgument(m) | Error::Config(m) => Error::Config(m),
            other => Error::Config(other.to_string()),
        }
    }

    /// Process exit status for the command-line tool: 2 for configuration and
    /// argument problems (including I/O), 3 for numerical failures, 4 when
    /// every trial failed.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::InvalidArgument(_)
            | Error::PreconditionViolated(_)
            | Error::OutOfRegime(_)
            | Error::Io(_) => 2,
            Error::NumericFailure { .. }
            | Error::DegenerateSpectrum(_)
            | Error::BranchCut(_)
            | Error::InfeasibleRegime(_) => 3,
            Error::AllTrialsFailed(_) => 4,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
