use geoflow_core::Error as CoreError;
use thiserror::Error;

/// Process exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    /// A check or criterion failed.
    Fail,
    /// Unknown example, unparsable input or a rejected configuration.
    Config,
    /// Evaluation failed (out of domain, singular metric, ...).
    Evaluation,
}

impl Outcome {
    pub fn code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
            Outcome::Config => 2,
            Outcome::Evaluation => 3,
        }
    }

    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("{0}")]
    Usage(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json encoding failed: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn outcome(&self) -> Outcome {
        match self {
            CliError::Core(e) => core_outcome(e),
            CliError::Usage(_) | CliError::Io { .. } => Outcome::Config,
            CliError::Json(_) => Outcome::Evaluation,
        }
    }
}

/// Configuration and lookup problems map to [`Outcome::Config`]; anything
/// raised while evaluating maps to [`Outcome::Evaluation`].
pub fn core_outcome(e: &CoreError) -> Outcome {
    match e {
        CoreError::UnknownExample(_)
        | CoreError::Parse(_)
        | CoreError::InvalidConfig(_)
        | CoreError::SchoutenSingular { .. }
        | CoreError::TipDegenerate { .. }
        | CoreError::DimensionTooSmall { .. }
        | CoreError::UnsupportedDimension(_)
        | CoreError::DimensionMismatch { .. } => Outcome::Config,
        _ => Outcome::Evaluation,
    }
}
