use thiserror::Error;

use crate::rays::RayPolyline;
use crate::transversality::TransversalitySum;

/// Why a transversality-type series was declared non-convergent.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StallCause {
    /// Fitted geometric decay ratio of the late terms reached the stall threshold.
    SlowDecay { ratio: f64 },
    /// The orbit derivative vanished, so the term `1/D f^n` is undefined.
    ZeroDerivative { n: usize },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("overflow at step {step}: magnitude exceeded the safe range")]
    Overflow { step: usize },

    #[error("point does not escape within {maxit} iterations (likely in the filled set)")]
    NotEscaping { maxit: usize },

    #[error("branch ambiguity: {0}")]
    BranchAmbiguity(String),

    #[error("newton stalled below potential {last_good_t:e}")]
    NewtonStall {
        last_good_t: f64,
        partial: Box<RayPolyline>,
    },

    #[error("requested potential {t_min:e} is below the precision floor {floor:e}")]
    PrecisionFloor { t_min: f64, floor: f64 },

    #[error("landing extrapolation did not converge: {0}")]
    NoConvergence(String),

    #[error("series did not converge after {} terms", partial.n_terms)]
    NonConvergent {
        partial: Box<TransversalitySum>,
        cause: StallCause,
    },

    #[error("orbit derivative vanished at step {step}")]
    ZeroDerivative { step: usize },

    #[error("resolution insufficient: {0}")]
    ResolutionInsufficient(String),

    #[error("iterated logarithm undefined: {0}")]
    LogDomain(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command-line tool for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_) => 1,
            Error::NotEscaping { .. } => 2,
            Error::BranchAmbiguity(_) => 3,
            Error::NewtonStall { .. } | Error::PrecisionFloor { .. } => 4,
            Error::ResolutionInsufficient(_) => 5,
            Error::NonConvergent { .. } => 6,
            Error::NoConvergence(_) => 7,
            Error::LogDomain(_) => 8,
            Error::Overflow { .. } | Error::ZeroDerivative { .. } => 9,
            Error::Io(_) | Error::Json(_) => 10,
        }
    }

    /// Short stable name, used in CSV failure markers and manifests.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "InvalidInput",
            Error::Overflow { .. } => "Overflow",
            Error::NotEscaping { .. } => "NotEscaping",
            Error::BranchAmbiguity(_) => "BranchAmbiguity",
            Error::NewtonStall { .. } => "NewtonStall",
            Error::PrecisionFloor { .. } => "PrecisionFloor",
            Error::NoConvergence(_) => "NoConvergence",
            Error::NonConvergent { .. } => "NonConvergent",
            Error::ZeroDerivative { .. } => "ZeroDerivative",
            Error::ResolutionInsufficient(_) => "ResolutionInsufficient",
            Error::LogDomain(_) => "LogDomain",
            Error::Io(_) => "Io",
            Error::Json(_) => "Json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
