use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate magnetic direction: b vector is zero")]
    DegenerateDirection,

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("max_steps must be at least 1")]
    ZeroSteps,

    #[error("omega = 0: use free-particle branch")]
    FreeParticle,

    #[error("non-finite {0}")]
    NonFinite(&'static str),

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("unknown solver '{0}'")]
    UnknownSolver(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
