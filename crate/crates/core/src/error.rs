use thiserror::Error;

/// Errors surfaced by tree parsing, strategy evaluation and the oracles.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at path {path}: {message}")]
    Parse { path: String, message: String },

    #[error("probability outside [0,1] at path {path}")]
    ProbabilityOutOfRange { path: String },

    #[error("outcome distribution does not sum to 1 at path {path}")]
    DistributionNotNormalized { path: String },

    #[error("children count does not match experiment arity at path {path}")]
    ArityMismatch { path: String },

    #[error("path {path} does not resolve to a node")]
    PathNotFound { path: String },

    #[error("not a determined node at path {path}")]
    NotDeterminedNode { path: String },

    #[error("value outside [0,1]")]
    ValueOutOfRange,

    #[error("prior outside [0,1]")]
    PriorOutOfRange,

    #[error("no prior available: the tree file carries none and no override was given")]
    MissingPrior,

    #[error("missing designed parameters for reachable node at path {path}")]
    MissingDesignedParams { path: String },

    #[error("IC requirement is undefined at prior {prior}")]
    IcUndefinedAtPrior { prior: String },

    #[error("inferiority test undefined: an experiment has q2 = 1")]
    InferiorityUndefined,

    #[error("grid budget exceeded: {required} evaluations > limit {limit}")]
    BudgetExceeded { required: u128, limit: u128 },

    #[error("tree contains a non-binary node at path {path}")]
    NonBinaryNode { path: String },

    #[error("candidate set is empty")]
    EmptyCandidates,

    #[error("{message}")]
    Invalid { message: String },
}

impl Error {
    pub fn invalid(message: impl Into<String>) -> Self {
        Error::Invalid {
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
