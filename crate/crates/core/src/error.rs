use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Broad failure category, used by the CLI to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Data,
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message} (at `{token}`)")]
    Parse {
        line: usize,
        token: String,
        message: String,
    },

    #[error("unknown log format `{0}` (expected `canonical` or `pluribus-raw`)")]
    UnknownFormat(String),

    #[error("no alias mapping for: {}", .0.join(", "))]
    UnmappedAliases(Vec<String>),

    #[error("invalid alias map: {0}")]
    InvalidAliasMap(String),

    #[error("invalid card `{0}`")]
    InvalidCard(String),

    #[error("duplicate card {0} in hole cards")]
    DuplicateCard(String),

    #[error("decision {game_id}#{hand_index} for {player} has no Sklansky rank")]
    MissingSklansky {
        game_id: String,
        hand_index: u32,
        player: String,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("training data contains a single outcome class")]
    SingleClass,

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("design matrix is rank deficient ({0})")]
    RankDeficient(String),

    #[error("payoff must be strictly positive, got {0}")]
    NonPositivePayoff(f64),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("omega scan grid is empty")]
    EmptyGrid,

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("no valid convergence among {starts} starts: {summary}")]
    NoValidConvergence { starts: usize, summary: String },

    #[error("requested gamble mix is infeasible: {0}")]
    InfeasibleMix(String),

    #[error("bootstrap refits failed in {failed} of {replicates} replicates")]
    BootstrapFailure { failed: usize, replicates: usize },

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::SingleClass
            | Error::RankDeficient(_)
            | Error::NonFinite(_)
            | Error::NoValidConvergence { .. }
            | Error::BootstrapFailure { .. } => ErrorKind::Numerical,
            Error::Stage { source, .. } => source.kind(),
            _ => ErrorKind::Data,
        }
    }
}
