use std::fmt;
use std::path::PathBuf;

/// Pipeline stage an error came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Ingest,
    Tokenize,
    Split,
    Embed,
    Train,
    Baseline,
    Evaluate,
    Query,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Ingest => "ingest",
            Stage::Tokenize => "tokenize",
            Stage::Split => "split",
            Stage::Embed => "embed",
            Stage::Train => "train",
            Stage::Baseline => "baseline",
            Stage::Evaluate => "evaluate",
            Stage::Query => "query",
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{0}")]
    Usage(String),
    #[error("{stage}: {message}")]
    Data { stage: Stage, message: String },
    #[error("{stage}: training diverged: {message}")]
    Divergence { stage: Stage, message: String },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

impl Error {
    pub fn data(stage: Stage, message: impl fmt::Display) -> Self {
        Error::Data { stage, message: message.to_string() }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Process exit code: 1 usage, 2 data, 3 divergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 1,
            Error::Data { .. } | Error::Io { .. } => 2,
            Error::Divergence { .. } => 3,
        }
    }
}

impl From<(Stage, folkmotif_core::sgns::TrainError)> for Error {
    fn from((stage, e): (Stage, folkmotif_core::sgns::TrainError)) -> Self {
        use folkmotif_core::sgns::TrainError;
        match e {
            TrainError::Diverged { .. } => Error::Divergence { stage, message: e.to_string() },
            TrainError::Config(_) => Error::Usage(format!("{stage}: {e}")),
            TrainError::EmptyCorpus => Error::data(stage, e),
        }
    }
}

impl From<(Stage, folkmotif_core::network::NetError)> for Error {
    fn from((stage, e): (Stage, folkmotif_core::network::NetError)) -> Self {
        use folkmotif_core::network::NetError;
        match e {
            NetError::Diverged { .. } => Error::Divergence { stage, message: e.to_string() },
            NetError::Config(_) => Error::Usage(format!("{stage}: {e}")),
            _ => Error::data(stage, e),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
