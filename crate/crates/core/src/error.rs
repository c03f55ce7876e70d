use std::path::PathBuf;

/// Errors produced across the environment, training and harness layers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("schema violation at `{path}`: {message}")]
    Schema { path: String, message: String },

    #[error("invalid value at `{path}`: {message}")]
    Semantic { path: String, message: String },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("joint {joint} value {value} outside limits [{lo}, {hi}]")]
    OutOfLimits {
        joint: usize,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("goal {goal:?} is unreachable: best rmse found {best_rmse:.6} m")]
    Unreachable { goal: [f64; 3], best_rmse: f64 },

    #[error("step called on a finished episode; reset first")]
    EpisodeDone,

    #[error("non-finite value encountered in {context}")]
    NonFinite { context: String },

    #[error("training diverged at iteration {iteration}: {message}")]
    Diverged { iteration: usize, message: String },

    #[error("invalid parameter file: {0}")]
    Format(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Short stable identifier, used for machine-readable error lines.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Syntax { .. } => "syntax",
            Error::Schema { .. } => "schema",
            Error::Semantic { .. } => "semantic",
            Error::Dimension { .. } => "dimension",
            Error::OutOfLimits { .. } => "out_of_limits",
            Error::Unreachable { .. } => "unreachable",
            Error::EpisodeDone => "episode_done",
            Error::NonFinite { .. } => "non_finite",
            Error::Diverged { .. } => "diverged",
            Error::Format(_) => "format",
            Error::Config(_) => "config",
            Error::Io { .. } => "io",
            Error::Csv(_) => "csv",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn semantic(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Semantic {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Deserializes a JSON document, keeping syntax errors and schema errors apart
/// and attaching the offending path to the latter.
pub(crate) fn from_json_str<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(json_error)?;
    de.end().map_err(|e| json_error_inner(String::new(), e))?;
    Ok(value)
}

fn json_error(err: serde_path_to_error::Error<serde_json::Error>) -> Error {
    let path = err.path().to_string();
    json_error_inner(path, err.into_inner())
}

fn json_error_inner(path: String, err: serde_json::Error) -> Error {
    use serde_json::error::Category;
    match err.classify() {
        Category::Syntax | Category::Eof | Category::Io => Error::Syntax {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        },
        Category::Data => Error::Schema {
            path: if path.is_empty() { ".".into() } else { path },
            message: err.to_string(),
        },
    }
}
