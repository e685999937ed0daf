use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown slot `{slot}` for domain `{domain}`")]
    DomainMismatch { domain: String, slot: String },

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("{path}: line {line}: {message}")]
    Parse {
        path: String,
        line: u64,
        message: String,
    },

    #[error("{path}: schema error: {message}")]
    Schema { path: String, message: String },

    #[error("MR parse error at token {position} (`{token}`): {message}")]
    MrParse {
        position: usize,
        token: String,
        message: String,
    },

    #[error("action space for {role} has {actual} actions, expected {expected}: [{actions}]")]
    ActionSpaceSize {
        role: String,
        expected: usize,
        actual: usize,
        actions: String,
    },

    #[error("value `{value}` of {intent}_{slot} not found in utterance")]
    Tagging {
        intent: String,
        slot: String,
        value: String,
    },

    #[error("metric undefined: {0}")]
    UndefinedMetric(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(
        "policy file action-space fingerprint mismatch: file has {found}, expected {expected}"
    )]
    FingerprintMismatch { expected: String, found: String },

    #[error("unsupported {what} version {found} (expected {expected})")]
    Version {
        what: &'static str,
        expected: u32,
        found: u32,
    },

    #[error("agent {agent} chose action {action} outside its action space of size {n_actions}")]
    ContractViolation {
        agent: usize,
        action: usize,
        n_actions: usize,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
