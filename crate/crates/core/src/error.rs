use std::path::PathBuf;

use thiserror::Error;

use crate::catalog::AttributeType;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed file {path}: {message}")]
    MalformedFile { path: PathBuf, message: String },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("unknown region `{0}`")]
    UnknownRegion(String),

    #[error("attribute `{attribute}` is not declared for {domain}")]
    UnknownAttribute { attribute: AttributeType, domain: String },

    #[error("unknown concept `{0}`")]
    UnknownConcept(String),

    #[error("value `{value}` is not in the value space of `{attribute}`")]
    UnknownValue { attribute: AttributeType, value: String },

    #[error("phrase `{0}` is not a registered surface form")]
    UnknownSurfaceForm(String),

    #[error("preference clauses mix attribute types `{0}` and `{1}`")]
    MixedAttributeTypes(AttributeType, AttributeType),

    #[error("preference clause list is empty")]
    NoPreferenceClauses,

    #[error("scene `{0}` has no items")]
    EmptyScene(String),

    #[error("customer cannot name a truthful dislike for any attribute")]
    NoTruthfulConcept,

    #[error("inconsistent session state: {0}")]
    InconsistentState(String),

    #[error("no template for act `{0}`")]
    MissingTemplate(String),

    #[error("task mismatch: {0}")]
    TaskMismatch(String),

    #[error("unknown act name `{0}`")]
    UnknownActName(String),

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("bad split ratios: {0}")]
    BadRatios(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn malformed(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        Error::MalformedFile { path: path.into(), message: message.to_string() }
    }
}
