use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// The document is not valid JSON.
    #[error("malformed notebook JSON at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    /// A required field is missing or has the wrong type.
    #[error("schema error: missing or invalid field `{field}`")]
    Schema { field: String },

    #[error("unsupported notebook format version {0} (expected 4.x)")]
    UnsupportedVersion(u64),

    #[error("notebook contains no code cells")]
    EmptyNotebook,

    #[error("resolver configuration error: {0}")]
    Config(String),

    /// The resolver backend answered, but not with a recognizable yes/no.
    #[error("unparseable resolver response for {ambiguity}: {raw:?}")]
    UnparseableResponse { ambiguity: String, raw: String },

    /// Transport failure that persisted after the retry.
    #[error("resolver request failed for {ambiguity}: {message}")]
    Transport { ambiguity: String, message: String },

    #[error("replay cache has no entry for prompt {prompt_hash}")]
    CacheMiss { prompt_hash: String },

    #[error("no resolution record for {0}")]
    IncompleteResolution(String),

    #[error("annotation mismatch: {0}")]
    AnnotationMismatch(String),

    #[error("cannot aggregate an empty set of notebook scores")]
    EmptyReport,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures that originate in the ambiguity resolver rather than
    /// in reading or analyzing the notebook.
    pub fn is_resolver_failure(&self) -> bool {
        matches!(
            self,
            Error::UnparseableResponse { .. } | Error::Transport { .. } | Error::CacheMiss { .. } | Error::Config(_)
        )
    }
}
