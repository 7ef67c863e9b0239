//! Crate-wide error type.

use crate::document::{DocumentDescriptor, FormatTag};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("empty name for {0}")]
    EmptyName(&'static str),

    #[error("span of `{target_id}` ({offset}+{length}) exceeds content length {content_len}")]
    SpanOutOfBounds {
        target_id: String,
        offset: usize,
        length: usize,
        content_len: usize,
    },

    #[error("span length must be at least 1 (target `{0}`)")]
    EmptySpan(String),

    #[error("duplicate target id `{target_id}` in layer `{layer}`")]
    DuplicateTargetId { layer: String, target_id: String },

    #[error("unsupported initial format `{0}`: initial documents are plain, kaf or tcf")]
    UnsupportedInitialFormat(FormatTag),

    #[error("document format `{document}` does not match requested serialization format `{requested}`")]
    FormatMismatch {
        document: FormatTag,
        requested: FormatTag,
    },

    #[error("document not representable in format `{format}`: {reason}")]
    UnrepresentableDocument { format: FormatTag, reason: String },

    #[error("malformed `{format}` input: {reason}")]
    MalformedInput { format: FormatTag, reason: String },

    #[error("unknown format `{0}`")]
    UnknownFormat(String),

    #[error("unknown annotation layer `{0}`")]
    UnknownLayer(String),

    #[error("signatures do not compose: `{second}` cannot follow `{first}` ({reason}); first: {first_signature}, second: {second_signature}")]
    IncomposableSignatures {
        first: String,
        second: String,
        reason: String,
        first_signature: String,
        second_signature: String,
    },

    #[error("signature violation applying `{morphism}`: {reason}")]
    SignatureViolation { morphism: String, reason: String },

    #[error("postcondition violation in `{morphism}`: {reason}")]
    PostconditionViolation { morphism: String, reason: String },

    #[error("no converter registered from `{from}` to `{to}`")]
    NoSuchConverter { from: FormatTag, to: FormatTag },

    #[error("manifest error: {0}")]
    ManifestParse(String),

    #[error("unknown builtin morphism `{0}`")]
    UnknownBuiltin(String),

    #[error("duplicate morphism id `{0}`")]
    DuplicateId(String),

    #[error("unknown morphism id `{0}`")]
    UnknownMorphism(String),

    #[error("no pipeline from {from} to {to} within {max_steps} steps (reachable: {})",
            frontier.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(", "))]
    NoPlan {
        from: DocumentDescriptor,
        to: DocumentDescriptor,
        max_steps: usize,
        frontier: Vec<DocumentDescriptor>,
    },

    #[error("registry has an empty corpus; law verification needs documents")]
    EmptyCorpus,

    #[error("pipeline step {step} (`{morphism}`) failed: {source}")]
    StepFailed {
        step: usize,
        morphism: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// The innermost error of a step-failure chain.
    pub fn root(&self) -> &Error {
        match self {
            Error::StepFailed { source, .. } => source.root(),
            other => other,
        }
    }
}
