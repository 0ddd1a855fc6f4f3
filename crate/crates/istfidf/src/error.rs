use thiserror::Error;

use crate::DocId;

/// Errors surfaced by the engine, the batch oracle, and the stream driver.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown document id: {0}")]
    UnknownDocument(DocId),

    #[error("unknown term: {0:?}")]
    UnknownTerm(String),

    #[error("empty term counts for document {0}; empty documents must be filtered upstream")]
    EmptyCounts(DocId),

    #[error("chunk contains no documents")]
    EmptyChunk,

    #[error("duplicate document id within one chunk: {0}")]
    DuplicateDocInChunk(DocId),

    #[error("duplicate document id in corpus: {0}")]
    DuplicateDoc(DocId),

    #[error("chunk summary version {got} does not match corpus version {expected}")]
    VersionMismatch { expected: u64, got: u64 },

    #[error("batch result covers a different document set than the corpus")]
    CorpusMismatch,

    #[error("record stream is empty")]
    EmptyStream,

    #[error("invalid record at line {line}: {reason}")]
    InvalidRecord { line: usize, reason: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed checkpoint: {0}")]
    CheckpointFormat(String),

    #[error("checkpoint format version {found} is not supported (expected {expected})")]
    CheckpointVersion { expected: u32, found: u32 },
}
