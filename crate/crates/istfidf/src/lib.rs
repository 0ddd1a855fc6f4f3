//! Incremental sparse TF-IDF and incremental cosine similarity for streaming
//! text corpora.
//!
//! The engine keeps raw term counts and document frequencies up to date as
//! chunks of text arrive, and recomputes cosine similarity only for the
//! document pairs reachable through a bipartite word–document index from the
//! terms touched by the latest chunk. TF-IDF weights are evaluated lazily on
//! read, so every weight reflects the current corpus state without a full
//! rewrite per chunk.
//!
//! ```
//! use istfidf::{preprocess, term_counts, DocId, Engine, PipelineConfig, Weighting};
//!
//! let config = PipelineConfig::default();
//! let mut engine = Engine::new(Weighting::default());
//!
//! for (id, text) in [
//!     ("doc1", "New Amazing Truck Impact Test Dummy"),
//!     ("doc2", "Car Impact Test Dummy"),
//! ] {
//!     let counts = term_counts(&preprocess(text, &config));
//!     engine.ingest(vec![(DocId::new(id), counts)]).unwrap();
//! }
//!
//! let (value, _) = engine
//!     .similarity(&DocId::new("doc1"), &DocId::new("doc2"))
//!     .unwrap();
//! assert_eq!(value, 0.0); // every shared term appears in both documents
//! ```

pub mod batch;
pub mod bipartite;
pub mod corpus;
pub mod engine;
mod error;
pub mod similarity;
pub mod stream;
pub mod text;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use batch::{batch_all_pairs, batch_tfidf, BatchResult};
pub use bipartite::{BipartiteIndex, DocPair};
pub use corpus::{ChunkSummary, Corpus, Document, Weighting};
pub use engine::Engine;
pub use error::Error;
pub use similarity::{cosine, SimilarityEntry, SimilarityStore, UpdateReport};
pub use stream::{
    checkpoint, chunk_by_day, read_records, read_records_file, restore, Snapshot, SnapshotMetrics,
    StreamDriver, StreamMode, StreamRecord,
};
pub use text::{preprocess, term_counts, PipelineConfig, Stoplist, TermCounts, TokenList};

/// Document identifier. Pairs of ids are ordered by the string's natural
/// (lexicographic) order, which fixes the canonical form of [`DocPair`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DocId(String);

impl DocId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for DocId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for DocId {
    fn from(id: &str) -> Self {
        Self(id.to_owned())
    }
}

impl From<String> for DocId {
    fn from(id: String) -> Self {
        Self(id)
    }
}
