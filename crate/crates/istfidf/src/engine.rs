//! The streaming engine: corpus state plus the pairwise similarity store,
//! driven chunk by chunk.

use serde::{Deserialize, Serialize};

use crate::batch::BatchResult;
use crate::corpus::{ChunkSummary, Corpus, Weighting};
use crate::similarity::{cosine, SimilarityStore, UpdateReport};
use crate::text::TermCounts;
use crate::{DocId, Error};

/// Corpus statistics and the similarity store, advanced together one chunk
/// at a time. A chunk application requires exclusive access; reads between
/// chunk applications may run from any number of threads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Engine {
    corpus: Corpus,
    similarities: SimilarityStore,
}

impl Engine {
    pub fn new(weighting: Weighting) -> Self {
        Self {
            corpus: Corpus::new(weighting),
            similarities: SimilarityStore::new(),
        }
    }

    pub fn corpus(&self) -> &Corpus {
        &self.corpus
    }

    pub fn similarities(&self) -> &SimilarityStore {
        &self.similarities
    }

    /// Apply a chunk to the corpus without touching the similarity store.
    pub fn apply_chunk(&mut self, chunk: Vec<(DocId, TermCounts)>) -> Result<ChunkSummary, Error> {
        self.corpus.apply_chunk(chunk)
    }

    /// Recompute the similarity of every pair affected by `summary`.
    pub fn update_similarities(&mut self, summary: &ChunkSummary) -> Result<UpdateReport, Error> {
        self.similarities.update(&self.corpus, summary)
    }

    /// Apply a chunk and immediately refresh the affected pairs.
    pub fn ingest(
        &mut self,
        chunk: Vec<(DocId, TermCounts)>,
    ) -> Result<(ChunkSummary, UpdateReport), Error> {
        let summary = self.corpus.apply_chunk(chunk)?;
        let report = self.similarities.update(&self.corpus, &summary)?;
        Ok((summary, report))
    }

    /// Cosine of the current TF-IDF vectors of two documents.
    pub fn cosine(&self, doc_a: &DocId, doc_b: &DocId) -> Result<f64, Error> {
        cosine(&self.corpus, doc_a, doc_b)
    }

    /// Stored similarity and the version it was computed at;
    /// `(0, current version)` for never-stored pairs.
    pub fn similarity(&self, doc_a: &DocId, doc_b: &DocId) -> Result<(f64, u64), Error> {
        self.similarities.get(&self.corpus, doc_a, doc_b)
    }

    /// Recompute every intersecting pair at the current version.
    pub fn refresh_all(&mut self) -> u64 {
        self.similarities.refresh_all(&self.corpus)
    }

    /// Maximum deviation of the store from a batch result over the same
    /// corpus.
    pub fn staleness_audit(&self, oracle: &BatchResult) -> Result<f64, Error> {
        self.similarities.staleness_audit(&self.corpus, oracle)
    }
}
