//! Incremental cosine similarity: a store of pairwise cosines that is
//! refreshed per chunk for exactly the affected pairs.
//!
//! A pair is affected by a chunk when both documents contain at least one
//! term the chunk touched; those pairs are found through the bipartite
//! index. Pairs not adjacent to any touched term keep their stored value,
//! so idf drift leaves them stale until a later chunk or a full refresh
//! touches them — `computed_at` records the version of each value and
//! [`SimilarityStore::staleness_audit`] measures the drift against the
//! batch oracle.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::batch::BatchResult;
use crate::bipartite::DocPair;
use crate::corpus::{ChunkSummary, Corpus, Document};
use crate::{DocId, Error};

/// A stored similarity value and the corpus version at which it was computed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimilarityEntry {
    pub value: f64,
    pub computed_at: u64,
}

/// Work counts of one similarity update.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct UpdateReport {
    /// Distinct pairs whose cosine was recomputed.
    pub recomputed_pairs: u64,
    /// Pairs enumerated across touched terms before deduplication.
    pub generated_pairs: u64,
}

/// Cosine similarity of the current TF-IDF vectors of two documents,
/// computed over the shared-term intersection.
///
/// Conventions for degenerate vectors: when either norm is zero the result
/// is 0 for distinct documents; a self-comparison is 1 when the norm is
/// positive and 0 otherwise.
pub fn cosine(corpus: &Corpus, doc_a: &DocId, doc_b: &DocId) -> Result<f64, Error> {
    let a = corpus
        .document(doc_a)
        .ok_or_else(|| Error::UnknownDocument(doc_a.clone()))?;
    let b = corpus
        .document(doc_b)
        .ok_or_else(|| Error::UnknownDocument(doc_b.clone()))?;

    if doc_a == doc_b {
        return Ok(if vector_norm(corpus, a) > 0.0 { 1.0 } else { 0.0 });
    }

    let norm_a = vector_norm(corpus, a);
    let norm_b = vector_norm(corpus, b);
    if norm_a == 0.0 || norm_b == 0.0 {
        return Ok(0.0);
    }

    // iterate the shorter term list, probing the other document's counts
    let (small, large) = if a.counts().distinct_terms() <= b.counts().distinct_terms() {
        (a, b)
    } else {
        (b, a)
    };
    let mut dot = 0.0;
    for (term, _) in small.counts().iter() {
        if large.counts().contains(term) {
            dot += doc_weight(corpus, small, term) * doc_weight(corpus, large, term);
        }
    }
    Ok(dot / (norm_a * norm_b))
}

fn doc_weight(corpus: &Corpus, doc: &Document, term: &str) -> f64 {
    let weighting = corpus.weighting();
    let tf = weighting.tf(doc.counts().get(term), doc.counts().total());
    let idf = weighting.idf(corpus.n_docs(), corpus.index().df(term));
    tf * idf
}

/// Euclidean norm of the document's current TF-IDF vector, recomputed from
/// scratch on every call so stored similarities never depend on cached
/// norms.
fn vector_norm(corpus: &Corpus, doc: &Document) -> f64 {
    let mut sum = 0.0;
    for (term, _) in doc.counts().iter() {
        let w = doc_weight(corpus, doc, term);
        sum += w * w;
    }
    sum.sqrt()
}

/// A document's weight vector and norm materialized once per update pass.
///
/// Entries mirror [`cosine`] term for term in the same sorted order, so a
/// cosine computed from two profiles is bit-identical to the uncached
/// reference path, not merely within tolerance.
struct Profile<'a> {
    weights: Vec<(&'a str, f64)>,
    norm: f64,
}

fn profile<'a>(corpus: &'a Corpus, doc: &'a Document) -> Profile<'a> {
    let weighting = corpus.weighting();
    let n_docs = corpus.n_docs();
    let total = doc.counts().total();
    let mut weights = Vec::with_capacity(doc.counts().distinct_terms());
    let mut norm_sq = 0.0;
    for (term, count) in doc.counts().iter() {
        let w = weighting.tf(count, total) * weighting.idf(n_docs, corpus.index().df(term));
        norm_sq += w * w;
        weights.push((term, w));
    }
    Profile {
        weights,
        norm: norm_sq.sqrt(),
    }
}

fn cosine_from_profiles(first: &Profile<'_>, second: &Profile<'_>) -> f64 {
    if first.norm == 0.0 || second.norm == 0.0 {
        return 0.0;
    }
    let (small, large) = if first.weights.len() <= second.weights.len() {
        (first, second)
    } else {
        (second, first)
    };
    // merge join over the sorted term lists; summands appear in the same
    // order as the reference path's probe over the smaller document
    let mut dot = 0.0;
    let (mut i, mut j) = (0, 0);
    while i < small.weights.len() && j < large.weights.len() {
        match small.weights[i].0.cmp(large.weights[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                dot += small.weights[i].1 * large.weights[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    dot / (first.norm * second.norm)
}

/// Per-pass memo of document profiles keyed by id.
struct ProfileCache<'a> {
    corpus: &'a Corpus,
    profiles: BTreeMap<&'a DocId, Profile<'a>>,
}

impl<'a> ProfileCache<'a> {
    fn new(corpus: &'a Corpus) -> Self {
        Self {
            corpus,
            profiles: BTreeMap::new(),
        }
    }

    fn ensure(&mut self, doc_id: &DocId) -> Result<(), Error> {
        if self.profiles.contains_key(doc_id) {
            return Ok(());
        }
        let doc = self
            .corpus
            .document(doc_id)
            .ok_or_else(|| Error::UnknownDocument(doc_id.clone()))?;
        self.profiles.insert(doc.id(), profile(self.corpus, doc));
        Ok(())
    }

    fn cosine(&mut self, pair: &DocPair) -> Result<f64, Error> {
        self.ensure(pair.first())?;
        self.ensure(pair.second())?;
        let first = &self.profiles[pair.first()];
        let second = &self.profiles[pair.second()];
        Ok(cosine_from_profiles(first, second))
    }
}

/// Mapping from unordered document pair to its last computed cosine.
///
/// Pairs whose value was 0 when first seen are not stored: a pair with an
/// empty term intersection is implicitly 0, and storing explicit zeros
/// would grow the store past the genuinely similar pairs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SimilarityStore {
    pairs: BTreeMap<DocPair, SimilarityEntry>,
}

impl SimilarityStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&DocPair, &SimilarityEntry)> {
        self.pairs.iter()
    }

    /// The stored entry for a pair, if any.
    pub fn entry(&self, pair: &DocPair) -> Option<&SimilarityEntry> {
        self.pairs.get(pair)
    }

    /// Recompute the cosine of every pair affected by the chunk described in
    /// `summary` and store it at the summary's version. No other entry is
    /// modified. The summary must belong to the corpus's current version.
    pub fn update(&mut self, corpus: &Corpus, summary: &ChunkSummary) -> Result<UpdateReport, Error> {
        if summary.version() != corpus.version() {
            return Err(Error::VersionMismatch {
                expected: corpus.version(),
                got: summary.version(),
            });
        }
        let touched = summary.touched_terms();
        let affected = corpus
            .index()
            .affected_pairs(touched.iter().map(String::as_str));
        let generated = corpus
            .index()
            .generated_pair_count(touched.iter().map(String::as_str));

        let mut cache = ProfileCache::new(corpus);
        let mut recomputed = 0;
        for pair in affected {
            let value = cache.cosine(&pair)?;
            recomputed += 1;
            self.store(pair, value, summary.version());
        }
        Ok(UpdateReport {
            recomputed_pairs: recomputed,
            generated_pairs: generated,
        })
    }

    fn store(&mut self, pair: DocPair, value: f64, version: u64) {
        if value == 0.0 && !self.pairs.contains_key(&pair) {
            return;
        }
        self.pairs.insert(
            pair,
            SimilarityEntry {
                value,
                computed_at: version,
            },
        );
    }

    /// The stored similarity of a pair of known documents, or
    /// `(0, current version)` when the pair was never stored.
    ///
    /// A self-pair is never tracked by the store and reports
    /// `(0, current version)` as well; use [`cosine`] for the identity value.
    pub fn get(&self, corpus: &Corpus, doc_a: &DocId, doc_b: &DocId) -> Result<(f64, u64), Error> {
        for id in [doc_a, doc_b] {
            if !corpus.contains_doc(id) {
                return Err(Error::UnknownDocument(id.clone()));
            }
        }
        let entry = DocPair::new(doc_a.clone(), doc_b.clone())
            .and_then(|pair| self.pairs.get(&pair).copied());
        Ok(match entry {
            Some(e) => (e.value, e.computed_at),
            None => (0.0, corpus.version()),
        })
    }

    /// Recompute every pair of documents with a nonempty term intersection
    /// at the current version, returning the number of recomputed pairs.
    /// Afterwards the store agrees with the batch oracle on every pair.
    pub fn refresh_all(&mut self, corpus: &Corpus) -> u64 {
        let all_terms: Vec<&str> = corpus
            .documents()
            .flat_map(|d| d.counts().terms())
            .collect();
        let intersecting = corpus.index().affected_pairs(all_terms);
        let version = corpus.version();
        let mut cache = ProfileCache::new(corpus);
        let mut recomputed = 0;
        for pair in intersecting {
            let value = cache
                .cosine(&pair)
                .expect("pair ids originate from the corpus");
            recomputed += 1;
            self.store(pair, value, version);
        }
        recomputed
    }

    /// Maximum absolute deviation between the stored-or-implicit similarity
    /// of every document pair and the batch oracle's value. The oracle must
    /// cover exactly the corpus's document set.
    pub fn staleness_audit(&self, corpus: &Corpus, oracle: &BatchResult) -> Result<f64, Error> {
        if oracle.weights.len() != corpus.n_docs()
            || !oracle.weights.keys().all(|id| corpus.contains_doc(id))
        {
            return Err(Error::CorpusMismatch);
        }
        let pairs: BTreeSet<&DocPair> = self
            .pairs
            .keys()
            .chain(oracle.similarities.keys())
            .collect();
        let mut max_deviation = 0.0f64;
        for pair in pairs {
            let stored = self.pairs.get(pair).map_or(0.0, |e| e.value);
            let exact = oracle.similarities.get(pair).copied().unwrap_or(0.0);
            max_deviation = max_deviation.max((stored - exact).abs());
        }
        Ok(max_deviation)
    }
}

// The pair map is serialized as a sorted sequence of (pair, entry) tuples;
// JSON object keys cannot carry structured pair keys.
impl Serialize for SimilarityStore {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.pairs.iter())
    }
}

impl<'de> Deserialize<'de> for SimilarityStore {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let entries = Vec::<(DocPair, SimilarityEntry)>::deserialize(deserializer)?;
        Ok(Self {
            pairs: entries.into_iter().collect(),
        })
    }
}
