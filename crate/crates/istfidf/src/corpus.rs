//! Corpus statistics and lazily evaluated TF-IDF weights.
//!
//! The corpus stores raw term counts per document and keeps the bipartite
//! index in sync as chunks are applied. Weights are computed on read from
//! the current counts, document frequencies, and document total, so a read
//! is always exact with respect to the latest applied chunk: a new document
//! changes N and therefore every idf, and recomputing on read avoids a full
//! stored-weight rewrite per chunk.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::bipartite::BipartiteIndex;
use crate::text::TermCounts;
use crate::{DocId, Error};

/// TF-IDF weighting variant shared by the lazy reads and the batch oracle.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Weighting {
    /// tf = count / document length, idf = log2(N / df).
    #[default]
    RelativeFreqLog2,
}

impl Weighting {
    pub fn tf(self, count: u64, doc_total: u64) -> f64 {
        match self {
            Self::RelativeFreqLog2 => count as f64 / doc_total as f64,
        }
    }

    pub fn idf(self, n_docs: usize, df: usize) -> f64 {
        match self {
            Self::RelativeFreqLog2 => (n_docs as f64 / df as f64).log2(),
        }
    }
}

/// A stored document: accumulated raw counts plus the corpus version at
/// which it was last modified.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    id: DocId,
    counts: TermCounts,
    version: u64,
}

impl Document {
    pub fn id(&self) -> &DocId {
        &self.id
    }

    pub fn counts(&self) -> &TermCounts {
        &self.counts
    }

    /// Corpus version of the last modification.
    pub fn version(&self) -> u64 {
        self.version
    }
}

/// Terms and documents touched by one applied chunk; drives affected-pair
/// selection in the similarity store.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChunkSummary {
    touched_terms: BTreeSet<String>,
    touched_docs: BTreeSet<DocId>,
    version: u64,
}

impl ChunkSummary {
    pub fn touched_terms(&self) -> &BTreeSet<String> {
        &self.touched_terms
    }

    pub fn touched_docs(&self) -> &BTreeSet<DocId> {
        &self.touched_docs
    }

    /// Corpus version assigned to the chunk.
    pub fn version(&self) -> u64 {
        self.version
    }
}

/// Evolving corpus state: the document store, the bipartite index, and a
/// version counter incremented once per applied chunk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    docs: BTreeMap<DocId, Document>,
    index: BipartiteIndex,
    version: u64,
    weighting: Weighting,
}

impl Corpus {
    pub fn new(weighting: Weighting) -> Self {
        Self {
            docs: BTreeMap::new(),
            index: BipartiteIndex::new(),
            version: 0,
            weighting,
        }
    }

    pub fn n_docs(&self) -> usize {
        self.docs.len()
    }

    pub fn version(&self) -> u64 {
        self.version
    }

    pub fn weighting(&self) -> Weighting {
        self.weighting
    }

    pub fn index(&self) -> &BipartiteIndex {
        &self.index
    }

    pub fn document(&self, doc_id: &DocId) -> Option<&Document> {
        self.docs.get(doc_id)
    }

    pub fn contains_doc(&self, doc_id: &DocId) -> bool {
        self.docs.contains_key(doc_id)
    }

    pub fn doc_ids(&self) -> impl Iterator<Item = &DocId> {
        self.docs.keys()
    }

    pub fn documents(&self) -> impl Iterator<Item = &Document> {
        self.docs.values()
    }

    /// Snapshot of the accumulated raw counts, suitable as batch-oracle input.
    pub fn accumulated_counts(&self) -> Vec<(DocId, TermCounts)> {
        self.docs
            .iter()
            .map(|(id, doc)| (id.clone(), doc.counts.clone()))
            .collect()
    }

    /// Apply one chunk of documents.
    ///
    /// New ids create documents; existing ids receive an additive merge of
    /// the incoming counts. The bipartite index is updated edge by edge and
    /// the corpus version increments by one. The whole chunk is validated
    /// before any mutation, so a rejected chunk leaves the corpus unchanged.
    pub fn apply_chunk(&mut self, chunk: Vec<(DocId, TermCounts)>) -> Result<ChunkSummary, Error> {
        if chunk.is_empty() {
            return Err(Error::EmptyChunk);
        }
        let mut seen = BTreeSet::new();
        for (id, counts) in &chunk {
            if counts.is_empty() {
                return Err(Error::EmptyCounts(id.clone()));
            }
            if !seen.insert(id.clone()) {
                return Err(Error::DuplicateDocInChunk(id.clone()));
            }
        }

        self.version += 1;
        let version = self.version;
        let mut touched_terms = BTreeSet::new();
        let mut touched_docs = BTreeSet::new();
        for (id, counts) in chunk {
            self.index.upsert_edges(&id, &counts)?;
            touched_terms.extend(counts.terms().map(str::to_owned));
            touched_docs.insert(id.clone());
            match self.docs.entry(id) {
                Entry::Occupied(mut entry) => {
                    let doc = entry.get_mut();
                    doc.counts.merge(&counts);
                    doc.version = version;
                }
                Entry::Vacant(entry) => {
                    let id = entry.key().clone();
                    entry.insert(Document {
                        id,
                        counts,
                        version,
                    });
                }
            }
        }

        Ok(ChunkSummary {
            touched_terms,
            touched_docs,
            version,
        })
    }

    /// Term frequency: occurrence count over document length; 0 for a term
    /// absent from the document.
    pub fn tf(&self, doc_id: &DocId, term: &str) -> Result<f64, Error> {
        let doc = self
            .docs
            .get(doc_id)
            .ok_or_else(|| Error::UnknownDocument(doc_id.clone()))?;
        Ok(self.weighting.tf(doc.counts.get(term), doc.counts.total()))
    }

    /// Document frequency of `term` (0 when unseen).
    pub fn df(&self, term: &str) -> usize {
        self.index.df(term)
    }

    /// Inverse document frequency of a seen term.
    pub fn idf(&self, term: &str) -> Result<f64, Error> {
        let df = self.index.df(term);
        if df == 0 {
            return Err(Error::UnknownTerm(term.to_owned()));
        }
        Ok(self.weighting.idf(self.n_docs(), df))
    }

    /// TF-IDF weight of `term` in `doc_id`, exact with respect to the
    /// current corpus state; 0 when the term is absent from the document.
    pub fn weight(&self, doc_id: &DocId, term: &str) -> Result<f64, Error> {
        let doc = self
            .docs
            .get(doc_id)
            .ok_or_else(|| Error::UnknownDocument(doc_id.clone()))?;
        let count = doc.counts.get(term);
        if count == 0 {
            return Ok(0.0);
        }
        let tf = self.weighting.tf(count, doc.counts.total());
        let idf = self.weighting.idf(self.n_docs(), self.index.df(term));
        Ok(tf * idf)
    }

    /// The document's sparse TF-IDF vector over exactly its own term set;
    /// zero-weight entries are retained.
    pub fn vector(&self, doc_id: &DocId) -> Result<BTreeMap<String, f64>, Error> {
        let doc = self
            .docs
            .get(doc_id)
            .ok_or_else(|| Error::UnknownDocument(doc_id.clone()))?;
        let n_docs = self.n_docs();
        Ok(doc
            .counts
            .iter()
            .map(|(term, count)| {
                let tf = self.weighting.tf(count, doc.counts.total());
                let idf = self.weighting.idf(n_docs, self.index.df(term));
                (term.to_owned(), tf * idf)
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(id: &str) -> DocId {
        DocId::new(id)
    }

    fn counts(pairs: &[(&str, u64)]) -> TermCounts {
        pairs.iter().map(|(t, c)| (t.to_string(), *c)).collect()
    }

    fn doc1_counts() -> TermCounts {
        counts(&[
            ("new", 1),
            ("amazing", 1),
            ("truck", 1),
            ("impact", 1),
            ("test", 1),
            ("dummy", 1),
        ])
    }

    fn doc2_counts() -> TermCounts {
        counts(&[("car", 1), ("impact", 1), ("test", 1), ("dummy", 1)])
    }

    /// Corpus after the two walkthrough snapshots.
    fn two_doc_corpus() -> Corpus {
        let mut corpus = Corpus::new(Weighting::default());
        corpus.apply_chunk(vec![(doc("doc1"), doc1_counts())]).unwrap();
        corpus.apply_chunk(vec![(doc("doc2"), doc2_counts())]).unwrap();
        corpus
    }

    fn three_doc_corpus() -> Corpus {
        let mut corpus = two_doc_corpus();
        corpus
            .apply_chunk(vec![(doc("doc3"), counts(&[("truck", 1), ("test", 1)]))])
            .unwrap();
        corpus
    }

    #[test]
    fn apply_chunk_creates_document_and_summary() {
        let mut corpus = Corpus::new(Weighting::default());
        corpus.apply_chunk(vec![(doc("doc1"), doc1_counts())]).unwrap();
        let summary = corpus.apply_chunk(vec![(doc("doc2"), doc2_counts())]).unwrap();

        assert_eq!(corpus.n_docs(), 2);
        assert_eq!(summary.version(), 2);
        let touched: Vec<_> = summary.touched_terms().iter().cloned().collect();
        assert_eq!(touched, ["car", "dummy", "impact", "test"]);
        let docs: Vec<_> = summary.touched_docs().iter().cloned().collect();
        assert_eq!(docs, [doc("doc2")]);
    }

    #[test]
    fn apply_chunk_merges_additively_into_existing_documents() {
        let mut corpus = Corpus::new(Weighting::default());
        corpus.apply_chunk(vec![(doc("doc1"), doc1_counts())]).unwrap();
        let before_total = corpus.document(&doc("doc1")).unwrap().counts().total();

        let summary = corpus
            .apply_chunk(vec![(doc("doc1"), counts(&[("truck", 1)]))])
            .unwrap();

        let document = corpus.document(&doc("doc1")).unwrap();
        assert_eq!(document.counts().get("truck"), 2);
        assert_eq!(document.counts().total(), before_total + 1);
        assert_eq!(document.version(), 2);
        let touched: Vec<_> = summary.touched_terms().iter().cloned().collect();
        assert_eq!(touched, ["truck"]);
        assert_eq!(corpus.n_docs(), 1);
    }

    #[test]
    fn split_and_merged_chunks_reach_the_same_state() {
        let mut split = Corpus::new(Weighting::default());
        split.apply_chunk(vec![(doc("doc1"), doc1_counts())]).unwrap();
        split.apply_chunk(vec![(doc("doc2"), doc2_counts())]).unwrap();

        let mut merged = Corpus::new(Weighting::default());
        merged
            .apply_chunk(vec![(doc("doc1"), doc1_counts()), (doc("doc2"), doc2_counts())])
            .unwrap();

        assert_eq!(split.docs.keys().collect::<Vec<_>>(), merged.docs.keys().collect::<Vec<_>>());
        for id in split.docs.keys() {
            assert_eq!(split.document(id).unwrap().counts(), merged.document(id).unwrap().counts());
        }
        for term in ["new", "car", "impact", "test"] {
            assert_eq!(split.df(term), merged.df(term));
        }
        assert_eq!(split.n_docs(), merged.n_docs());
    }

    #[test]
    fn apply_chunk_rejects_bad_input_without_mutating() {
        let mut corpus = two_doc_corpus();
        let before = corpus.clone();

        assert!(matches!(corpus.apply_chunk(vec![]), Err(Error::EmptyChunk)));
        assert!(matches!(
            corpus.apply_chunk(vec![(doc("doc3"), TermCounts::default())]),
            Err(Error::EmptyCounts(_))
        ));
        assert!(matches!(
            corpus.apply_chunk(vec![
                (doc("doc3"), counts(&[("truck", 1)])),
                (doc("doc3"), counts(&[("test", 1)])),
            ]),
            Err(Error::DuplicateDocInChunk(_))
        ));
        assert_eq!(corpus, before);
    }

    #[test]
    fn tf_is_count_over_length() {
        let corpus = two_doc_corpus();
        assert_eq!(corpus.tf(&doc("doc2"), "car").unwrap(), 0.25);
        assert_eq!(corpus.tf(&doc("doc2"), "truck").unwrap(), 0.0);
        let tf = corpus.tf(&doc("doc1"), "impact").unwrap();
        assert!((tf - 1.0 / 6.0).abs() < 1e-15);
        assert!(matches!(
            corpus.tf(&doc("ghost"), "car"),
            Err(Error::UnknownDocument(_))
        ));
    }

    #[test]
    fn idf_is_log2_of_inverse_document_share() {
        let corpus = two_doc_corpus();
        assert_eq!(corpus.idf("impact").unwrap(), 0.0);
        assert_eq!(corpus.idf("car").unwrap(), 1.0);
        assert!(matches!(corpus.idf("ghost"), Err(Error::UnknownTerm(_))));

        let three = three_doc_corpus();
        let idf = three.idf("truck").unwrap();
        assert!((idf - 1.5f64.log2()).abs() < 1e-15);
        assert!((idf - 0.584963).abs() < 1e-6);
    }

    #[test]
    fn weight_is_tf_times_idf() {
        let corpus = two_doc_corpus();
        assert_eq!(corpus.weight(&doc("doc2"), "car").unwrap(), 0.25);
        assert_eq!(corpus.weight(&doc("doc1"), "impact").unwrap(), 0.0);

        let three = three_doc_corpus();
        let w = three.weight(&doc("doc1"), "truck").unwrap();
        assert!((w - 0.0974938).abs() < 1e-7);
    }

    #[test]
    fn vector_covers_exactly_the_document_terms() {
        let corpus = two_doc_corpus();
        let v = corpus.vector(&doc("doc2")).unwrap();
        assert_eq!(v.len(), 4);
        assert_eq!(v["car"], 0.25);
        assert_eq!(v["impact"], 0.0);
        assert_eq!(v["test"], 0.0);
        assert_eq!(v["dummy"], 0.0);
    }

    #[test]
    fn vector_of_single_document_corpus_is_all_zero() {
        let mut corpus = Corpus::new(Weighting::default());
        corpus.apply_chunk(vec![(doc("doc1"), doc1_counts())]).unwrap();
        let v = corpus.vector(&doc("doc1")).unwrap();
        assert!(v.values().all(|w| *w == 0.0));
    }

    #[test]
    fn vector_three_document_walkthrough_values() {
        let corpus = three_doc_corpus();
        let v = corpus.vector(&doc("doc1")).unwrap();
        assert!((v["new"] - 0.264160).abs() < 1e-6);
        assert!((v["amazing"] - 0.264160).abs() < 1e-6);
        assert!((v["truck"] - 0.0974938).abs() < 1e-7);
        assert!((v["impact"] - 0.0974938).abs() < 1e-7);
        assert_eq!(v["test"], 0.0);
        assert!((v["dummy"] - 0.0974938).abs() < 1e-7);
    }

    #[test]
    fn df_matches_brute_force_count() {
        let corpus = three_doc_corpus();
        for term in ["new", "truck", "impact", "test", "car", "dummy"] {
            let brute = corpus
                .documents()
                .filter(|d| d.counts().contains(term))
                .count();
            assert_eq!(corpus.df(term), brute, "df mismatch for {term}");
        }
    }

    #[test]
    fn idf_zero_iff_term_in_every_document() {
        let corpus = three_doc_corpus();
        let terms: Vec<String> = corpus
            .documents()
            .flat_map(|d| d.counts().terms().map(str::to_owned).collect::<Vec<_>>())
            .collect();
        for term in terms {
            let idf = corpus.idf(&term).unwrap();
            let df = corpus.df(&term);
            assert_eq!(idf == 0.0, df == corpus.n_docs(), "term {term}");
        }
    }

    #[test]
    fn chunk_order_does_not_change_state() {
        let chunks = vec![
            (doc("a"), counts(&[("red", 2), ("blue", 1)])),
            (doc("b"), counts(&[("blue", 3)])),
            (doc("a"), counts(&[("green", 1)])),
        ];

        let mut forward = Corpus::new(Weighting::default());
        for chunk in chunks.clone() {
            forward.apply_chunk(vec![chunk]).unwrap();
        }

        let mut reversed = Corpus::new(Weighting::default());
        for chunk in chunks.into_iter().rev() {
            reversed.apply_chunk(vec![chunk]).unwrap();
        }

        assert_eq!(forward.n_docs(), reversed.n_docs());
        for id in [doc("a"), doc("b")] {
            assert_eq!(
                forward.document(&id).unwrap().counts(),
                reversed.document(&id).unwrap().counts()
            );
        }
        for term in ["red", "blue", "green"] {
            assert_eq!(forward.df(term), reversed.df(term));
        }
    }
}
