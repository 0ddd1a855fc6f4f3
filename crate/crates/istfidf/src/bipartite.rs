//! Two-typed graph of word nodes and document nodes.
//!
//! The index answers the first-order neighbor queries that drive incremental
//! similarity: which documents contain a term, which terms a document
//! contains, and which document pairs are reachable from a set of terms.
//! Nodes and edges are never deleted; the stream only appends.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::text::TermCounts;
use crate::{DocId, Error};

static EMPTY_DOCS: BTreeSet<DocId> = BTreeSet::new();

/// Canonically ordered unordered pair of distinct document ids (`a < b`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DocPair {
    a: DocId,
    b: DocId,
}

impl DocPair {
    /// Build the canonical pair; `None` when both ids are equal.
    pub fn new(x: DocId, y: DocId) -> Option<Self> {
        match x.cmp(&y) {
            Ordering::Less => Some(Self { a: x, b: y }),
            Ordering::Greater => Some(Self { a: y, b: x }),
            Ordering::Equal => None,
        }
    }

    /// The smaller id.
    pub fn first(&self) -> &DocId {
        &self.a
    }

    /// The larger id.
    pub fn second(&self) -> &DocId {
        &self.b
    }
}

impl fmt::Display for DocPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

/// Two-way adjacency between terms and documents with per-edge occurrence
/// counts. `doc_edges[d]` maps each term of document `d` to the number of
/// times it occurs, so the term side of the edge set carries the counts.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipartiteIndex {
    term_to_docs: BTreeMap<String, BTreeSet<DocId>>,
    doc_edges: BTreeMap<DocId, BTreeMap<String, u64>>,
}

impl BipartiteIndex {
    pub fn new() -> Self {
        Self::default()
    }

    /// Insert or increment the edges between `doc_id` and every term in
    /// `counts`. Returns the terms that had no node before this call.
    ///
    /// Empty counts are rejected: empty documents must be filtered upstream.
    pub fn upsert_edges(
        &mut self,
        doc_id: &DocId,
        counts: &TermCounts,
    ) -> Result<BTreeSet<String>, Error> {
        if counts.is_empty() {
            return Err(Error::EmptyCounts(doc_id.clone()));
        }
        let mut new_terms = BTreeSet::new();
        let edges = self.doc_edges.entry(doc_id.clone()).or_default();
        for (term, count) in counts.iter() {
            match self.term_to_docs.entry(term.to_owned()) {
                std::collections::btree_map::Entry::Vacant(entry) => {
                    new_terms.insert(term.to_owned());
                    entry.insert(BTreeSet::new()).insert(doc_id.clone());
                }
                std::collections::btree_map::Entry::Occupied(mut entry) => {
                    entry.get_mut().insert(doc_id.clone());
                }
            }
            *edges.entry(term.to_owned()).or_insert(0) += count;
        }
        Ok(new_terms)
    }

    /// Documents containing `term`; empty set when the term is absent.
    pub fn doc_neighbors(&self, term: &str) -> &BTreeSet<DocId> {
        self.term_to_docs.get(term).unwrap_or(&EMPTY_DOCS)
    }

    /// Document frequency: number of distinct documents containing `term`.
    pub fn df(&self, term: &str) -> usize {
        self.doc_neighbors(term).len()
    }

    /// Terms of a known document, with their edge counts.
    pub fn term_neighbors(&self, doc_id: &DocId) -> Result<&BTreeMap<String, u64>, Error> {
        self.doc_edges
            .get(doc_id)
            .ok_or_else(|| Error::UnknownDocument(doc_id.clone()))
    }

    /// Occurrence count on the edge `(doc_id, term)`, if the edge exists.
    pub fn edge_count(&self, doc_id: &DocId, term: &str) -> Option<u64> {
        self.doc_edges.get(doc_id)?.get(term).copied()
    }

    pub fn contains_doc(&self, doc_id: &DocId) -> bool {
        self.doc_edges.contains_key(doc_id)
    }

    pub fn contains_term(&self, term: &str) -> bool {
        self.term_to_docs.contains_key(term)
    }

    pub fn doc_count(&self) -> usize {
        self.doc_edges.len()
    }

    pub fn term_count(&self) -> usize {
        self.term_to_docs.len()
    }

    /// All canonical document pairs adjacent to at least one of `terms`:
    /// the union over each term of the pairs drawn from its neighbor set,
    /// deduplicated, with no self-pairs. A term contained in a single
    /// document contributes nothing.
    pub fn affected_pairs<'a, I>(&self, terms: I) -> BTreeSet<DocPair>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut pairs = BTreeSet::new();
        for term in terms {
            let docs: Vec<&DocId> = self.doc_neighbors(term).iter().collect();
            for (i, a) in docs.iter().enumerate() {
                for b in &docs[i + 1..] {
                    // set iteration is ordered, so *a < *b already
                    pairs.insert(DocPair {
                        a: (*a).clone(),
                        b: (*b).clone(),
                    });
                }
            }
        }
        pairs
    }

    /// Pairs enumerated before deduplication: the sum over `terms` of
    /// df·(df−1)/2. This is the raw work a pair-selection pass performs.
    pub fn generated_pair_count<'a, I>(&self, terms: I) -> u64
    where
        I: IntoIterator<Item = &'a str>,
    {
        terms
            .into_iter()
            .map(|term| {
                let df = self.df(term) as u64;
                df.saturating_sub(1) * df / 2
            })
            .sum()
    }

    /// Full-scan check of the symmetry invariant between the two adjacency
    /// directions.
    pub fn is_consistent(&self) -> bool {
        let forward = self.term_to_docs.iter().all(|(term, docs)| {
            docs.iter().all(|doc| {
                self.doc_edges
                    .get(doc)
                    .is_some_and(|edges| edges.get(term).is_some_and(|count| *count >= 1))
            })
        });
        let backward = self.doc_edges.iter().all(|(doc, edges)| {
            edges.keys().all(|term| {
                self.term_to_docs
                    .get(term)
                    .is_some_and(|docs| docs.contains(doc))
            })
        });
        forward && backward
    }
}
