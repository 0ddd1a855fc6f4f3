//! Ground-truth batch TF-IDF and all-pairs cosine over an accumulated
//! corpus.
//!
//! Everything here is recomputed from scratch on each call — document
//! frequencies, N, weights, and the intersecting-pair set — independently
//! of the incremental bookkeeping, so agreement tests between the two
//! paths are meaningful. The cost is quadratic in intersecting pairs; this
//! is a baseline and a correctness oracle, not a production path.

use std::collections::{BTreeMap, BTreeSet};

use crate::bipartite::DocPair;
use crate::corpus::Weighting;
use crate::text::TermCounts;
use crate::{DocId, Error};

/// Output of a batch pass: per-document sparse weight vectors and the
/// cosine of every pair with a nonempty term intersection (and no others).
#[derive(Debug, Clone, PartialEq)]
pub struct BatchResult {
    pub weights: BTreeMap<DocId, BTreeMap<String, f64>>,
    pub similarities: BTreeMap<DocPair, f64>,
}

fn validate(corpus: &[(DocId, TermCounts)]) -> Result<(), Error> {
    let mut seen = BTreeSet::new();
    for (id, counts) in corpus {
        if counts.is_empty() {
            return Err(Error::EmptyCounts(id.clone()));
        }
        if !seen.insert(id.clone()) {
            return Err(Error::DuplicateDoc(id.clone()));
        }
    }
    Ok(())
}

/// Recompute N, document frequencies, and every TF-IDF weight from scratch.
pub fn batch_tfidf(
    corpus: &[(DocId, TermCounts)],
    weighting: Weighting,
) -> Result<BTreeMap<DocId, BTreeMap<String, f64>>, Error> {
    validate(corpus)?;
    let n_docs = corpus.len();

    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for (_, counts) in corpus {
        for term in counts.terms() {
            *df.entry(term).or_insert(0) += 1;
        }
    }

    let mut weights = BTreeMap::new();
    for (id, counts) in corpus {
        let vector: BTreeMap<String, f64> = counts
            .iter()
            .map(|(term, count)| {
                let tf = weighting.tf(count, counts.total());
                let idf = weighting.idf(n_docs, df[term]);
                (term.to_owned(), tf * idf)
            })
            .collect();
        weights.insert(id.clone(), vector);
    }
    Ok(weights)
}

/// Batch weights plus the cosine of every intersecting document pair,
/// found via a term-grouped inverted pass.
pub fn batch_all_pairs(
    corpus: &[(DocId, TermCounts)],
    weighting: Weighting,
) -> Result<BatchResult, Error> {
    let weights = batch_tfidf(corpus, weighting)?;

    let mut postings: BTreeMap<&str, Vec<&DocId>> = BTreeMap::new();
    for (id, counts) in corpus {
        for term in counts.terms() {
            postings.entry(term).or_default().push(id);
        }
    }

    let mut intersecting = BTreeSet::new();
    for docs in postings.values() {
        for (i, a) in docs.iter().enumerate() {
            for b in &docs[i + 1..] {
                if let Some(pair) = DocPair::new((*a).clone(), (*b).clone()) {
                    intersecting.insert(pair);
                }
            }
        }
    }

    let mut similarities = BTreeMap::new();
    for pair in intersecting {
        let a = &weights[pair.first()];
        let b = &weights[pair.second()];
        similarities.insert(pair, cosine_of(a, b));
    }

    Ok(BatchResult {
        weights,
        similarities,
    })
}

fn cosine_of(a: &BTreeMap<String, f64>, b: &BTreeMap<String, f64>) -> f64 {
    let norm_a = norm_of(a);
    let norm_b = norm_of(b);
    if norm_a == 0.0 || norm_b == 0.0 {
        return 0.0;
    }
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let mut dot = 0.0;
    for (term, w_small) in small {
        if let Some(w_large) = large.get(term) {
            dot += w_small * w_large;
        }
    }
    dot / (norm_a * norm_b)
}

fn norm_of(vector: &BTreeMap<String, f64>) -> f64 {
    vector.values().map(|w| w * w).sum::<f64>().sqrt()
}
