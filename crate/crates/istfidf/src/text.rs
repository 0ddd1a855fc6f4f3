//! Text preprocessing: lowercasing, alphabetic tokenization, stopword and
//! short-token removal, and raw term counting.
//!
//! The pipeline is deterministic and purely functional: identical input text
//! and configuration always produce identical output, and the functions are
//! safe to call concurrently.

use std::collections::{BTreeMap, BTreeSet};
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

/// Bundled English stopword list (Snowball).
const BUNDLED_STOPLIST: &str = include_str!("../data/stopwords_en.txt");

/// Terms removed from every token stream.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stoplist(BTreeSet<String>);

impl Stoplist {
    /// The bundled Snowball English list.
    pub fn english() -> Self {
        Self::parse(BUNDLED_STOPLIST)
    }

    /// A stoplist that removes nothing.
    pub fn empty() -> Self {
        Self(BTreeSet::new())
    }

    /// Parse stoplist text: one term per line, UTF-8, lines starting with `#`
    /// ignored. Entries are lowercased; blank lines are skipped.
    pub fn parse(text: &str) -> Self {
        let terms = text
            .lines()
            .map(str::trim)
            .filter(|line| !line.is_empty() && !line.starts_with('#'))
            .map(str::to_lowercase)
            .collect();
        Self(terms)
    }

    /// Load a stoplist file in the [`parse`](Self::parse) format.
    pub fn from_path(path: &Path) -> io::Result<Self> {
        Ok(Self::parse(&std::fs::read_to_string(path)?))
    }

    pub fn contains(&self, term: &str) -> bool {
        self.0.contains(term)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Tokenizer settings.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    /// Terms dropped after lowercasing.
    pub stoplist: Stoplist,
    /// Minimum token length in characters; shorter tokens are dropped.
    pub min_token_len: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            stoplist: Stoplist::english(),
            min_token_len: 2,
        }
    }
}

/// Ordered sequence of normalized tokens produced by [`preprocess`].
///
/// Every token is lowercase, purely alphabetic, at least the configured
/// minimum length, and not a stoplist member.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenList(Vec<String>);

impl TokenList {
    pub fn tokens(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Concatenate the tokens with single spaces.
    pub fn join_spaced(&self) -> String {
        self.0.join(" ")
    }
}

impl<S: Into<String>> FromIterator<S> for TokenList {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        Self(iter.into_iter().map(Into::into).collect())
    }
}

impl IntoIterator for TokenList {
    type Item = String;
    type IntoIter = std::vec::IntoIter<String>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

/// Convert raw text into a normalized token list.
///
/// The text is lowercased, split on every non-alphabetic character (which
/// also removes digits and punctuation), and filtered against the stoplist
/// and the minimum token length. Token order follows the input text.
pub fn preprocess(raw_text: &str, config: &PipelineConfig) -> TokenList {
    let lowered = raw_text.to_lowercase();
    lowered
        .split(|c: char| !c.is_alphabetic())
        .filter(|token| !token.is_empty())
        .filter(|token| token.chars().count() >= config.min_token_len)
        .filter(|token| !config.stoplist.contains(token))
        .collect()
}

/// Raw term multiplicities of one document (or one document fragment).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermCounts {
    counts: BTreeMap<String, u64>,
    total: u64,
}

impl TermCounts {
    /// Count multiplicities of a normalized token list. `total` equals the
    /// token list length.
    pub fn from_tokens(tokens: &TokenList) -> Self {
        let mut counts = BTreeMap::new();
        for token in tokens.tokens() {
            *counts.entry(token.clone()).or_insert(0) += 1;
        }
        Self {
            counts,
            total: tokens.len() as u64,
        }
    }

    /// Occurrence count of `term`, 0 when absent.
    pub fn get(&self, term: &str) -> u64 {
        self.counts.get(term).copied().unwrap_or(0)
    }

    pub fn contains(&self, term: &str) -> bool {
        self.counts.contains_key(term)
    }

    /// Sum of all counts.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Number of distinct terms.
    pub fn distinct_terms(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.counts.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.counts.iter().map(|(term, count)| (term.as_str(), *count))
    }

    /// Add every count of `other` into `self`.
    pub fn merge(&mut self, other: &TermCounts) {
        for (term, count) in other.iter() {
            *self.counts.entry(term.to_owned()).or_insert(0) += count;
        }
        self.total += other.total;
    }
}

/// Zero-count entries are skipped so the "every mapped count >= 1" invariant
/// holds by construction.
impl<S: Into<String>> FromIterator<(S, u64)> for TermCounts {
    fn from_iter<I: IntoIterator<Item = (S, u64)>>(iter: I) -> Self {
        let mut counts = BTreeMap::new();
        let mut total = 0;
        for (term, count) in iter {
            if count == 0 {
                continue;
            }
            *counts.entry(term.into()).or_insert(0) += count;
            total += count;
        }
        Self { counts, total }
    }
}

/// Count multiplicities of a normalized token list.
pub fn term_counts(tokens: &TokenList) -> TermCounts {
    TermCounts::from_tokens(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tokens(list: &TokenList) -> Vec<&str> {
        list.tokens().iter().map(String::as_str).collect()
    }

    #[test]
    fn preprocess_keeps_content_words() {
        let config = PipelineConfig::default();
        let out = preprocess("Car Impact Test Dummy", &config);
        assert_eq!(tokens(&out), ["car", "impact", "test", "dummy"]);
    }

    #[test]
    fn preprocess_empty_input_yields_empty_list() {
        let out = preprocess("", &PipelineConfig::default());
        assert!(out.is_empty());
    }

    #[test]
    fn preprocess_drops_numbers_and_stopwords() {
        let config = PipelineConfig::default();
        let out = preprocess("The 3 trucks passed 42 tests", &config);
        assert_eq!(tokens(&out), ["trucks", "passed", "tests"]);
    }

    #[test]
    fn preprocess_splits_on_punctuation_and_folds_case() {
        let config = PipelineConfig::default();
        let out = preprocess("Self-driving CARS: v2.0 (beta)!", &config);
        assert_eq!(tokens(&out), ["self", "driving", "cars", "beta"]);
    }

    #[test]
    fn preprocess_drops_tokens_below_minimum_length() {
        let config = PipelineConfig {
            stoplist: Stoplist::empty(),
            min_token_len: 2,
        };
        let out = preprocess("x is a word", &config);
        assert_eq!(tokens(&out), ["is", "word"]);
    }

    #[test]
    fn preprocess_handles_unicode_case_folding() {
        let config = PipelineConfig {
            stoplist: Stoplist::empty(),
            min_token_len: 2,
        };
        let out = preprocess("ÜBER Straße", &config);
        assert_eq!(tokens(&out), ["über", "straße"]);
    }

    #[test]
    fn stoplist_parse_skips_comments_and_blanks() {
        let stoplist = Stoplist::parse("# header\nthe\n\n  and  \n# tail\nOf\n");
        assert_eq!(stoplist.len(), 3);
        assert!(stoplist.contains("the"));
        assert!(stoplist.contains("and"));
        assert!(stoplist.contains("of"));
        assert!(!stoplist.contains("# header"));
    }

    #[test]
    fn bundled_english_stoplist_has_expected_members() {
        let stoplist = Stoplist::english();
        for word in ["the", "and", "is", "of", "very"] {
            assert!(stoplist.contains(word), "missing stopword {word:?}");
        }
        for word in ["car", "truck", "impact", "test", "dummy", "new", "amazing"] {
            assert!(!stoplist.contains(word), "unexpected stopword {word:?}");
        }
    }

    #[test]
    fn term_counts_fig_snapshot() {
        let list: TokenList = ["car", "impact", "test", "dummy"].into_iter().collect();
        let counts = term_counts(&list);
        assert_eq!(counts.total(), 4);
        assert_eq!(counts.get("car"), 1);
        assert_eq!(counts.get("impact"), 1);
        assert_eq!(counts.get("test"), 1);
        assert_eq!(counts.get("dummy"), 1);
    }

    #[test]
    fn term_counts_empty_list() {
        let counts = term_counts(&TokenList::default());
        assert!(counts.is_empty());
        assert_eq!(counts.total(), 0);
    }

    #[test]
    fn term_counts_multiplicities() {
        let list: TokenList = ["test", "test", "car"].into_iter().collect();
        let counts = term_counts(&list);
        assert_eq!(counts.get("test"), 2);
        assert_eq!(counts.get("car"), 1);
        assert_eq!(counts.total(), 3);
    }

    #[test]
    fn merge_adds_counts_and_totals() {
        let mut a: TermCounts = [("truck", 1u64), ("test", 2)].into_iter().collect();
        let b: TermCounts = [("truck", 1u64), ("crash", 1)].into_iter().collect();
        a.merge(&b);
        assert_eq!(a.get("truck"), 2);
        assert_eq!(a.get("test"), 2);
        assert_eq!(a.get("crash"), 1);
        assert_eq!(a.total(), 5);
    }

    proptest! {
        #[test]
        fn preprocess_is_idempotent(raw in "\\PC{0,200}") {
            let config = PipelineConfig::default();
            let once = preprocess(&raw, &config);
            let twice = preprocess(&once.join_spaced(), &config);
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn term_counts_total_matches_token_count(raw in "[a-zA-Z0-9 ,.]{0,200}") {
            let config = PipelineConfig::default();
            let list = preprocess(&raw, &config);
            let counts = term_counts(&list);
            prop_assert_eq!(counts.total(), list.len() as u64);
            let summed: u64 = counts.iter().map(|(_, c)| c).sum();
            prop_assert_eq!(counts.total(), summed);
        }

        #[test]
        fn preprocess_output_is_normalized(raw in "\\PC{0,200}") {
            let config = PipelineConfig::default();
            for token in preprocess(&raw, &config).tokens() {
                prop_assert!(token.chars().all(char::is_alphabetic));
                prop_assert!(token.chars().count() >= config.min_token_len);
                prop_assert!(!config.stoplist.contains(token));
            }
        }
    }
}
