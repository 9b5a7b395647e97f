//! Parallel simplification corpora: reading, medical-pair filtering and
//! train/dev/test splitting.

mod dictionary;
mod io;
mod split;
mod tokenize;

pub use dictionary::{
    count_term_matches, string_similarity, term_similarity, Dictionary, Term, MAX_TERM_TOKENS,
};
pub use io::{read_exclusions, read_pairs, read_pairs_from, write_pairs, write_pairs_to};
pub use split::{split_dataset, DatasetSplit, SplitRatios};
pub use tokenize::{is_punctuation, tokenize};

use std::collections::HashSet;

/// Match threshold used for corpus extraction.
pub const DEFAULT_THRESHOLD: f64 = 0.85;
/// Minimum number of term matches in both the title and difficult sentence.
pub const DEFAULT_MIN_MATCHES: usize = 4;

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("invalid dictionary term {0:?}")]
    InvalidTerm(String),
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("corpus has {0} pairs, at least 3 are needed to split")]
    TooSmall(usize),
    #[error("split ratios must be non-negative and sum to 1, got {0:?}")]
    BadRatios([f64; 3]),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// The untokenized fields a pair was read from, kept so filtered corpora can
/// be written back unchanged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawPair {
    pub title: String,
    pub difficult: String,
    pub simple: String,
}

/// An aligned (difficult, simple) sentence pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentencePair {
    pub id: String,
    pub title: Vec<String>,
    pub difficult: Vec<String>,
    pub simple: Vec<String>,
    pub raw: RawPair,
}

impl SentencePair {
    /// Builds a pair from raw text. Both sentences must tokenize to at
    /// least one token.
    pub fn new(id: &str, title: &str, difficult: &str, simple: &str) -> Result<Self, String> {
        let pair = SentencePair {
            id: id.to_string(),
            title: tokenize(title),
            difficult: tokenize(difficult),
            simple: tokenize(simple),
            raw: RawPair {
                title: title.to_string(),
                difficult: difficult.to_string(),
                simple: simple.to_string(),
            },
        };
        if pair.difficult.is_empty() {
            return Err("difficult sentence is empty".into());
        }
        if pair.simple.is_empty() {
            return Err("simple sentence is empty".into());
        }
        Ok(pair)
    }
}

/// Keeps the pairs whose title and difficult sentence each contain at least
/// `min_matches` dictionary matches at `threshold`. Order is preserved.
pub fn filter_medical(
    pairs: &[SentencePair],
    dict: &Dictionary,
    threshold: f64,
    min_matches: usize,
) -> Vec<SentencePair> {
    pairs
        .iter()
        .filter(|p| {
            dict.count_matches(&p.title, threshold) >= min_matches
                && dict.count_matches(&p.difficult, threshold) >= min_matches
        })
        .cloned()
        .collect()
}

/// Drops pairs whose id appears in the manual-review exclusion list.
pub fn apply_exclusions(pairs: Vec<SentencePair>, excluded: &HashSet<String>) -> Vec<SentencePair> {
    pairs
        .into_iter()
        .filter(|p| !excluded.contains(&p.id))
        .collect()
}
