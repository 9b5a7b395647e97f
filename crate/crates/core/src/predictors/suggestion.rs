use std::cmp::Ordering;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Suggestion {
    pub word: String,
    pub prob: f64,
}

/// Ranked next-word candidates from one backend.
///
/// Entries are sorted by probability (descending, ties by word), words are
/// distinct and every probability lies in (0, 1].
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SuggestionList {
    pub backend_id: String,
    entries: Vec<Suggestion>,
}

pub(crate) fn rank_order(a: &(String, f64), b: &(String, f64)) -> Ordering {
    b.1.partial_cmp(&a.1)
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.0.cmp(&b.0))
}

impl SuggestionList {
    /// Builds a list from arbitrary scored words: non-positive or non-finite
    /// scores are dropped, duplicate words are merged by summing, and the
    /// result is sorted and truncated to `k`.
    pub fn from_scores<I, S>(backend_id: impl Into<String>, scores: I, k: usize) -> Self
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        let mut merged: HashMap<String, f64> = HashMap::new();
        for (word, p) in scores {
            if p.is_finite() && p > 0.0 {
                *merged.entry(word.into()).or_insert(0.0) += p;
            }
        }
        let mut ranked: Vec<(String, f64)> = merged.into_iter().collect();
        ranked.sort_by(rank_order);
        ranked.truncate(k);
        SuggestionList {
            backend_id: backend_id.into(),
            entries: ranked
                .into_iter()
                .map(|(word, prob)| Suggestion {
                    word,
                    prob: prob.min(1.0),
                })
                .collect(),
        }
    }

    pub fn empty(backend_id: impl Into<String>) -> Self {
        SuggestionList {
            backend_id: backend_id.into(),
            entries: Vec::new(),
        }
    }

    pub fn with_backend_id(mut self, id: impl Into<String>) -> Self {
        self.backend_id = id.into();
        self
    }

    pub fn entries(&self) -> &[Suggestion] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn top(&self) -> Option<&Suggestion> {
        self.entries.first()
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|s| s.word.as_str())
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries.iter().any(|s| s.word == word)
    }

    pub fn total_prob(&self) -> f64 {
        self.entries.iter().map(|s| s.prob).sum()
    }

    pub fn truncated(&self, k: usize) -> Self {
        SuggestionList {
            backend_id: self.backend_id.clone(),
            entries: self.entries.iter().take(k).cloned().collect(),
        }
    }
}
