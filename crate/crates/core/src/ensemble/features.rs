//! Selector input features.
//!
//! Layout (`B` = number of backends):
//!
//! | slot        | meaning                                                  |
//! |-------------|----------------------------------------------------------|
//! | 0           | words typed so far                                       |
//! | 1           | difficult sentence length                                |
//! | 2..6        | one-hot difficult length bucket                          |
//! | 6           | distinct typed words also in the difficult sentence / max(1, typed) |
//! | 7..7+B      | top-1 probability of each backend (0 when unavailable)   |
//! | 7+B         | number of backends whose top-1 is the plurality top-1    |
//! | 8+B         | constant 1.0                                             |

use std::collections::{BTreeMap, HashSet};

use crate::evaluation::{bucket_by_length, LengthBucket};
use crate::predictors::{PredictionContext, SuggestionList};

pub const FEATURE_LAYOUT_VERSION: u32 = 1;

pub fn feature_len(num_backends: usize) -> usize {
    9 + num_backends
}

pub fn extract_features(
    ctx: &PredictionContext,
    per_backend: &[Option<&SuggestionList>],
) -> Vec<f64> {
    let difficult = ctx.difficult.as_deref().unwrap_or(&[]);
    let mut f = Vec::with_capacity(feature_len(per_backend.len()));
    f.push(ctx.typed.len() as f64);
    f.push(difficult.len() as f64);
    let bucket = bucket_by_length(difficult.len());
    f.extend(
        LengthBucket::ALL
            .iter()
            .map(|b| if *b == bucket { 1.0 } else { 0.0 }),
    );

    let difficult_set: HashSet<&str> = difficult.iter().map(String::as_str).collect();
    let typed_set: HashSet<&str> = ctx.typed.iter().map(String::as_str).collect();
    let shared = typed_set.intersection(&difficult_set).count();
    f.push(shared as f64 / ctx.typed.len().max(1) as f64);

    let tops: Vec<Option<&str>> = per_backend
        .iter()
        .map(|l| l.and_then(|l| l.top()).map(|s| s.word.as_str()))
        .collect();
    f.extend(
        per_backend
            .iter()
            .map(|l| l.and_then(|l| l.top()).map_or(0.0, |s| s.prob)),
    );
    let mut votes: BTreeMap<&str, usize> = BTreeMap::new();
    for w in tops.iter().flatten() {
        *votes.entry(w).or_insert(0) += 1;
    }
    f.push(votes.values().copied().max().unwrap_or(0) as f64);
    f.push(1.0);
    f
}
