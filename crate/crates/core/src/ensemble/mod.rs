//! Combining several backends into one suggestion.
//!
//! Three strategies are provided: a majority vote over pooled top-k lists,
//! a single-label selector ("4CC") whose chosen backend receives a fixed
//! score bonus, and a multi-label selector ("AutoMeTS") that predicts which
//! backends are likely correct and gives each of them a smaller bonus.

mod data;
mod features;
mod scoring;
mod selector;
mod system;
mod vote;

pub use data::{
    generate_4cc_data, generate_multilabel_data, Label, SelectorExample, TaskObservation,
};
pub use features::{extract_features, feature_len, FEATURE_LAYOUT_VERSION};
pub use scoring::{score_4cc, score_automets};
pub use selector::{
    loss_and_gradient, select_multi, select_single, train_selector, train_selector_traced,
    SelectorKind, SelectorModel, SelectorParams, TrainingConfig,
};
pub use system::{
    Observation, SystemKind, SystemOutput, Workbench, AUTOMETS, FOUR_CLASS, MAJORITY_VOTE,
};
pub use vote::{majority_vote, VoteOutcome};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::predictors::{BackendError, PredictionContext};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnsembleConfig {
    /// Weight of backend confidence in the single-label score.
    pub alpha: f64,
    /// Weight of the selected-backend indicator in the single-label score.
    pub theta: f64,
    /// Weight of backend confidence in the multi-label score.
    pub beta: f64,
    /// Weight of the membership bonus in the multi-label score.
    pub sigma: f64,
    /// Bonus awarded to backends in the predicted label set.
    pub membership_bonus: f64,
    /// Suggestions taken from each backend for majority voting.
    pub vote_pool_k: usize,
    pub rng_seed: u64,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        EnsembleConfig {
            alpha: 0.5,
            theta: 0.5,
            beta: 0.5,
            sigma: 0.5,
            membership_bonus: 0.25,
            vote_pool_k: 5,
            rng_seed: 0,
        }
    }
}

impl EnsembleConfig {
    pub fn validate(&self) -> Result<(), EnsembleError> {
        let weights = [
            self.alpha,
            self.theta,
            self.beta,
            self.sigma,
            self.membership_bonus,
        ];
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(EnsembleError::InvalidConfig(
                "weights must be finite and non-negative".into(),
            ));
        }
        if self.vote_pool_k == 0 {
            return Err(EnsembleError::InvalidConfig(
                "vote_pool_k must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum EnsembleError {
    #[error("no backend produced a suggestion")]
    NoSuggestion,
    #[error("cannot train a selector on an empty training set")]
    EmptyTrainingSet,
    #[error("feature dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("example labels do not match selector kind {0:?}")]
    LabelMismatch(SelectorKind),
    #[error("selector was trained for backends {expected:?}, registry has {got:?}")]
    RegistryMismatch {
        expected: Vec<String>,
        got: Vec<String>,
    },
    #[error("unknown system {0:?}")]
    UnknownSystem(String),
    #[error("system {0:?} needs a trained selector")]
    MissingSelector(String),
    #[error("invalid ensemble configuration: {0}")]
    InvalidConfig(String),
    #[error("selector file: {0}")]
    Format(String),
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn fnv1a(bytes: &[u8], mut hash: u64) -> u64 {
    for b in bytes {
        hash ^= u64::from(*b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// RNG for tie-breaking whose stream depends only on `seed` and the
/// context, so results do not depend on evaluation order.
pub fn context_rng(seed: u64, ctx: &PredictionContext) -> ChaCha8Rng {
    let mut h = fnv1a(&seed.to_le_bytes(), 0xcbf2_9ce4_8422_2325);
    for (tag, tokens) in [
        (1u8, ctx.difficult.as_deref().unwrap_or(&[])),
        (2u8, &ctx.typed[..]),
    ] {
        h = fnv1a(&[tag], h);
        for t in tokens {
            h = fnv1a(t.as_bytes(), h);
            h = fnv1a(&[0], h);
        }
    }
    ChaCha8Rng::seed_from_u64(h)
}
