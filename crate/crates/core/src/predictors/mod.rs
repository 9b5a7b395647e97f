//! Next-word prediction backends.
//!
//! Every backend implements [`Predictor`] and returns a normalized, ranked
//! [`SuggestionList`]. Native backends are interpolated n-gram models with a
//! copy bias toward the difficult sentence; remote backends speak a small
//! JSON protocol so neural models can be attached out of process.

mod ngram;
mod registry;
mod remote;
mod store;
mod suggestion;

pub use ngram::{training_sequences, ContextMode, NGramConfig, NGramModel};
pub use registry::{standard_backends, Backend, BackendRegistry, BackendSpec};
pub use remote::{remote_predict, RemoteBackend, RemoteRequest, RemoteResponse, RemoteSuggestion};
pub use store::{
    load_model_dir, registry_from_models, save_model_dir, train_standard_backends, MANIFEST_FILE,
};
pub use suggestion::{Suggestion, SuggestionList};

pub(crate) use suggestion::rank_order;

pub const BOS: &str = "<s>";
pub const EOS: &str = "</s>";
pub const UNK: &str = "<unk>";
pub const SEP: &str = "[SEP]";

/// Tokens that can carry probability mass but are never offered to a user.
pub fn is_reserved(word: &str) -> bool {
    matches!(word, BOS | EOS | UNK | SEP)
}

/// What a predictor conditions on: the sentence being simplified (when
/// available) and the words typed so far.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PredictionContext {
    pub difficult: Option<Vec<String>>,
    pub typed: Vec<String>,
}

impl PredictionContext {
    pub fn new(difficult: Option<Vec<String>>, typed: Vec<String>) -> Self {
        PredictionContext { difficult, typed }
    }

    pub fn with_difficult(difficult: &[String], typed: &[String]) -> Self {
        PredictionContext {
            difficult: Some(difficult.to_vec()),
            typed: typed.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BackendError {
    #[error("backend {backend} unavailable: {reason}")]
    Unavailable { backend: String, reason: String },
}

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("cannot train on an empty corpus")]
    EmptyCorpus,
    #[error("invalid model configuration: {0}")]
    InvalidConfig(String),
    #[error("model file line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("duplicate backend id {0:?}")]
    DuplicateBackend(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub trait Predictor: Send + Sync {
    fn predict(&self, ctx: &PredictionContext, k: usize) -> Result<SuggestionList, BackendError>;
}
