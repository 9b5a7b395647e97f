use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use super::{
    BackendError, ContextMode, ModelError, NGramConfig, PredictionContext, Predictor,
    SuggestionList,
};

/// A named predictor.
#[derive(Clone)]
pub struct Backend {
    pub id: String,
    predictor: Arc<dyn Predictor>,
}

impl fmt::Debug for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Backend").field("id", &self.id).finish()
    }
}

impl Backend {
    pub fn new(id: impl Into<String>, predictor: Arc<dyn Predictor>) -> Self {
        Backend {
            id: id.into(),
            predictor,
        }
    }

    pub fn predict(
        &self,
        ctx: &PredictionContext,
        k: usize,
    ) -> Result<SuggestionList, BackendError> {
        self.predictor
            .predict(ctx, k)
            .map(|list| list.truncated(k).with_backend_id(&self.id))
    }
}

/// Backends in a fixed canonical order. Selector labels, feature slots and
/// serialized selectors all index into this order.
#[derive(Debug, Clone, Default)]
pub struct BackendRegistry {
    backends: Vec<Backend>,
}

impl BackendRegistry {
    pub fn new(backends: Vec<Backend>) -> Result<Self, ModelError> {
        let mut seen = HashSet::new();
        for b in &backends {
            if !seen.insert(b.id.clone()) {
                return Err(ModelError::DuplicateBackend(b.id.clone()));
            }
        }
        Ok(BackendRegistry { backends })
    }

    pub fn len(&self) -> usize {
        self.backends.len()
    }

    pub fn is_empty(&self) -> bool {
        self.backends.is_empty()
    }

    pub fn ids(&self) -> Vec<String> {
        self.backends.iter().map(|b| b.id.clone()).collect()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.backends.iter().position(|b| b.id == id)
    }

    pub fn get(&self, index: usize) -> Option<&Backend> {
        self.backends.get(index)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Backend> {
        self.backends.iter()
    }

    /// Queries every backend in registry order.
    pub fn predict_all(
        &self,
        ctx: &PredictionContext,
        k: usize,
    ) -> Vec<Result<SuggestionList, BackendError>> {
        self.backends.iter().map(|b| b.predict(ctx, k)).collect()
    }
}

/// Id plus training configuration of a native stand-in backend.
#[derive(Debug, Clone, PartialEq)]
pub struct BackendSpec {
    pub id: &'static str,
    pub config: NGramConfig,
}

/// The four native stand-ins, in canonical order: a context-aware trigram,
/// a context-free trigram, a strongly copying bigram and a copy-dominated
/// unigram.
pub fn standard_backends() -> Vec<BackendSpec> {
    vec![
        BackendSpec {
            id: "tri-ctx",
            config: NGramConfig::new(3, ContextMode::Concat, 0.3),
        },
        BackendSpec {
            id: "tri-plain",
            config: NGramConfig::new(3, ContextMode::NoContext, 0.0),
        },
        BackendSpec {
            id: "bi-ctx",
            config: NGramConfig::new(2, ContextMode::Concat, 0.5),
        },
        BackendSpec {
            id: "uni-ctx",
            config: NGramConfig::new(1, ContextMode::Concat, 0.7),
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predictors::NGramModel;

    #[test]
    fn rejects_duplicate_ids() {
        let m = Arc::new(
            NGramModel::train(
                &[vec!["a".into()]],
                &NGramConfig::new(1, ContextMode::NoContext, 0.0),
            )
            .unwrap(),
        );
        let reg = BackendRegistry::new(vec![
            Backend::new("x", m.clone()),
            Backend::new("x", m.clone()),
        ]);
        assert!(matches!(reg, Err(ModelError::DuplicateBackend(_))));
        let reg =
            BackendRegistry::new(vec![Backend::new("x", m.clone()), Backend::new("y", m)]).unwrap();
        assert_eq!(reg.ids(), vec!["x", "y"]);
        assert_eq!(reg.index_of("y"), Some(1));
        let out = reg.predict_all(&PredictionContext::default(), 1);
        assert_eq!(out[1].as_ref().unwrap().backend_id, "y");
    }

    #[test]
    fn standard_ids_unique() {
        let ids: HashSet<_> = standard_backends().iter().map(|s| s.id).collect();
        assert_eq!(ids.len(), 4);
    }
}
