use std::sync::Arc;

use super::{
    context_rng, extract_features, majority_vote, score_4cc, score_automets, select_multi,
    select_single, EnsembleConfig, EnsembleError, SelectorKind, SelectorModel, TaskObservation,
};
use crate::predictors::{
    BackendError, BackendRegistry, PredictionContext, Suggestion, SuggestionList,
};

pub const MAJORITY_VOTE: &str = "majority-vote";
pub const FOUR_CLASS: &str = "4cc";
pub const AUTOMETS: &str = "automets";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemKind {
    Backend(usize),
    MajorityVote,
    FourClass,
    AutoMeTS,
}

/// Every backend's answer for one context, plus the selector features.
#[derive(Debug, Clone)]
pub struct Observation {
    pub per_backend: Vec<Result<SuggestionList, BackendError>>,
    pub features: Vec<f64>,
}

impl Observation {
    pub fn lists(&self) -> Vec<Option<&SuggestionList>> {
        self.per_backend.iter().map(|r| r.as_ref().ok()).collect()
    }

    pub fn top1(&self) -> Vec<Option<(&str, f64)>> {
        self.lists()
            .into_iter()
            .map(|l| l.and_then(|l| l.top()).map(|s| (s.word.as_str(), s.prob)))
            .collect()
    }

    pub fn to_task_observation(&self) -> TaskObservation {
        TaskObservation {
            features: self.features.clone(),
            top1: self
                .top1()
                .into_iter()
                .map(|t| t.map(|(w, p)| (w.to_string(), p)))
                .collect(),
        }
    }
}

/// What a system answered for one context.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemOutput {
    pub system_id: String,
    /// The single suggested word, if any backend produced output.
    pub word: Option<String>,
    /// Ranked pick list; the first entry is `word`.
    pub suggestions: Vec<Suggestion>,
    /// Backends the output is attributed to.
    pub winners: Vec<String>,
    /// Backends that failed to answer.
    pub absent: Vec<String>,
}

impl SystemOutput {
    pub fn ranked_words(&self) -> Vec<String> {
        self.suggestions.iter().map(|s| s.word.clone()).collect()
    }
}

/// Backends, ensemble settings and trained selectors: everything needed to
/// run any named system.
#[derive(Debug, Clone)]
pub struct Workbench {
    pub registry: BackendRegistry,
    pub config: EnsembleConfig,
    four_class: Option<Arc<SelectorModel>>,
    multilabel: Option<Arc<SelectorModel>>,
}

impl Workbench {
    pub fn new(registry: BackendRegistry, config: EnsembleConfig) -> Result<Self, EnsembleError> {
        config.validate()?;
        Ok(Workbench {
            registry,
            config,
            four_class: None,
            multilabel: None,
        })
    }

    /// Attaches a trained selector; its kind decides which system it serves.
    pub fn with_selector(mut self, model: SelectorModel) -> Result<Self, EnsembleError> {
        model.check_registry(&self.registry.ids())?;
        let expected = super::feature_len(self.registry.len());
        if model.feature_dim() != expected {
            return Err(EnsembleError::DimensionMismatch {
                expected,
                got: model.feature_dim(),
            });
        }
        match model.kind {
            SelectorKind::SingleLabel => self.four_class = Some(Arc::new(model)),
            SelectorKind::MultiLabel => self.multilabel = Some(Arc::new(model)),
        }
        Ok(self)
    }

    pub fn selector(&self, kind: SelectorKind) -> Option<&SelectorModel> {
        match kind {
            SelectorKind::SingleLabel => self.four_class.as_deref(),
            SelectorKind::MultiLabel => self.multilabel.as_deref(),
        }
    }

    /// Systems runnable with the current selectors: each backend, then the
    /// ensembles.
    pub fn system_ids(&self) -> Vec<String> {
        let mut ids = self.registry.ids();
        ids.push(MAJORITY_VOTE.to_string());
        if self.four_class.is_some() {
            ids.push(FOUR_CLASS.to_string());
        }
        if self.multilabel.is_some() {
            ids.push(AUTOMETS.to_string());
        }
        ids
    }

    pub fn resolve(&self, system_id: &str) -> Result<SystemKind, EnsembleError> {
        if let Some(i) = self.registry.index_of(system_id) {
            return Ok(SystemKind::Backend(i));
        }
        match system_id {
            MAJORITY_VOTE => Ok(SystemKind::MajorityVote),
            FOUR_CLASS if self.four_class.is_some() => Ok(SystemKind::FourClass),
            AUTOMETS if self.multilabel.is_some() => Ok(SystemKind::AutoMeTS),
            FOUR_CLASS | AUTOMETS => Err(EnsembleError::MissingSelector(system_id.to_string())),
            other => Err(EnsembleError::UnknownSystem(other.to_string())),
        }
    }

    pub fn is_ensemble(&self, system_id: &str) -> bool {
        !matches!(self.resolve(system_id), Ok(SystemKind::Backend(_)))
    }

    /// Queries all backends once with a pool deep enough for voting and a
    /// `k`-long pick list.
    pub fn observe(&self, ctx: &PredictionContext, k: usize) -> Observation {
        let depth = k.max(self.config.vote_pool_k);
        let per_backend = self.registry.predict_all(ctx, depth);
        let lists: Vec<Option<&SuggestionList>> =
            per_backend.iter().map(|r| r.as_ref().ok()).collect();
        let features = extract_features(ctx, &lists);
        Observation {
            per_backend,
            features,
        }
    }

    fn absent(&self, obs: &Observation) -> Vec<String> {
        obs.per_backend
            .iter()
            .zip(self.registry.ids())
            .filter(|(r, _)| r.is_err())
            .map(|(_, id)| id)
            .collect()
    }

    fn backend_output(
        &self,
        system_id: &str,
        index: usize,
        obs: &Observation,
        k: usize,
        absent: Vec<String>,
    ) -> SystemOutput {
        let id = self
            .registry
            .get(index)
            .map(|b| b.id.clone())
            .unwrap_or_default();
        let list = obs.per_backend[index].as_ref().ok();
        let suggestions: Vec<Suggestion> =
            list.map_or_else(Vec::new, |l| l.entries().iter().take(k).cloned().collect());
        SystemOutput {
            system_id: system_id.to_string(),
            word: suggestions.first().map(|s| s.word.clone()),
            suggestions,
            winners: if list.is_some_and(|l| !l.is_empty()) {
                vec![id]
            } else {
                Vec::new()
            },
            absent,
        }
    }

    /// Runs `system_id` on an existing observation.
    pub fn decide(
        &self,
        system_id: &str,
        ctx: &PredictionContext,
        obs: &Observation,
        k: usize,
    ) -> Result<SystemOutput, EnsembleError> {
        let absent = self.absent(obs);
        let ids = self.registry.ids();
        match self.resolve(system_id)? {
            SystemKind::Backend(i) => {
                if let Err(e) = &obs.per_backend[i] {
                    return Err(EnsembleError::Backend(e.clone()));
                }
                Ok(self.backend_output(system_id, i, obs, k, absent))
            }
            SystemKind::MajorityVote => {
                let mut rng = context_rng(self.config.rng_seed, ctx);
                let vote = majority_vote(&obs.lists(), &self.config, &mut rng)?;
                Ok(SystemOutput {
                    system_id: system_id.to_string(),
                    word: Some(vote.word),
                    suggestions: vote.ranked.into_iter().take(k).collect(),
                    winners: vote.backends.iter().map(|&i| ids[i].clone()).collect(),
                    absent,
                })
            }
            SystemKind::FourClass => {
                let model = self.four_class.as_deref().expect("resolved");
                let s = select_single(model, &obs.features)?;
                let (_, winner) =
                    score_4cc(&obs.top1(), s, &self.config).ok_or(EnsembleError::NoSuggestion)?;
                Ok(self.backend_output(system_id, winner, obs, k, absent))
            }
            SystemKind::AutoMeTS => {
                let model = self.multilabel.as_deref().expect("resolved");
                let ls = select_multi(model, &obs.features)?;
                let (_, winner) = score_automets(&obs.top1(), &ls, &self.config)
                    .ok_or(EnsembleError::NoSuggestion)?;
                Ok(self.backend_output(system_id, winner, obs, k, absent))
            }
        }
    }

    pub fn run(
        &self,
        system_id: &str,
        ctx: &PredictionContext,
        k: usize,
    ) -> Result<SystemOutput, EnsembleError> {
        self.resolve(system_id)?;
        let obs = self.observe(ctx, k);
        self.decide(system_id, ctx, &obs, k)
    }
}
