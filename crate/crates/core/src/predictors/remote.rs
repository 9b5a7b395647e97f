//! Client for out-of-process backends.
//!
//! `POST {endpoint}/v1/predict` with
//! `{"difficult": [..] | null, "typed": [..], "k": n}` and expects
//! `{"backend_id": "..", "suggestions": [{"word": "..", "prob": p}]}`.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{is_reserved, BackendError, PredictionContext, Predictor, SuggestionList};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemoteRequest {
    pub difficult: Option<Vec<String>>,
    pub typed: Vec<String>,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemoteSuggestion {
    pub word: String,
    pub prob: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemoteResponse {
    pub backend_id: String,
    pub suggestions: Vec<RemoteSuggestion>,
}

impl RemoteResponse {
    /// Checks the payload and converts it into a well-formed list: entries are
    /// re-sorted, duplicates merged, and probabilities scaled down when they
    /// sum past 1.
    pub fn into_suggestions(self, k: usize) -> Result<SuggestionList, String> {
        let mut total = 0.0;
        for s in &self.suggestions {
            if s.word.trim().is_empty() || s.word.chars().any(char::is_whitespace) {
                return Err(format!("invalid word {:?}", s.word));
            }
            if !s.prob.is_finite() || s.prob < 0.0 {
                return Err(format!("invalid probability {} for {:?}", s.prob, s.word));
            }
            total += s.prob;
        }
        let scale = if total > 1.0 { 1.0 / total } else { 1.0 };
        Ok(SuggestionList::from_scores(
            self.backend_id,
            self.suggestions
                .into_iter()
                .filter(|s| !is_reserved(&s.word))
                .map(|s| (s.word, s.prob * scale)),
            k,
        ))
    }
}

fn predict_url(endpoint: &str) -> String {
    let base = endpoint.trim_end_matches('/');
    if base.ends_with("/v1/predict") {
        base.to_string()
    } else {
        format!("{base}/v1/predict")
    }
}

#[derive(Debug, Clone)]
pub struct RemoteBackend {
    endpoint: String,
    timeout: Duration,
    agent: ureq::Agent,
}

impl RemoteBackend {
    pub fn new(endpoint: impl Into<String>, timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .build()
            .into();
        RemoteBackend {
            endpoint: endpoint.into(),
            timeout,
            agent,
        }
    }

    pub fn endpoint(&self) -> &str {
        &self.endpoint
    }

    pub fn timeout(&self) -> Duration {
        self.timeout
    }

    fn unavailable(&self, reason: impl Into<String>) -> BackendError {
        BackendError::Unavailable {
            backend: self.endpoint.clone(),
            reason: reason.into(),
        }
    }
}

impl Predictor for RemoteBackend {
    fn predict(&self, ctx: &PredictionContext, k: usize) -> Result<SuggestionList, BackendError> {
        let request = RemoteRequest {
            difficult: ctx.difficult.clone(),
            typed: ctx.typed.clone(),
            k,
        };
        let mut response = self
            .agent
            .post(predict_url(&self.endpoint))
            .send_json(&request)
            .map_err(|e| self.unavailable(e.to_string()))?;
        let body: RemoteResponse = response
            .body_mut()
            .read_json()
            .map_err(|e| self.unavailable(format!("malformed response: {e}")))?;
        body.into_suggestions(k)
            .map_err(|e| self.unavailable(format!("malformed response: {e}")))
    }
}

/// One-shot remote query.
pub fn remote_predict(
    endpoint: &str,
    ctx: &PredictionContext,
    k: usize,
    timeout: Duration,
) -> Result<SuggestionList, BackendError> {
    RemoteBackend::new(endpoint, timeout).predict(ctx, k)
}
