//! Interactive suggestion service: sessions, per-keystroke suggestions and
//! an event log that can be replayed into selector training data.

mod config;
mod http;
mod session;

pub use config::{BackendConfig, ServiceConfig};
pub use http::{predictor_router, router, run_server, serve};
pub use session::{
    read_log, replay, EventKind, EventLog, EventLogRecord, Session, SessionEvent, SuggestResponse,
    SuggestionService,
};

use crate::ensemble::EnsembleError;
use crate::predictors::{BackendError, ModelError};

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error("no session {0:?}")]
    MissingSession(String),
    #[error("unknown system {0:?}")]
    UnknownSystem(String),
    #[error("bad request: {0}")]
    BadRequest(String),
    #[error(transparent)]
    Backend(BackendError),
    #[error(transparent)]
    Ensemble(EnsembleError),
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<EnsembleError> for ServiceError {
    fn from(e: EnsembleError) -> Self {
        match e {
            EnsembleError::Backend(b) => ServiceError::Backend(b),
            EnsembleError::UnknownSystem(s) => ServiceError::UnknownSystem(s),
            other => ServiceError::Ensemble(other),
        }
    }
}
