//! JSON-over-HTTP front end.
//!
//! | route                          | body                      | reply                               |
//! |--------------------------------|---------------------------|-------------------------------------|
//! | `POST /v1/session`             | `{difficult, system_id}`  | `{session_id}`                      |
//! | `GET /v1/session/{id}`         |                           | session                             |
//! | `POST /v1/session/{id}/suggest`| `{k}`                     | `{suggestions, winner?, absent?}`   |
//! | `POST /v1/session/{id}/event`  | `{event, word?}`          | session                             |
//! | `GET /v1/systems`              |                           | `{systems}`                         |
//! | `GET /v1/health`               |                           | `{status}`                          |

use std::sync::Arc;

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{
    EventLog, ServiceConfig, ServiceError, Session, SessionEvent, SuggestResponse,
    SuggestionService,
};
use crate::predictors::{
    BackendError, PredictionContext, Predictor, RemoteRequest, RemoteResponse, RemoteSuggestion,
};

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let status = match &self {
            ServiceError::MissingSession(_) => StatusCode::NOT_FOUND,
            ServiceError::UnknownSystem(_) | ServiceError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ServiceError::Backend(_) => StatusCode::SERVICE_UNAVAILABLE,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        (status, Json(json!({ "error": self.to_string() }))).into_response()
    }
}

async fn blocking<T, F>(f: F) -> Result<T, ServiceError>
where
    T: Send + 'static,
    F: FnOnce() -> Result<T, ServiceError> + Send + 'static,
{
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ServiceError::Io(std::io::Error::other(e)))?
}

type Shared = State<Arc<SuggestionService>>;

#[derive(Debug, Deserialize)]
struct CreateBody {
    difficult: String,
    system_id: String,
}

#[derive(Debug, Serialize)]
struct Created {
    session_id: String,
}

#[derive(Debug, Deserialize)]
struct SuggestBody {
    #[serde(default = "default_k")]
    k: usize,
}

fn default_k() -> usize {
    5
}

#[derive(Debug, Deserialize)]
struct EventBody {
    event: String,
    #[serde(default)]
    word: Option<String>,
}

impl EventBody {
    fn into_event(self) -> Result<SessionEvent, ServiceError> {
        let need_word = |w: Option<String>| {
            w.filter(|w| !w.trim().is_empty()).ok_or_else(|| {
                ServiceError::BadRequest(format!("event {:?} needs a word", self.event))
            })
        };
        match self.event.as_str() {
            "accept" => Ok(SessionEvent::Accept(need_word(self.word.clone())?)),
            "type" => Ok(SessionEvent::Type(need_word(self.word.clone())?)),
            "backspace" => Ok(SessionEvent::Backspace),
            other => Err(ServiceError::BadRequest(format!("unknown event {other:?}"))),
        }
    }
}

async fn create(
    State(svc): Shared,
    Json(body): Json<CreateBody>,
) -> Result<Json<Created>, ServiceError> {
    let session = blocking(move || svc.create_session(&body.difficult, &body.system_id)).await?;
    Ok(Json(Created {
        session_id: session.session_id,
    }))
}

async fn fetch(State(svc): Shared, Path(id): Path<String>) -> Result<Json<Session>, ServiceError> {
    Ok(Json(svc.get(&id)?))
}

async fn suggest(
    State(svc): Shared,
    Path(id): Path<String>,
    Json(body): Json<SuggestBody>,
) -> Result<Json<SuggestResponse>, ServiceError> {
    Ok(Json(blocking(move || svc.suggest(&id, body.k)).await?))
}

async fn event(
    State(svc): Shared,
    Path(id): Path<String>,
    Json(body): Json<EventBody>,
) -> Result<Json<Session>, ServiceError> {
    let event = body.into_event()?;
    Ok(Json(blocking(move || svc.apply_event(&id, event)).await?))
}

async fn systems(State(svc): Shared) -> Json<serde_json::Value> {
    Json(json!({ "systems": svc.systems() }))
}

async fn health() -> Json<serde_json::Value> {
    Json(json!({ "status": "ok" }))
}

pub fn router(service: Arc<SuggestionService>) -> Router {
    Router::new()
        .route("/v1/session", post(create))
        .route("/v1/session/{id}", get(fetch))
        .route("/v1/session/{id}/suggest", post(suggest))
        .route("/v1/session/{id}/event", post(event))
        .route("/v1/systems", get(systems))
        .route("/v1/health", get(health))
        .with_state(service)
}

/// Serves any predictor over the remote-backend protocol
/// (`POST /v1/predict`).
pub fn predictor_router(backend_id: &str, predictor: Arc<dyn Predictor>) -> Router {
    let id = backend_id.to_string();
    Router::new().route(
        "/v1/predict",
        post(move |Json(req): Json<RemoteRequest>| {
            let (id, predictor) = (id.clone(), predictor.clone());
            async move {
                let ctx = PredictionContext::new(req.difficult, req.typed);
                let result =
                    tokio::task::spawn_blocking(move || predictor.predict(&ctx, req.k.max(1)))
                        .await;
                match result {
                    Ok(Ok(list)) => Json(RemoteResponse {
                        backend_id: id,
                        suggestions: list
                            .entries()
                            .iter()
                            .map(|s| RemoteSuggestion {
                                word: s.word.clone(),
                                prob: s.prob,
                            })
                            .collect(),
                    })
                    .into_response(),
                    Ok(Err(BackendError::Unavailable { reason, .. })) => (
                        StatusCode::SERVICE_UNAVAILABLE,
                        Json(json!({ "error": reason })),
                    )
                        .into_response(),
                    Err(e) => (StatusCode::INTERNAL_SERVER_ERROR, e.to_string()).into_response(),
                }
            }
        }),
    )
}

pub async fn serve(listener: tokio::net::TcpListener, app: Router) -> std::io::Result<()> {
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

/// Builds the service from `config`, binds, prints the bound address and
/// serves until interrupted.
pub fn run_server(config: &ServiceConfig) -> anyhow::Result<()> {
    let workbench = Arc::new(config.build_workbench()?);
    let service = match &config.event_log {
        Some(path) => SuggestionService::restore(workbench, EventLog::open(path)?)?,
        None => SuggestionService::new(workbench, EventLog::in_memory()),
    };
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(&config.bind).await?;
        println!("listening on http://{}", listener.local_addr()?);
        use std::io::Write;
        std::io::stdout().flush()?;
        serve(listener, router(Arc::new(service))).await?;
        Ok(())
    })
}
