//! Editing sessions and the append-only event log behind them.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::ServiceError;
use crate::corpus::tokenize;
use crate::ensemble::{EnsembleError, Workbench};
use crate::predictors::{PredictionContext, Suggestion};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Session {
    pub session_id: String,
    pub difficult: Vec<String>,
    pub typed: Vec<String>,
    pub system_id: String,
    /// Milliseconds since the Unix epoch.
    pub created_at: u64,
    pub updated_at: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Create,
    Suggest,
    Accept,
    Type,
    Backspace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventLogRecord {
    pub session_id: String,
    pub event: EventKind,
    pub payload: serde_json::Value,
    pub timestamp: u64,
}

/// An edit to a session's typed text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SessionEvent {
    /// A suggestion was picked; the word is appended as one token.
    Accept(String),
    /// The user typed text; it is tokenized and appended.
    Type(String),
    /// Removes the last typed token, if any.
    Backspace,
}

impl SessionEvent {
    pub fn kind(&self) -> EventKind {
        match self {
            SessionEvent::Accept(_) => EventKind::Accept,
            SessionEvent::Type(_) => EventKind::Type,
            SessionEvent::Backspace => EventKind::Backspace,
        }
    }

    fn apply(&self, typed: &mut Vec<String>) -> serde_json::Value {
        match self {
            SessionEvent::Accept(word) => {
                let word = word.trim().to_lowercase();
                typed.push(word.clone());
                json!({ "word": word })
            }
            SessionEvent::Type(text) => {
                let tokens = tokenize(text);
                typed.extend(tokens.iter().cloned());
                json!({ "word": text, "tokens": tokens })
            }
            SessionEvent::Backspace => json!({ "removed": typed.pop() }),
        }
    }
}

enum Sink {
    Memory(Vec<EventLogRecord>),
    File {
        path: PathBuf,
        writer: BufWriter<File>,
    },
}

/// Append-only JSONL event log, in memory or backed by a file.
pub struct EventLog {
    sink: Mutex<Sink>,
}

impl EventLog {
    pub fn in_memory() -> Self {
        EventLog {
            sink: Mutex::new(Sink::Memory(Vec::new())),
        }
    }

    pub fn open(path: &Path) -> std::io::Result<Self> {
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(EventLog {
            sink: Mutex::new(Sink::File {
                path: path.to_path_buf(),
                writer: BufWriter::new(file),
            }),
        })
    }

    pub fn append(&self, record: &EventLogRecord) -> std::io::Result<()> {
        let mut sink = self.sink.lock().expect("event log lock");
        match &mut *sink {
            Sink::Memory(records) => records.push(record.clone()),
            Sink::File { writer, .. } => {
                serde_json::to_writer(&mut *writer, record)?;
                writer.write_all(b"\n")?;
                writer.flush()?;
            }
        }
        Ok(())
    }

    pub fn records(&self) -> std::io::Result<Vec<EventLogRecord>> {
        let sink = self.sink.lock().expect("event log lock");
        match &*sink {
            Sink::Memory(records) => Ok(records.clone()),
            Sink::File { path, .. } => read_log(path),
        }
    }
}

pub fn read_log(path: &Path) -> std::io::Result<Vec<EventLogRecord>> {
    let mut out = Vec::new();
    for line in BufReader::new(File::open(path)?).lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(std::io::Error::other)?);
    }
    Ok(out)
}

/// Rebuilds every session from its log records.
pub fn replay(records: &[EventLogRecord]) -> HashMap<String, Session> {
    let mut sessions: HashMap<String, Session> = HashMap::new();
    for r in records {
        if r.event == EventKind::Create {
            let difficult =
                serde_json::from_value(r.payload["difficult"].clone()).unwrap_or_default();
            let system_id = r.payload["system_id"]
                .as_str()
                .unwrap_or_default()
                .to_string();
            sessions.insert(
                r.session_id.clone(),
                Session {
                    session_id: r.session_id.clone(),
                    difficult,
                    typed: Vec::new(),
                    system_id,
                    created_at: r.timestamp,
                    updated_at: r.timestamp,
                },
            );
            continue;
        }
        let Some(s) = sessions.get_mut(&r.session_id) else {
            continue;
        };
        let text = r.payload["word"].as_str().unwrap_or_default().to_string();
        let event = match r.event {
            EventKind::Accept => SessionEvent::Accept(text),
            EventKind::Type => SessionEvent::Type(text),
            EventKind::Backspace => SessionEvent::Backspace,
            EventKind::Suggest | EventKind::Create => {
                s.updated_at = r.timestamp;
                continue;
            }
        };
        event.apply(&mut s.typed);
        s.updated_at = r.timestamp;
    }
    sessions
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuggestResponse {
    pub suggestions: Vec<Suggestion>,
    /// Backend whose output was used, for ensemble systems.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub winner: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub winners: Vec<String>,
    /// Backends that did not answer in time.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub absent: Vec<String>,
}

fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_millis() as u64)
}

/// Session manager. Every request on one session runs under that session's
/// lock; different sessions proceed in parallel.
pub struct SuggestionService {
    workbench: Arc<Workbench>,
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
    log: EventLog,
    next_id: AtomicU64,
}

impl SuggestionService {
    pub fn new(workbench: Arc<Workbench>, log: EventLog) -> Self {
        SuggestionService {
            workbench,
            sessions: RwLock::new(HashMap::new()),
            log,
            next_id: AtomicU64::new(1),
        }
    }

    /// Like [`SuggestionService::new`], restoring sessions recorded in `log`.
    pub fn restore(workbench: Arc<Workbench>, log: EventLog) -> Result<Self, ServiceError> {
        let records = log.records()?;
        let restored = replay(&records);
        let next = restored
            .keys()
            .filter_map(|id| {
                id.strip_prefix("s-")
                    .and_then(|n| u64::from_str_radix(n, 16).ok())
            })
            .max()
            .map_or(1, |n| n + 1);
        let service = SuggestionService::new(workbench, log);
        service.next_id.store(next, Ordering::SeqCst);
        {
            let mut map = service.sessions.write().expect("sessions lock");
            for (id, s) in restored {
                map.insert(id, Arc::new(Mutex::new(s)));
            }
        }
        Ok(service)
    }

    pub fn workbench(&self) -> &Workbench {
        &self.workbench
    }

    pub fn systems(&self) -> Vec<String> {
        self.workbench.system_ids()
    }

    pub fn event_log(&self) -> &EventLog {
        &self.log
    }

    fn record(
        &self,
        session: &mut Session,
        event: EventKind,
        payload: serde_json::Value,
    ) -> Result<(), ServiceError> {
        let timestamp = now_ms().max(session.updated_at);
        session.updated_at = timestamp;
        self.log.append(&EventLogRecord {
            session_id: session.session_id.clone(),
            event,
            payload,
            timestamp,
        })?;
        Ok(())
    }

    fn handle(&self, id: &str) -> Result<Arc<Mutex<Session>>, ServiceError> {
        self.sessions
            .read()
            .expect("sessions lock")
            .get(id)
            .cloned()
            .ok_or_else(|| ServiceError::MissingSession(id.to_string()))
    }

    pub fn create_session(
        &self,
        difficult_raw: &str,
        system_id: &str,
    ) -> Result<Session, ServiceError> {
        self.workbench.resolve(system_id).map_err(|e| match e {
            EnsembleError::UnknownSystem(s) | EnsembleError::MissingSelector(s) => {
                ServiceError::UnknownSystem(s)
            }
            other => ServiceError::Ensemble(other),
        })?;
        let n = self.next_id.fetch_add(1, Ordering::SeqCst);
        let now = now_ms();
        let mut session = Session {
            session_id: format!("s-{n:08x}"),
            difficult: tokenize(difficult_raw),
            typed: Vec::new(),
            system_id: system_id.to_string(),
            created_at: now,
            updated_at: now,
        };
        let payload = json!({ "difficult": session.difficult, "system_id": system_id });
        self.record(&mut session, EventKind::Create, payload)?;
        self.sessions.write().expect("sessions lock").insert(
            session.session_id.clone(),
            Arc::new(Mutex::new(session.clone())),
        );
        Ok(session)
    }

    pub fn get(&self, id: &str) -> Result<Session, ServiceError> {
        Ok(self.handle(id)?.lock().expect("session lock").clone())
    }

    pub fn suggest(&self, id: &str, k: usize) -> Result<SuggestResponse, ServiceError> {
        let handle = self.handle(id)?;
        let mut session = handle.lock().expect("session lock");
        let ctx = PredictionContext::with_difficult(&session.difficult, &session.typed);
        let output = self.workbench.run(&session.system_id, &ctx, k.max(1))?;
        let ensemble = self.workbench.is_ensemble(&session.system_id);
        let response = SuggestResponse {
            suggestions: output.suggestions,
            winner: if ensemble {
                output.winners.first().cloned()
            } else {
                None
            },
            winners: if ensemble { output.winners } else { Vec::new() },
            absent: output.absent,
        };
        let words: Vec<&str> = response
            .suggestions
            .iter()
            .map(|s| s.word.as_str())
            .collect();
        let payload = json!({
            "k": k,
            "typed": session.typed,
            "words": words,
            "winner": response.winner,
        });
        self.record(&mut session, EventKind::Suggest, payload)?;
        Ok(response)
    }

    pub fn apply_event(&self, id: &str, event: SessionEvent) -> Result<Session, ServiceError> {
        let handle = self.handle(id)?;
        let mut session = handle.lock().expect("session lock");
        let payload = event.apply(&mut session.typed);
        self.record(&mut session, event.kind(), payload)?;
        Ok(session.clone())
    }
}
