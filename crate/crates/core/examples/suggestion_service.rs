// Drives the HTTP suggestion service the way an editor would: open a
// session, ask for suggestions, accept one, and replay the event log.
//
// `cargo run --example suggestion_service`

use std::sync::Arc;

use serde_json::{json, Value};

use autosimp::corpus::read_pairs;
use autosimp::ensemble::{EnsembleConfig, Workbench};
use autosimp::predictors::{registry_from_models, train_standard_backends};
use autosimp::service::{replay, router, EventLog, SuggestionService};

pub fn run_example() -> anyhow::Result<()> {
    let data = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let registry = registry_from_models(train_standard_backends(&read_pairs(
        &data.join("medical_sample.tsv"),
    )?)?)?;
    let workbench = Arc::new(Workbench::new(registry, EnsembleConfig::default())?);
    let log_dir = tempfile::tempdir()?;
    let log_path = log_dir.path().join("events.jsonl");
    let service = Arc::new(SuggestionService::new(
        workbench,
        EventLog::open(&log_path)?,
    ));

    let runtime = tokio::runtime::Runtime::new()?;
    let listener = runtime.block_on(tokio::net::TcpListener::bind("127.0.0.1:0"))?;
    let base = format!("http://{}", listener.local_addr()?);
    runtime.spawn(async move { axum::serve(listener, router(service)).await });

    let post = |path: &str, body: Value| -> anyhow::Result<Value> {
        Ok(ureq::post(format!("{base}{path}"))
            .send_json(&body)?
            .body_mut()
            .read_json()?)
    };
    println!(
        "systems: {}",
        ureq::get(format!("{base}/v1/systems"))
            .call()?
            .body_mut()
            .read_json::<Value>()?
    );

    let created = post(
        "/v1/session",
        json!({"difficult": "The kidney filters waste products from the blood.", "system_id": "tri-ctx"}),
    )?;
    let id = created["session_id"]
        .as_str()
        .unwrap_or_default()
        .to_string();
    post(
        &format!("/v1/session/{id}/event"),
        json!({"event": "type", "word": "The kidney"}),
    )?;
    for _ in 0..3 {
        let s = post(&format!("/v1/session/{id}/suggest"), json!({"k": 5}))?;
        let first = s["suggestions"][0]["word"]
            .as_str()
            .unwrap_or(".")
            .to_string();
        println!("suggest -> {}", s["suggestions"]);
        post(
            &format!("/v1/session/{id}/event"),
            json!({"event": "accept", "word": first}),
        )?;
    }
    let session: Value = ureq::get(format!("{base}/v1/session/{id}"))
        .call()?
        .body_mut()
        .read_json()?;
    println!("typed: {}", session["typed"]);

    let replayed = replay(&autosimp::service::read_log(&log_path)?);
    let typed: Vec<String> = serde_json::from_value(session["typed"].clone())?;
    anyhow::ensure!(
        replayed[&id].typed == typed,
        "replay disagrees with live session"
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
