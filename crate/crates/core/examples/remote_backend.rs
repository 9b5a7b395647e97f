// Serves an n-gram model over HTTP and uses it as a remote backend next to
// a native one. A dead endpoint shows up as an absent backend.
//
// `cargo run --example remote_backend`

use std::sync::Arc;
use std::time::Duration;

use autosimp::corpus::{read_pairs, tokenize};
use autosimp::ensemble::{EnsembleConfig, Workbench, MAJORITY_VOTE};
use autosimp::predictors::{
    train_standard_backends, Backend, BackendRegistry, PredictionContext, Predictor, RemoteBackend,
};
use autosimp::service::predictor_router;

pub fn run_example() -> anyhow::Result<()> {
    let data = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let mut models = train_standard_backends(&read_pairs(&data.join("medical_sample.tsv"))?)?;
    let (remote_id, remote_model) = models.remove(0);
    let (local_id, local_model) = models.remove(0);

    let runtime = tokio::runtime::Runtime::new()?;
    let listener = runtime.block_on(tokio::net::TcpListener::bind("127.0.0.1:0"))?;
    let addr = listener.local_addr()?;
    let app = predictor_router(&remote_id, Arc::new(remote_model));
    runtime.spawn(async move { axum::serve(listener, app).await });

    let endpoint = format!("http://{addr}");
    let registry = BackendRegistry::new(vec![
        Backend::new(
            remote_id.clone(),
            Arc::new(RemoteBackend::new(&endpoint, Duration::from_secs(2))),
        ),
        Backend::new(local_id, Arc::new(local_model)),
        Backend::new(
            "offline",
            Arc::new(RemoteBackend::new(
                "http://127.0.0.1:9",
                Duration::from_millis(200),
            )),
        ),
    ])?;
    let ctx = PredictionContext::with_difficult(
        &tokenize("Insulin promotes the uptake of glucose by muscle cells."),
        &tokenize("Insulin helps the"),
    );

    let direct = RemoteBackend::new(&endpoint, Duration::from_secs(2)).predict(&ctx, 3)?;
    println!(
        "{remote_id} over http: {:?}",
        direct.words().collect::<Vec<_>>()
    );

    let workbench = Workbench::new(registry, EnsembleConfig::default())?;
    let out = workbench.run(MAJORITY_VOTE, &ctx, 5)?;
    println!("vote: {:?} absent: {:?}", out.word, out.absent);
    anyhow::ensure!(out.absent == ["offline"]);
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
