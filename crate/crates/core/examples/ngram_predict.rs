// Trains the standard n-gram backends and queries them.
//
// `cargo run --example ngram_predict`

use std::path::Path;

use autosimp::corpus::{read_pairs, tokenize};
use autosimp::predictors::{
    load_model_dir, registry_from_models, save_model_dir, train_standard_backends,
    PredictionContext,
};

pub fn run_example() -> anyhow::Result<()> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let pairs = read_pairs(&data.join("medical_sample.tsv"))?;
    let models = train_standard_backends(&pairs)?;

    let ctx = PredictionContext::with_difficult(
        &tokenize("Insulin promotes the uptake of glucose by muscle and fat cells."),
        &tokenize("Insulin helps the cells take up"),
    );
    for (id, model) in &models {
        let dist = model.distribution(&ctx);
        let total: f64 = dist.iter().map(|(_, p)| p).sum();
        let top: Vec<String> = model
            .suggest(&ctx, 3)
            .entries()
            .iter()
            .map(|s| format!("{} {:.3}", s.word, s.prob))
            .collect();
        println!("{id:<10} sum={total:.6} top: {}", top.join(", "));
    }

    // models survive a save/load round trip unchanged
    let dir = tempfile::tempdir()?;
    save_model_dir(dir.path(), &models)?;
    let registry = registry_from_models(load_model_dir(dir.path())?)?;
    for (list, (_, model)) in registry.predict_all(&ctx, 5).iter().zip(&models) {
        let list = list.as_ref().map_err(|e| anyhow::anyhow!("{e}"))?;
        anyhow::ensure!(list.entries() == model.suggest(&ctx, 5).entries());
    }
    println!("reloaded {} backends", registry.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
