// Majority vote, 4CC and AutoMeTS over the n-gram backends.
//
// `cargo run --example ensemble_selection`

use std::path::Path;

use autosimp::corpus::{read_pairs, split_dataset, tokenize, SplitRatios};
use autosimp::ensemble::{EnsembleConfig, SelectorKind, TrainingConfig, Workbench};
use autosimp::evaluation::{fit_selector, generate_all_tasks};
use autosimp::predictors::{registry_from_models, train_standard_backends, PredictionContext};

pub fn run_example() -> anyhow::Result<()> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let pairs = read_pairs(&data.join("medical_sample.tsv"))?;
    let split = split_dataset(&pairs, SplitRatios::default(), 3)?;

    let registry = registry_from_models(train_standard_backends(&split.train)?)?;
    let mut workbench = Workbench::new(registry, EnsembleConfig::default())?;
    let dev_tasks = generate_all_tasks(&split.dev);
    let cfg = TrainingConfig::default();
    for kind in [SelectorKind::SingleLabel, SelectorKind::MultiLabel] {
        let model = fit_selector(&workbench, &dev_tasks, kind, &cfg)?;
        workbench = workbench.with_selector(model)?;
    }

    let ctx = PredictionContext::with_difficult(
        &tokenize("The kidney filters waste products from the blood and regulates blood pressure."),
        &tokenize("The kidney cleans the"),
    );
    for system in workbench.system_ids() {
        let out = workbench.run(&system, &ctx, 5)?;
        let words = out.ranked_words();
        println!(
            "{system:<14} {:<10} winners={:?} [{}]",
            out.word.as_deref().unwrap_or("-"),
            out.winners,
            words.join(" ")
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
