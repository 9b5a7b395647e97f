// Full train / select / evaluate run with the report table and JSON.
//
// `cargo run --example evaluate_fixture`

use std::path::Path;

use autosimp::corpus::{read_pairs, split_dataset, SplitRatios};
use autosimp::ensemble::{EnsembleConfig, SelectorKind, TrainingConfig, Workbench};
use autosimp::evaluation::{evaluate, fit_selector, generate_all_tasks, render_table, EvalOptions};
use autosimp::predictors::{registry_from_models, train_standard_backends};

pub fn run_example() -> anyhow::Result<()> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let pairs = read_pairs(&data.join("medical_sample.tsv"))?;
    let split = split_dataset(&pairs, SplitRatios::default(), 11)?;

    let registry = registry_from_models(train_standard_backends(&split.train)?)?;
    let mut workbench = Workbench::new(registry, EnsembleConfig::default())?;
    let dev = generate_all_tasks(&split.dev);
    for kind in [SelectorKind::SingleLabel, SelectorKind::MultiLabel] {
        let model = fit_selector(&workbench, &dev, kind, &TrainingConfig::default())?;
        workbench = workbench.with_selector(model)?;
    }

    let test = generate_all_tasks(&split.test);
    let run = evaluate(
        &workbench,
        &test,
        &workbench.system_ids(),
        &EvalOptions::default(),
    )?;
    print!("{}", render_table(&run.reports));
    println!("{}", serde_json::to_string_pretty(&run.reports[0])?);
    for r in &run.reports {
        anyhow::ensure!(
            r.accuracy <= run.upper_bound,
            "{} above the upper bound",
            r.system_id
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
