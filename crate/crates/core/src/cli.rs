//! Command-line entry point: corpus extraction and splitting, backend and
//! selector training, evaluation, and serving.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::corpus::{
    apply_exclusions, filter_medical, read_exclusions, read_pairs, split_dataset, write_pairs,
    Dictionary, SplitRatios, DEFAULT_MIN_MATCHES, DEFAULT_THRESHOLD,
};
use crate::ensemble::{EnsembleConfig, SelectorKind, SelectorModel, TrainingConfig, Workbench};
use crate::evaluation::{evaluate, fit_selector, generate_all_tasks, render_table, EvalOptions};
use crate::predictors::{
    load_model_dir, registry_from_models, save_model_dir, train_standard_backends,
};
use crate::service::{run_server, ServiceConfig};

#[derive(Debug, Parser)]
#[command(
    name = "autosimp",
    version,
    about = "Next-word suggestions for text simplification"
)]
pub struct Cli {
    /// Seed for every random choice (splits, tie-breaking, selector
    /// training). Defaults to 0; for `serve` it overrides the config file.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Keep sentence pairs whose title and difficult sentence both match enough dictionary terms.
    Extract(ExtractArgs),
    /// Shuffle and split a corpus into train/dev/test files.
    Split(SplitArgs),
    /// Train the native backends on a corpus.
    TrainLm(TrainLmArgs),
    /// Train a model selector on the backends' outcomes.
    TrainSelector(TrainSelectorArgs),
    /// Score backends and ensembles on a corpus.
    Eval(EvalArgs),
    /// Run the HTTP suggestion service.
    Serve(ServeArgs),
}

#[derive(Debug, Args, serde::Serialize)]
pub struct ExtractArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub dictionary: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    pub threshold: f64,
    #[arg(long, default_value_t = DEFAULT_MIN_MATCHES)]
    pub min_matches: usize,
    /// Pair ids removed after filtering, one per line.
    #[arg(long)]
    pub exclude: Option<PathBuf>,
}

#[derive(Debug, Args, serde::Serialize)]
pub struct SplitArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = 0.70)]
    pub train: f64,
    #[arg(long, default_value_t = 0.15)]
    pub dev: f64,
    #[arg(long, default_value_t = 0.15)]
    pub test: f64,
}

#[derive(Debug, Args, serde::Serialize)]
pub struct TrainLmArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args, serde::Serialize)]
pub struct TrainSelectorArgs {
    /// `4cc` or `multilabel`.
    #[arg(long, value_parser = parse_kind)]
    pub kind: SelectorKind,
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub models: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0.05)]
    pub learning_rate: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub l2: f64,
    #[arg(long, default_value_t = 200)]
    pub epochs: usize,
    #[arg(long, default_value_t = 32)]
    pub batch_size: usize,
}

#[derive(Debug, Args, serde::Serialize)]
pub struct EvalArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub models: PathBuf,
    #[arg(long)]
    pub selector_4cc: Option<PathBuf>,
    #[arg(long)]
    pub selector_multilabel: Option<PathBuf>,
    /// Comma-separated system ids; defaults to every available system.
    #[arg(long, value_delimiter = ',')]
    pub systems: Vec<String>,
    /// Report JSON destination; the table always goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 5)]
    pub max_n: usize,
    #[arg(long, default_value_t = 20)]
    pub position_cap: usize,
}

#[derive(Debug, Args, serde::Serialize)]
pub struct ServeArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub bind: Option<String>,
    #[arg(long)]
    pub model_dir: Option<PathBuf>,
}

fn parse_kind(s: &str) -> Result<SelectorKind, String> {
    s.parse()
}

fn print_config(command: &str, seed: u64, args: &impl serde::Serialize) {
    eprintln!(
        "{}",
        json!({ "command": command, "seed": seed, "args": args })
    );
}

fn workbench(models: &Path, seed: u64) -> anyhow::Result<Workbench> {
    let registry = registry_from_models(
        load_model_dir(models)
            .with_context(|| format!("loading models from {}", models.display()))?,
    )?;
    let cfg = EnsembleConfig {
        rng_seed: seed,
        ..Default::default()
    };
    Ok(Workbench::new(registry, cfg)?)
}

fn extract(seed: u64, a: &ExtractArgs) -> anyhow::Result<()> {
    print_config("extract", seed, a);
    if a.min_matches == 0 || !(0.0..=1.0).contains(&a.threshold) {
        bail!("min-matches must be at least 1 and threshold within [0, 1]");
    }
    let pairs = read_pairs(&a.corpus).with_context(|| a.corpus.display().to_string())?;
    let dict = Dictionary::from_reader(std::io::BufReader::new(
        fs::File::open(&a.dictionary).with_context(|| a.dictionary.display().to_string())?,
    ))?;
    let mut kept = filter_medical(&pairs, &dict, a.threshold, a.min_matches);
    if let Some(path) = &a.exclude {
        kept = apply_exclusions(kept, &read_exclusions(path)?);
    }
    write_pairs(&a.out, &kept)?;
    println!("kept {} of {} pairs", kept.len(), pairs.len());
    Ok(())
}

fn split(seed: u64, a: &SplitArgs) -> anyhow::Result<()> {
    print_config("split", seed, a);
    let pairs = read_pairs(&a.corpus).with_context(|| a.corpus.display().to_string())?;
    let ratios = SplitRatios {
        train: a.train,
        dev: a.dev,
        test: a.test,
    };
    let s = split_dataset(&pairs, ratios, seed)?;
    fs::create_dir_all(&a.out_dir)?;
    for (name, part) in [("train", &s.train), ("dev", &s.dev), ("test", &s.test)] {
        write_pairs(&a.out_dir.join(format!("{name}.tsv")), part)?;
    }
    println!(
        "train {} dev {} test {}",
        s.train.len(),
        s.dev.len(),
        s.test.len()
    );
    Ok(())
}

fn train_lm(seed: u64, a: &TrainLmArgs) -> anyhow::Result<()> {
    print_config("train-lm", seed, a);
    let pairs = read_pairs(&a.corpus).with_context(|| a.corpus.display().to_string())?;
    let models = train_standard_backends(&pairs)?;
    save_model_dir(&a.out_dir, &models)?;
    for (id, m) in &models {
        println!(
            "{id}: order {} {} copy {} vocab {}",
            m.order(),
            m.context_mode(),
            m.copy_weight(),
            m.vocab().len()
        );
    }
    Ok(())
}

fn train_selector_cmd(seed: u64, a: &TrainSelectorArgs) -> anyhow::Result<()> {
    print_config("train-selector", seed, a);
    let kind = a.kind;
    let wb = workbench(&a.models, seed)?;
    let pairs = read_pairs(&a.corpus).with_context(|| a.corpus.display().to_string())?;
    let tasks = generate_all_tasks(&pairs);
    let cfg = TrainingConfig {
        learning_rate: a.learning_rate,
        l2: a.l2,
        epochs: a.epochs,
        batch_size: a.batch_size,
        seed,
    };
    let model = fit_selector(&wb, &tasks, kind, &cfg)?;
    model.save(&a.out)?;
    println!("{kind} selector trained on {} tasks", tasks.len());
    Ok(())
}

fn eval(seed: u64, a: &EvalArgs) -> anyhow::Result<()> {
    print_config("eval", seed, a);
    let mut wb = workbench(&a.models, seed)?;
    for path in [&a.selector_4cc, &a.selector_multilabel]
        .into_iter()
        .flatten()
    {
        wb = wb.with_selector(
            SelectorModel::load(path).with_context(|| path.display().to_string())?,
        )?;
    }
    let pairs = read_pairs(&a.corpus).with_context(|| a.corpus.display().to_string())?;
    let tasks = generate_all_tasks(&pairs);
    let systems = if a.systems.is_empty() {
        wb.system_ids()
    } else {
        a.systems.clone()
    };
    let opts = EvalOptions {
        max_n: a.max_n,
        position_cap: a.position_cap,
    };
    let run = evaluate(&wb, &tasks, &systems, &opts)?;
    if let Some(out) = &a.out {
        fs::write(out, serde_json::to_string_pretty(&run.reports)? + "\n")?;
    }
    print!("{}", render_table(&run.reports));
    Ok(())
}

fn serve(seed: Option<u64>, a: &ServeArgs) -> anyhow::Result<()> {
    let mut cfg = match &a.config {
        Some(path) => ServiceConfig::load(path)?,
        None => ServiceConfig::default(),
    };
    cfg.apply_env(std::env::vars())?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    if let Some(bind) = &a.bind {
        cfg.bind = bind.clone();
    }
    if let Some(dir) = &a.model_dir {
        cfg.model_dir = Some(dir.clone());
    }
    print_config("serve", cfg.seed, &cfg);
    run_server(&cfg)
}

pub fn execute(cli: &Cli) -> anyhow::Result<()> {
    let seed = cli.seed.unwrap_or(0);
    match &cli.command {
        Command::Extract(a) => extract(seed, a),
        Command::Split(a) => split(seed, a),
        Command::TrainLm(a) => train_lm(seed, a),
        Command::TrainSelector(a) => train_selector_cmd(seed, a),
        Command::Eval(a) => eval(seed, a),
        Command::Serve(a) => serve(cli.seed, a),
    }
}

/// Parses `argv` and runs the command. Returns 0 on success, 2 for usage
/// errors and 1 for failures while running.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}
