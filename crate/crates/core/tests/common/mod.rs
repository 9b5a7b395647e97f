#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;

use autosimp::corpus::{read_pairs, split_dataset, SentencePair, SplitRatios};
use autosimp::ensemble::{EnsembleConfig, SelectorKind, TrainingConfig, Workbench};
use autosimp::evaluation::{bucket_by_length, fit_selector, generate_all_tasks, PredictionTask};
use autosimp::predictors::{
    registry_from_models, train_standard_backends, Backend, BackendError, BackendRegistry,
    PredictionContext, Predictor, SuggestionList,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
}

pub fn pairs(name: &str) -> Vec<SentencePair> {
    read_pairs(&data(name)).expect("fixture corpus")
}

/// Medical sample split with seed 5: backends trained on train, both
/// selectors fitted on dev.
pub struct Trained {
    pub workbench: Workbench,
    pub test_tasks: Vec<PredictionTask>,
}

pub fn trained_sample() -> Trained {
    let split = split_dataset(&pairs("medical_sample.tsv"), SplitRatios::default(), 5).unwrap();
    let registry = registry_from_models(train_standard_backends(&split.train).unwrap()).unwrap();
    let mut wb = Workbench::new(
        registry,
        EnsembleConfig {
            rng_seed: 5,
            ..Default::default()
        },
    )
    .unwrap();
    let dev = generate_all_tasks(&split.dev);
    let cfg = TrainingConfig {
        seed: 5,
        ..Default::default()
    };
    for kind in [SelectorKind::SingleLabel, SelectorKind::MultiLabel] {
        let model = fit_selector(&wb, &dev, kind, &cfg).unwrap();
        wb = wb.with_selector(model).unwrap();
    }
    Trained {
        workbench: wb,
        test_tasks: generate_all_tasks(&split.test),
    }
}

fn fnv(parts: &[&str]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for p in parts {
        for b in p.bytes().chain([0xff]) {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    }
    h
}

/// Stand-in backend that knows the answer only when the difficult
/// sentence falls in its length bucket. The fixture's simple side repeats
/// the difficult sentence, so the answer is the difficult token at the
/// typed position. Outside its bucket it proposes its own wrong word with
/// a context-hashed probability in [0.2, 0.7).
pub struct Specialist {
    pub bucket: usize,
}

impl Predictor for Specialist {
    fn predict(&self, ctx: &PredictionContext, k: usize) -> Result<SuggestionList, BackendError> {
        let d = ctx.difficult.as_deref().unwrap_or(&[]);
        let tag = format!("expert{}", self.bucket);
        let scores = if bucket_by_length(d.len()).index() == self.bucket {
            let gold = d
                .get(ctx.typed.len())
                .cloned()
                .unwrap_or_else(|| ".".into());
            vec![(gold, 0.6), (format!("{tag}-filler"), 0.1)]
        } else {
            let mut parts: Vec<&str> = d.iter().map(String::as_str).collect();
            parts.extend(ctx.typed.iter().map(String::as_str));
            parts.push(&tag);
            let p = 0.2 + 0.5 * (fnv(&parts) % 1000) as f64 / 1000.0;
            vec![(format!("{tag}-wrong"), p)]
        };
        Ok(SuggestionList::from_scores(tag, scores, k))
    }
}

pub fn specialist_registry() -> BackendRegistry {
    BackendRegistry::new(
        (0..4)
            .map(|b| {
                Backend::new(
                    format!("expert{b}"),
                    Arc::new(Specialist { bucket: b }) as Arc<dyn Predictor>,
                )
            })
            .collect(),
    )
    .unwrap()
}

/// Pairs whose simple side equals the difficult side, with difficult
/// lengths spread over the four buckets in uneven proportions.
pub fn specialization_pairs(seed: u64) -> Vec<SentencePair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let plan: [(usize, usize, usize); 4] = [(14, 3, 5), (12, 6, 15), (8, 16, 19), (6, 20, 26)];
    let mut out = Vec::new();
    for (b, (count, lo, hi)) in plan.iter().enumerate() {
        for i in 0..*count {
            let len = rng.random_range(*lo..=*hi);
            let words: Vec<String> = (0..len)
                .map(|_| format!("w{}", rng.random_range(0..40)))
                .collect();
            let text = words.join(" ");
            out.push(SentencePair::new(&format!("b{b}-{i}"), "", &text, &text).unwrap());
        }
    }
    out
}
