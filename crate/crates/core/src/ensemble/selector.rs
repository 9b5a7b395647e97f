//! Linear model selectors.
//!
//! The single-label selector is a softmax regression over backends; the
//! multi-label selector is one logistic regression per backend. Both are
//! fit by mini-batch gradient descent on standardized features with an L2
//! penalty on all parameters, applied as a proximal shrink after each step.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{EnsembleError, Label, SelectorExample, FEATURE_LAYOUT_VERSION};

const FORMAT_NAME: &str = "autosimp-selector";
const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SelectorKind {
    #[serde(rename = "4cc")]
    SingleLabel,
    #[serde(rename = "multilabel")]
    MultiLabel,
}

impl fmt::Display for SelectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SelectorKind::SingleLabel => "4cc",
            SelectorKind::MultiLabel => "multilabel",
        })
    }
}

impl FromStr for SelectorKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "4cc" | "single-label" => Ok(SelectorKind::SingleLabel),
            "multilabel" | "multi-label" => Ok(SelectorKind::MultiLabel),
            other => Err(format!("unknown selector kind {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingConfig {
    pub learning_rate: f64,
    pub l2: f64,
    pub epochs: usize,
    /// Examples per update; 0 means full batch.
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        TrainingConfig {
            learning_rate: 0.05,
            l2: 1e-4,
            epochs: 200,
            batch_size: 32,
            seed: 0,
        }
    }
}

/// Weight matrix (one row per backend) and bias vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectorParams {
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
}

impl SelectorParams {
    pub fn zeros(classes: usize, dim: usize) -> Self {
        SelectorParams {
            weights: vec![vec![0.0; dim]; classes],
            bias: vec![0.0; classes],
        }
    }

    pub fn classes(&self) -> usize {
        self.bias.len()
    }

    pub fn dim(&self) -> usize {
        self.weights.first().map_or(0, Vec::len)
    }

    pub fn flatten(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.weights.iter().flatten().copied().collect();
        v.extend(&self.bias);
        v
    }

    pub fn from_flat(classes: usize, dim: usize, flat: &[f64]) -> Self {
        assert_eq!(flat.len(), classes * (dim + 1));
        SelectorParams {
            weights: (0..classes)
                .map(|c| flat[c * dim..(c + 1) * dim].to_vec())
                .collect(),
            bias: flat[classes * dim..].to_vec(),
        }
    }

    fn logits(&self, x: &[f64]) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.bias)
            .map(|(w, b)| w.iter().zip(x).map(|(w, x)| w * x).sum::<f64>() + b)
            .collect()
    }

    fn squared_norm(&self) -> f64 {
        self.flatten().iter().map(|v| v * v).sum()
    }
}

fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn softmax(z: &[f64]) -> Vec<f64> {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exp: Vec<f64> = z.iter().map(|v| (v - max).exp()).collect();
    let sum: f64 = exp.iter().sum();
    exp.into_iter().map(|e| e / sum).collect()
}

fn targets(kind: SelectorKind, label: &Label, classes: usize) -> Result<Vec<f64>, EnsembleError> {
    match (kind, label) {
        (SelectorKind::SingleLabel, Label::Single(c)) if *c < classes => Ok((0..classes)
            .map(|i| if i == *c { 1.0 } else { 0.0 })
            .collect()),
        (SelectorKind::MultiLabel, Label::Multi(bits)) if bits.len() == classes => {
            Ok(bits.iter().map(|b| if *b { 1.0 } else { 0.0 }).collect())
        }
        _ => Err(EnsembleError::LabelMismatch(kind)),
    }
}

/// Mean data loss and its gradient over the rows in `idx`.
fn data_loss_grad(
    kind: SelectorKind,
    params: &SelectorParams,
    xs: &[Vec<f64>],
    ys: &[Vec<f64>],
    idx: &[usize],
) -> (f64, SelectorParams) {
    let mut grad = SelectorParams::zeros(params.classes(), params.dim());
    let mut loss = 0.0;
    for &i in idx {
        let (x, y) = (&xs[i], &ys[i]);
        let z = params.logits(x);
        let residual: Vec<f64> = match kind {
            SelectorKind::SingleLabel => {
                let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let lse = max + z.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
                loss += z.iter().zip(y).map(|(z, y)| y * (lse - z)).sum::<f64>();
                softmax(&z).iter().zip(y).map(|(p, y)| p - y).collect()
            }
            SelectorKind::MultiLabel => {
                loss += z
                    .iter()
                    .zip(y)
                    .map(|(z, y)| softplus(*z) - y * z)
                    .sum::<f64>();
                z.iter().zip(y).map(|(z, y)| sigmoid(*z) - y).collect()
            }
        };
        for (c, r) in residual.iter().enumerate() {
            for (g, xv) in grad.weights[c].iter_mut().zip(x) {
                *g += r * xv;
            }
            grad.bias[c] += r;
        }
    }
    let n = idx.len().max(1) as f64;
    for row in &mut grad.weights {
        row.iter_mut().for_each(|g| *g /= n);
    }
    grad.bias.iter_mut().for_each(|g| *g /= n);
    (loss / n, grad)
}

type Rows = Vec<Vec<f64>>;

fn prepare(
    kind: SelectorKind,
    examples: &[SelectorExample],
    classes: usize,
) -> Result<(Rows, Rows), EnsembleError> {
    let dim = examples.first().map_or(0, |e| e.features.len());
    let mut xs = Vec::with_capacity(examples.len());
    let mut ys = Vec::with_capacity(examples.len());
    for e in examples {
        if e.features.len() != dim {
            return Err(EnsembleError::DimensionMismatch {
                expected: dim,
                got: e.features.len(),
            });
        }
        xs.push(e.features.clone());
        ys.push(targets(kind, &e.label, classes)?);
    }
    Ok((xs, ys))
}

/// Objective `mean cross-entropy + (l2 / 2)·‖θ‖²` and its exact gradient,
/// evaluated on features as given (no standardization).
pub fn loss_and_gradient(
    kind: SelectorKind,
    params: &SelectorParams,
    examples: &[SelectorExample],
    l2: f64,
) -> Result<(f64, SelectorParams), EnsembleError> {
    let (xs, ys) = prepare(kind, examples, params.classes())?;
    if let Some(x) = xs.first() {
        if x.len() != params.dim() {
            return Err(EnsembleError::DimensionMismatch {
                expected: params.dim(),
                got: x.len(),
            });
        }
    }
    let idx: Vec<usize> = (0..xs.len()).collect();
    let (loss, mut grad) = data_loss_grad(kind, params, &xs, &ys, &idx);
    for (grow, prow) in grad.weights.iter_mut().zip(&params.weights) {
        for (g, p) in grow.iter_mut().zip(prow) {
            *g += l2 * p;
        }
    }
    for (g, p) in grad.bias.iter_mut().zip(&params.bias) {
        *g += l2 * p;
    }
    Ok((loss + 0.5 * l2 * params.squared_norm(), grad))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectorModel {
    format: String,
    version: u32,
    pub kind: SelectorKind,
    pub registry_order: Vec<String>,
    pub feature_layout_version: u32,
    pub feature_mean: Vec<f64>,
    pub feature_scale: Vec<f64>,
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
}

impl SelectorModel {
    fn params(&self) -> SelectorParams {
        SelectorParams {
            weights: self.weights.clone(),
            bias: self.bias.clone(),
        }
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_mean.len()
    }

    fn standardize(&self, features: &[f64]) -> Vec<f64> {
        features
            .iter()
            .zip(self.feature_mean.iter().zip(&self.feature_scale))
            .map(|(x, (m, s))| (x - m) / s)
            .collect()
    }

    /// Raw class (single-label) or per-backend (multi-label) scores.
    pub fn scores(&self, features: &[f64]) -> Result<Vec<f64>, EnsembleError> {
        if features.len() != self.feature_dim() {
            return Err(EnsembleError::DimensionMismatch {
                expected: self.feature_dim(),
                got: features.len(),
            });
        }
        Ok(self.params().logits(&self.standardize(features)))
    }

    /// Softmax probabilities (single-label) or per-backend sigmoids
    /// (multi-label).
    pub fn probabilities(&self, features: &[f64]) -> Result<Vec<f64>, EnsembleError> {
        let z = self.scores(features)?;
        Ok(match self.kind {
            SelectorKind::SingleLabel => softmax(&z),
            SelectorKind::MultiLabel => z.into_iter().map(sigmoid).collect(),
        })
    }

    pub fn check_registry(&self, ids: &[String]) -> Result<(), EnsembleError> {
        if self.registry_order != ids {
            return Err(EnsembleError::RegistryMismatch {
                expected: self.registry_order.clone(),
                got: ids.to_vec(),
            });
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("selector serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, EnsembleError> {
        let model: SelectorModel = serde_json::from_str(text)?;
        if model.format != FORMAT_NAME || model.version != FORMAT_VERSION {
            return Err(EnsembleError::Format(format!(
                "unsupported format {} v{}",
                model.format, model.version
            )));
        }
        if model.feature_layout_version != FEATURE_LAYOUT_VERSION {
            return Err(EnsembleError::Format(format!(
                "feature layout v{} not supported",
                model.feature_layout_version
            )));
        }
        let (c, d) = (model.registry_order.len(), model.feature_mean.len());
        if model.bias.len() != c
            || model.weights.len() != c
            || model.weights.iter().any(|r| r.len() != d)
            || model.feature_scale.len() != d
        {
            return Err(EnsembleError::Format("inconsistent shapes".into()));
        }
        Ok(model)
    }

    pub fn save(&self, path: &Path) -> Result<(), EnsembleError> {
        fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, EnsembleError> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}

/// Index of the highest-scoring backend, lowest index on ties.
pub fn select_single(model: &SelectorModel, features: &[f64]) -> Result<usize, EnsembleError> {
    let z = model.scores(features)?;
    let mut best = 0;
    for (i, v) in z.iter().enumerate() {
        if *v > z[best] {
            best = i;
        }
    }
    Ok(best)
}

/// Backends whose predicted probability of being correct is at least 0.5.
pub fn select_multi(model: &SelectorModel, features: &[f64]) -> Result<Vec<bool>, EnsembleError> {
    Ok(model
        .scores(features)?
        .into_iter()
        .map(|z| z >= 0.0)
        .collect())
}

pub fn train_selector(
    examples: &[SelectorExample],
    kind: SelectorKind,
    registry_order: &[String],
    cfg: &TrainingConfig,
) -> Result<SelectorModel, EnsembleError> {
    train_selector_traced(examples, kind, registry_order, cfg).map(|(m, _)| m)
}

/// Like [`train_selector`], also returning the full training objective
/// before the first epoch and after each epoch.
pub fn train_selector_traced(
    examples: &[SelectorExample],
    kind: SelectorKind,
    registry_order: &[String],
    cfg: &TrainingConfig,
) -> Result<(SelectorModel, Vec<f64>), EnsembleError> {
    if examples.is_empty() {
        return Err(EnsembleError::EmptyTrainingSet);
    }
    if !(cfg.learning_rate.is_finite() && cfg.learning_rate > 0.0)
        || !(cfg.l2.is_finite() && cfg.l2 >= 0.0)
    {
        return Err(EnsembleError::InvalidConfig(
            "learning rate must be positive and l2 non-negative".into(),
        ));
    }
    let classes = registry_order.len();
    let (raw, ys) = prepare(kind, examples, classes)?;
    let dim = raw[0].len();
    let n = raw.len() as f64;

    let mut mean = vec![0.0; dim];
    let mut scale = vec![1.0; dim];
    for d in 0..dim {
        let m = raw.iter().map(|x| x[d]).sum::<f64>() / n;
        let var = raw.iter().map(|x| (x[d] - m).powi(2)).sum::<f64>() / n;
        if var.sqrt() > 1e-12 {
            mean[d] = m;
            scale[d] = var.sqrt();
        }
    }
    let xs: Vec<Vec<f64>> = raw
        .iter()
        .map(|x| {
            x.iter()
                .zip(mean.iter().zip(&scale))
                .map(|(v, (m, s))| (v - m) / s)
                .collect()
        })
        .collect();

    let mut params = SelectorParams::zeros(classes, dim);
    let all: Vec<usize> = (0..xs.len()).collect();
    let objective = |p: &SelectorParams| {
        data_loss_grad(kind, p, &xs, &ys, &all).0 + 0.5 * cfg.l2 * p.squared_norm()
    };
    let mut trace = vec![objective(&params)];
    let mut order = all.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let batch = if cfg.batch_size == 0 {
        xs.len()
    } else {
        cfg.batch_size.min(xs.len())
    };
    let (lr, shrink) = (cfg.learning_rate, 1.0 / (1.0 + cfg.learning_rate * cfg.l2));
    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for chunk in order.chunks(batch) {
            let (_, g) = data_loss_grad(kind, &params, &xs, &ys, chunk);
            for (prow, grow) in params.weights.iter_mut().zip(&g.weights) {
                for (p, g) in prow.iter_mut().zip(grow) {
                    *p = (*p - lr * g) * shrink;
                }
            }
            for (p, g) in params.bias.iter_mut().zip(&g.bias) {
                *p = (*p - lr * g) * shrink;
            }
        }
        trace.push(objective(&params));
    }
    Ok((
        SelectorModel {
            format: FORMAT_NAME.to_string(),
            version: FORMAT_VERSION,
            kind,
            registry_order: registry_order.to_vec(),
            feature_layout_version: FEATURE_LAYOUT_VERSION,
            feature_mean: mean,
            feature_scale: scale,
            weights: params.weights,
            bias: params.bias,
        },
        trace,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("b{i}")).collect()
    }

    fn separable() -> Vec<SelectorExample> {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        (0..80)
            .map(|i| {
                let class = i % 2;
                let offset = if class == 0 { -1.5 } else { 1.5 };
                SelectorExample {
                    features: vec![
                        offset + rng.random_range(-1.0..1.0),
                        rng.random_range(-3.0..3.0),
                        1.0,
                    ],
                    label: Label::Single(class),
                }
            })
            .collect()
    }

    #[test]
    fn separable_fixture_fits_perfectly() {
        let data = separable();
        let cfg = TrainingConfig {
            epochs: 200,
            learning_rate: 0.05,
            l2: 0.0,
            ..Default::default()
        };
        let model = train_selector(&data, SelectorKind::SingleLabel, &ids(2), &cfg).unwrap();
        let correct = data
            .iter()
            .filter(|e| Label::Single(select_single(&model, &e.features).unwrap()) == e.label)
            .count();
        assert_eq!(correct, data.len());
    }

    #[test]
    fn heavy_l2_tends_to_uniform() {
        let data = separable();
        let cfg = TrainingConfig {
            l2: 1e6,
            epochs: 50,
            ..Default::default()
        };
        let model = train_selector(&data, SelectorKind::SingleLabel, &ids(2), &cfg).unwrap();
        assert!(model
            .weights
            .iter()
            .flatten()
            .chain(&model.bias)
            .all(|w| w.abs() < 1e-6));
        for e in &data {
            let p = model.probabilities(&e.features).unwrap();
            assert!((p[0] - 0.5).abs() < 1e-6);
        }
    }

    #[test]
    fn full_batch_loss_non_increasing() {
        let data = separable();
        for kind in [SelectorKind::SingleLabel, SelectorKind::MultiLabel] {
            let data: Vec<SelectorExample> = match kind {
                SelectorKind::SingleLabel => data.clone(),
                SelectorKind::MultiLabel => data
                    .iter()
                    .map(|e| SelectorExample {
                        features: e.features.clone(),
                        label: Label::Multi(vec![e.label == Label::Single(0), e.features[1] > 0.0]),
                    })
                    .collect(),
            };
            let cfg = TrainingConfig {
                learning_rate: 0.01,
                l2: 1e-3,
                epochs: 100,
                batch_size: 0,
                seed: 1,
            };
            let (_, trace) = train_selector_traced(&data, kind, &ids(2), &cfg).unwrap();
            for w in trace.windows(2) {
                assert!(w[1] <= w[0] + 1e-9, "{kind}: {} -> {}", w[0], w[1]);
            }
            assert!(trace.last().unwrap() < &trace[0]);
        }
    }

    #[test]
    fn all_zero_rows_train_stably() {
        let data: Vec<SelectorExample> = (0..40)
            .map(|i| SelectorExample {
                features: vec![i as f64, 1.0],
                label: Label::Multi(if i % 4 == 0 {
                    vec![true, false]
                } else {
                    vec![false, false]
                }),
            })
            .collect();
        let model = train_selector(
            &data,
            SelectorKind::MultiLabel,
            &ids(2),
            &TrainingConfig::default(),
        )
        .unwrap();
        assert!(model.weights.iter().flatten().all(|w| w.is_finite()));
        let p = model.probabilities(&[3.0, 1.0]).unwrap();
        assert!(p[1] < 0.5);
    }

    #[test]
    fn errors() {
        let cfg = TrainingConfig::default();
        assert!(matches!(
            train_selector(&[], SelectorKind::SingleLabel, &ids(2), &cfg),
            Err(EnsembleError::EmptyTrainingSet)
        ));
        let mixed = vec![
            SelectorExample {
                features: vec![1.0],
                label: Label::Single(0),
            },
            SelectorExample {
                features: vec![1.0, 2.0],
                label: Label::Single(1),
            },
        ];
        assert!(matches!(
            train_selector(&mixed, SelectorKind::SingleLabel, &ids(2), &cfg),
            Err(EnsembleError::DimensionMismatch { .. })
        ));
        let wrong = vec![SelectorExample {
            features: vec![1.0],
            label: Label::Single(0),
        }];
        assert!(matches!(
            train_selector(&wrong, SelectorKind::MultiLabel, &ids(2), &cfg),
            Err(EnsembleError::LabelMismatch(_))
        ));
    }

    #[test]
    fn ties_go_to_lowest_index() {
        let model = train_selector(
            &[SelectorExample {
                features: vec![1.0],
                label: Label::Single(0),
            }],
            SelectorKind::SingleLabel,
            &ids(3),
            &TrainingConfig {
                epochs: 0,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(select_single(&model, &[1.0]).unwrap(), 0);
        let mut m = model.clone();
        m.kind = SelectorKind::MultiLabel;
        assert_eq!(select_multi(&m, &[1.0]).unwrap(), vec![true; 3]);
    }

    #[test]
    fn json_round_trip() {
        let data = separable();
        let model = train_selector(
            &data,
            SelectorKind::SingleLabel,
            &ids(2),
            &TrainingConfig::default(),
        )
        .unwrap();
        let back = SelectorModel::from_json(&model.to_json()).unwrap();
        assert_eq!(model, back);
        assert!(back.check_registry(&ids(2)).is_ok());
        assert!(back.check_registry(&ids(3)).is_err());
        let tampered = model.to_json().replace("\"version\": 1", "\"version\": 9");
        assert!(SelectorModel::from_json(&tampered).is_err());
    }
}
