//! Selector training data built from per-backend outcomes on known tasks.

use rand::Rng;

use crate::evaluation::PredictionTask;

/// What the selector sees for one task, and what each backend predicted.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskObservation {
    pub features: Vec<f64>,
    /// Top-1 word and probability per backend, in registry order.
    pub top1: Vec<Option<(String, f64)>>,
}

impl TaskObservation {
    pub fn correct_backends(&self, gold: &str) -> Vec<usize> {
        self.top1
            .iter()
            .enumerate()
            .filter(|(_, t)| t.as_ref().is_some_and(|(w, _)| w == gold))
            .map(|(i, _)| i)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Label {
    /// Index of the one backend credited with the task.
    Single(usize),
    /// Per-backend correctness bits.
    Multi(Vec<bool>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectorExample {
    pub features: Vec<f64>,
    pub label: Label,
}

/// One example per task that at least one backend got right, labeled with a
/// backend drawn uniformly from the correct ones. Tasks nobody solved are
/// skipped.
pub fn generate_4cc_data<R: Rng>(
    tasks: &[PredictionTask],
    observations: &[TaskObservation],
    rng: &mut R,
) -> Vec<SelectorExample> {
    assert_eq!(tasks.len(), observations.len(), "one observation per task");
    tasks
        .iter()
        .zip(observations)
        .filter_map(|(task, obs)| {
            let correct = obs.correct_backends(&task.gold);
            if correct.is_empty() {
                return None;
            }
            let pick = correct[rng.random_range(0..correct.len())];
            Some(SelectorExample {
                features: obs.features.clone(),
                label: Label::Single(pick),
            })
        })
        .collect()
}

/// One example per task with bit `j` set when backend `j` was right.
/// All-zero rows are kept.
pub fn generate_multilabel_data(
    tasks: &[PredictionTask],
    observations: &[TaskObservation],
) -> Vec<SelectorExample> {
    assert_eq!(tasks.len(), observations.len(), "one observation per task");
    tasks
        .iter()
        .zip(observations)
        .map(|(task, obs)| {
            let correct = obs.correct_backends(&task.gold);
            SelectorExample {
                features: obs.features.clone(),
                label: Label::Multi((0..obs.top1.len()).map(|i| correct.contains(&i)).collect()),
            }
        })
        .collect()
}
