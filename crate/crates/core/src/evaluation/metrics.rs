use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::PredictionTask;

fn matches_gold(prediction: &str, gold: &str) -> bool {
    prediction == gold || prediction.to_lowercase() == gold
}

fn rate(correct: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        correct as f64 / total as f64
    }
}

/// Exact-match rate of the predictions against each task's gold word. A
/// missing prediction counts as wrong.
pub fn accuracy<S: AsRef<str>>(predictions: &[Option<S>], tasks: &[PredictionTask]) -> f64 {
    assert_eq!(predictions.len(), tasks.len(), "one prediction per task");
    let correct = predictions
        .iter()
        .zip(tasks)
        .filter(|(p, t)| {
            p.as_ref()
                .is_some_and(|p| matches_gold(p.as_ref(), &t.gold))
        })
        .count();
    rate(correct, tasks.len())
}

/// Fraction of tasks whose gold word is among the first `n` ranked words.
pub fn accuracy_at_n<S: AsRef<str>>(ranked: &[Vec<S>], tasks: &[PredictionTask], n: usize) -> f64 {
    assert_eq!(ranked.len(), tasks.len(), "one ranking per task");
    let correct = ranked
        .iter()
        .zip(tasks)
        .filter(|(r, t)| r.iter().take(n).any(|w| matches_gold(w.as_ref(), &t.gold)))
        .count();
    rate(correct, tasks.len())
}

/// Difficult-sentence length classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LengthBucket {
    /// At most 5 tokens.
    VeryShort,
    /// 6 to 15 tokens.
    Short,
    /// 16 to 19 tokens.
    Medium,
    /// 20 tokens or more.
    Long,
}

impl LengthBucket {
    pub const ALL: [LengthBucket; 4] = [
        LengthBucket::VeryShort,
        LengthBucket::Short,
        LengthBucket::Medium,
        LengthBucket::Long,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            LengthBucket::VeryShort => "very-short",
            LengthBucket::Short => "short",
            LengthBucket::Medium => "medium",
            LengthBucket::Long => "long",
        }
    }
}

pub fn bucket_by_length(m: usize) -> LengthBucket {
    match m {
        0..=5 => LengthBucket::VeryShort,
        6..=15 => LengthBucket::Short,
        16..=19 => LengthBucket::Medium,
        _ => LengthBucket::Long,
    }
}

/// Number of words typed: exact up to a cap, then a single overflow bucket.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PositionKey {
    At(usize),
    Beyond(usize),
}

impl PositionKey {
    pub fn of(position: usize, cap: usize) -> Self {
        if position <= cap {
            PositionKey::At(position)
        } else {
            PositionKey::Beyond(cap)
        }
    }
}

impl fmt::Display for PositionKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PositionKey::At(i) => write!(f, "{i}"),
            PositionKey::Beyond(cap) => write!(f, ">{cap}"),
        }
    }
}

impl FromStr for PositionKey {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("bad position key {s:?}");
        match s.strip_prefix('>') {
            Some(cap) => cap.parse().map(PositionKey::Beyond).map_err(|_| bad()),
            None => s.parse().map(PositionKey::At).map_err(|_| bad()),
        }
    }
}

impl Serialize for PositionKey {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PositionKey {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Accuracy restricted to one breakdown key.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BucketAccuracy {
    pub accuracy: f64,
    pub task_count: usize,
    pub correct: usize,
}

/// Per-key accuracy; keys with no tasks are omitted.
pub fn breakdown<S, K, F>(
    predictions: &[Option<S>],
    tasks: &[PredictionTask],
    key: F,
) -> BTreeMap<K, BucketAccuracy>
where
    S: AsRef<str>,
    K: Ord,
    F: Fn(&PredictionTask) -> K,
{
    let mut tally: BTreeMap<K, (usize, usize)> = BTreeMap::new();
    for (p, t) in predictions.iter().zip(tasks) {
        let entry = tally.entry(key(t)).or_insert((0, 0));
        entry.1 += 1;
        if p.as_ref()
            .is_some_and(|p| matches_gold(p.as_ref(), &t.gold))
        {
            entry.0 += 1;
        }
    }
    tally
        .into_iter()
        .map(|(k, (correct, total))| {
            (
                k,
                BucketAccuracy {
                    accuracy: rate(correct, total),
                    task_count: total,
                    correct,
                },
            )
        })
        .collect()
}

pub fn breakdown_by_length<S: AsRef<str>>(
    predictions: &[Option<S>],
    tasks: &[PredictionTask],
) -> BTreeMap<LengthBucket, BucketAccuracy> {
    breakdown(predictions, tasks, |t| bucket_by_length(t.difficult_length))
}

pub fn breakdown_by_position<S: AsRef<str>>(
    predictions: &[Option<S>],
    tasks: &[PredictionTask],
    cap: usize,
) -> BTreeMap<PositionKey, BucketAccuracy> {
    breakdown(predictions, tasks, |t| PositionKey::of(t.position, cap))
}

/// Task-count-weighted mean of bucket accuracies.
pub fn weighted_mean<K>(buckets: &BTreeMap<K, BucketAccuracy>) -> f64 {
    let total: usize = buckets.values().map(|b| b.task_count).sum();
    if total == 0 {
        return 0.0;
    }
    buckets
        .values()
        .map(|b| b.accuracy * b.task_count as f64)
        .sum::<f64>()
        / total as f64
}

/// Oracle ensemble accuracy: a task counts as solved when any backend's
/// top-1 word is the gold word.
pub fn upper_bound<S: AsRef<str>>(
    per_backend_top1: &[Vec<Option<S>>],
    tasks: &[PredictionTask],
) -> f64 {
    assert_eq!(per_backend_top1.len(), tasks.len(), "one row per task");
    let solved = per_backend_top1
        .iter()
        .zip(tasks)
        .filter(|(row, t)| {
            row.iter().any(|w| {
                w.as_ref()
                    .is_some_and(|w| matches_gold(w.as_ref(), &t.gold))
            })
        })
        .count();
    rate(solved, tasks.len())
}

/// How often each backend's output was chosen, normalized over all choices.
pub fn usage_frequency<S: AsRef<str>>(winning_backends: &[S]) -> BTreeMap<String, f64> {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for id in winning_backends {
        *counts.entry(id.as_ref().to_string()).or_insert(0) += 1;
    }
    let total = winning_backends.len();
    counts
        .into_iter()
        .map(|(id, c)| (id, rate(c, total)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::SentencePair;
    use crate::evaluation::generate_tasks;

    fn table3_tasks() -> Vec<PredictionTask> {
        let p = SentencePair::new(
            "t2",
            "Insulin",
            "Lowered glucose levels result both in the reduced release of insulin from the beta cells and in the reverse conversion of glycogen to glucose when glucose levels fall.",
            "This insulin tells the cells to take up glucose from the blood.",
        )
        .unwrap();
        generate_tasks(&p)
    }

    fn task(gold: &str, m: usize, pos: usize) -> PredictionTask {
        PredictionTask {
            pair_id: "x".into(),
            difficult: vec!["d".into(); m],
            prefix: vec!["p".into(); pos],
            gold: gold.into(),
            position: pos,
            difficult_length: m,
        }
    }

    #[test]
    fn accuracy_counts() {
        let tasks = table3_tasks();
        let all: Vec<Option<String>> = tasks.iter().map(|t| Some(t.gold.clone())).collect();
        assert_eq!(accuracy(&all, &tasks), 1.0);
        let none: Vec<Option<&str>> = vec![None; tasks.len()];
        assert_eq!(accuracy(&none, &tasks), 0.0);
        let mut three: Vec<Option<String>> = vec![Some("zzz".into()); tasks.len()];
        for i in [0, 5, 11] {
            three[i] = Some(tasks[i].gold.clone());
        }
        assert_eq!(accuracy(&three, &tasks), 0.25);
        let upper: Vec<Option<&str>> = vec![Some("INSULIN")];
        assert_eq!(accuracy(&upper, &tasks[..1]), 1.0);
    }

    #[test]
    fn accuracy_at_rank_two() {
        let tasks = table3_tasks();
        let ranked: Vec<Vec<String>> = tasks
            .iter()
            .map(|t| vec!["zzz".to_string(), t.gold.clone()])
            .collect();
        assert_eq!(accuracy_at_n(&ranked, &tasks, 1), 0.0);
        assert_eq!(accuracy_at_n(&ranked, &tasks, 2), 1.0);
        let top1: Vec<Option<String>> = ranked.iter().map(|r| r.first().cloned()).collect();
        assert_eq!(accuracy_at_n(&ranked, &tasks, 1), accuracy(&top1, &tasks));
    }

    #[test]
    fn length_buckets() {
        assert_eq!(bucket_by_length(5), LengthBucket::VeryShort);
        assert_eq!(bucket_by_length(6), LengthBucket::Short);
        assert_eq!(bucket_by_length(15), LengthBucket::Short);
        assert_eq!(bucket_by_length(16), LengthBucket::Medium);
        assert_eq!(bucket_by_length(19), LengthBucket::Medium);
        assert_eq!(bucket_by_length(20), LengthBucket::Long);
    }

    #[test]
    fn breakdowns() {
        // bucket very-short: 2 of 3 correct; bucket long: 1 of 4 correct
        let mut tasks = Vec::new();
        let mut preds = Vec::new();
        for (i, ok) in [true, true, false].iter().enumerate() {
            tasks.push(task("a", 3, i + 1));
            preds.push(Some(if *ok { "a" } else { "b" }));
        }
        for (i, ok) in [true, false, false, false].iter().enumerate() {
            tasks.push(task("a", 25, i + 1));
            preds.push(Some(if *ok { "a" } else { "b" }));
        }
        let by_len = breakdown_by_length(&preds, &tasks);
        assert_eq!(by_len.len(), 2);
        assert!((by_len[&LengthBucket::VeryShort].accuracy - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(by_len[&LengthBucket::Long].accuracy, 0.25);
        assert!((weighted_mean(&by_len) - accuracy(&preds, &tasks)).abs() < 1e-12);

        let single = breakdown_by_length(&preds[..3], &tasks[..3]);
        assert_eq!(single.len(), 1);
        assert_eq!(
            single.values().next().unwrap().accuracy,
            accuracy(&preds[..3], &tasks[..3])
        );

        let by_pos = breakdown_by_position(&preds, &tasks, 2);
        let keys: Vec<String> = by_pos.keys().map(|k| k.to_string()).collect();
        assert_eq!(keys, vec!["1", "2", ">2"]);
        assert_eq!(by_pos[&PositionKey::At(1)].accuracy, 1.0);
    }

    #[test]
    fn upper_bound_cases() {
        let tasks: Vec<PredictionTask> = (0..6).map(|i| task(&format!("g{i}"), 3, 1)).collect();
        // three specialists, each right on its own third
        let rows: Vec<Vec<Option<String>>> = (0..6)
            .map(|i| {
                (0..3)
                    .map(|b| {
                        Some(if i / 2 == b {
                            format!("g{i}")
                        } else {
                            "x".into()
                        })
                    })
                    .collect()
            })
            .collect();
        assert_eq!(upper_bound(&rows, &tasks), 1.0);
        for b in 0..3 {
            let single: Vec<Option<String>> = rows.iter().map(|r| r[b].clone()).collect();
            assert!(accuracy(&single, &tasks) <= 1.0 / 3.0 + 1e-15);
        }
        let same: Vec<Vec<Option<&str>>> = tasks
            .iter()
            .enumerate()
            .map(|(i, t)| vec![Some(if i % 2 == 0 { t.gold.as_str() } else { "x" }); 2])
            .collect();
        let one: Vec<Option<&str>> = same.iter().map(|r| r[0]).collect();
        assert_eq!(upper_bound(&same, &tasks), accuracy(&one, &tasks));
        let never: Vec<Vec<Option<&str>>> = vec![vec![Some("x"), None]; 6];
        assert_eq!(upper_bound(&never, &tasks), 0.0);
    }

    #[test]
    fn usage() {
        assert_eq!(
            usage_frequency(&["a", "a"]),
            BTreeMap::from([("a".to_string(), 1.0)])
        );
        let even = usage_frequency(&["a", "b", "c", "d"]);
        assert!(even.values().all(|v| *v == 0.25));
        let split = usage_frequency(&["a", "b", "a", "a"]);
        assert_eq!(split["a"], 0.75);
        assert_eq!(split["b"], 0.25);
    }

    #[test]
    fn position_key_text() {
        for k in [PositionKey::At(3), PositionKey::Beyond(20)] {
            assert_eq!(k.to_string().parse::<PositionKey>().unwrap(), k);
        }
        assert!(PositionKey::At(20) < PositionKey::Beyond(20));
    }
}
