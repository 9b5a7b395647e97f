use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::{
    accuracy, accuracy_at_n, breakdown_by_length, breakdown_by_position, usage_frequency,
    BucketAccuracy, EvalOptions, LengthBucket, PositionKey, PredictionTask,
};
use crate::ensemble::SystemOutput;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub system_id: String,
    pub task_count: usize,
    pub accuracy: f64,
    pub accuracy_at: BTreeMap<usize, f64>,
    pub by_length: BTreeMap<LengthBucket, BucketAccuracy>,
    pub by_position: BTreeMap<PositionKey, BucketAccuracy>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper_bound: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub usage_frequency: Option<BTreeMap<String, f64>>,
}

/// Scores one system's outputs. `backend_ids` is given for ensembles, whose
/// reports then carry usage frequencies over every registered backend.
pub fn build_report(
    system_id: &str,
    outputs: &[SystemOutput],
    tasks: &[PredictionTask],
    upper_bound: Option<f64>,
    backend_ids: Option<&[String]>,
    opts: &EvalOptions,
) -> EvalReport {
    let top1: Vec<Option<&str>> = outputs.iter().map(|o| o.word.as_deref()).collect();
    let ranked: Vec<Vec<String>> = outputs.iter().map(SystemOutput::ranked_words).collect();
    let usage = backend_ids.map(|ids| {
        let winners: Vec<&str> = outputs
            .iter()
            .filter(|o| o.word.is_some())
            .flat_map(|o| o.winners.iter().map(String::as_str))
            .collect();
        let mut freq = usage_frequency(&winners);
        for id in ids {
            freq.entry(id.clone()).or_insert(0.0);
        }
        freq
    });
    EvalReport {
        system_id: system_id.to_string(),
        task_count: tasks.len(),
        accuracy: accuracy(&top1, tasks),
        accuracy_at: (1..=opts.max_n)
            .map(|n| (n, accuracy_at_n(&ranked, tasks, n)))
            .collect(),
        by_length: breakdown_by_length(&top1, tasks),
        by_position: breakdown_by_position(&top1, tasks, opts.position_cap),
        upper_bound,
        usage_frequency: usage,
    }
}

fn pct(x: f64) -> String {
    format!("{:.2}", 100.0 * x)
}

/// Plain-text tables: overall accuracy@N, accuracy by difficult-sentence
/// length, and backend usage for ensembles.
pub fn render_table(reports: &[EvalReport]) -> String {
    let mut out = String::new();
    let width = reports
        .iter()
        .map(|r| r.system_id.len())
        .max()
        .unwrap_or(6)
        .max(11);
    let max_n = reports
        .iter()
        .map(|r| r.accuracy_at.len())
        .max()
        .unwrap_or(0);

    let _ = write!(
        out,
        "{:<width$}  {:>6}  {:>8}",
        "system", "tasks", "accuracy"
    );
    for n in 1..=max_n {
        let _ = write!(out, "  {:>6}", format!("@{n}"));
    }
    out.push('\n');
    for r in reports {
        let _ = write!(
            out,
            "{:<width$}  {:>6}  {:>8}",
            r.system_id,
            r.task_count,
            pct(r.accuracy)
        );
        for n in 1..=max_n {
            let v = r.accuracy_at.get(&n).map_or("-".to_string(), |v| pct(*v));
            let _ = write!(out, "  {v:>6}");
        }
        out.push('\n');
    }
    if let Some(ub) = reports.iter().find_map(|r| r.upper_bound) {
        let _ = writeln!(
            out,
            "{:<width$}  {:>6}  {:>8}",
            "upper-bound",
            reports[0].task_count,
            pct(ub)
        );
    }

    out.push('\n');
    let _ = write!(out, "{:<width$}", "by length");
    for b in LengthBucket::ALL {
        let _ = write!(out, "  {:>10}", b.name());
    }
    out.push('\n');
    for r in reports {
        let _ = write!(out, "{:<width$}", r.system_id);
        for b in LengthBucket::ALL {
            let v = r
                .by_length
                .get(&b)
                .map_or("-".to_string(), |b| pct(b.accuracy));
            let _ = write!(out, "  {v:>10}");
        }
        out.push('\n');
    }

    let ensembles: Vec<&EvalReport> = reports
        .iter()
        .filter(|r| r.usage_frequency.is_some())
        .collect();
    if let Some(first) = ensembles.first() {
        out.push('\n');
        let backends: Vec<&String> = first.usage_frequency.as_ref().unwrap().keys().collect();
        let _ = write!(out, "{:<width$}", "usage");
        for b in &backends {
            let _ = write!(out, "  {b:>10}");
        }
        out.push('\n');
        for r in ensembles {
            let _ = write!(out, "{:<width$}", r.system_id);
            let usage = r.usage_frequency.as_ref().unwrap();
            for b in &backends {
                let _ = write!(out, "  {:>10}", pct(usage.get(*b).copied().unwrap_or(0.0)));
            }
            out.push('\n');
        }
    }
    out
}
