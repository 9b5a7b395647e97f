//! Task expansion and scoring of single backends and ensembles.

mod harness;
mod metrics;
mod report;
mod tasks;

pub use harness::{
    collect_observations, evaluate, fit_selector, run_system, EvalOptions, Evaluation,
};
pub use metrics::{
    accuracy, accuracy_at_n, breakdown, breakdown_by_length, breakdown_by_position,
    bucket_by_length, upper_bound, usage_frequency, weighted_mean, BucketAccuracy, LengthBucket,
    PositionKey,
};
pub use report::{build_report, render_table, EvalReport};
pub use tasks::{generate_all_tasks, generate_tasks, PredictionTask};
