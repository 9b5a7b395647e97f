use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{build_report, upper_bound, EvalReport, PredictionTask};
use crate::ensemble::{
    generate_4cc_data, generate_multilabel_data, train_selector, EnsembleError, SelectorKind,
    SelectorModel, SystemOutput, TaskObservation, TrainingConfig, Workbench,
};

#[derive(Debug, Clone, PartialEq)]
pub struct EvalOptions {
    /// Largest N reported for accuracy@N.
    pub max_n: usize,
    /// Positions above this share one overflow bucket.
    pub position_cap: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            max_n: 5,
            position_cap: 20,
        }
    }
}

/// Outputs of every evaluated system on every task, plus the reports.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub systems: Vec<String>,
    /// `outputs[s][t]`: system `s` on task `t`.
    pub outputs: Vec<Vec<SystemOutput>>,
    /// Per-task top-1 word of every backend.
    pub backend_top1: Vec<Vec<Option<String>>>,
    pub upper_bound: f64,
    pub reports: Vec<EvalReport>,
}

/// Per-task observations for selector training, computed in parallel and
/// returned in task order.
pub fn collect_observations(
    workbench: &Workbench,
    tasks: &[PredictionTask],
) -> Vec<TaskObservation> {
    tasks
        .par_iter()
        .map(|t| workbench.observe(&t.context(), 1).to_task_observation())
        .collect()
}

/// Builds selector training data from `tasks` and fits a selector.
pub fn fit_selector(
    workbench: &Workbench,
    tasks: &[PredictionTask],
    kind: SelectorKind,
    cfg: &TrainingConfig,
) -> Result<SelectorModel, EnsembleError> {
    let observations = collect_observations(workbench, tasks);
    let examples = match kind {
        SelectorKind::SingleLabel => generate_4cc_data(
            tasks,
            &observations,
            &mut ChaCha8Rng::seed_from_u64(cfg.seed),
        ),
        SelectorKind::MultiLabel => generate_multilabel_data(tasks, &observations),
    };
    train_selector(&examples, kind, &workbench.registry.ids(), cfg)
}

/// Runs one system over all tasks.
pub fn run_system(
    workbench: &Workbench,
    system_id: &str,
    tasks: &[PredictionTask],
    k: usize,
) -> Result<Vec<SystemOutput>, EnsembleError> {
    workbench.resolve(system_id)?;
    tasks
        .par_iter()
        .map(|t| workbench.run(system_id, &t.context(), k))
        .collect()
}

/// Scores `systems` on `tasks`. Each task's backends are queried once and
/// shared by all systems; results are gathered in task order so serial and
/// parallel runs are identical.
pub fn evaluate(
    workbench: &Workbench,
    tasks: &[PredictionTask],
    systems: &[String],
    opts: &EvalOptions,
) -> Result<Evaluation, EnsembleError> {
    for s in systems {
        workbench.resolve(s)?;
    }
    let k = opts.max_n.max(1);
    let per_task: Vec<(Vec<Option<String>>, Vec<SystemOutput>)> = tasks
        .par_iter()
        .map(|task| {
            let ctx = task.context();
            let obs = workbench.observe(&ctx, k);
            let top1 = obs
                .top1()
                .into_iter()
                .map(|t| t.map(|(w, _)| w.to_string()))
                .collect();
            let outputs = systems
                .iter()
                .map(|s| workbench.decide(s, &ctx, &obs, k))
                .collect::<Result<Vec<_>, _>>()?;
            Ok((top1, outputs))
        })
        .collect::<Result<_, EnsembleError>>()?;

    let backend_top1: Vec<Vec<Option<String>>> = per_task.iter().map(|(t, _)| t.clone()).collect();
    let mut outputs: Vec<Vec<SystemOutput>> = vec![Vec::with_capacity(tasks.len()); systems.len()];
    for (_, row) in per_task {
        for (s, out) in row.into_iter().enumerate() {
            outputs[s].push(out);
        }
    }
    let ub = upper_bound(&backend_top1, tasks);
    let ids = workbench.registry.ids();
    let reports = systems
        .iter()
        .zip(&outputs)
        .map(|(s, out)| {
            let usage = workbench.is_ensemble(s).then_some(ids.as_slice());
            build_report(s, out, tasks, Some(ub), usage, opts)
        })
        .collect();
    Ok(Evaluation {
        systems: systems.to_vec(),
        outputs,
        backend_top1,
        upper_bound: ub,
        reports,
    })
}
