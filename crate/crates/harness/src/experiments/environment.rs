//! Outcome assessment across environments of different difficulty, and
//! Brier-score calibration of assessment-derived success predictions.

use std::collections::BTreeMap;

use famsec_core::calibration::{calibration_experiment, success_probability, CalibrationReport};
use famsec_core::delivery::{build_mdp, sample_admissible, DeliveryTask, RandomTaskSampler, TaskDocument};
use famsec_core::outcome::{assess_outcome, OutcomeAssessmentResult, OutcomeStandard};
use famsec_core::rollout::{summarize, DistSummary, TerminalKind};
use famsec_core::seed;
use famsec_core::solver::SolverSpec;
use serde::Serialize;
use serde_json::json;

use super::{measure, RunOptions, REPORT_BINS};
use crate::error::HarnessError;
use crate::networks::difficulty_tasks;
use crate::report::{Output, Report, Table};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DifficultyRow {
    pub name: String,
    pub task: TaskDocument,
    pub outcome: OutcomeAssessmentResult,
    pub summary: DistSummary,
    pub success_probability: f64,
    pub caught: usize,
    pub delivered: usize,
    pub timeout: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DifficultyResult {
    pub rows: Vec<DifficultyRow>,
    pub impossible_is_minus_one: bool,
    pub strictly_increasing: bool,
}

/// Value-iteration policy on each built-in environment, assessed at
/// `z* = 0`.
pub fn difficulty(runs: usize, base_seed: u64) -> Result<DifficultyResult, HarnessError> {
    let rows: Vec<DifficultyRow> = difficulty_tasks()
        .into_iter()
        .enumerate()
        .map(|(i, (name, task))| {
            let mdp = build_mdp(&task)?;
            let i = i as u64;
            let samples = measure(
                &mdp,
                &SolverSpec::Vi,
                runs,
                seed::mix_all(base_seed, &[7, i]),
                seed::mix_all(base_seed, &[8, i]),
            )?;
            Ok(DifficultyRow {
                name: name.to_string(),
                task: TaskDocument::new(&task, base_seed),
                outcome: assess_outcome(&samples.values, &OutcomeStandard::default())?,
                summary: summarize(&samples.values, REPORT_BINS)?,
                success_probability: success_probability(&samples.values)?,
                caught: samples.count(TerminalKind::Caught),
                delivered: samples.count(TerminalKind::Delivered),
                timeout: samples.count(TerminalKind::Timeout),
            })
        })
        .collect::<Result<_, HarnessError>>()?;
    let x: Vec<f64> = rows.iter().map(|r| r.outcome.x_o).collect();
    Ok(DifficultyResult {
        impossible_is_minus_one: x[0] == -1.0,
        strictly_increasing: x.windows(2).all(|w| w[0] < w[1]),
        rows,
    })
}

pub(super) fn difficulty_output(opts: &RunOptions) -> Result<Output, HarnessError> {
    let runs = opts.runs.unwrap_or(1000);
    let result = difficulty(runs, opts.seed)?;
    let mut table = Table::new(
        "environments",
        &["environment", "x_o", "upm", "lpm", "mean", "success_probability", "caught", "delivered", "timeout"],
    );
    for r in &result.rows {
        table.push([
            r.name.clone(),
            r.outcome.x_o.to_string(),
            r.outcome.upm.to_string(),
            r.outcome.lpm.to_string(),
            r.summary.mean.to_string(),
            r.success_probability.to_string(),
            r.caught.to_string(),
            r.delivered.to_string(),
            r.timeout.to_string(),
        ]);
    }
    let report = Report::new(
        "env_difficulty",
        opts.seed,
        json!({"solver": SolverSpec::Vi, "runs": runs, "standard": OutcomeStandard::default()}),
        serde_json::to_value(&result)?,
    )
    .with_flags(["timeout_episodes_included"]);
    Ok(Output::new(report).with_table(table))
}

/// Attempts per task index before calibration gives up on the sampler.
const SAMPLE_ATTEMPTS: u64 = 100;

/// Admissible random tasks and per-reason rejection counts.
pub fn admissible_batch(
    count: usize,
    base_seed: u64,
) -> Result<(Vec<DeliveryTask>, BTreeMap<String, usize>), HarnessError> {
    let sampler = RandomTaskSampler::default();
    let mut rejections = BTreeMap::new();
    let tasks = (0..count as u64)
        .map(|i| {
            let (task, rejected) = sample_admissible(&sampler, i, base_seed, SAMPLE_ATTEMPTS)?;
            for r in rejected {
                *rejections.entry(r.as_str().to_string()).or_insert(0) += 1;
            }
            Ok(task)
        })
        .collect::<Result<_, HarnessError>>()?;
    Ok((tasks, rejections))
}

/// Calibration on a random admissible batch with one truth episode per task.
pub fn calibration(
    tasks: usize,
    m_assess: usize,
    base_seed: u64,
) -> Result<(CalibrationReport, BTreeMap<String, usize>), HarnessError> {
    let (batch, rejections) = admissible_batch(tasks, seed::mix(base_seed, 9))?;
    let report = calibration_experiment(&batch, &SolverSpec::Vi, m_assess, 1, seed::mix(base_seed, 10))?;
    Ok((report, rejections))
}

pub(super) fn calibration_output(opts: &RunOptions) -> Result<Output, HarnessError> {
    let tasks = opts.tasks.unwrap_or(50);
    let m_assess = opts.runs.unwrap_or(100);
    let (result, rejections) = calibration(tasks, m_assess, opts.seed)?;
    let mut table = Table::new("predictions", &["task", "predicted", "outcome"]);
    for e in &result.entries {
        for &o in &e.outcomes {
            table.push([e.task_index.to_string(), e.predicted.to_string(), u8::from(o).to_string()]);
        }
    }
    let report = Report::new(
        "calibration",
        opts.seed,
        json!({
            "tasks": tasks,
            "m_assess": m_assess,
            "m_truth": 1,
            "sampler": RandomTaskSampler::default(),
            "success": "cumulative reward >= 0",
        }),
        json!({
            "brier_model": result.brier_model,
            "brier_constant_half": result.brier_constant_half,
            "brier_majority": result.brier_majority,
            "brier_shuffled": result.brier_shuffled,
            "rejections": rejections,
            "report": result,
        }),
    )
    .with_flags(["truth_seeds_disjoint_from_assessment_seeds"]);
    Ok(Output::new(report).with_table(table))
}
