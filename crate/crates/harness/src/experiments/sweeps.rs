//! Solver-quality sweeps: candidate tree depths against a measured trusted
//! solver (experiments 1 and 2), and candidates against surrogate
//! predictions over task parameters (experiments 3 and 4).

use famsec_core::delivery::{build_mdp, DeliveryTask, TaskDocument};
use famsec_core::outcome::{assess_outcome, OutcomeStandard};
use famsec_core::rollout::{summarize, DistSummary, RewardSamples, TerminalKind};
use famsec_core::seed;
use famsec_core::solver::SolverSpec;
use famsec_core::solver_quality::{x_s_from_samples, SolverQualityConfig, SolverQualityResult, Trusted};
use famsec_core::surrogate::SurrogateModel;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::{measure, pooled_config, ExperimentId, RunOptions, REPORT_BINS, XS_FLAGS};
use crate::error::HarnessError;
use crate::networks::{exp1_task, exp2_task, exp3_task};
use crate::report::{Output, Report, Table};

/// Candidate tree depths against one measured trusted depth.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthSweep {
    pub task: DeliveryTask,
    pub depths: Vec<u32>,
    pub iterations: u32,
    pub exploration: f64,
    pub trusted_depth: u32,
    pub runs: usize,
    pub seed: u64,
}

impl DepthSweep {
    /// Small network, depths 1..=10, 100 iterations, trusted depth 9.
    pub fn exp1(opts: &RunOptions) -> Self {
        DepthSweep {
            task: exp1_task(),
            depths: (1..=10).collect(),
            iterations: 100,
            exploration: 1000.0,
            trusted_depth: opts.trusted_depth.unwrap_or(9),
            runs: opts.runs.unwrap_or(2000),
            seed: opts.seed,
        }
    }

    /// Medium grid, depths 1, 4, ..., 28, 1000 iterations, trusted depth 25.
    pub fn exp2(opts: &RunOptions) -> Self {
        DepthSweep {
            task: exp2_task(),
            depths: (1..=28).step_by(3).collect(),
            iterations: 1000,
            exploration: 2000.0,
            trusted_depth: opts.trusted_depth.unwrap_or(25),
            runs: opts.runs.unwrap_or(500),
            seed: opts.seed,
        }
    }

    pub fn solver(&self, depth: u32) -> SolverSpec {
        SolverSpec::mcts_depth_bounded(depth, self.iterations, self.exploration)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub depth: u32,
    pub solver: SolverSpec,
    pub summary: DistSummary,
    pub quality: SolverQualityResult,
    /// Outcome assessment of the candidate at the default standard.
    pub x_o: f64,
    pub caught: usize,
    pub delivered: usize,
    pub timeout: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub trusted: SolverSpec,
    pub trusted_summary: DistSummary,
    pub r_low: f64,
    pub r_high: f64,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn x_s(&self, depth: u32) -> Option<f64> {
        self.rows.iter().find(|r| r.depth == depth).map(|r| r.quality.x_s)
    }
}

fn terminal_counts(s: &RewardSamples) -> (usize, usize, usize) {
    (s.count(TerminalKind::Caught), s.count(TerminalKind::Delivered), s.count(TerminalKind::Timeout))
}

/// Measures every candidate and the trusted solver, then scores each
/// candidate over the pooled reward range. The trusted solver always gets
/// its own seeds, so a candidate equal to it is an independent replicate.
pub fn depth_sweep(plan: &DepthSweep) -> Result<SweepResult, HarnessError> {
    if plan.depths.is_empty() || plan.runs < 2 {
        return Err(HarnessError::Validation("a sweep needs depths and at least 2 runs".into()));
    }
    let mdp = build_mdp(&plan.task)?;
    let trusted = plan.solver(plan.trusted_depth);
    let s = plan.seed;
    let trusted_samples = measure(&mdp, &trusted, plan.runs, seed::mix_all(s, &[3, 0]), seed::mix_all(s, &[4, 0]))?;
    let candidates: Vec<RewardSamples> = plan
        .depths
        .iter()
        .map(|&d| {
            let d64 = u64::from(d);
            measure(&mdp, &plan.solver(d), plan.runs, seed::mix_all(s, &[1, d64]), seed::mix_all(s, &[2, d64]))
        })
        .collect::<Result<_, _>>()?;
    let cfg = pooled_config(
        &plan.task,
        candidates.iter().map(|c| c.values.as_slice()).chain([trusted_samples.values.as_slice()]),
    );
    let rows = plan
        .depths
        .iter()
        .zip(&candidates)
        .map(|(&depth, samples)| {
            let quality = x_s_from_samples(&samples.values, Trusted::Samples(&trusted_samples.values), &cfg)?;
            let (caught, delivered, timeout) = terminal_counts(samples);
            Ok(SweepRow {
                depth,
                solver: plan.solver(depth),
                summary: summarize(&samples.values, REPORT_BINS)?,
                quality,
                x_o: assess_outcome(&samples.values, &OutcomeStandard::default())?.x_o,
                caught,
                delivered,
                timeout,
            })
        })
        .collect::<Result<_, HarnessError>>()?;
    Ok(SweepResult {
        trusted,
        trusted_summary: summarize(&trusted_samples.values, REPORT_BINS)?,
        r_low: cfg.r_low,
        r_high: cfg.r_high,
        rows,
    })
}

pub(super) fn depth_output(id: ExperimentId, plan: &DepthSweep) -> Result<Output, HarnessError> {
    let result = depth_sweep(plan)?;
    let mut table = Table::new(
        "sweep",
        &["depth", "x_s", "mu_c", "sigma_c", "mu_t", "sigma_t", "h2", "m_s", "x_o", "caught", "delivered", "timeout"],
    );
    for r in &result.rows {
        let q = &r.quality;
        table.push([
            r.depth.to_string(),
            q.x_s.to_string(),
            q.mu_c.to_string(),
            q.sigma_c.to_string(),
            q.mu_t.to_string(),
            q.sigma_t.to_string(),
            q.h2.to_string(),
            q.m_s.to_string(),
            r.x_o.to_string(),
            r.caught.to_string(),
            r.delivered.to_string(),
            r.timeout.to_string(),
        ]);
    }
    let mut flags: Vec<String> = XS_FLAGS.iter().map(|f| f.to_string()).collect();
    flags.push("reward_range_pooled_over_all_solvers".into());
    flags.push("trusted_measured_with_independent_seeds".into());
    let report = Report::new(
        id.as_str(),
        plan.seed,
        json!({
            "task": TaskDocument::new(&plan.task, plan.seed),
            "depths": plan.depths,
            "iterations": plan.iterations,
            "exploration": plan.exploration,
            "trusted_depth": plan.trusted_depth,
            "runs": plan.runs,
            "rollouts_stop_at_tree_depth": true,
        }),
        serde_json::to_value(&result)?,
    )
    .with_flags(flags);
    Ok(Output::new(report).with_table(table))
}

/// Candidates measured over a grid of task parameters against surrogate
/// predictions of the trusted solver.
#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateSweep {
    pub p_trans: Vec<f64>,
    /// Exploration constants shared by candidates and the trusted solver.
    pub exploration: Vec<f64>,
    pub candidate_depths: Vec<u32>,
    pub iterations: u32,
    pub trusted_depth: u32,
    pub runs: usize,
    pub seed: u64,
}

/// `p_trans` from 0.05 to 1 in steps of 0.05, candidates of depth 3 and 1.
pub fn exp3_plan(opts: &RunOptions) -> SurrogateSweep {
    SurrogateSweep {
        p_trans: (1..=20).map(|i| f64::from(i) / 20.0).collect(),
        exploration: vec![1000.0],
        candidate_depths: vec![3, 1],
        iterations: 1000,
        trusted_depth: opts.trusted_depth.unwrap_or(8),
        runs: opts.runs.unwrap_or(100),
        seed: opts.seed,
    }
}

/// As [`exp3_plan`] on a coarser `p_trans` grid crossed with exploration
/// constants between 10 and 1000.
pub fn exp4_plan(opts: &RunOptions) -> SurrogateSweep {
    SurrogateSweep {
        p_trans: (1..=5).map(|i| f64::from(i) / 5.0).collect(),
        exploration: vec![10.0, 100.0, 250.0, 500.0, 1000.0],
        ..exp3_plan(opts)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurrogateSweepRow {
    pub p_trans: f64,
    pub exploration: f64,
    pub candidate_depth: u32,
    pub quality: SolverQualityResult,
}

/// Runs the grid in parallel; results come back in grid order.
pub fn surrogate_sweep(plan: &SurrogateSweep, model: &SurrogateModel) -> Result<Vec<SurrogateSweepRow>, HarnessError> {
    if plan.runs < 2 {
        return Err(HarnessError::Validation("a sweep needs at least 2 runs".into()));
    }
    let cfg = SolverQualityConfig::new(model.r_low, model.r_high);
    let points: Vec<(f64, f64, u32)> = plan
        .p_trans
        .iter()
        .flat_map(|&p| {
            plan.exploration
                .iter()
                .flat_map(move |&e| plan.candidate_depths.iter().map(move |&d| (p, e, d)))
        })
        .collect();
    points
        .par_iter()
        .enumerate()
        .map(|(i, &(p_trans, exploration, depth))| {
            let task = exp3_task(p_trans);
            let trusted = SolverSpec::mcts_depth_bounded(plan.trusted_depth, plan.iterations, exploration);
            let predicted = model.predict_task(&task, &trusted)?;
            let mdp = build_mdp(&task)?;
            let candidate = SolverSpec::mcts_depth_bounded(depth, plan.iterations, exploration);
            let i = i as u64;
            let samples = measure(
                &mdp,
                &candidate,
                plan.runs,
                seed::mix_all(plan.seed, &[5, i]),
                seed::mix_all(plan.seed, &[6, i]),
            )?;
            Ok(SurrogateSweepRow {
                p_trans,
                exploration,
                candidate_depth: depth,
                quality: x_s_from_samples(&samples.values, Trusted::Summary(predicted), &cfg)?,
            })
        })
        .collect()
}

pub(super) fn surrogate_output(
    id: ExperimentId,
    plan: &SurrogateSweep,
    model: &SurrogateModel,
) -> Result<Output, HarnessError> {
    let rows = surrogate_sweep(plan, model)?;
    let mut table = Table::new(
        "sweep",
        &["p_trans", "e_m", "candidate_depth", "x_s", "mu_c", "sigma_c", "mu_t", "sigma_t", "h2", "m_s"],
    );
    for r in &rows {
        let q = &r.quality;
        table.push([
            r.p_trans,
            r.exploration,
            f64::from(r.candidate_depth),
            q.x_s,
            q.mu_c,
            q.sigma_c,
            q.mu_t,
            q.sigma_t,
            q.h2,
            q.m_s,
        ]);
    }
    let mut flags: Vec<String> = XS_FLAGS.iter().map(|f| f.to_string()).collect();
    flags.push("trusted_predicted_by_surrogate".into());
    if plan.trusted_depth != 8 {
        flags.push(format!("trusted_depth_overridden_to_{}", plan.trusted_depth));
    }
    let report = Report::new(
        id.as_str(),
        plan.seed,
        json!({
            "task_template": TaskDocument::new(&exp3_task(0.5), plan.seed),
            "p_trans": plan.p_trans,
            "exploration": plan.exploration,
            "candidate_depths": plan.candidate_depths,
            "iterations": plan.iterations,
            "trusted_depth": plan.trusted_depth,
            "runs": plan.runs,
            "model_features": model.feature_schema,
            "model_range": [model.r_low, model.r_high],
        }),
        json!({ "rows": rows }),
    )
    .with_flags(flags);
    Ok(Output::new(report).with_table(table))
}
