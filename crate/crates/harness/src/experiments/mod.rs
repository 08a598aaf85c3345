//! The experiment suite. Every experiment draws all of its randomness from
//! `RunOptions::seed`, so reports are reproducible from their own contents.

mod environment;
mod surrogate;
mod sweeps;
mod synthetic;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use famsec_core::delivery::{DeliveryMdp, DeliveryTask};
use famsec_core::rollout::{monte_carlo, RewardSamples};
use famsec_core::solver::SolverSpec;
use famsec_core::solver_quality::SolverQualityConfig;
use famsec_core::surrogate::SurrogateModel;

pub use environment::{admissible_batch, calibration, difficulty, DifficultyResult, DifficultyRow};
pub use surrogate::{pipeline, PipelineResult, SurrogatePlan, SurrogatePreset, EARLY_EPOCHS, PIPELINE_REPLICATES};
pub use sweeps::{
    depth_sweep, exp3_plan, exp4_plan, surrogate_sweep, DepthSweep, SurrogateSweep, SurrogateSweepRow, SweepResult,
    SweepRow,
};
pub use synthetic::{panel_suite, xs_suite, Panel, PanelResult, XsSuite, FIG4_PANELS};

use crate::error::HarnessError;
use crate::report::Output;

/// Histogram bins in reported reward summaries.
pub const REPORT_BINS: usize = 20;

/// Report flags shared by every solver-quality result.
pub const XS_FLAGS: [&str; 2] = ["delta_mu_is_candidate_minus_trusted", "timeout_episodes_included"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentId {
    Exp1,
    Exp2,
    Exp3,
    Exp4,
    SyntheticXo,
    SyntheticXs,
    EnvDifficulty,
    Calibration,
    SurrogatePipeline,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 9] = [
        ExperimentId::Exp1,
        ExperimentId::Exp2,
        ExperimentId::Exp3,
        ExperimentId::Exp4,
        ExperimentId::SyntheticXo,
        ExperimentId::SyntheticXs,
        ExperimentId::EnvDifficulty,
        ExperimentId::Calibration,
        ExperimentId::SurrogatePipeline,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentId::Exp1 => "exp1",
            ExperimentId::Exp2 => "exp2",
            ExperimentId::Exp3 => "exp3",
            ExperimentId::Exp4 => "exp4",
            ExperimentId::SyntheticXo => "synthetic_xo",
            ExperimentId::SyntheticXs => "synthetic_xs",
            ExperimentId::EnvDifficulty => "env_difficulty",
            ExperimentId::Calibration => "calibration",
            ExperimentId::SurrogatePipeline => "surrogate_pipeline",
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentId {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ExperimentId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| HarnessError::Validation(format!("unknown experiment '{s}'")))
    }
}

/// Options shared by all experiments; `None` picks the experiment default.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOptions {
    pub seed: u64,
    /// Monte-Carlo runs per solver (or per task).
    pub runs: Option<usize>,
    /// Task count for batch experiments.
    pub tasks: Option<usize>,
    /// Surrogate model file for experiments 3 and 4.
    pub model: Option<PathBuf>,
    /// Override of the trusted solver's tree depth.
    pub trusted_depth: Option<u32>,
}

pub fn run_experiment(id: ExperimentId, opts: &RunOptions) -> Result<Output, HarnessError> {
    if opts.runs == Some(0) || opts.tasks == Some(0) {
        return Err(HarnessError::Validation("--runs and --tasks must be positive".into()));
    }
    match id {
        ExperimentId::SyntheticXo => synthetic::xo_output(opts),
        ExperimentId::SyntheticXs => synthetic::xs_output(opts),
        ExperimentId::Exp1 => sweeps::depth_output(id, &DepthSweep::exp1(opts)),
        ExperimentId::Exp2 => sweeps::depth_output(id, &DepthSweep::exp2(opts)),
        ExperimentId::Exp3 | ExperimentId::Exp4 => {
            let path = opts.model.as_ref().ok_or_else(|| HarnessError::MissingSurrogate(id.to_string()))?;
            let model = SurrogateModel::load(path)?;
            let plan = if id == ExperimentId::Exp3 {
                exp3_plan(opts)
            } else {
                exp4_plan(opts)
            };
            sweeps::surrogate_output(id, &plan, &model)
        }
        ExperimentId::EnvDifficulty => environment::difficulty_output(opts),
        ExperimentId::Calibration => environment::calibration_output(opts),
        ExperimentId::SurrogatePipeline => surrogate::pipeline_output(opts),
    }
}

/// Monte-Carlo reward samples of `solver` on `mdp`.
pub fn measure(
    mdp: &DeliveryMdp,
    solver: &SolverSpec,
    runs: usize,
    policy_seed: u64,
    episode_seed: u64,
) -> Result<RewardSamples, HarnessError> {
    let policy = solver.policy(mdp, policy_seed)?;
    Ok(monte_carlo(mdp, &policy, runs, episode_seed)?)
}

/// Solver-quality configuration over the pooled range of `samples`, falling
/// back to the task's reward bounds when every sample is equal.
pub fn pooled_config<'a, I>(task: &DeliveryTask, samples: I) -> SolverQualityConfig
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let (lo, hi) = samples
        .into_iter()
        .flatten()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if lo < hi {
        SolverQualityConfig::new(lo, hi)
    } else {
        let p = &task.params;
        SolverQualityConfig::new(f64::from(p.t_max) * p.rewards.loiter + p.rewards.caught, p.rewards.goal)
    }
}
