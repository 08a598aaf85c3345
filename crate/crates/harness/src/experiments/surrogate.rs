//! Surrogate training presets and the end-to-end surrogate pipeline check.

use std::fmt;
use std::str::FromStr;

use famsec_core::delivery::{DeliveryError, DeliveryTask, RandomTaskSampler, TaskSampler};
use famsec_core::seed;
use famsec_core::solver::SolverSpec;
use famsec_core::surrogate::{
    generate_training_data, gradient_check, pearson, DataPlan, EpochLoss, FeatureSchema, MlpConfig, SpreadKind, SurrogateModel,
    TrainingSet,
};
use rand::Rng;
use serde::Serialize;
use serde_json::json;

use super::RunOptions;
use crate::error::HarnessError;
use crate::networks::exp3_task;
use crate::report::{Output, Report, Table};

/// Which tasks the surrogate learns from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SurrogatePreset {
    /// Random networks of 8 to 35 nodes, features `[n, p_trans]`, trusted
    /// tree search of depth 3.
    RandomTasks,
    /// The small network with random `p_trans`, feature `[p_trans]`,
    /// trusted depth 8.
    Exp3,
    /// As `Exp3` with the trusted exploration constant drawn from
    /// [10, 1000], features `[p_trans, e_m]`.
    Exp4,
}

impl SurrogatePreset {
    pub fn as_str(self) -> &'static str {
        match self {
            SurrogatePreset::RandomTasks => "random-tasks",
            SurrogatePreset::Exp3 => "exp3",
            SurrogatePreset::Exp4 => "exp4",
        }
    }
}

impl fmt::Display for SurrogatePreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SurrogatePreset {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [SurrogatePreset::RandomTasks, SurrogatePreset::Exp3, SurrogatePreset::Exp4]
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| HarnessError::Validation(format!("unknown surrogate preset '{s}'")))
    }
}

/// The small network with `p_trans` uniform in [0, 1].
struct SmallNetworkSampler;

impl TaskSampler for SmallNetworkSampler {
    fn sample(&self, index: u64, seed: u64) -> Result<DeliveryTask, DeliveryError> {
        let p = seed::rng_from(seed::mix(seed, index)).random_range(0.0..=1.0);
        Ok(exp3_task(p))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurrogatePlan {
    pub preset: SurrogatePreset,
    pub tasks: usize,
    pub runs: usize,
    pub trusted_depth: u32,
    pub iterations: u32,
    pub exploration: f64,
    pub seed: u64,
}

impl SurrogatePlan {
    pub fn new(preset: SurrogatePreset, opts: &RunOptions) -> Self {
        let (tasks, depth) = match preset {
            SurrogatePreset::RandomTasks => (200, 3),
            SurrogatePreset::Exp3 => (100, 8),
            SurrogatePreset::Exp4 => (150, 8),
        };
        SurrogatePlan {
            preset,
            tasks: opts.tasks.unwrap_or(tasks),
            runs: opts.runs.unwrap_or(50),
            trusted_depth: opts.trusted_depth.unwrap_or(depth),
            iterations: 1000,
            exploration: 1000.0,
            seed: opts.seed,
        }
    }

    pub fn trusted(&self) -> SolverSpec {
        SolverSpec::mcts_depth_bounded(self.trusted_depth, self.iterations, self.exploration)
    }

    pub fn schema(&self) -> FeatureSchema {
        let names: &[&str] = match self.preset {
            SurrogatePreset::RandomTasks => &["n", "p_trans"],
            SurrogatePreset::Exp3 => &["p_trans"],
            SurrogatePreset::Exp4 => &["p_trans", "e_m"],
        };
        FeatureSchema::new(names).expect("preset features are known")
    }

    pub fn generate(&self) -> Result<TrainingSet, HarnessError> {
        let random = RandomTaskSampler::default();
        let sampler: &dyn TaskSampler = match self.preset {
            SurrogatePreset::RandomTasks => &random,
            SurrogatePreset::Exp3 | SurrogatePreset::Exp4 => &SmallNetworkSampler,
        };
        let plan = DataPlan {
            sampler,
            trusted: self.trusted(),
            exploration_range: (self.preset == SurrogatePreset::Exp4).then_some((10.0, 1000.0)),
            schema: self.schema(),
            task_count: self.tasks,
            m_runs: self.runs,
            spread: SpreadKind::StdDev,
            base_seed: seed::mix(self.seed, 12),
        };
        Ok(generate_training_data(&plan)?)
    }

    /// Training configuration for the `replicate`-th model.
    pub fn mlp_config(&self, replicate: u64) -> MlpConfig {
        MlpConfig {
            rng_seed: seed::mix_all(self.seed, &[13, replicate]),
            ..MlpConfig::default()
        }
    }
}

/// Models trained on one dataset from several training seeds.
pub const PIPELINE_REPLICATES: u64 = 3;
/// Leading epochs over which the averaged training loss must fall.
pub const EARLY_EPOCHS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineResult {
    pub plan: SurrogatePlan,
    pub generated: usize,
    pub rows: usize,
    pub rejections: std::collections::BTreeMap<String, usize>,
    pub r_low: f64,
    pub r_high: f64,
    /// Mean-network training MSE per epoch, averaged over replicates.
    pub early_train_mse: Vec<f64>,
    pub early_decreasing: bool,
    /// Final losses and held-out correlation of each replicate.
    pub replicates: Vec<ReplicateScore>,
    /// Replicate averages of the final losses.
    pub final_train_mse: f64,
    pub final_val_mse: f64,
    pub spread_final_train_mse: f64,
    pub spread_final_val_mse: f64,
    /// Replicate average of the Pearson correlation between predicted and
    /// measured trusted means on each replicate's validation tasks.
    pub heldout_pearson: f64,
    /// First replicate's validation tasks: (task, actual, predicted).
    pub heldout: Vec<(u64, f64, f64)>,
    pub gradient_check: f64,
    pub predicted_mean_p95: f64,
    pub predicted_mean_p25: f64,
    /// Training rows whose mean prediction falls more than 10% of the range
    /// outside `[r_low, r_high]`.
    pub out_of_range_predictions: usize,
    pub model_flags: Vec<famsec_core::surrogate::TrainingFlag>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicateScore {
    pub train_mse: f64,
    pub val_mse: f64,
    pub spread_train_mse: f64,
    pub spread_val_mse: f64,
    pub heldout_pearson: f64,
}

fn last_losses(curve: &[EpochLoss]) -> (f64, f64) {
    let l = curve.last().expect("non-empty curve");
    (l.train_mse, l.val_mse.unwrap_or(f64::NAN))
}

/// Validation tasks of `model` as (task, actual, predicted) mean triples.
fn heldout_of(model: &SurrogateModel, data: &TrainingSet) -> Result<Vec<(u64, f64, f64)>, HarnessError> {
    model
        .metadata
        .validation_rows
        .iter()
        .map(|&i| {
            let row = &data.rows[i];
            Ok((row.task_index, row.reward_mean, model.predict(&row.features)?.mu))
        })
        .collect()
}

fn score(model: &SurrogateModel, data: &TrainingSet) -> Result<ReplicateScore, HarnessError> {
    let heldout = heldout_of(model, data)?;
    let actual: Vec<f64> = heldout.iter().map(|h| h.1).collect();
    let predicted: Vec<f64> = heldout.iter().map(|h| h.2).collect();
    let (train_mse, val_mse) = last_losses(&model.metadata.mean_curve);
    let (spread_train_mse, spread_val_mse) = last_losses(&model.metadata.spread_curve);
    Ok(ReplicateScore {
        train_mse,
        val_mse,
        spread_train_mse,
        spread_val_mse,
        heldout_pearson: pearson(&actual, &predicted).unwrap_or(f64::NAN),
    })
}

/// Generates data, trains the replicates, and evaluates the first.
pub fn pipeline(plan: &SurrogatePlan) -> Result<(PipelineResult, SurrogateModel), HarnessError> {
    let data = plan.generate()?;
    let models = (0..PIPELINE_REPLICATES)
        .map(|r| famsec_core::surrogate::train_surrogate(&data, &plan.mlp_config(r)))
        .collect::<Result<Vec<_>, _>>()?;
    let early_train_mse: Vec<f64> = (0..EARLY_EPOCHS)
        .map(|e| models.iter().map(|m| m.metadata.mean_curve[e].train_mse).sum::<f64>() / models.len() as f64)
        .collect();
    let replicates = models.iter().map(|m| score(m, &data)).collect::<Result<Vec<_>, _>>()?;
    let avg = |f: fn(&ReplicateScore) -> f64| replicates.iter().map(f).sum::<f64>() / replicates.len() as f64;
    let model = models.into_iter().next().expect("at least one replicate");
    let heldout = heldout_of(&model, &data)?;

    let normalized = |x: &[f64]| -> Vec<f64> {
        x.iter()
            .zip(model.feature_norm.mean.iter().zip(&model.feature_norm.scale))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    };
    let probe = &data.rows[..data.rows.len().min(3)];
    let xs: Vec<Vec<f64>> = probe.iter().map(|r| normalized(&r.features)).collect();
    let ys: Vec<f64> = probe
        .iter()
        .map(|r| (r.reward_mean - model.target_norm.mean[0]) / model.target_norm.scale[0])
        .collect();

    let at = |p: f64| -> Result<f64, HarnessError> {
        let features: Vec<f64> = plan
            .schema()
            .0
            .iter()
            .map(|name| match name.as_str() {
                "n" => 13.0,
                "p_trans" => p,
                _ => plan.exploration,
            })
            .collect();
        Ok(model.predict(&features)?.mu)
    };
    let slack = 0.1 * (data.r_high - data.r_low);
    let out_of_range_predictions = data
        .rows
        .iter()
        .map(|r| model.predict(&r.features).map(|g| g.mu))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .filter(|mu| *mu < data.r_low - slack || *mu > data.r_high + slack)
        .count();

    let result = PipelineResult {
        plan: plan.clone(),
        generated: data.generated,
        rows: data.rows.len(),
        rejections: data.rejections.clone(),
        r_low: data.r_low,
        r_high: data.r_high,
        early_decreasing: early_train_mse.windows(2).all(|w| w[1] < w[0]),
        early_train_mse,
        final_train_mse: avg(|r| r.train_mse),
        final_val_mse: avg(|r| r.val_mse),
        spread_final_train_mse: avg(|r| r.spread_train_mse),
        spread_final_val_mse: avg(|r| r.spread_val_mse),
        heldout_pearson: avg(|r| r.heldout_pearson),
        replicates,
        heldout,
        gradient_check: gradient_check(&model.mean_net, &xs, &ys, 1e-6),
        predicted_mean_p95: at(0.95)?,
        predicted_mean_p25: at(0.25)?,
        out_of_range_predictions,
        model_flags: model.metadata.flags.clone(),
    };
    Ok((result, model))
}

pub(super) fn pipeline_output(opts: &RunOptions) -> Result<Output, HarnessError> {
    let plan = SurrogatePlan::new(SurrogatePreset::RandomTasks, opts);
    let (result, model) = pipeline(&plan)?;
    let mut curve = Table::new("curve", &["epoch", "train_mse", "val_mse"]);
    for l in &model.metadata.mean_curve {
        curve.push([l.epoch as f64, l.train_mse, l.val_mse.unwrap_or(f64::NAN)]);
    }
    let mut heldout = Table::new("heldout", &["task", "actual_mean", "predicted_mean"]);
    for (task, actual, predicted) in &result.heldout {
        heldout.push([*task as f64, *actual, *predicted]);
    }
    let report = Report::new(
        "surrogate_pipeline",
        opts.seed,
        json!({
            "plan": plan,
            "trusted": plan.trusted(),
            "schema": plan.schema(),
            "mlp": plan.mlp_config(0),
            "replicates": PIPELINE_REPLICATES,
        }),
        serde_json::to_value(&result)?,
    )
    .with_flags(["spread_target_is_standard_deviation"]);
    Ok(Output::new(report).with_table(curve).with_table(heldout))
}
