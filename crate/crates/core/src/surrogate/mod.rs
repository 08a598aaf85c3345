//! Surrogate models of the trusted solver: regressors from task (and solver)
//! features to the mean and spread of the trusted solver's cumulative
//! reward, so that solver quality can be assessed on tasks where the trusted
//! solver is too expensive to run.

mod mlp;

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use mlp::{gradient_check, Adam, Gradients, Layer, Mlp};

use crate::delivery::{admissible_task, build_mdp, DeliveryError, DeliveryTask, TaskSampler};
use crate::rollout::{monte_carlo, RolloutError};
use crate::seed;
use crate::solver::{SolverError, SolverSpec};
use crate::solver_quality::GaussianSummary;

pub const MODEL_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum SurrogateError {
    #[error("feature vector has {found} entries, schema {schema:?} expects {expected}")]
    SchemaMismatch { schema: Vec<String>, expected: usize, found: usize },
    #[error("unknown feature '{0}'")]
    UnknownFeature(String),
    #[error("feature '{0}' is undefined for solver {1}")]
    FeatureUndefined(String, String),
    #[error("model file schema version {found}, expected {expected}")]
    SchemaVersionMismatch { found: u64, expected: u32 },
    #[error("corrupt model file: {0}")]
    CorruptFile(String),
    #[error("invalid training data: {0}")]
    InvalidData(String),
    #[error("invalid training config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Delivery(#[from] DeliveryError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Rollout(#[from] RolloutError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Named, ordered task features. Recognized names: `n` (node count),
/// `p_trans`, and the trusted solver's `e_m`, `d_m`, `its_m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeatureSchema(pub Vec<String>);

impl FeatureSchema {
    const KNOWN: [&'static str; 5] = ["n", "p_trans", "e_m", "d_m", "its_m"];

    pub fn baseline() -> Self {
        FeatureSchema(vec!["n".into(), "p_trans".into()])
    }

    pub fn extended() -> Self {
        FeatureSchema(Self::KNOWN.iter().map(|s| s.to_string()).collect())
    }

    pub fn new(names: &[&str]) -> Result<Self, SurrogateError> {
        if let Some(bad) = names.iter().find(|n| !Self::KNOWN.contains(n)) {
            return Err(SurrogateError::UnknownFeature(bad.to_string()));
        }
        Ok(FeatureSchema(names.iter().map(|s| s.to_string()).collect()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Feature vector of `task` solved by `solver`.
    pub fn extract(&self, task: &DeliveryTask, solver: &SolverSpec) -> Result<Vec<f64>, SurrogateError> {
        self.0
            .iter()
            .map(|name| {
                let mcts = match *solver {
                    SolverSpec::Mcts {
                        depth,
                        iterations,
                        exploration,
                        ..
                    } => Some((f64::from(depth), f64::from(iterations), exploration)),
                    SolverSpec::Vi => None,
                };
                let undefined = || SurrogateError::FeatureUndefined(name.clone(), solver.to_string());
                Ok(match name.as_str() {
                    "n" => task.node_count() as f64,
                    "p_trans" => task.params.p_trans,
                    "d_m" => mcts.ok_or_else(undefined)?.0,
                    "its_m" => mcts.ok_or_else(undefined)?.1,
                    "e_m" => mcts.ok_or_else(undefined)?.2,
                    other => return Err(SurrogateError::UnknownFeature(other.into())),
                })
            })
            .collect()
    }
}

/// Which spread statistic the spread network learns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpreadKind {
    #[default]
    StdDev,
    StdErr,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingRow {
    pub features: Vec<f64>,
    pub reward_mean: f64,
    pub reward_spread: f64,
    pub n_runs: usize,
    /// Sampler index of the task this row came from.
    pub task_index: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingSet {
    pub schema: FeatureSchema,
    pub spread: SpreadKind,
    pub rows: Vec<TrainingRow>,
    /// Pooled minimum and maximum of every raw sample.
    pub r_low: f64,
    pub r_high: f64,
    /// Number of tasks drawn from the sampler.
    pub generated: usize,
    /// Tasks dropped by the admissibility filter, keyed by reason.
    pub rejections: BTreeMap<String, usize>,
}

/// How training data is produced.
pub struct DataPlan<'a> {
    pub sampler: &'a dyn TaskSampler,
    pub trusted: SolverSpec,
    /// When set, each task's trusted exploration constant is drawn uniformly
    /// from this range (the trusted solver must be tree search).
    pub exploration_range: Option<(f64, f64)>,
    pub schema: FeatureSchema,
    pub task_count: usize,
    pub m_runs: usize,
    pub spread: SpreadKind,
    pub base_seed: u64,
}

impl DataPlan<'_> {
    fn trusted_for(&self, index: u64) -> SolverSpec {
        match (self.exploration_range, self.trusted) {
            (
                Some((lo, hi)),
                SolverSpec::Mcts {
                    depth,
                    iterations,
                    horizon,
                    ..
                },
            ) => {
                let mut rng = seed::rng_from(seed::mix_all(self.base_seed, &[index, 3]));
                let exploration = if hi > lo { rng.random_range(lo..=hi) } else { lo };
                SolverSpec::Mcts {
                    depth,
                    iterations,
                    exploration,
                    horizon,
                }
            }
            (_, spec) => spec,
        }
    }
}

struct TaskOutcome {
    row: TrainingRow,
    min: f64,
    max: f64,
}

/// Samples `task_count` tasks, drops inadmissible ones, and records the
/// trusted solver's Monte-Carlo reward statistics for the rest.
pub fn generate_training_data(plan: &DataPlan<'_>) -> Result<TrainingSet, SurrogateError> {
    if plan.task_count == 0 {
        return Err(SurrogateError::InvalidConfig("task count must be positive".into()));
    }
    if plan.m_runs < 2 {
        return Err(SurrogateError::InvalidConfig("need at least 2 runs per task".into()));
    }
    if let Some((lo, hi)) = plan.exploration_range {
        if !(0.0 <= lo && lo <= hi) || plan.trusted == SolverSpec::Vi {
            return Err(SurrogateError::InvalidConfig(
                "exploration range needs a tree-search trusted solver and 0 <= lo <= hi".into(),
            ));
        }
    }
    let results: Vec<Result<TaskOutcome, crate::delivery::RejectReason>> = (0..plan.task_count as u64)
        .into_par_iter()
        .map(|i| -> Result<_, SurrogateError> {
            let task = plan.sampler.sample(i, plan.base_seed)?;
            if let Err(reason) = admissible_task(&task) {
                return Ok(Err(reason));
            }
            let trusted = plan.trusted_for(i);
            let features = plan.schema.extract(&task, &trusted)?;
            let mdp = build_mdp(&task)?;
            let policy = trusted.policy(&mdp, seed::mix_all(plan.base_seed, &[i, 1]))?;
            let samples = monte_carlo(&mdp, &policy, plan.m_runs, seed::mix_all(plan.base_seed, &[i, 2]))?;
            let g = GaussianSummary::from_samples(&samples.values).expect("m_runs >= 2");
            let spread = match plan.spread {
                SpreadKind::StdDev => g.sigma,
                SpreadKind::StdErr => g.sigma / (plan.m_runs as f64).sqrt(),
            };
            let (min, max) = samples
                .values
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
            Ok(Ok(TaskOutcome {
                row: TrainingRow {
                    features,
                    reward_mean: g.mu,
                    reward_spread: spread,
                    n_runs: plan.m_runs,
                    task_index: i,
                },
                min,
                max,
            }))
        })
        .collect::<Result<_, _>>()?;
    let mut rows = Vec::new();
    let mut rejections = BTreeMap::new();
    let (mut r_low, mut r_high) = (f64::INFINITY, f64::NEG_INFINITY);
    for r in results {
        match r {
            Ok(t) => {
                r_low = r_low.min(t.min);
                r_high = r_high.max(t.max);
                rows.push(t.row);
            }
            Err(reason) => *rejections.entry(reason.as_str().to_string()).or_insert(0) += 1,
        }
    }
    Ok(TrainingSet {
        schema: plan.schema.clone(),
        spread: plan.spread,
        rows,
        r_low,
        r_high,
        generated: plan.task_count,
        rejections,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpConfig {
    pub hidden_layers: Vec<usize>,
    pub dropout_rate: f64,
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub validation_fraction: f64,
    pub rng_seed: u64,
}

impl Default for MlpConfig {
    fn default() -> Self {
        MlpConfig {
            hidden_layers: vec![10, 10],
            dropout_rate: 0.3,
            epochs: 500,
            learning_rate: 1e-3,
            batch_size: 32,
            validation_fraction: 0.2,
            rng_seed: 0,
        }
    }
}

impl MlpConfig {
    pub fn validate(&self) -> Result<(), SurrogateError> {
        let bad = |m: &str| Err(SurrogateError::InvalidConfig(m.into()));
        if !(0.0..1.0).contains(&self.dropout_rate) {
            return bad("dropout must lie in [0, 1)");
        }
        if self.epochs == 0 || self.batch_size == 0 {
            return bad("epochs and batch size must be positive");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning rate must be positive");
        }
        if !(0.0..1.0).contains(&self.validation_fraction) {
            return bad("validation fraction must lie in [0, 1)");
        }
        if self.hidden_layers.contains(&0) {
            return bad("hidden layers must have positive width");
        }
        Ok(())
    }
}

/// Affine standardization `(x − mean) / scale`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Normalization {
    /// Column statistics; constant columns get scale 1.
    fn fit(columns: &[Vec<f64>]) -> (Normalization, bool) {
        let mut degenerate = false;
        let (mean, scale) = columns
            .iter()
            .map(|col| {
                let n = col.len().max(1) as f64;
                let m = col.iter().sum::<f64>() / n;
                let sd = (col.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n).sqrt();
                if sd > 0.0 {
                    (m, sd)
                } else {
                    degenerate = true;
                    (m, 1.0)
                }
            })
            .unzip();
        (Normalization { mean, scale }, degenerate)
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.mean.iter().zip(&self.scale))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochLoss {
    pub epoch: usize,
    pub train_mse: f64,
    pub val_mse: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrainingFlag {
    /// Some feature was constant across the training rows.
    DegenerateFeatures,
    /// Final validation error exceeds twice the final training error.
    PossibleOverfit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMetadata {
    pub config: MlpConfig,
    /// Losses (standardized target units) of the mean network.
    pub mean_curve: Vec<EpochLoss>,
    pub spread_curve: Vec<EpochLoss>,
    /// Row indices held out for validation.
    pub validation_rows: Vec<usize>,
    pub flags: Vec<TrainingFlag>,
}

/// Trained mean and spread regressors plus everything needed to apply them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurrogateModel {
    pub schema_version: u32,
    pub feature_schema: FeatureSchema,
    pub spread: SpreadKind,
    pub feature_norm: Normalization,
    /// Target standardization: index 0 is the mean, 1 the spread.
    pub target_norm: Normalization,
    pub mean_net: Mlp,
    pub spread_net: Mlp,
    pub r_low: f64,
    pub r_high: f64,
    pub metadata: TrainingMetadata,
}

/// Trains one regressor, returning it with its per-epoch losses.
fn fit_net(
    xs: &[Vec<f64>],
    ys: &[f64],
    train: &[usize],
    val: &[usize],
    config: &MlpConfig,
    stream: u64,
) -> (Mlp, Vec<EpochLoss>) {
    let mut rng = seed::rng_from(seed::mix(config.rng_seed, stream));
    let mut net = Mlp::new(xs[0].len(), &config.hidden_layers, &mut rng);
    let mut opt = Adam::new(&net, config.learning_rate);
    let pick = |idx: &[usize]| -> (Vec<Vec<f64>>, Vec<f64>) {
        (idx.iter().map(|&i| xs[i].clone()).collect(), idx.iter().map(|&i| ys[i]).collect())
    };
    let (tx, ty) = pick(train);
    let (vx, vy) = pick(val);
    let mut order = train.to_vec();
    let mut curve = Vec::with_capacity(config.epochs);
    for epoch in 1..=config.epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(config.batch_size) {
            let (bx, by) = pick(batch);
            let (_, grads) = net.loss_and_gradients(&bx, &by, config.dropout_rate, &mut rng);
            opt.update(&mut net, &grads);
        }
        curve.push(EpochLoss {
            epoch,
            train_mse: net.mse(&tx, &ty),
            val_mse: (!val.is_empty()).then(|| net.mse(&vx, &vy)),
        });
    }
    (net, curve)
}

/// Trains the mean and spread networks on `data`.
pub fn train_surrogate(data: &TrainingSet, config: &MlpConfig) -> Result<SurrogateModel, SurrogateError> {
    config.validate()?;
    let n = data.rows.len();
    if n < 2 {
        return Err(SurrogateError::InvalidData(format!("need at least 2 rows, got {n}")));
    }
    let width = data.schema.len();
    if let Some(r) = data.rows.iter().find(|r| r.features.len() != width || r.features.iter().any(|v| !v.is_finite())) {
        return Err(SurrogateError::InvalidData(format!("row for task {} does not match the schema", r.task_index)));
    }
    if !(data.r_low.is_finite() && data.r_high.is_finite()) {
        return Err(SurrogateError::InvalidData("reward range is not finite".into()));
    }
    let columns: Vec<Vec<f64>> = (0..width).map(|j| data.rows.iter().map(|r| r.features[j]).collect()).collect();
    let (feature_norm, degenerate) = Normalization::fit(&columns);
    let (target_norm, _) = Normalization::fit(&[
        data.rows.iter().map(|r| r.reward_mean).collect(),
        data.rows.iter().map(|r| r.reward_spread).collect(),
    ]);
    let xs: Vec<Vec<f64>> = data.rows.iter().map(|r| feature_norm.apply(&r.features)).collect();
    let ys_mean: Vec<f64> = data.rows.iter().map(|r| (r.reward_mean - target_norm.mean[0]) / target_norm.scale[0]).collect();
    let ys_spread: Vec<f64> =
        data.rows.iter().map(|r| (r.reward_spread - target_norm.mean[1]) / target_norm.scale[1]).collect();

    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut seed::rng_from(seed::mix(config.rng_seed, 0)));
    let n_val = ((n as f64) * config.validation_fraction).round() as usize;
    let n_val = n_val.min(n - 1);
    let (val, train) = idx.split_at(n_val);
    let (mean_net, mean_curve) = fit_net(&xs, &ys_mean, train, val, config, 1);
    let (spread_net, spread_curve) = fit_net(&xs, &ys_spread, train, val, config, 2);

    let mut flags = Vec::new();
    if degenerate {
        flags.push(TrainingFlag::DegenerateFeatures);
    }
    let overfit = |c: &[EpochLoss]| c.last().and_then(|l| l.val_mse.map(|v| v > 2.0 * l.train_mse)).unwrap_or(false);
    if overfit(&mean_curve) || overfit(&spread_curve) {
        flags.push(TrainingFlag::PossibleOverfit);
    }
    let mut validation_rows = val.to_vec();
    validation_rows.sort_unstable();
    Ok(SurrogateModel {
        schema_version: MODEL_SCHEMA_VERSION,
        feature_schema: data.schema.clone(),
        spread: data.spread,
        feature_norm,
        target_norm,
        mean_net,
        spread_net,
        r_low: data.r_low,
        r_high: data.r_high,
        metadata: TrainingMetadata {
            config: config.clone(),
            mean_curve,
            spread_curve,
            validation_rows,
            flags,
        },
    })
}

impl SurrogateModel {
    pub fn sigma_min(&self) -> f64 {
        1e-6 * (self.r_high - self.r_low).abs().max(f64::MIN_POSITIVE)
    }

    /// Predicted trusted-solver reward mean and spread at `features`.
    pub fn predict(&self, features: &[f64]) -> Result<GaussianSummary, SurrogateError> {
        if features.len() != self.feature_schema.len() {
            return Err(SurrogateError::SchemaMismatch {
                schema: self.feature_schema.0.clone(),
                expected: self.feature_schema.len(),
                found: features.len(),
            });
        }
        let x = self.feature_norm.apply(features);
        let mu = self.mean_net.predict(&x) * self.target_norm.scale[0] + self.target_norm.mean[0];
        let spread = self.spread_net.predict(&x) * self.target_norm.scale[1] + self.target_norm.mean[1];
        Ok(GaussianSummary::new(mu, spread.max(self.sigma_min())))
    }

    /// Prediction for a task solved by `trusted`.
    pub fn predict_task(&self, task: &DeliveryTask, trusted: &SolverSpec) -> Result<GaussianSummary, SurrogateError> {
        self.predict(&self.feature_schema.extract(task, trusted)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("models serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, SurrogateError> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| SurrogateError::CorruptFile(e.to_string()))?;
        let found = value
            .get("schema_version")
            .and_then(serde_json::Value::as_u64)
            .ok_or_else(|| SurrogateError::CorruptFile("missing schema_version".into()))?;
        if found != u64::from(MODEL_SCHEMA_VERSION) {
            return Err(SurrogateError::SchemaVersionMismatch {
                found,
                expected: MODEL_SCHEMA_VERSION,
            });
        }
        serde_json::from_str(text).map_err(|e| SurrogateError::CorruptFile(e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<(), SurrogateError> {
        fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, SurrogateError> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    /// Writes the `epoch,train_mse,val_mse` curve of the mean network.
    pub fn write_curve_csv<W: io::Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "epoch,train_mse,val_mse")?;
        for l in &self.metadata.mean_curve {
            let val = l.val_mse.map(|v| v.to_string()).unwrap_or_default();
            writeln!(out, "{},{},{val}", l.epoch, l.train_mse)?;
        }
        Ok(())
    }
}

/// Pearson correlation; `None` if either side is constant or lengths differ.
pub fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    if a.len() != b.len() || a.len() < 2 {
        return None;
    }
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma).powi(2);
        sbb += (y - mb).powi(2);
    }
    (saa > 0.0 && sbb > 0.0).then(|| sab / (saa * sbb).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant_set() -> TrainingSet {
        let rows = (0..40)
            .map(|i| TrainingRow {
                features: vec![8.0 + (i % 28) as f64, (i as f64) / 40.0],
                reward_mean: 100.0,
                reward_spread: 10.0,
                n_runs: 10,
                task_index: i,
            })
            .collect();
        TrainingSet {
            schema: FeatureSchema::baseline(),
            spread: SpreadKind::StdDev,
            rows,
            r_low: 0.0,
            r_high: 200.0,
            generated: 40,
            rejections: BTreeMap::new(),
        }
    }

    fn quick() -> MlpConfig {
        MlpConfig {
            epochs: 60,
            ..MlpConfig::default()
        }
    }

    #[test]
    fn constant_targets_are_recovered() {
        let model = train_surrogate(&constant_set(), &MlpConfig::default()).unwrap();
        let g = model.predict(&[12.0, 0.5]).unwrap();
        assert!((g.mu - 100.0).abs() <= 5.0, "{}", g.mu);
        assert_eq!(model.predict(&[12.0, 0.5]).unwrap(), g);
    }

    #[test]
    fn schema_is_enforced() {
        let model = train_surrogate(&constant_set(), &quick()).unwrap();
        assert!(matches!(model.predict(&[1.0]), Err(SurrogateError::SchemaMismatch { .. })));
        assert!(matches!(FeatureSchema::new(&["n", "colour"]), Err(SurrogateError::UnknownFeature(_))));
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let model = train_surrogate(&constant_set(), &quick()).unwrap();
        let back = SurrogateModel::from_json(&model.to_json()).unwrap();
        assert_eq!(back, model);
        let x = [20.0, 0.3];
        assert_eq!(back.predict(&x).unwrap().mu.to_bits(), model.predict(&x).unwrap().mu.to_bits());
    }

    #[test]
    fn bad_files_are_rejected() {
        let model = train_surrogate(&constant_set(), &quick()).unwrap();
        let text = model.to_json().replacen("\"schema_version\": 1", "\"schema_version\": 7", 1);
        assert!(matches!(
            SurrogateModel::from_json(&text),
            Err(SurrogateError::SchemaVersionMismatch { found: 7, .. })
        ));
        let truncated = &model.to_json()[..200];
        assert!(matches!(SurrogateModel::from_json(truncated), Err(SurrogateError::CorruptFile(_))));
    }

    #[test]
    fn training_is_deterministic_and_records_curves() {
        let a = train_surrogate(&constant_set(), &quick()).unwrap();
        let b = train_surrogate(&constant_set(), &quick()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.metadata.mean_curve.len(), 60);
        assert_eq!(a.metadata.validation_rows.len(), 8);
        assert!(a.metadata.mean_curve.iter().all(|l| l.val_mse.is_some()));
        let mut csv = Vec::new();
        a.write_curve_csv(&mut csv).unwrap();
        assert!(String::from_utf8(csv).unwrap().starts_with("epoch,train_mse,val_mse\n1,"));
    }

    #[test]
    fn constant_features_are_flagged() {
        let mut set = constant_set();
        set.rows.iter_mut().for_each(|r| r.features[0] = 13.0);
        let model = train_surrogate(&set, &quick()).unwrap();
        assert!(model.metadata.flags.contains(&TrainingFlag::DegenerateFeatures));
    }

    #[test]
    fn pearson_basics() {
        assert_eq!(pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]), Some(1.0));
        assert_eq!(pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]), Some(-1.0));
        assert_eq!(pearson(&[1.0, 1.0], &[3.0, 2.0]), None);
    }
}
