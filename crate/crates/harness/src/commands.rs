//! The non-experiment subcommands of the `famsec` tool.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use famsec_core::delivery::{
    build_mdp, generate_network, sample_admissible, DeliveryTask, GeneratorKind, GeneratorParams, NetworkDoc,
    RandomTaskSampler, TaskDocument,
};
use famsec_core::outcome::{assess_outcome, OutcomeStandard};
use famsec_core::rollout::{summarize, RewardSamples, TerminalKind};
use famsec_core::seed;
use famsec_core::solver::SolverSpec;
use famsec_core::solver_quality::{x_s_from_samples, SolverQualityConfig, Trusted};
use famsec_core::surrogate::{train_surrogate, SurrogateModel};
use serde_json::json;

use crate::error::HarnessError;
use crate::experiments::{measure, pooled_config, RunOptions, SurrogatePlan, SurrogatePreset, REPORT_BINS, XS_FLAGS};
use crate::report::{Output, Report, Table};

/// Sub-indices tried when sampling an admissible task.
const TASK_ATTEMPTS: u64 = 100;

/// A generated network, or a full task document when `with_task` is set.
/// Returns the suggested file name and the JSON text.
pub fn gen_network(
    kind: Option<GeneratorKind>,
    n: Option<usize>,
    with_task: bool,
    base_seed: u64,
) -> Result<(String, String), HarnessError> {
    if with_task {
        let mut sampler = RandomTaskSampler::default();
        if let Some(n) = n {
            sampler.n_range = (n, n);
        }
        if let Some(kind) = kind {
            sampler.generators = vec![kind];
        }
        sampler.validate()?;
        let (task, _) = sample_admissible(&sampler, 0, base_seed, TASK_ATTEMPTS)?;
        return Ok(("task.json".into(), TaskDocument::new(&task, base_seed).to_json()));
    }
    let kind = kind.unwrap_or(GeneratorKind::WattsStrogatz);
    let network = generate_network(kind, n.unwrap_or(13), &GeneratorParams::default(), base_seed)?;
    let doc = NetworkDoc::from(network);
    Ok(("network.json".into(), serde_json::to_string_pretty(&doc)? + "\n"))
}

pub fn load_task(path: &Path) -> Result<DeliveryTask, HarnessError> {
    let text = fs::read_to_string(path)
        .map_err(|e| HarnessError::Validation(format!("cannot read task file {}: {e}", path.display())))?;
    Ok(TaskDocument::from_json(&text)?.into_task()?)
}

fn samples_table(samples: &RewardSamples) -> Table {
    let mut t = Table::new("samples", &["episode", "seed", "cum_reward", "terminal"]);
    for (i, (v, k)) in samples.values.iter().zip(&samples.terminals).enumerate() {
        t.push([i.to_string(), samples.episode_seed(i).to_string(), v.to_string(), k.as_str().to_string()]);
    }
    t
}

fn terminal_json(samples: &RewardSamples) -> serde_json::Value {
    json!({
        "caught": samples.count(TerminalKind::Caught),
        "delivered": samples.count(TerminalKind::Delivered),
        "timeout": samples.count(TerminalKind::Timeout),
    })
}

/// Outcome assessment of `solver` on `task` against `standard`.
pub fn assess(
    task: &DeliveryTask,
    standard: OutcomeStandard,
    solver: &SolverSpec,
    runs: usize,
    base_seed: u64,
) -> Result<Output, HarnessError> {
    standard.validate()?;
    let mdp = build_mdp(task)?;
    let samples = measure(&mdp, solver, runs, seed::mix(base_seed, 1), seed::mix(base_seed, 2))?;
    let report = Report::new(
        "assess",
        base_seed,
        json!({
            "task": TaskDocument::new(task, base_seed),
            "solver": solver,
            "runs": runs,
            "standard": standard,
        }),
        json!({
            "summary": summarize(&samples.values, REPORT_BINS)?,
            "outcome": assess_outcome(&samples.values, &standard)?,
            "terminals": terminal_json(&samples),
        }),
    )
    .with_flags(["timeout_episodes_included"]);
    Ok(Output::new(report).with_table(samples_table(&samples)))
}

/// Trusted side of `solverq`: a solver to measure or a surrogate file.
#[derive(Debug, Clone, PartialEq)]
pub enum TrustedArg {
    Solver(SolverSpec),
    Model(PathBuf),
}

impl FromStr for TrustedArg {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.strip_prefix("model:") {
            Some(path) if !path.is_empty() => Ok(TrustedArg::Model(PathBuf::from(path))),
            Some(_) => Err(HarnessError::Validation("model: needs a file path".into())),
            None => Ok(TrustedArg::Solver(s.parse()?)),
        }
    }
}

/// Solver quality of `candidate` relative to `trusted`. A measured trusted
/// solver shares the pooled reward range; a surrogate brings its own range
/// and reads solver features from the candidate.
pub fn solverq(
    task: &DeliveryTask,
    trusted: &TrustedArg,
    candidate: &SolverSpec,
    runs: usize,
    base_seed: u64,
) -> Result<Output, HarnessError> {
    if runs < 2 {
        return Err(HarnessError::Validation("solver quality needs at least 2 runs".into()));
    }
    let mdp = build_mdp(task)?;
    let cand = measure(&mdp, candidate, runs, seed::mix(base_seed, 1), seed::mix(base_seed, 2))?;
    let mut flags: Vec<String> = XS_FLAGS.iter().map(|f| f.to_string()).collect();
    let (quality, trusted_json) = match trusted {
        TrustedArg::Solver(spec) => {
            let t = measure(&mdp, spec, runs, seed::mix(base_seed, 3), seed::mix(base_seed, 4))?;
            let cfg = pooled_config(task, [cand.values.as_slice(), t.values.as_slice()]);
            flags.push("reward_range_pooled_over_all_solvers".into());
            let q = x_s_from_samples(&cand.values, Trusted::Samples(&t.values), &cfg)?;
            (q, json!({"solver": spec, "summary": summarize(&t.values, REPORT_BINS)?}))
        }
        TrustedArg::Model(path) => {
            let model = SurrogateModel::load(path)?;
            let predicted = model.predict_task(task, candidate)?;
            let cfg = SolverQualityConfig::new(model.r_low, model.r_high);
            flags.push("trusted_predicted_by_surrogate".into());
            let q = x_s_from_samples(&cand.values, Trusted::Summary(predicted), &cfg)?;
            (q, json!({"model": path, "prediction": predicted, "features": model.feature_schema}))
        }
    };
    let report = Report::new(
        "solverq",
        base_seed,
        json!({
            "task": TaskDocument::new(task, base_seed),
            "candidate": candidate,
            "runs": runs,
        }),
        json!({
            "candidate_summary": summarize(&cand.values, REPORT_BINS)?,
            "candidate_terminals": terminal_json(&cand),
            "trusted": trusted_json,
            "quality": quality,
        }),
    )
    .with_flags(flags);
    Ok(Output::new(report).with_table(samples_table(&cand)))
}

/// Trains a surrogate for `preset`; returns the training report and model.
pub fn surrogate_train(
    preset: SurrogatePreset,
    opts: &RunOptions,
    epochs: Option<usize>,
) -> Result<(Output, SurrogateModel), HarnessError> {
    let plan = SurrogatePlan::new(preset, opts);
    let data = plan.generate()?;
    let mut config = plan.mlp_config(0);
    if let Some(e) = epochs {
        config.epochs = e;
    }
    let model = train_surrogate(&data, &config)?;
    let mut curve = Table::new("curve", &["epoch", "train_mse", "val_mse"]);
    for l in &model.metadata.mean_curve {
        curve.push([l.epoch as f64, l.train_mse, l.val_mse.unwrap_or(f64::NAN)]);
    }
    let mut rows = Table::new("training_data", &["task", "reward_mean", "reward_spread", "n_runs"]);
    for r in &data.rows {
        rows.push([r.task_index as f64, r.reward_mean, r.reward_spread, r.n_runs as f64]);
    }
    let report = Report::new(
        "surrogate_train",
        opts.seed,
        json!({"plan": plan, "trusted": plan.trusted(), "schema": plan.schema(), "mlp": config}),
        json!({
            "generated": data.generated,
            "rows": data.rows.len(),
            "rejections": data.rejections,
            "r_low": data.r_low,
            "r_high": data.r_high,
            "flags": model.metadata.flags,
            "final": model.metadata.mean_curve.last(),
        }),
    );
    Ok((Output::new(report).with_table(curve).with_table(rows), model))
}

/// Surrogate prediction of the trusted solver on `task`.
pub fn surrogate_predict(
    model: &SurrogateModel,
    task: &DeliveryTask,
    solver: &SolverSpec,
    base_seed: u64,
) -> Result<Output, HarnessError> {
    let features = model.feature_schema.extract(task, solver)?;
    let prediction = model.predict(&features)?;
    let report = Report::new(
        "surrogate_predict",
        base_seed,
        json!({"task": TaskDocument::new(task, base_seed), "solver": solver, "schema": model.feature_schema}),
        json!({"features": features, "prediction": prediction, "r_low": model.r_low, "r_high": model.r_high}),
    );
    Ok(Output::new(report))
}
