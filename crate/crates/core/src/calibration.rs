//! Calibration of assessment-derived success predictions with the Brier
//! score.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::delivery::{build_mdp, DeliveryError, DeliveryTask};
use crate::rollout::{monte_carlo, simulate_episode, RolloutError};
use crate::seed;
use crate::solver::{SolverError, SolverSpec};

#[derive(Debug, Error)]
pub enum CalibrationError {
    #[error("predictions ({predictions}) and outcomes ({outcomes}) differ in length")]
    LengthMismatch { predictions: usize, outcomes: usize },
    #[error("nothing to score")]
    Empty,
    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("invalid calibration setup: {0}")]
    InvalidSetup(String),
    #[error(transparent)]
    Delivery(#[from] DeliveryError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Rollout(#[from] RolloutError),
}

/// Mean squared difference between predicted probabilities and 0/1
/// outcomes.
pub fn brier_score(predicted: &[f64], outcomes: &[bool]) -> Result<f64, CalibrationError> {
    if predicted.len() != outcomes.len() {
        return Err(CalibrationError::LengthMismatch {
            predictions: predicted.len(),
            outcomes: outcomes.len(),
        });
    }
    if predicted.is_empty() {
        return Err(CalibrationError::Empty);
    }
    if let Some(&p) = predicted.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(CalibrationError::InvalidProbability(p));
    }
    let sum: f64 = predicted
        .iter()
        .zip(outcomes)
        .map(|(p, &o)| (p - if o { 1.0 } else { 0.0 }).powi(2))
        .sum();
    Ok(sum / predicted.len() as f64)
}

/// A delivery counts as a success when its cumulative reward is at least 0.
pub fn is_success(cumulative_reward: f64) -> bool {
    cumulative_reward >= 0.0
}

/// Fraction of successful samples.
pub fn success_probability(values: &[f64]) -> Result<f64, CalibrationError> {
    if values.is_empty() {
        return Err(CalibrationError::Empty);
    }
    Ok(values.iter().filter(|&&v| is_success(v)).count() as f64 / values.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationEntry {
    pub task_index: usize,
    pub predicted: f64,
    /// Outcomes of the fresh truth episodes.
    pub outcomes: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub solver: SolverSpec,
    pub m_assess: usize,
    pub m_truth: usize,
    pub seed: u64,
    pub entries: Vec<CalibrationEntry>,
    pub brier_model: f64,
    pub brier_constant_half: f64,
    /// Constant prediction of the majority truth outcome.
    pub brier_majority: f64,
    /// Model predictions permuted across tasks.
    pub brier_shuffled: f64,
}

/// Predicts each task's success probability from `m_assess` episodes and
/// scores it against `m_truth` fresh episodes whose seeds are disjoint from
/// the assessment seeds.
pub fn calibration_experiment(
    tasks: &[DeliveryTask],
    solver: &SolverSpec,
    m_assess: usize,
    m_truth: usize,
    seed: u64,
) -> Result<CalibrationReport, CalibrationError> {
    if tasks.is_empty() || m_assess == 0 || m_truth == 0 {
        return Err(CalibrationError::InvalidSetup("need tasks, m_assess >= 1 and m_truth >= 1".into()));
    }
    let entries: Vec<CalibrationEntry> = tasks
        .par_iter()
        .enumerate()
        .map(|(i, task)| -> Result<_, CalibrationError> {
            let i64 = i as u64;
            let mdp = build_mdp(task)?;
            let policy = solver.policy(&mdp, seed::mix_all(seed, &[i64, 0]))?;
            let assess = monte_carlo(&mdp, &policy, m_assess, seed::mix_all(seed, &[i64, 1]))?;
            let predicted = success_probability(&assess.values)?;
            let truth_base = seed::mix_all(seed, &[i64, 2]);
            let outcomes = (0..m_truth as u64)
                .map(|j| simulate_episode(&mdp, &policy, seed::mix(truth_base, j)).map(|(_, r)| is_success(r)))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(CalibrationEntry {
                task_index: i,
                predicted,
                outcomes,
            })
        })
        .collect::<Result<_, _>>()?;

    let flat = |preds: &[f64]| -> (Vec<f64>, Vec<bool>) {
        let mut p = Vec::new();
        let mut o = Vec::new();
        for (e, &pred) in entries.iter().zip(preds) {
            for &out in &e.outcomes {
                p.push(pred);
                o.push(out);
            }
        }
        (p, o)
    };
    let model: Vec<f64> = entries.iter().map(|e| e.predicted).collect();
    let (p, o) = flat(&model);
    let brier_model = brier_score(&p, &o)?;
    let brier_constant_half = brier_score(&vec![0.5; o.len()], &o)?;
    let successes = o.iter().filter(|&&b| b).count();
    let majority = if 2 * successes >= o.len() { 1.0 } else { 0.0 };
    let brier_majority = brier_score(&vec![majority; o.len()], &o)?;
    let mut shuffled = model.clone();
    shuffled.shuffle(&mut seed::rng_from(seed::mix(seed, u64::MAX)));
    let (sp, so) = flat(&shuffled);
    let brier_shuffled = brier_score(&sp, &so)?;
    Ok(CalibrationReport {
        solver: *solver,
        m_assess,
        m_truth,
        seed,
        entries,
        brier_model,
        brier_constant_half,
        brier_majority,
        brier_shuffled,
    })
}
