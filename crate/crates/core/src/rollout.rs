//! Policy simulation and empirical reward distributions.
//!
//! Episodes are seeded individually from `mix(base_seed, index)`, so a batch
//! produces the same samples in the same order no matter how many worker
//! threads run it.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::delivery::{DeliveryMdp, JointState};
use crate::mdp::{ActionId, MdpSpec, Policy, PolicyError, StateId, ValueTable};
use crate::seed;

#[derive(Debug, Error, PartialEq)]
pub enum RolloutError {
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error("policy chose action {action} which is not legal in state {state}")]
    IllegalAction { state: StateId, action: ActionId },
    #[error("run count must be at least 1")]
    NoRuns,
    #[error("bin count must be at least 1")]
    NoBins,
    #[error("sample set is empty")]
    EmptySamples,
    #[error("sample contains a non-finite value")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminalKind {
    Delivered,
    Caught,
    Timeout,
}

impl TerminalKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TerminalKind::Delivered => "delivered",
            TerminalKind::Caught => "caught",
            TerminalKind::Timeout => "timeout",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub state: StateId,
    pub action: ActionId,
    pub reward: f64,
}

/// The `{s, a, r}` record of one delivery episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceLog {
    pub steps: Vec<Step>,
    pub terminal_kind: TerminalKind,
}

/// Result of running a policy on a generic MDP.
#[derive(Debug, Clone, PartialEq)]
pub struct Episode {
    pub steps: Vec<Step>,
    pub final_state: StateId,
    /// Whether the episode ended in a terminal state rather than at the horizon.
    pub absorbed: bool,
    pub total_reward: f64,
    pub discounted_return: f64,
}

/// Runs `policy` from `start` for at most `horizon` steps.
pub fn simulate_mdp(
    spec: &MdpSpec,
    start: StateId,
    horizon: u32,
    policy: &Policy,
    episode_seed: u64,
) -> Result<Episode, RolloutError> {
    let mut rng = seed::rng_from(episode_seed);
    let mut state = start;
    let mut steps = Vec::new();
    let mut total = 0.0;
    let mut discounted = 0.0;
    let mut discount = 1.0;
    for t in 0..horizon {
        if spec.is_terminal(state) {
            break;
        }
        let action = policy.action(state, seed::mix(episode_seed, u64::from(t)))?;
        let index = spec
            .action_index(state, action)
            .ok_or(RolloutError::IllegalAction { state, action })?;
        let tr = spec.sample(state, index, &mut rng);
        steps.push(Step {
            state,
            action,
            reward: tr.reward,
        });
        total += tr.reward;
        discounted += discount * tr.reward;
        discount *= spec.gamma();
        state = tr.next;
    }
    Ok(Episode {
        steps,
        final_state: state,
        absorbed: spec.is_terminal(state),
        total_reward: total,
        discounted_return: discounted,
    })
}

/// Simulates one delivery episode and returns its trace and undiscounted
/// cumulative reward. A truck that starts on the goal is delivered at step
/// zero and collects `r_goal`.
pub fn simulate_episode(
    mdp: &DeliveryMdp,
    policy: &Policy,
    episode_seed: u64,
) -> Result<(TraceLog, f64), RolloutError> {
    let params = &mdp.task().params;
    let start = mdp.start_state();
    if let Some(JointState::Pair { adt, .. }) = mdp.decode(start) {
        if adt == params.goal {
            let log = TraceLog {
                steps: Vec::new(),
                terminal_kind: TerminalKind::Delivered,
            };
            return Ok((log, params.rewards.goal));
        }
    }
    let ep = simulate_mdp(mdp.spec(), start, params.t_max, policy, episode_seed)?;
    let terminal_kind = match mdp.decode(ep.final_state) {
        Some(JointState::Delivered) => TerminalKind::Delivered,
        Some(JointState::Caught) => TerminalKind::Caught,
        _ => TerminalKind::Timeout,
    };
    let log = TraceLog {
        steps: ep.steps,
        terminal_kind,
    };
    Ok((log, ep.total_reward))
}

/// Undiscounted cumulative rewards of `m` episodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardSamples {
    pub values: Vec<f64>,
    pub terminals: Vec<TerminalKind>,
    pub base_seed: u64,
}

impl RewardSamples {
    pub fn run_count(&self) -> usize {
        self.values.len()
    }

    pub fn episode_seed(&self, index: usize) -> u64 {
        seed::mix(self.base_seed, index as u64)
    }

    pub fn count(&self, kind: TerminalKind) -> usize {
        self.terminals.iter().filter(|&&k| k == kind).count()
    }

    /// Writes `episode,seed,cum_reward,terminal` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "episode,seed,cum_reward,terminal")?;
        for (i, (v, k)) in self.values.iter().zip(&self.terminals).enumerate() {
            writeln!(out, "{i},{},{v},{}", self.episode_seed(i), k.as_str())?;
        }
        Ok(())
    }
}

/// Runs `m` independent delivery episodes in parallel.
pub fn monte_carlo(mdp: &DeliveryMdp, policy: &Policy, m: usize, base_seed: u64) -> Result<RewardSamples, RolloutError> {
    if m == 0 {
        return Err(RolloutError::NoRuns);
    }
    let runs: Vec<(f64, TerminalKind)> = (0..m)
        .into_par_iter()
        .map(|i| {
            simulate_episode(mdp, policy, seed::mix(base_seed, i as u64)).map(|(log, r)| (r, log.terminal_kind))
        })
        .collect::<Result<_, _>>()?;
    let (values, terminals) = runs.into_iter().unzip();
    Ok(RewardSamples {
        values,
        terminals,
        base_seed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    /// `bins` equal-width bins over `[lo, hi]`; the last bin is closed.
    pub fn equal_width(lo: f64, hi: f64, bins: usize) -> Vec<f64> {
        let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 0.5, lo + 0.5) };
        let width = (hi - lo) / bins as f64;
        let mut edges: Vec<f64> = (0..bins).map(|i| lo + width * i as f64).collect();
        edges.push(hi);
        edges
    }

    /// Counts `values` into the given edges. Values outside the outer edges
    /// are clamped into the first or last bin.
    pub fn with_edges(values: &[f64], edges: Vec<f64>) -> Histogram {
        let bins = edges.len().saturating_sub(1).max(1);
        let mut counts = vec![0u64; bins];
        for &v in values {
            // first edge strictly greater than v, minus one
            let i = edges.partition_point(|&e| e <= v).saturating_sub(1).min(bins - 1);
            counts[i] += 1;
        }
        Histogram { edges, counts }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        let total = self.total().max(1) as f64;
        self.counts.iter().map(|&c| c as f64 / total).collect()
    }

    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }
}

/// Summary statistics of a reward sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistSummary {
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation (denominator `n − 1`); 0 when `n < 2`.
    pub std: f64,
    pub stderr: f64,
    pub min: f64,
    pub max: f64,
    pub histogram: Histogram,
    /// Set when all values coincide or `n < 2`.
    pub degenerate: bool,
}

pub fn summarize(values: &[f64], bin_count: usize) -> Result<DistSummary, RolloutError> {
    if values.is_empty() {
        return Err(RolloutError::EmptySamples);
    }
    if bin_count == 0 {
        return Err(RolloutError::NoBins);
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(RolloutError::NonFinite);
    }
    let n = values.len();
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = (values.iter().sum::<f64>() / n as f64).clamp(min, max);
    let std = if n < 2 {
        0.0
    } else {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    };
    let histogram = Histogram::with_edges(values, Histogram::equal_width(min, max, bin_count));
    Ok(DistSummary {
        n,
        mean,
        std,
        stderr: std / (n as f64).sqrt(),
        min,
        max,
        histogram,
        degenerate: n < 2 || min == max,
    })
}

/// Empirical discounted return of the greedy VI policy against `V(start)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BridgeCheck {
    pub empirical_mean: f64,
    pub stderr: f64,
    pub vi_value: f64,
    /// `(empirical − V) / stderr`; 0 when both agree exactly.
    pub z_score: f64,
}

/// Compares the mean discounted return of `m` episodes of the greedy policy
/// in `table` with the value it predicts at `start`. Episodes stop at
/// `horizon`, so the horizon should make `γ^horizon` negligible.
pub fn discounted_return_check_mdp(
    spec: &MdpSpec,
    start: StateId,
    horizon: u32,
    table: &ValueTable,
    m: usize,
    base_seed: u64,
) -> Result<BridgeCheck, RolloutError> {
    if m == 0 {
        return Err(RolloutError::NoRuns);
    }
    let policy = Policy::Tabular(crate::mdp::TabularPolicy::greedy(table));
    let returns: Vec<f64> = (0..m)
        .into_par_iter()
        .map(|i| simulate_mdp(spec, start, horizon, &policy, seed::mix(base_seed, i as u64)).map(|e| e.discounted_return))
        .collect::<Result<_, _>>()?;
    let s = summarize(&returns, 1)?;
    let vi_value = table.value(start);
    let diff = s.mean - vi_value;
    let z_score = if diff == 0.0 { 0.0 } else { diff / s.stderr };
    Ok(BridgeCheck {
        empirical_mean: s.mean,
        stderr: s.stderr,
        vi_value,
        z_score,
    })
}

/// [`discounted_return_check_mdp`] on a delivery task, using its `t_max`.
pub fn discounted_return_check(
    mdp: &DeliveryMdp,
    table: &ValueTable,
    m: usize,
    base_seed: u64,
) -> Result<BridgeCheck, RolloutError> {
    discounted_return_check_mdp(mdp.spec(), mdp.start_state(), mdp.task().params.t_max, table, m, base_seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delivery::{build_mdp, DeliveryTask, GeneratorKind, RoadNetwork, TaskParams};
    use crate::mdp::{fixtures, value_iteration, TabularPolicy};

    fn path_task() -> DeliveryMdp {
        // A-B-C plus an isolated pursuer pair D-E
        let net = RoadNetwork::new(5, &[(0, 1), (1, 2), (3, 4)], GeneratorKind::Manual).unwrap();
        let params = TaskParams {
            adt_start: 0,
            mg_start: 3,
            goal: 2,
            p_trans: 1.0,
            ..TaskParams::default()
        };
        build_mdp(&DeliveryTask::new(net, params).unwrap()).unwrap()
    }

    fn vi_policy(mdp: &DeliveryMdp) -> Policy {
        Policy::Tabular(TabularPolicy::greedy(&value_iteration(mdp.spec(), 1e-9, 10_000).unwrap()))
    }

    #[test]
    fn deterministic_path_collects_1800() {
        let mdp = path_task();
        let (log, r) = simulate_episode(&mdp, &vi_policy(&mdp), 1).unwrap();
        assert_eq!(r, 1800.0);
        assert_eq!(log.steps.len(), 2);
        assert_eq!(log.terminal_kind, TerminalKind::Delivered);
        assert_eq!(log.steps[0].action, 1);
        assert_eq!(log.steps[1].action, 2);
    }

    #[test]
    fn start_on_goal_is_immediate_delivery() {
        let net = RoadNetwork::new(3, &[(0, 1), (1, 2)], GeneratorKind::Manual).unwrap();
        let params = TaskParams {
            adt_start: 2,
            mg_start: 0,
            goal: 2,
            ..TaskParams::default()
        };
        let mdp = build_mdp(&DeliveryTask::new(net, params).unwrap()).unwrap();
        let (log, r) = simulate_episode(&mdp, &Policy::Tabular(TabularPolicy::partial(vec![])), 0).unwrap();
        assert!(log.steps.is_empty());
        assert_eq!(log.terminal_kind, TerminalKind::Delivered);
        assert_eq!(r, 2000.0);
    }

    #[test]
    fn guaranteed_capture_takes_one_step() {
        let net = RoadNetwork::new(3, &[(0, 1)], GeneratorKind::Manual).unwrap();
        let params = TaskParams {
            adt_start: 0,
            mg_start: 1,
            goal: 2,
            p_trans: 1.0,
            mg_pursue_prob: 1.0,
            ..TaskParams::default()
        };
        let mdp = build_mdp(&DeliveryTask::new(net, params).unwrap()).unwrap();
        let stay = Policy::Tabular(TabularPolicy::partial(vec![Some(mdp.stay_action()); 11]));
        let (log, r) = simulate_episode(&mdp, &stay, 5).unwrap();
        assert_eq!(r, -2000.0);
        assert_eq!(log.steps.len(), 1);
        assert_eq!(log.terminal_kind, TerminalKind::Caught);
    }

    #[test]
    fn timeout_is_flagged_and_bounded() {
        let mdp = path_task();
        let stay = Policy::Tabular(TabularPolicy::partial(vec![Some(mdp.stay_action()); 27]));
        let (log, r) = simulate_episode(&mdp, &stay, 5).unwrap();
        assert_eq!(log.terminal_kind, TerminalKind::Timeout);
        assert_eq!(log.steps.len(), 50);
        assert_eq!(r, -200.0 * 50.0);
    }

    #[test]
    fn illegal_action_is_reported() {
        let mdp = path_task();
        let bad = Policy::Tabular(TabularPolicy::partial(vec![Some(4); 27]));
        assert!(matches!(
            simulate_episode(&mdp, &bad, 0),
            Err(RolloutError::IllegalAction { action: 4, .. })
        ));
    }

    #[test]
    fn monte_carlo_on_deterministic_task_is_constant() {
        let mdp = path_task();
        let s = monte_carlo(&mdp, &vi_policy(&mdp), 1000, 9).unwrap();
        assert_eq!(s.run_count(), 1000);
        assert!(s.values.iter().all(|&v| v == 1800.0));
        assert_eq!(s.count(TerminalKind::Delivered), 1000);
    }

    #[test]
    fn monte_carlo_rejects_zero_runs() {
        let mdp = path_task();
        assert_eq!(monte_carlo(&mdp, &vi_policy(&mdp), 0, 0), Err(RolloutError::NoRuns));
    }

    #[test]
    fn summary_of_constant_sample_is_degenerate() {
        let s = summarize(&[0.0, 0.0, 0.0], 4).unwrap();
        assert_eq!((s.mean, s.std), (0.0, 0.0));
        assert!(s.degenerate);
        assert_eq!(s.histogram.total(), 3);
    }

    #[test]
    fn summary_of_one_two_three() {
        let s = summarize(&[1.0, 2.0, 3.0], 2).unwrap();
        assert_eq!(s.mean, 2.0);
        assert_eq!(s.std, 1.0);
        assert!((s.stderr - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!(!s.degenerate);
        assert_eq!(s.histogram.edges, vec![1.0, 2.0, 3.0]);
        assert_eq!(s.histogram.counts, vec![1, 2]);
    }

    #[test]
    fn summary_rejects_bad_input() {
        assert_eq!(summarize(&[], 3), Err(RolloutError::EmptySamples));
        assert_eq!(summarize(&[1.0], 0), Err(RolloutError::NoBins));
        assert_eq!(summarize(&[f64::NAN], 1), Err(RolloutError::NonFinite));
    }

    #[test]
    fn csv_export_has_header_and_rows() {
        let s = RewardSamples {
            values: vec![1800.0, -2200.0],
            terminals: vec![TerminalKind::Delivered, TerminalKind::Caught],
            base_seed: 3,
        };
        let mut out = Vec::new();
        s.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "episode,seed,cum_reward,terminal");
        assert_eq!(lines[1], format!("0,{},1800,delivered", seed::mix(3, 0)));
        assert_eq!(lines[2], format!("1,{},-2200,caught", seed::mix(3, 1)));
    }

    #[test]
    fn bridge_is_exact_on_deterministic_chain() {
        let spec = fixtures::chain();
        let table = value_iteration(&spec, 1e-12, 1000).unwrap();
        let b = discounted_return_check_mdp(&spec, 0, 10, &table, 5, 1).unwrap();
        assert_eq!(b.empirical_mean, b.vi_value);
        assert_eq!(b.z_score, 0.0);
    }

    #[test]
    fn bridge_self_loop_within_truncation_bound() {
        let spec = fixtures::self_loop();
        let table = value_iteration(&spec, 1e-12, 10_000).unwrap();
        let b = discounted_return_check_mdp(&spec, 0, 200, &table, 3, 1).unwrap();
        assert!((b.empirical_mean - 10.0).abs() <= 10.0 * 0.9f64.powi(200) + 1e-9);
    }
}
