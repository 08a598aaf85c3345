use serde::{Deserialize, Serialize};

use super::{ActionId, MdpError, MdpSpec, StateId};

/// Result of value iteration: state values, the greedy policy they induce,
/// and convergence metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueTable {
    pub values: Vec<f64>,
    /// Greedy action per state; `None` for terminal states.
    pub greedy_policy: Vec<Option<ActionId>>,
    pub sweeps: usize,
    /// Max-norm difference between the last two sweeps, one entry per sweep.
    pub sweep_residuals: Vec<f64>,
    /// `max_s |(BV)(s) - V(s)|` of the returned values.
    pub bellman_residual: f64,
    pub converged: bool,
}

impl ValueTable {
    pub fn value(&self, state: StateId) -> f64 {
        self.values[state]
    }

    pub fn action(&self, state: StateId) -> Option<ActionId> {
        self.greedy_policy[state]
    }
}

/// Synchronous (Jacobi) value iteration.
///
/// Stops when the sweep-to-sweep change is at most `tolerance`, which bounds
/// the Bellman residual of the returned table by `gamma * tolerance`. Hitting
/// `max_sweeps` first is not an error; the table comes back with
/// `converged == false`.
pub fn value_iteration(spec: &MdpSpec, tolerance: f64, max_sweeps: usize) -> Result<ValueTable, MdpError> {
    if !(tolerance > 0.0 && tolerance.is_finite()) {
        return Err(MdpError::InvalidTolerance(tolerance));
    }
    if max_sweeps == 0 {
        return Err(MdpError::InvalidSweepLimit);
    }
    let n = spec.num_states();
    let mut values = vec![0.0; n];
    let mut next = vec![0.0; n];
    let mut sweep_residuals = Vec::new();
    let mut converged = false;

    for _ in 0..max_sweeps {
        let mut residual: f64 = 0.0;
        for s in 0..n {
            let v = backup(spec, s, &values).0;
            residual = residual.max((v - values[s]).abs());
            next[s] = v;
        }
        std::mem::swap(&mut values, &mut next);
        sweep_residuals.push(residual);
        if residual <= tolerance {
            converged = true;
            break;
        }
    }

    let mut greedy_policy = Vec::with_capacity(n);
    let mut bellman_residual: f64 = 0.0;
    for s in 0..n {
        let (v, action) = backup(spec, s, &values);
        bellman_residual = bellman_residual.max((v - values[s]).abs());
        greedy_policy.push(action);
    }

    Ok(ValueTable {
        values,
        greedy_policy,
        sweeps: sweep_residuals.len(),
        sweep_residuals,
        bellman_residual,
        converged,
    })
}

/// Best Q-value at `state` and the action achieving it. Ties go to the
/// earliest action in the state's list.
fn backup(spec: &MdpSpec, state: StateId, values: &[f64]) -> (f64, Option<ActionId>) {
    if spec.is_terminal(state) {
        return (0.0, None);
    }
    let mut best: Option<(f64, ActionId)> = None;
    for row in spec.rows(state) {
        let q = spec.q_value(row, values);
        if best.is_none_or(|(b, _)| q > b) {
            best = Some((q, row.action));
        }
    }
    let (v, a) = best.expect("non-terminal state has an action");
    (v, Some(a))
}

#[cfg(test)]
mod tests {
    use super::super::fixtures;
    use super::*;

    #[test]
    fn chain_values() {
        let t = value_iteration(&fixtures::chain(), 1e-12, 1000).unwrap();
        assert_eq!(t.values, vec![1.0, 0.0]);
        assert_eq!(t.greedy_policy, vec![Some(0), None]);
        assert!(t.converged);
    }

    #[test]
    fn self_loop_is_geometric_series() {
        let t = value_iteration(&fixtures::self_loop(), 1e-10, 10_000).unwrap();
        assert!((t.values[0] - 10.0).abs() < 1e-8);
        assert!(t.bellman_residual <= 1e-10);
    }

    #[test]
    fn dominance_picks_rewarding_action() {
        let t = value_iteration(&fixtures::dominance(), 1e-9, 100).unwrap();
        assert_eq!(t.action(0), Some(1));
    }

    #[test]
    fn reports_non_convergence_without_failing() {
        let t = value_iteration(&fixtures::self_loop(), 1e-12, 3).unwrap();
        assert!(!t.converged);
        assert_eq!(t.sweeps, 3);
        assert!(t.bellman_residual > 1e-12);
    }

    #[test]
    fn rejects_bad_arguments() {
        let spec = fixtures::chain();
        assert_eq!(value_iteration(&spec, 0.0, 10), Err(MdpError::InvalidTolerance(0.0)));
        assert_eq!(value_iteration(&spec, 1e-3, 0), Err(MdpError::InvalidSweepLimit));
    }

    #[test]
    fn ties_break_to_lowest_index() {
        use super::super::{ActionRow, StateRow, Transition};
        let spec = MdpSpec::new(
            0.9,
            vec![
                StateRow::with_actions(vec![
                    ActionRow { action: 5, outcomes: vec![Transition { next: 1, prob: 1.0, reward: 1.0 }] },
                    ActionRow { action: 3, outcomes: vec![Transition { next: 1, prob: 1.0, reward: 1.0 }] },
                ]),
                StateRow::terminal(),
            ],
        )
        .unwrap();
        let t = value_iteration(&spec, 1e-9, 100).unwrap();
        assert_eq!(t.action(0), Some(5));
    }
}
