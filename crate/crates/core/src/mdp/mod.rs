//! Finite Markov decision processes and the two solvers used throughout the
//! crate: exact value iteration and Monte-Carlo tree search.

mod mcts;
mod policy;
mod random;
mod value_iteration;

pub use mcts::{mcts_plan, search, select_uct, EdgeStats, MctsConfig, SearchTree, ROLLOUT_SLACK};
pub use policy::{Policy, PolicyError, TabularPolicy};
pub use random::{random_mdp, RandomMdpParams};
pub use value_iteration::{value_iteration, ValueTable};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type StateId = usize;
pub type ActionId = usize;

/// Tolerance on the sum of a transition row.
pub const PROBABILITY_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum MdpError {
    #[error("invalid MDP: {0}")]
    InvalidSpec(String),
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("max_sweeps must be at least 1")]
    InvalidSweepLimit,
    #[error("state {0} is terminal")]
    TerminalState(StateId),
    #[error("state {0} is not part of the MDP")]
    UnknownState(StateId),
    #[error("invalid MCTS configuration: {0}")]
    InvalidConfig(String),
}

/// One possible outcome of taking an action.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub next: StateId,
    pub prob: f64,
    pub reward: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionRow {
    pub action: ActionId,
    pub outcomes: Vec<Transition>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StateRow {
    pub terminal: bool,
    pub actions: Vec<ActionRow>,
}

impl StateRow {
    pub fn terminal() -> Self {
        StateRow {
            terminal: true,
            actions: Vec::new(),
        }
    }

    pub fn with_actions(actions: Vec<ActionRow>) -> Self {
        StateRow {
            terminal: false,
            actions,
        }
    }
}

/// An enumerable MDP. States are `0..num_states()`; each non-terminal state
/// carries an ordered list of legal actions, and each action a distribution
/// over `(next state, reward)` pairs. Terminal states have no actions and
/// therefore contribute no further reward.
///
/// Validated on construction and immutable afterwards.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MdpSpec {
    gamma: f64,
    states: Vec<StateRow>,
}

impl MdpSpec {
    pub fn new(gamma: f64, states: Vec<StateRow>) -> Result<Self, MdpError> {
        let spec = MdpSpec { gamma, states };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<(), MdpError> {
        let invalid = |msg: String| Err(MdpError::InvalidSpec(msg));
        if !(0.0..1.0).contains(&self.gamma) {
            return invalid(format!("discount {} outside [0, 1)", self.gamma));
        }
        if self.states.is_empty() {
            return invalid("no states".into());
        }
        let n = self.states.len();
        for (s, row) in self.states.iter().enumerate() {
            if row.terminal {
                if !row.actions.is_empty() {
                    return invalid(format!("terminal state {s} has actions"));
                }
                continue;
            }
            if row.actions.is_empty() {
                return invalid(format!("non-terminal state {s} has no legal action"));
            }
            for (i, a) in row.actions.iter().enumerate() {
                if row.actions[..i].iter().any(|b| b.action == a.action) {
                    return invalid(format!("state {s} lists action {} twice", a.action));
                }
                if a.outcomes.is_empty() {
                    return invalid(format!("state {s} action {} has no outcomes", a.action));
                }
                let mut total = 0.0;
                for t in &a.outcomes {
                    if t.next >= n {
                        return invalid(format!("state {s} action {} leads to unknown state {}", a.action, t.next));
                    }
                    if !(0.0..=1.0).contains(&t.prob) {
                        return invalid(format!("state {s} action {} has probability {}", a.action, t.prob));
                    }
                    if !t.reward.is_finite() {
                        return invalid(format!("state {s} action {} has non-finite reward", a.action));
                    }
                    total += t.prob;
                }
                if (total - 1.0).abs() > PROBABILITY_SUM_TOLERANCE {
                    return invalid(format!("state {s} action {} probabilities sum to {total}", a.action));
                }
            }
        }
        Ok(())
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn contains(&self, state: StateId) -> bool {
        state < self.states.len()
    }

    pub fn is_terminal(&self, state: StateId) -> bool {
        self.states[state].terminal
    }

    pub fn rows(&self, state: StateId) -> &[ActionRow] {
        &self.states[state].actions
    }

    /// Legal actions of `state`, in their canonical order.
    pub fn actions(&self, state: StateId) -> impl Iterator<Item = ActionId> + '_ {
        self.states[state].actions.iter().map(|r| r.action)
    }

    pub fn action_index(&self, state: StateId, action: ActionId) -> Option<usize> {
        self.states
            .get(state)?
            .actions
            .iter()
            .position(|r| r.action == action)
    }

    pub fn transitions(&self, state: StateId, action: ActionId) -> Option<&[Transition]> {
        let idx = self.action_index(state, action)?;
        Some(&self.states[state].actions[idx].outcomes)
    }

    /// Reward of the `(state, action, next)` triple, if that outcome exists.
    pub fn reward(&self, state: StateId, action: ActionId, next: StateId) -> Option<f64> {
        self.transitions(state, action)?
            .iter()
            .find(|t| t.next == next)
            .map(|t| t.reward)
    }

    /// Expected immediate reward plus discounted continuation under `values`.
    pub fn q_value(&self, row: &ActionRow, values: &[f64]) -> f64 {
        row.outcomes
            .iter()
            .map(|t| t.prob * (t.reward + self.gamma * values[t.next]))
            .sum()
    }

    /// Samples an outcome of the action at position `action_index` in the
    /// state's action list.
    pub fn sample<R: Rng + ?Sized>(&self, state: StateId, action_index: usize, rng: &mut R) -> Transition {
        sample_outcome(&self.states[state].actions[action_index].outcomes, rng)
    }
}

pub(crate) fn sample_outcome<R: Rng + ?Sized>(outcomes: &[Transition], rng: &mut R) -> Transition {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for t in outcomes {
        acc += t.prob;
        if u < acc {
            return *t;
        }
    }
    // Rounding can leave `acc` a hair under 1; fall back to the last
    // outcome with non-zero mass.
    *outcomes
        .iter()
        .rev()
        .find(|t| t.prob > 0.0)
        .unwrap_or(&outcomes[outcomes.len() - 1])
}
