//! Seeded random MDPs for solver cross-checks.

use rand::Rng;

use super::{ActionRow, MdpSpec, StateRow, Transition};
use crate::seed;

/// Shape of a random MDP. Every state is non-terminal unless
/// `terminal_states > 0`, in which case the last states absorb.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomMdpParams {
    pub states: usize,
    pub actions: usize,
    /// Distinct successor states per action (capped at `states`).
    pub branching: usize,
    pub gamma: f64,
    pub terminal_states: usize,
}

impl Default for RandomMdpParams {
    fn default() -> Self {
        RandomMdpParams {
            states: 5,
            actions: 2,
            branching: 2,
            gamma: 0.5,
            terminal_states: 0,
        }
    }
}

/// Random MDP with rewards uniform in [0, 1) and successor probabilities
/// drawn from normalized uniform weights.
pub fn random_mdp(params: &RandomMdpParams, rng_seed: u64) -> MdpSpec {
    let mut rng = seed::rng_from(rng_seed);
    let n = params.states.max(1);
    let live = n - params.terminal_states.min(n - 1);
    let branching = params.branching.clamp(1, n);
    let states = (0..n)
        .map(|s| {
            if s >= live {
                return StateRow::terminal();
            }
            let actions = (0..params.actions.max(1))
                .map(|a| {
                    let mut next: Vec<usize> = Vec::with_capacity(branching);
                    while next.len() < branching {
                        let c = rng.random_range(0..n);
                        if !next.contains(&c) {
                            next.push(c);
                        }
                    }
                    let weights: Vec<f64> = next.iter().map(|_| rng.random::<f64>() + 0.05).collect();
                    let total: f64 = weights.iter().sum();
                    let mut outcomes: Vec<Transition> = next
                        .iter()
                        .zip(&weights)
                        .map(|(&next, w)| Transition {
                            next,
                            prob: w / total,
                            reward: rng.random::<f64>(),
                        })
                        .collect();
                    let head: f64 = outcomes[1..].iter().map(|t| t.prob).sum();
                    outcomes[0].prob = 1.0 - head;
                    ActionRow { action: a, outcomes }
                })
                .collect();
            StateRow::with_actions(actions)
        })
        .collect();
    MdpSpec::new(params.gamma, states).expect("random MDPs are valid by construction")
}
