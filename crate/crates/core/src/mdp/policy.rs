use std::sync::Arc;

use thiserror::Error;

use super::{mcts_plan, ActionId, MctsConfig, MdpError, MdpSpec, StateId, ValueTable};
use crate::seed;

#[derive(Debug, Error, PartialEq)]
pub enum PolicyError {
    #[error("tabular policy has no action for state {0}")]
    MissingState(StateId),
    #[error(transparent)]
    Mdp(#[from] MdpError),
}

/// A state → action table covering every non-terminal state of its MDP.
#[derive(Debug, Clone, PartialEq)]
pub struct TabularPolicy {
    actions: Vec<Option<ActionId>>,
}

impl TabularPolicy {
    /// Builds a table, checking coverage and legality against `spec`.
    pub fn new(spec: &MdpSpec, actions: Vec<Option<ActionId>>) -> Result<Self, PolicyError> {
        for s in 0..spec.num_states() {
            if spec.is_terminal(s) {
                continue;
            }
            match actions.get(s).copied().flatten() {
                Some(a) if spec.action_index(s, a).is_some() => {}
                _ => return Err(PolicyError::MissingState(s)),
            }
        }
        Ok(TabularPolicy { actions })
    }

    /// Table without coverage checks; lookups of uncovered states fail with
    /// [`PolicyError::MissingState`].
    pub fn partial(actions: Vec<Option<ActionId>>) -> Self {
        TabularPolicy { actions }
    }

    pub fn greedy(table: &ValueTable) -> Self {
        TabularPolicy {
            actions: table.greedy_policy.clone(),
        }
    }

    pub fn get(&self, state: StateId) -> Result<ActionId, PolicyError> {
        self.actions
            .get(state)
            .copied()
            .flatten()
            .ok_or(PolicyError::MissingState(state))
    }
}

/// Action-selection rule: a precomputed table or online tree search.
#[derive(Debug, Clone)]
pub enum Policy {
    Tabular(TabularPolicy),
    OnlineMcts { spec: Arc<MdpSpec>, config: MctsConfig },
}

impl Policy {
    /// Chooses the action at `state`. For online search the planner seed is
    /// derived from the configured seed, the state, and the caller-supplied
    /// `salt` (typically a mix of episode seed and step counter).
    pub fn action(&self, state: StateId, salt: u64) -> Result<ActionId, PolicyError> {
        match self {
            Policy::Tabular(table) => table.get(state),
            Policy::OnlineMcts { spec, config } => {
                let cfg = config.with_seed(seed::mix_all(config.seed, &[state as u64, salt]));
                Ok(mcts_plan(spec, state, &cfg)?)
            }
        }
    }
}
