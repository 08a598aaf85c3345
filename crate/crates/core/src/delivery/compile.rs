//! Compilation of a delivery task into a joint-state MDP.
//!
//! A joint state `(truck, pursuer)` is encoded as `truck * N + pursuer`;
//! two absorbing ids follow the `N²` pair ids. Truck actions are "move to
//! neighbour n" (action id `n`) and "stay" (action id `N`). Both agents move
//! simultaneously and the reward is assessed on the resulting pair: capture
//! on co-location, delivery on reaching the goal uncaught, loitering
//! otherwise. Passing each other along an edge is not a capture.

use std::sync::Arc;

use super::{admissible_task, DeliveryError, DeliveryTask};
use crate::mdp::{ActionId, ActionRow, MdpSpec, StateId, StateRow, Transition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum JointState {
    Pair { adt: usize, mg: usize },
    Caught,
    Delivered,
}

/// A task together with its compiled MDP.
#[derive(Debug, Clone)]
pub struct DeliveryMdp {
    task: DeliveryTask,
    spec: Arc<MdpSpec>,
}

impl DeliveryMdp {
    pub fn task(&self) -> &DeliveryTask {
        &self.task
    }

    pub fn spec(&self) -> &Arc<MdpSpec> {
        &self.spec
    }

    fn n(&self) -> usize {
        self.task.node_count()
    }

    pub fn caught_state(&self) -> StateId {
        self.n() * self.n()
    }

    pub fn delivered_state(&self) -> StateId {
        self.n() * self.n() + 1
    }

    pub fn stay_action(&self) -> ActionId {
        self.n()
    }

    pub fn encode(&self, state: JointState) -> StateId {
        match state {
            JointState::Pair { adt, mg } => adt * self.n() + mg,
            JointState::Caught => self.caught_state(),
            JointState::Delivered => self.delivered_state(),
        }
    }

    pub fn decode(&self, id: StateId) -> Option<JointState> {
        let n = self.n();
        match id {
            _ if id < n * n => Some(JointState::Pair { adt: id / n, mg: id % n }),
            _ if id == n * n => Some(JointState::Caught),
            _ if id == n * n + 1 => Some(JointState::Delivered),
            _ => None,
        }
    }

    pub fn start_state(&self) -> StateId {
        let p = &self.task.params;
        self.encode(JointState::Pair {
            adt: p.adt_start,
            mg: p.mg_start,
        })
    }
}

/// Compiles `task` into an MDP. Generated (non-manual) tasks must pass
/// [`admissible_task`].
pub fn build_mdp(task: &DeliveryTask) -> Result<DeliveryMdp, DeliveryError> {
    task.validate()?;
    if !task.is_manual() {
        if let Err(reason) = admissible_task(task) {
            return Err(DeliveryError::InvalidTask(format!("task not admissible: {}", reason.as_str())));
        }
    }
    let net = &task.network;
    let p = &task.params;
    let n = net.node_count();
    let caught = n * n;
    let delivered = n * n + 1;
    let dist: Vec<Vec<Option<usize>>> = (0..n).map(|v| net.distances_from(v)).collect();

    // Pursuer successor distribution for each (truck node, pursuer node).
    let pursuer_moves = |adt: usize, mg: usize| -> Vec<(usize, f64)> {
        let nbrs = net.neighbors(mg);
        if nbrs.is_empty() {
            return vec![(mg, 1.0)];
        }
        let target = dist[adt][mg].and_then(|d| nbrs.iter().copied().find(|&v| dist[adt][v] == Some(d - 1)));
        let (pursue, wander) = match target {
            Some(_) => (p.mg_pursue_prob, 1.0 - p.mg_pursue_prob),
            None => (0.0, 1.0),
        };
        let mut out: Vec<(usize, f64)> = Vec::with_capacity(nbrs.len());
        let share = wander / nbrs.len() as f64;
        for &v in nbrs {
            let extra = if Some(v) == target { pursue } else { 0.0 };
            out.push((v, share + extra));
        }
        out
    };

    let truck_moves = |adt: usize, action: ActionId| -> Vec<(usize, f64)> {
        if action == n {
            return vec![(adt, 1.0)];
        }
        let nbrs = net.neighbors(adt);
        if nbrs.len() == 1 {
            return vec![(action, 1.0)];
        }
        let slip = (1.0 - p.p_trans) / (nbrs.len() - 1) as f64;
        nbrs.iter()
            .map(|&v| (v, if v == action { p.p_trans } else { slip }))
            .collect()
    };

    let mut states = Vec::with_capacity(n * n + 2);
    for adt in 0..n {
        for mg in 0..n {
            if adt == mg || adt == p.goal {
                states.push(StateRow::terminal());
                continue;
            }
            let mg_next = pursuer_moves(adt, mg);
            let actions = net
                .neighbors(adt)
                .iter()
                .copied()
                .chain(std::iter::once(n))
                .map(|action| {
                    let mut outcomes: Vec<Transition> = Vec::new();
                    for (a2, pa) in truck_moves(adt, action) {
                        for &(m2, pm) in &mg_next {
                            let prob = pa * pm;
                            if prob == 0.0 {
                                continue;
                            }
                            let (next, reward) = if a2 == m2 {
                                (caught, p.rewards.caught)
                            } else if a2 == p.goal {
                                (delivered, p.rewards.goal)
                            } else {
                                (a2 * n + m2, p.rewards.loiter)
                            };
                            match outcomes.iter_mut().find(|t| t.next == next) {
                                Some(t) => t.prob += prob,
                                None => outcomes.push(Transition { next, prob, reward }),
                            }
                        }
                    }
                    // merging can overshoot 1 by an ulp
                    outcomes.iter_mut().for_each(|t| t.prob = t.prob.min(1.0));
                    ActionRow { action, outcomes }
                })
                .collect();
            states.push(StateRow::with_actions(actions));
        }
    }
    states.push(StateRow::terminal());
    states.push(StateRow::terminal());
    let spec = MdpSpec::new(p.gamma, states).map_err(|e| DeliveryError::InvalidTask(e.to_string()))?;
    Ok(DeliveryMdp {
        task: task.clone(),
        spec: Arc::new(spec),
    })
}
