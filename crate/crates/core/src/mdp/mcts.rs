use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ActionId, MdpError, MdpSpec, StateId};
use crate::seed;

/// Search parameters: iteration budget, tree depth, UCT exploration
/// constant, and the horizon (counted from the root) at which random
/// rollouts are truncated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MctsConfig {
    pub iterations: u32,
    pub depth: u32,
    pub exploration: f64,
    pub rollout_horizon: u32,
    pub seed: u64,
}

/// Steps a default rollout continues past the tree depth.
pub const ROLLOUT_SLACK: u32 = 20;

impl MctsConfig {
    /// Config with the default rollout horizon `depth + ROLLOUT_SLACK`.
    pub fn new(iterations: u32, depth: u32, exploration: f64, seed: u64) -> Self {
        MctsConfig {
            iterations,
            depth,
            exploration,
            rollout_horizon: depth.saturating_add(ROLLOUT_SLACK),
            seed,
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        MctsConfig { seed, ..self }
    }

    pub fn validate(&self) -> Result<(), MdpError> {
        if self.iterations == 0 {
            return Err(MdpError::InvalidConfig("iterations must be >= 1".into()));
        }
        if self.depth == 0 {
            return Err(MdpError::InvalidConfig("depth must be >= 1".into()));
        }
        if self.rollout_horizon == 0 {
            return Err(MdpError::InvalidConfig("rollout horizon must be >= 1".into()));
        }
        if !(self.exploration >= 0.0 && self.exploration.is_finite()) {
            return Err(MdpError::InvalidConfig(format!(
                "exploration must be a non-negative finite number, got {}",
                self.exploration
            )));
        }
        Ok(())
    }
}

/// Visit count and mean backed-up return of one root action.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeStats {
    pub action: ActionId,
    pub visits: u32,
    pub value: f64,
}

#[derive(Debug, Clone)]
struct Edge {
    visits: u32,
    value: f64,
    /// Sampled successor states and their tree nodes.
    children: Vec<(StateId, usize)>,
}

#[derive(Debug, Clone)]
struct Node {
    state: StateId,
    depth: u32,
    visits: u32,
    edges: Vec<Edge>,
}

/// The tree built by one planning call.
#[derive(Debug, Clone)]
pub struct SearchTree {
    nodes: Vec<Node>,
    actions: Vec<ActionId>,
}

impl SearchTree {
    pub fn root_stats(&self) -> Vec<EdgeStats> {
        self.nodes[0]
            .edges
            .iter()
            .zip(&self.actions)
            .map(|(e, &action)| EdgeStats {
                action,
                visits: e.visits,
                value: e.value,
            })
            .collect()
    }

    pub fn root_visits(&self) -> u32 {
        self.nodes[0].visits
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Depth of the deepest node in the tree (the root has depth 0).
    pub fn max_depth(&self) -> u32 {
        self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)
    }

    /// Root action with the highest mean return; ties go to the lowest index.
    pub fn best_action(&self) -> ActionId {
        let mut best: Option<(f64, ActionId)> = None;
        for (e, &a) in self.nodes[0].edges.iter().zip(&self.actions) {
            if e.visits > 0 && best.is_none_or(|(v, _)| e.value > v) {
                best = Some((e.value, a));
            }
        }
        best.map(|(_, a)| a).unwrap_or(self.actions[0])
    }
}

/// UCT choice among the children of a node, given `(visits, mean value)`
/// per child: any unvisited child first (in index order), otherwise the
/// argmax of `Q + c * sqrt(ln N / n)` with ties going to the lowest index.
pub fn select_uct<I>(children: I, parent_visits: u32, exploration: f64) -> usize
where
    I: Iterator<Item = (u32, f64)> + Clone,
{
    if let Some(i) = children.clone().position(|(n, _)| n == 0) {
        return i;
    }
    let ln_n = f64::from(parent_visits.max(1)).ln();
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for (i, (n, q)) in children.enumerate() {
        let score = q + exploration * (ln_n / f64::from(n)).sqrt();
        if score > best_score {
            best = i;
            best_score = score;
        }
    }
    best
}

struct Searcher<'a> {
    spec: &'a MdpSpec,
    config: &'a MctsConfig,
    rng: ChaCha8Rng,
    nodes: Vec<Node>,
}

impl Searcher<'_> {
    fn add_node(&mut self, state: StateId, depth: u32) -> usize {
        let edges = (0..self.spec.rows(state).len())
            .map(|_| Edge {
                visits: 0,
                value: 0.0,
                children: Vec::new(),
            })
            .collect();
        self.nodes.push(Node {
            state,
            depth,
            visits: 0,
            edges,
        });
        self.nodes.len() - 1
    }

    fn pick(&self, node: usize) -> usize {
        let n = &self.nodes[node];
        select_uct(
            n.edges.iter().map(|e| (e.visits, e.value)),
            n.visits,
            self.config.exploration,
        )
    }

    fn simulate(&mut self, node: usize, depth: u32) -> f64 {
        let state = self.nodes[node].state;
        let k = self.pick(node);
        let t = self.spec.sample(state, k, &mut self.rng);
        let child_depth = depth + 1;
        let continuation = if self.spec.is_terminal(t.next) {
            0.0
        } else if child_depth >= self.config.depth {
            self.rollout(t.next, child_depth)
        } else {
            let existing = self.nodes[node].edges[k]
                .children
                .iter()
                .find(|(s, _)| *s == t.next)
                .map(|&(_, c)| c);
            match existing {
                Some(child) => self.simulate(child, child_depth),
                None => {
                    let child = self.add_node(t.next, child_depth);
                    self.nodes[node].edges[k].children.push((t.next, child));
                    self.rollout(t.next, child_depth)
                }
            }
        };
        let q = t.reward + self.spec.gamma() * continuation;
        let n = &mut self.nodes[node];
        n.visits += 1;
        let e = &mut n.edges[k];
        e.visits += 1;
        e.value += (q - e.value) / f64::from(e.visits);
        q
    }

    fn rollout(&mut self, mut state: StateId, mut depth: u32) -> f64 {
        let gamma = self.spec.gamma();
        let mut total = 0.0;
        let mut discount = 1.0;
        while depth < self.config.rollout_horizon && !self.spec.is_terminal(state) {
            let k = self.rng.random_range(0..self.spec.rows(state).len());
            let t = self.spec.sample(state, k, &mut self.rng);
            total += discount * t.reward;
            discount *= gamma;
            state = t.next;
            depth += 1;
        }
        total
    }
}

/// Runs `config.iterations` simulations from `state` and returns the tree.
pub fn search(spec: &MdpSpec, state: StateId, config: &MctsConfig) -> Result<SearchTree, MdpError> {
    config.validate()?;
    if !spec.contains(state) {
        return Err(MdpError::UnknownState(state));
    }
    if spec.is_terminal(state) {
        return Err(MdpError::TerminalState(state));
    }
    let mut searcher = Searcher {
        spec,
        config,
        rng: seed::rng_from(config.seed),
        nodes: Vec::new(),
    };
    searcher.add_node(state, 0);
    for _ in 0..config.iterations {
        searcher.simulate(0, 0);
    }
    Ok(SearchTree {
        nodes: searcher.nodes,
        actions: spec.actions(state).collect(),
    })
}

/// Plans one action at `state`. Deterministic in `(spec, state, config)`.
pub fn mcts_plan(spec: &MdpSpec, state: StateId, config: &MctsConfig) -> Result<ActionId, MdpError> {
    Ok(search(spec, state, config)?.best_action())
}

#[cfg(test)]
mod tests {
    use super::super::fixtures;
    use super::*;

    #[test]
    fn dominance_mdp_prefers_rewarding_action() {
        let spec = fixtures::dominance();
        let cfg = MctsConfig::new(1000, 2, 1.0, 9);
        assert_eq!(mcts_plan(&spec, 0, &cfg).unwrap(), 1);
    }

    #[test]
    fn single_iteration_is_deterministic() {
        let spec = fixtures::dominance();
        let cfg = MctsConfig::new(1, 1, 1.0, 42);
        let a = mcts_plan(&spec, 0, &cfg).unwrap();
        assert_eq!(a, mcts_plan(&spec, 0, &cfg).unwrap());
        assert!(spec.actions(0).any(|x| x == a));
    }

    #[test]
    fn every_root_action_is_tried_before_any_is_repeated() {
        let spec = fixtures::dominance();
        let tree = search(&spec, 0, &MctsConfig::new(2, 3, 0.0, 1)).unwrap();
        assert!(tree.root_stats().iter().all(|e| e.visits == 1));
    }

    #[test]
    fn select_uct_prefers_unvisited_children() {
        let uct = |c: &[(u32, f64)], n, e| select_uct(c.iter().copied(), n, e);
        assert_eq!(uct(&[(3, 10.0), (0, -100.0), (5, 20.0)], 8, 1.0), 1);
        assert_eq!(uct(&[(0, 0.0), (0, 0.0)], 0, 1.0), 0);
        // with no exploration the best mean wins
        assert_eq!(uct(&[(3, 1.0), (2, 3.0), (5, 2.0)], 10, 0.0), 1);
        // with exploration the rarely visited child catches up
        assert_eq!(uct(&[(100, 1.0), (1, 0.5)], 101, 2.0), 1);
    }

    #[test]
    fn tree_depth_is_bounded() {
        let spec = fixtures::self_loop();
        let tree = search(&spec, 0, &MctsConfig::new(200, 4, 1.0, 5)).unwrap();
        assert!(tree.max_depth() < 4);
        assert_eq!(tree.root_visits(), 200);
    }

    #[test]
    fn rejects_terminal_unknown_and_bad_config() {
        let spec = fixtures::chain();
        let cfg = MctsConfig::new(10, 2, 1.0, 0);
        assert_eq!(mcts_plan(&spec, 1, &cfg), Err(MdpError::TerminalState(1)));
        assert_eq!(mcts_plan(&spec, 9, &cfg), Err(MdpError::UnknownState(9)));
        let bad = MctsConfig { iterations: 0, ..cfg };
        assert!(matches!(mcts_plan(&spec, 0, &bad), Err(MdpError::InvalidConfig(_))));
    }
}
