use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{generate_network, DeliveryError, GeneratorKind, GeneratorParams, RoadNetwork};
use crate::seed;

pub const TASK_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rewards {
    pub goal: f64,
    pub caught: f64,
    pub loiter: f64,
}

impl Default for Rewards {
    fn default() -> Self {
        Rewards {
            goal: 2000.0,
            caught: -2000.0,
            loiter: -200.0,
        }
    }
}

/// Problem-instance parameters; the network travels alongside in
/// [`DeliveryTask`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaskParams {
    pub adt_start: usize,
    pub mg_start: usize,
    pub goal: usize,
    pub p_trans: f64,
    pub rewards: Rewards,
    pub gamma: f64,
    pub t_max: u32,
    pub mg_pursue_prob: f64,
}

impl Default for TaskParams {
    fn default() -> Self {
        TaskParams {
            adt_start: 0,
            mg_start: 1,
            goal: 2,
            p_trans: 0.7,
            rewards: Rewards::default(),
            gamma: 0.95,
            t_max: 50,
            mg_pursue_prob: 0.7,
        }
    }
}

/// A delivery problem instance: the truck (ADT) must reach `goal` while the
/// pursuer (MG) tries to co-locate with it.
#[derive(Debug, Clone, PartialEq)]
pub struct DeliveryTask {
    pub network: RoadNetwork,
    pub params: TaskParams,
}

impl DeliveryTask {
    pub fn new(network: RoadNetwork, params: TaskParams) -> Result<Self, DeliveryError> {
        let task = DeliveryTask { network, params };
        task.validate()?;
        Ok(task)
    }

    pub fn validate(&self) -> Result<(), DeliveryError> {
        let p = &self.params;
        let n = self.network.node_count();
        let bad = |msg: String| Err(DeliveryError::InvalidTask(msg));
        if p.adt_start >= n || p.mg_start >= n || p.goal >= n {
            return bad(format!("node ids must be below {n}"));
        }
        if p.adt_start == p.mg_start {
            return bad("truck and pursuer start on the same node".into());
        }
        if !(0.0..=1.0).contains(&p.p_trans) {
            return bad(format!("p_trans {} outside [0, 1]", p.p_trans));
        }
        if !(0.0..=1.0).contains(&p.mg_pursue_prob) {
            return bad(format!("mg_pursue_prob {} outside [0, 1]", p.mg_pursue_prob));
        }
        let r = &p.rewards;
        if !(r.goal > 0.0 && r.caught < 0.0 && r.loiter < 0.0) || ![r.goal, r.caught, r.loiter].iter().all(|x| x.is_finite()) {
            return bad("rewards must satisfy goal > 0 > caught and loiter < 0".into());
        }
        if !(0.0..1.0).contains(&p.gamma) {
            return bad(format!("gamma {} outside [0, 1)", p.gamma));
        }
        if p.t_max == 0 {
            return bad("t_max must be positive".into());
        }
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.network.node_count()
    }

    pub fn is_manual(&self) -> bool {
        self.network.generator() == GeneratorKind::Manual
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    EdgeRatio,
    GoalTooClose,
    PursuerTooClose,
}

impl RejectReason {
    pub fn as_str(self) -> &'static str {
        match self {
            RejectReason::EdgeRatio => "edge ratio",
            RejectReason::GoalTooClose => "goal too close",
            RejectReason::PursuerTooClose => "pursuer too close",
        }
    }
}

pub const MAX_EDGE_NODE_RATIO: f64 = 2.5;
pub const MIN_START_DISTANCE: usize = 2;

/// Filter applied to generated tasks: the network must not be too dense
/// and the truck must start at least two hops from both the goal and the
/// pursuer. Unreachable counts as far.
pub fn admissible_task(task: &DeliveryTask) -> Result<(), RejectReason> {
    if task.network.edge_node_ratio() > MAX_EDGE_NODE_RATIO {
        return Err(RejectReason::EdgeRatio);
    }
    let dist = task.network.distances_from(task.params.adt_start);
    let too_close = |node: usize| dist[node].is_some_and(|d| d < MIN_START_DISTANCE);
    if too_close(task.params.goal) {
        return Err(RejectReason::GoalTooClose);
    }
    if too_close(task.params.mg_start) {
        return Err(RejectReason::PursuerTooClose);
    }
    Ok(())
}

/// Versioned JSON form of a task, shared by the CLI and the service.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskDocument {
    pub schema_version: u32,
    pub network: RoadNetwork,
    pub task: TaskParams,
    pub seed: u64,
}

impl TaskDocument {
    pub fn new(task: &DeliveryTask, seed: u64) -> Self {
        TaskDocument {
            schema_version: TASK_SCHEMA_VERSION,
            network: task.network.clone(),
            task: task.params,
            seed,
        }
    }

    pub fn into_task(self) -> Result<DeliveryTask, DeliveryError> {
        if self.schema_version != TASK_SCHEMA_VERSION {
            return Err(DeliveryError::SchemaVersion {
                found: self.schema_version,
                expected: TASK_SCHEMA_VERSION,
            });
        }
        DeliveryTask::new(self.network, self.task)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("task documents serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, DeliveryError> {
        serde_json::from_str(text).map_err(|e| DeliveryError::Parse(e.to_string()))
    }
}

/// Source of candidate tasks, indexed so that batches are reproducible.
pub trait TaskSampler: Sync {
    fn sample(&self, index: u64, seed: u64) -> Result<DeliveryTask, DeliveryError>;
}

impl<F> TaskSampler for F
where
    F: Fn(u64, u64) -> Result<DeliveryTask, DeliveryError> + Sync,
{
    fn sample(&self, index: u64, seed: u64) -> Result<DeliveryTask, DeliveryError> {
        self(index, seed)
    }
}

/// Draws tasks for `index` until one passes [`admissible_task`], trying at
/// most `max_attempts` sub-indices. Returns the task and the rejections seen.
pub fn sample_admissible(
    sampler: &dyn TaskSampler,
    index: u64,
    seed: u64,
    max_attempts: u64,
) -> Result<(DeliveryTask, Vec<RejectReason>), DeliveryError> {
    let mut rejected = Vec::new();
    for attempt in 0..max_attempts {
        let task = sampler.sample(index, seed::mix(seed, attempt))?;
        match admissible_task(&task) {
            Ok(()) => return Ok((task, rejected)),
            Err(reason) => rejected.push(reason),
        }
    }
    Err(DeliveryError::InvalidTask(format!(
        "no admissible task after {max_attempts} attempts"
    )))
}

/// Random tasks: node count and `p_trans` uniform within their ranges, a
/// generator chosen uniformly, and distinct random truck, pursuer, and goal
/// nodes. No admissibility filtering is applied here.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomTaskSampler {
    pub n_range: (usize, usize),
    pub p_trans_range: (f64, f64),
    pub generators: Vec<GeneratorKind>,
    pub generator_params: GeneratorParams,
    /// Template for everything but the start nodes, goal, and `p_trans`.
    pub template: TaskParams,
}

impl Default for RandomTaskSampler {
    fn default() -> Self {
        RandomTaskSampler {
            n_range: (8, 35),
            p_trans_range: (0.0, 1.0),
            generators: GeneratorKind::RANDOM.to_vec(),
            generator_params: GeneratorParams::default(),
            template: TaskParams::default(),
        }
    }
}

impl RandomTaskSampler {
    pub fn validate(&self) -> Result<(), DeliveryError> {
        let (lo, hi) = self.n_range;
        if lo > hi || lo < super::MIN_NODES || hi > super::MAX_NODES {
            return Err(DeliveryError::InvalidTask(format!("node range [{lo}, {hi}] invalid")));
        }
        let (plo, phi) = self.p_trans_range;
        if !(0.0 <= plo && plo <= phi && phi <= 1.0) {
            return Err(DeliveryError::InvalidTask(format!("p_trans range [{plo}, {phi}] invalid")));
        }
        if self.generators.is_empty() || self.generators.contains(&GeneratorKind::Manual) {
            return Err(DeliveryError::InvalidTask("need at least one random generator".into()));
        }
        Ok(())
    }
}

impl TaskSampler for RandomTaskSampler {
    fn sample(&self, index: u64, seed: u64) -> Result<DeliveryTask, DeliveryError> {
        self.validate()?;
        let task_seed = seed::mix(seed, index);
        let mut rng = seed::rng_from(task_seed);
        let n = rng.random_range(self.n_range.0..=self.n_range.1);
        let kind = self.generators[rng.random_range(0..self.generators.len())];
        let (plo, phi) = self.p_trans_range;
        let p_trans = if phi > plo { rng.random_range(plo..=phi) } else { plo };
        let network = generate_network(kind, n, &self.generator_params, seed::mix(task_seed, 1))?;
        let adt_start = rng.random_range(0..n);
        let mg_start = loop {
            let m = rng.random_range(0..n);
            if m != adt_start {
                break m;
            }
        };
        let goal = loop {
            let g = rng.random_range(0..n);
            if g != adt_start && g != mg_start {
                break g;
            }
        };
        DeliveryTask::new(
            network,
            TaskParams {
                adt_start,
                mg_start,
                goal,
                p_trans,
                ..self.template
            },
        )
    }
}
