//! The autonomous delivery truck (ADT) versus motorcycle gang (MG)
//! pursuit-evasion domain.

mod compile;
mod generate;
mod network;
mod task;

pub use compile::{build_mdp, DeliveryMdp, JointState};
pub use generate::{generate_network, GeneratorParams, MAX_ATTEMPTS, MAX_NODES, MIN_NODES};
pub use network::{GeneratorKind, NetworkDoc, RoadNetwork};
pub use task::{
    admissible_task, sample_admissible, DeliveryTask, RandomTaskSampler, RejectReason, Rewards, TaskDocument, TaskParams, TaskSampler,
    MAX_EDGE_NODE_RATIO, MIN_START_DISTANCE, TASK_SCHEMA_VERSION,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DeliveryError {
    #[error("invalid network: {0}")]
    InvalidNetwork(String),
    #[error("invalid task: {0}")]
    InvalidTask(String),
    #[error("{kind:?} generator produced no connected {n}-node graph in {attempts} attempts")]
    GenerationFailed { kind: GeneratorKind, n: usize, attempts: u64 },
    #[error("task document schema version {found}, expected {expected}")]
    SchemaVersion { found: u32, expected: u32 },
    #[error("malformed task document: {0}")]
    Parse(String),
}
