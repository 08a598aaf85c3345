//! Solver descriptions shared by the CLI, experiments, and the service.
//!
//! Text form: `vi` or `mcts:depth=3,its=200,explore=1000[,horizon=40]`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::delivery::DeliveryMdp;
use crate::mdp::{value_iteration, MctsConfig, MdpError, Policy, TabularPolicy, ValueTable};

/// Convergence tolerance for value iteration in task reward units.
pub const VI_TOLERANCE: f64 = 1e-6;
pub const VI_MAX_SWEEPS: usize = 100_000;

#[derive(Debug, Error, PartialEq)]
pub enum SolverError {
    #[error("cannot parse solver '{input}': {reason}")]
    Parse { input: String, reason: String },
    #[error(transparent)]
    Mdp(#[from] MdpError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SolverSpec {
    /// Exact value iteration, greedy policy.
    Vi,
    /// Online tree search re-planned at every step.
    Mcts {
        depth: u32,
        iterations: u32,
        exploration: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        horizon: Option<u32>,
    },
}

impl SolverSpec {
    pub fn mcts(depth: u32, iterations: u32, exploration: f64) -> Self {
        SolverSpec::Mcts {
            depth,
            iterations,
            exploration,
            horizon: None,
        }
    }

    /// Tree search whose rollouts stop at the tree depth, so `depth` bounds
    /// the total lookahead.
    pub fn mcts_depth_bounded(depth: u32, iterations: u32, exploration: f64) -> Self {
        SolverSpec::Mcts {
            depth,
            iterations,
            exploration,
            horizon: Some(depth),
        }
    }

    pub fn depth(&self) -> Option<u32> {
        match self {
            SolverSpec::Vi => None,
            SolverSpec::Mcts { depth, .. } => Some(*depth),
        }
    }

    /// Search configuration with planner seed `seed`.
    pub fn mcts_config(&self, seed: u64) -> Option<MctsConfig> {
        match *self {
            SolverSpec::Vi => None,
            SolverSpec::Mcts {
                depth,
                iterations,
                exploration,
                horizon,
            } => {
                let mut cfg = MctsConfig::new(iterations, depth, exploration, seed);
                if let Some(h) = horizon {
                    cfg.rollout_horizon = h;
                }
                Some(cfg)
            }
        }
    }

    /// Builds the policy for `mdp`. Value iteration is solved up front; tree
    /// search plans lazily from states it meets.
    pub fn policy(&self, mdp: &DeliveryMdp, seed: u64) -> Result<Policy, SolverError> {
        match self.mcts_config(seed) {
            None => Ok(Policy::Tabular(TabularPolicy::greedy(&solve_vi(mdp)?))),
            Some(config) => {
                config.validate()?;
                Ok(Policy::OnlineMcts {
                    spec: mdp.spec().clone(),
                    config,
                })
            }
        }
    }
}

pub fn solve_vi(mdp: &DeliveryMdp) -> Result<ValueTable, SolverError> {
    Ok(value_iteration(mdp.spec(), VI_TOLERANCE, VI_MAX_SWEEPS)?)
}

impl fmt::Display for SolverSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverSpec::Vi => f.write_str("vi"),
            SolverSpec::Mcts {
                depth,
                iterations,
                exploration,
                horizon,
            } => {
                write!(f, "mcts:depth={depth},its={iterations},explore={exploration}")?;
                if let Some(h) = horizon {
                    write!(f, ",horizon={h}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for SolverSpec {
    type Err = SolverError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason: String| SolverError::Parse {
            input: s.to_string(),
            reason,
        };
        let s_trim = s.trim();
        if s_trim.eq_ignore_ascii_case("vi") {
            return Ok(SolverSpec::Vi);
        }
        let Some(rest) = s_trim.strip_prefix("mcts:") else {
            return Err(err("expected 'vi' or 'mcts:key=value,...'".into()));
        };
        let (mut depth, mut its, mut explore, mut horizon) = (None, None, None, None);
        for part in rest.split(',').filter(|p| !p.is_empty()) {
            let (key, value) = part.split_once('=').ok_or_else(|| err(format!("'{part}' is not key=value")))?;
            let value = value.trim();
            match key.trim() {
                "depth" | "d" => depth = Some(value.parse::<u32>().map_err(|e| err(format!("depth: {e}")))?),
                "its" | "iterations" => its = Some(value.parse::<u32>().map_err(|e| err(format!("its: {e}")))?),
                "explore" | "e" | "exploration" => {
                    explore = Some(value.parse::<f64>().map_err(|e| err(format!("explore: {e}")))?)
                }
                "horizon" => horizon = Some(value.parse::<u32>().map_err(|e| err(format!("horizon: {e}")))?),
                other => return Err(err(format!("unknown key '{other}'"))),
            }
        }
        let spec = SolverSpec::Mcts {
            depth: depth.ok_or_else(|| err("missing depth".into()))?,
            iterations: its.ok_or_else(|| err("missing its".into()))?,
            exploration: explore.ok_or_else(|| err("missing explore".into()))?,
            horizon,
        };
        spec.mcts_config(0)
            .expect("mcts spec")
            .validate()
            .map_err(|e| err(e.to_string()))?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trip() {
        for text in ["vi", "mcts:depth=3,its=200,explore=1000", "mcts:depth=8,its=1000,explore=0.5,horizon=40"] {
            let spec: SolverSpec = text.parse().unwrap();
            assert_eq!(spec.to_string(), text);
        }
        assert_eq!("VI".parse::<SolverSpec>().unwrap(), SolverSpec::Vi);
    }

    #[test]
    fn parse_errors() {
        for text in ["", "mcts", "mcts:depth=3", "mcts:depth=0,its=1,explore=1", "mcts:depth=3,its=1,explore=-1", "mcts:depth=x,its=1,explore=1", "pomdp"] {
            assert!(text.parse::<SolverSpec>().is_err(), "{text}");
        }
    }

    #[test]
    fn horizon_override() {
        let spec: SolverSpec = "mcts:depth=3,its=10,explore=1,horizon=7".parse().unwrap();
        assert_eq!(spec.mcts_config(1).unwrap().rollout_horizon, 7);
        assert_eq!(SolverSpec::mcts(3, 10, 1.0).mcts_config(1).unwrap().rollout_horizon, 23);
        assert_eq!(SolverSpec::mcts_depth_bounded(3, 10, 1.0).mcts_config(1).unwrap().rollout_horizon, 3);
    }

    #[test]
    fn json_form() {
        let spec = SolverSpec::mcts(3, 200, 1000.0);
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(text, r#"{"kind":"mcts","depth":3,"iterations":200,"exploration":1000.0}"#);
        assert_eq!(serde_json::from_str::<SolverSpec>(&text).unwrap(), spec);
    }
}
