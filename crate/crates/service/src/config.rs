//! Service configuration: a TOML file plus `FAMSEC_*` environment overrides.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("invalid config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid value for {var}: {value}")]
    Env { var: &'static str, value: String },
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// Score deltas of a session. Penalties are magnitudes and are subtracted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scoring {
    pub reward_success: f64,
    pub penalty_approved_capture: f64,
    pub penalty_timeout: f64,
    pub penalty_cancel: f64,
}

impl Default for Scoring {
    fn default() -> Self {
        Scoring {
            reward_success: 1.0,
            penalty_approved_capture: 2.0,
            penalty_timeout: 0.0,
            penalty_cancel: 0.25,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServiceConfig {
    pub bind: String,
    /// Surrogate model of the trusted solver; without one, assessments
    /// report `x_s` only when a trusted solver is named in the request.
    pub model_path: Option<PathBuf>,
    /// JSON-lines event log; state is kept in memory only when absent.
    pub event_log: Option<PathBuf>,
    pub default_runs: usize,
    pub max_runs: usize,
    /// Candidate solver used when a request names none.
    pub default_candidate: String,
    pub scoring: Scoring,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            bind: "127.0.0.1:8080".into(),
            model_path: None,
            event_log: None,
            default_runs: 200,
            max_runs: 20_000,
            default_candidate: "vi".into(),
            scoring: Scoring::default(),
        }
    }
}

impl ServiceConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    /// Defaults, overlaid by the file at `path` when given.
    pub fn load(path: Option<&Path>) -> Result<Self, ConfigError> {
        match path {
            None => Ok(ServiceConfig::default()),
            Some(p) => {
                let text = fs::read_to_string(p).map_err(|source| ConfigError::Read {
                    path: p.to_path_buf(),
                    source,
                })?;
                Self::from_toml(&text)
            }
        }
    }

    /// Applies `FAMSEC_*` overrides read through `lookup`.
    pub fn apply_env<F>(&mut self, lookup: F) -> Result<(), ConfigError>
    where
        F: Fn(&str) -> Option<String>,
    {
        fn parsed<T: std::str::FromStr>(var: &'static str, value: String) -> Result<T, ConfigError> {
            value.parse().map_err(|_| ConfigError::Env { var, value })
        }
        if let Some(v) = lookup("FAMSEC_BIND") {
            self.bind = v;
        }
        if let Some(v) = lookup("FAMSEC_MODEL") {
            self.model_path = Some(PathBuf::from(v));
        }
        if let Some(v) = lookup("FAMSEC_EVENT_LOG") {
            self.event_log = Some(PathBuf::from(v));
        }
        if let Some(v) = lookup("FAMSEC_DEFAULT_RUNS") {
            self.default_runs = parsed("FAMSEC_DEFAULT_RUNS", v)?;
        }
        if let Some(v) = lookup("FAMSEC_DEFAULT_CANDIDATE") {
            self.default_candidate = v;
        }
        let s = &mut self.scoring;
        for (var, field) in [
            ("FAMSEC_REWARD_SUCCESS", &mut s.reward_success),
            ("FAMSEC_PENALTY_CAPTURE", &mut s.penalty_approved_capture),
            ("FAMSEC_PENALTY_TIMEOUT", &mut s.penalty_timeout),
            ("FAMSEC_PENALTY_CANCEL", &mut s.penalty_cancel),
        ] {
            if let Some(v) = lookup(var) {
                *field = parsed(var, v)?;
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let s = &self.scoring;
        let amounts = [s.reward_success, s.penalty_approved_capture, s.penalty_timeout, s.penalty_cancel];
        if amounts.iter().any(|a| !(a.is_finite() && *a >= 0.0)) {
            return Err(ConfigError::Invalid("scoring amounts must be finite and non-negative".into()));
        }
        if self.default_runs < 2 || self.default_runs > self.max_runs {
            return Err(ConfigError::Invalid(format!(
                "default_runs {} outside [2, max_runs = {}]",
                self.default_runs, self.max_runs
            )));
        }
        self.default_candidate
            .parse::<famsec_core::solver::SolverSpec>()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(())
    }
}
