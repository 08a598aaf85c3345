use std::io;

use famsec_core::calibration::CalibrationError;
use famsec_core::delivery::DeliveryError;
use famsec_core::outcome::OutcomeError;
use famsec_core::rollout::RolloutError;
use famsec_core::solver::SolverError;
use famsec_core::solver_quality::SolverQualityError;
use famsec_core::surrogate::SurrogateError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    /// Bad input: arguments, files, or configurations.
    #[error("{0}")]
    Validation(String),
    #[error("experiment {0} needs a surrogate model (pass --model FILE)")]
    MissingSurrogate(String),
    /// Failure while computing a valid request.
    #[error("{0}")]
    Runtime(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl HarnessError {
    /// Process exit code: 2 for validation errors, 3 for runtime errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Validation(_) | HarnessError::MissingSurrogate(_) => 2,
            HarnessError::Runtime(_) | HarnessError::Io(_) => 3,
        }
    }
}

impl From<DeliveryError> for HarnessError {
    fn from(e: DeliveryError) -> Self {
        match e {
            DeliveryError::GenerationFailed { .. } => HarnessError::Runtime(e.to_string()),
            _ => HarnessError::Validation(e.to_string()),
        }
    }
}

impl From<SolverError> for HarnessError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::Parse { .. } => HarnessError::Validation(e.to_string()),
            SolverError::Mdp(_) => HarnessError::Runtime(e.to_string()),
        }
    }
}

impl From<SurrogateError> for HarnessError {
    fn from(e: SurrogateError) -> Self {
        match e {
            SurrogateError::SchemaMismatch { .. }
            | SurrogateError::UnknownFeature(_)
            | SurrogateError::FeatureUndefined(..)
            | SurrogateError::SchemaVersionMismatch { .. }
            | SurrogateError::CorruptFile(_)
            | SurrogateError::InvalidConfig(_) => HarnessError::Validation(e.to_string()),
            SurrogateError::Delivery(d) => d.into(),
            SurrogateError::Solver(s) => s.into(),
            _ => HarnessError::Runtime(e.to_string()),
        }
    }
}

impl From<OutcomeError> for HarnessError {
    fn from(e: OutcomeError) -> Self {
        HarnessError::Validation(e.to_string())
    }
}

impl From<SolverQualityError> for HarnessError {
    fn from(e: SolverQualityError) -> Self {
        match e {
            SolverQualityError::InvalidConfig(_) => HarnessError::Validation(e.to_string()),
            _ => HarnessError::Runtime(e.to_string()),
        }
    }
}

impl From<RolloutError> for HarnessError {
    fn from(e: RolloutError) -> Self {
        HarnessError::Runtime(e.to_string())
    }
}

impl From<CalibrationError> for HarnessError {
    fn from(e: CalibrationError) -> Self {
        HarnessError::Runtime(e.to_string())
    }
}

impl From<serde_json::Error> for HarnessError {
    fn from(e: serde_json::Error) -> Self {
        HarnessError::Validation(format!("invalid JSON: {e}"))
    }
}
