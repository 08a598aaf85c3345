//! HTTP service for the supervisor loop: generate a delivery task, assess
//! it with the self-confidence indicators, record the supervisor's
//! authorize or cancel decision, execute, and keep a session score.
//!
//! All state changes are appended to a JSON-lines event log and rebuilt
//! from it on restart.

pub mod api;
pub mod config;
pub mod error;
pub mod events;
pub mod labels;
pub mod openapi;
pub mod store;

pub use api::{router, AppState, StartupError};
pub use config::{ConfigError, Scoring, ServiceConfig};
pub use error::ApiError;
pub use events::{Event, EventLog};
pub use store::{Decision, HistoryEntry, Session, Store, TaskRecord, TaskState};
