//! In-memory state rebuilt from events. Nothing here does I/O; requests are
//! checked against the store, turned into events, and applied.

use std::collections::{BTreeMap, HashMap};

use famsec_core::delivery::TaskDocument;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::Scoring;
use crate::error::ApiError;
use crate::events::Event;

/// Lifecycle of a task. States only move forward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskState {
    Generated,
    Assessed,
    Decided,
    Executed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Authorize,
    Cancel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskRecord {
    pub task_id: String,
    pub session_id: Option<String>,
    pub seed: u64,
    pub state: TaskState,
    pub task: TaskDocument,
    /// Reasons for the candidate tasks rejected before this one was drawn.
    pub rejections: Vec<String>,
    pub assessment: Option<Value>,
    pub decision: Option<Decision>,
    pub outcome: Option<Value>,
}

/// One settled task in a session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub task_id: String,
    pub decision: Decision,
    pub x_o: f64,
    pub x_s: Option<f64>,
    /// `delivered`, `caught`, `timeout`, or `cancelled`.
    pub outcome: String,
    pub score_delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub session_id: String,
    pub score: f64,
    pub history: Vec<HistoryEntry>,
    pub scoring: Scoring,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Store {
    sessions: BTreeMap<String, Session>,
    tasks: BTreeMap<String, TaskRecord>,
    responses: HashMap<(String, String), (u16, Value)>,
}

impl Store {
    pub fn replay<'a, I: IntoIterator<Item = &'a Event>>(events: I) -> Self {
        let mut store = Store::default();
        for e in events {
            store.apply(e);
        }
        store
    }

    pub fn next_session_id(&self) -> String {
        format!("s-{:06}", self.sessions.len() + 1)
    }

    pub fn next_task_id(&self) -> String {
        format!("t-{:06}", self.tasks.len() + 1)
    }

    pub fn task_count(&self) -> usize {
        self.tasks.len()
    }

    pub fn session(&self, id: &str) -> Result<&Session, ApiError> {
        self.sessions.get(id).ok_or_else(|| ApiError::not_found("session", id))
    }

    pub fn task(&self, id: &str) -> Result<&TaskRecord, ApiError> {
        self.tasks.get(id).ok_or_else(|| ApiError::not_found("task", id))
    }

    pub fn response(&self, route: &str, key: &str) -> Option<&(u16, Value)> {
        self.responses.get(&(route.to_string(), key.to_string()))
    }

    /// Applies one event. Events are validated before they are logged, so
    /// an event naming unknown ids is skipped rather than trusted.
    pub fn apply(&mut self, event: &Event) {
        match event {
            Event::SessionCreated { session_id, scoring } => {
                self.sessions.insert(
                    session_id.clone(),
                    Session {
                        session_id: session_id.clone(),
                        score: 0.0,
                        history: Vec::new(),
                        scoring: *scoring,
                    },
                );
            }
            Event::TaskCreated { record } => {
                self.tasks.insert(record.task_id.clone(), record.clone());
            }
            Event::TaskAssessed { task_id, assessment } => {
                if let Some(t) = self.tasks.get_mut(task_id) {
                    t.assessment = Some(assessment.clone());
                    t.state = TaskState::Assessed;
                }
            }
            Event::TaskDecided {
                task_id,
                session_id,
                decision,
                entry,
            } => {
                if let Some(t) = self.tasks.get_mut(task_id) {
                    t.decision = Some(*decision);
                    t.session_id = Some(session_id.clone());
                    t.state = TaskState::Decided;
                }
                self.settle(session_id, entry.as_ref());
            }
            Event::TaskExecuted { task_id, outcome, entry } => {
                let session = self.tasks.get_mut(task_id).and_then(|t| {
                    t.outcome = Some(outcome.clone());
                    t.state = TaskState::Executed;
                    t.session_id.clone()
                });
                if let Some(s) = session {
                    self.settle(&s, entry.as_ref());
                }
            }
            Event::Response {
                route,
                key,
                status,
                body,
            } => {
                self.responses.insert((route.clone(), key.clone()), (*status, body.clone()));
            }
        }
    }

    fn settle(&mut self, session_id: &str, entry: Option<&HistoryEntry>) {
        if let (Some(s), Some(e)) = (self.sessions.get_mut(session_id), entry) {
            s.score += e.score_delta;
            s.history.push(e.clone());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(delta: f64) -> HistoryEntry {
        HistoryEntry {
            task_id: "t".into(),
            decision: Decision::Cancel,
            x_o: 0.0,
            x_s: None,
            outcome: "cancelled".into(),
            score_delta: delta,
        }
    }

    #[test]
    fn score_is_the_sum_of_history() {
        let mut store = Store::default();
        store.apply(&Event::SessionCreated {
            session_id: "s".into(),
            scoring: Scoring::default(),
        });
        for d in [-0.25, 1.0, -2.0] {
            store.settle("s", Some(&entry(d)));
        }
        let s = store.session("s").unwrap();
        assert_eq!(s.score, s.history.iter().map(|e| e.score_delta).sum::<f64>());
        assert_eq!(s.score, -1.25);
        assert_eq!(store.next_session_id(), "s-000002");
    }

    #[test]
    fn unknown_ids_are_reported() {
        let store = Store::default();
        assert_eq!(store.task("t-9").unwrap_err().status.as_u16(), 404);
        assert_eq!(store.session("s-9").unwrap_err().status.as_u16(), 404);
    }
}
