//! Append-only JSON-lines event log. Each line is one [`Event`]; replaying
//! the lines in order through [`crate::Store::apply`] rebuilds all state.

use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::Scoring;
use crate::store::{Decision, HistoryEntry, TaskRecord};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    SessionCreated {
        session_id: String,
        scoring: Scoring,
    },
    TaskCreated {
        record: TaskRecord,
    },
    TaskAssessed {
        task_id: String,
        assessment: Value,
    },
    TaskDecided {
        task_id: String,
        session_id: String,
        decision: Decision,
        /// Present for a cancel, which settles the task immediately.
        entry: Option<HistoryEntry>,
    },
    TaskExecuted {
        task_id: String,
        outcome: Value,
        /// Present for an authorized run, absent after a cancel.
        entry: Option<HistoryEntry>,
    },
    /// A reply stored under an idempotency key.
    Response {
        route: String,
        key: String,
        status: u16,
        body: Value,
    },
}

/// Writer for the event log; a log without a path keeps nothing on disk.
#[derive(Debug)]
pub struct EventLog {
    path: Option<PathBuf>,
    file: Option<File>,
}

impl EventLog {
    pub fn in_memory() -> Self {
        EventLog { path: None, file: None }
    }

    /// Opens `path` for appending, creating it and its directory if needed,
    /// and returns the events already in it.
    pub fn open(path: &Path) -> io::Result<(Self, Vec<Event>)> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        let events = if path.exists() { read_events(path)? } else { Vec::new() };
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok((
            EventLog {
                path: Some(path.to_path_buf()),
                file: Some(file),
            },
            events,
        ))
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn append(&mut self, event: &Event) -> io::Result<()> {
        if let Some(file) = &mut self.file {
            let mut line = serde_json::to_string(event).map_err(io::Error::other)?;
            line.push('\n');
            file.write_all(line.as_bytes())?;
            file.flush()?;
        }
        Ok(())
    }
}

/// Reads every event of a log file. A torn final line from an interrupted
/// write is ignored; corruption anywhere else is an error.
pub fn read_events(path: &Path) -> io::Result<Vec<Event>> {
    let lines: Vec<String> = BufReader::new(File::open(path)?).lines().collect::<Result<_, _>>()?;
    let last = lines.len().saturating_sub(1);
    let mut events = Vec::with_capacity(lines.len());
    for (i, line) in lines.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str(line) {
            Ok(e) => events.push(e),
            Err(_) if i == last => break,
            Err(e) => {
                return Err(io::Error::new(
                    io::ErrorKind::InvalidData,
                    format!("{}:{}: {e}", path.display(), i + 1),
                ))
            }
        }
    }
    Ok(events)
}
