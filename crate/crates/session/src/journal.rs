use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use orderopt::Sign3;
use serde::{Deserialize, Serialize};

use crate::spec::SessionSpec;
use crate::SessionError;

/// One line of a session journal. Undo is recorded as its own event rather
/// than by rewriting the file, so the journal stays append-only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum JournalEvent {
    Created {
        session_id: String,
        spec: SessionSpec,
        at: DateTime<Utc>,
    },
    /// A comparison was put in front of the human. Candidates are in solver
    /// coordinates.
    Query {
        query_id: String,
        /// Number of answers in effect when the query was issued.
        index: u64,
        candidate_a: Vec<f64>,
        candidate_b: Vec<f64>,
        issued_at: DateTime<Utc>,
    },
    Answer {
        query_id: String,
        answer: Sign3,
        at: DateTime<Utc>,
    },
    /// Withdraws the most recent answer in effect.
    Undo { at: DateTime<Utc> },
    /// State fingerprint after a mutation; checked on resume.
    Checkpoint { answers: u64, state_hash: String },
}

pub struct Journal {
    path: PathBuf,
    file: File,
}

impl Journal {
    pub fn create(path: &Path) -> Result<Self, SessionError> {
        let file = OpenOptions::new()
            .create_new(true)
            .append(true)
            .open(path)
            .map_err(|e| SessionError::io(path, e))?;
        Ok(Self {
            path: path.to_owned(),
            file,
        })
    }

    /// Reads all events and reopens the file for appending. A torn final
    /// line (crash mid-write) is cut off; any other unreadable line is an
    /// error.
    pub fn open(path: &Path) -> Result<(Self, Vec<JournalEvent>), SessionError> {
        let reader = BufReader::new(File::open(path).map_err(|e| SessionError::io(path, e))?);
        let mut events = Vec::new();
        let mut good_len = 0u64;
        let mut torn = false;
        let mut lines = reader.split(b'\n').peekable();
        let mut lineno = 0;
        while let Some(line) = lines.next() {
            lineno += 1;
            let line = line.map_err(|e| SessionError::io(path, e))?;
            let is_last = lines.peek().is_none();
            if line.is_empty() {
                good_len += 1;
                continue;
            }
            match serde_json::from_slice::<JournalEvent>(&line) {
                Ok(ev) => {
                    events.push(ev);
                    good_len += line.len() as u64 + 1;
                }
                Err(_) if is_last => torn = true,
                Err(e) => {
                    return Err(SessionError::CorruptJournal {
                        path: path.to_owned(),
                        reason: format!("line {lineno}: {e}"),
                    })
                }
            }
        }
        let file = OpenOptions::new()
            .append(true)
            .open(path)
            .map_err(|e| SessionError::io(path, e))?;
        if torn {
            file.set_len(good_len).map_err(|e| SessionError::io(path, e))?;
        }
        Ok((
            Self {
                path: path.to_owned(),
                file,
            },
            events,
        ))
    }

    /// Appends one line and waits for it to reach the disk.
    pub fn append(&mut self, event: &JournalEvent) -> Result<(), SessionError> {
        let mut line = serde_json::to_vec(event).map_err(|e| SessionError::Internal(e.to_string()))?;
        line.push(b'\n');
        self.file
            .write_all(&line)
            .and_then(|_| self.file.sync_data())
            .map_err(|e| SessionError::io(&self.path, e))
    }

    pub fn path(&self) -> &Path {
        &self.path
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn undo() -> JournalEvent {
        JournalEvent::Undo { at: Utc::now() }
    }

    #[test]
    fn append_then_open_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.jsonl");
        let mut j = Journal::create(&path).unwrap();
        let ev = JournalEvent::Checkpoint {
            answers: 3,
            state_hash: "ab".into(),
        };
        j.append(&ev).unwrap();
        j.append(&undo()).unwrap();
        drop(j);
        let (_, events) = Journal::open(&path).unwrap();
        assert_eq!(events.len(), 2);
        assert_eq!(events[0], ev);
        assert!(std::fs::read_to_string(&path).unwrap().lines().all(|l| l.starts_with("{\"event\":")));
    }

    #[test]
    fn create_refuses_existing_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.jsonl");
        Journal::create(&path).unwrap();
        assert!(Journal::create(&path).is_err());
    }

    #[test]
    fn torn_tail_is_dropped_and_file_stays_appendable() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.jsonl");
        let mut j = Journal::create(&path).unwrap();
        j.append(&undo()).unwrap();
        drop(j);
        let mut f = OpenOptions::new().append(true).open(&path).unwrap();
        f.write_all(b"{\"event\":\"und").unwrap();
        drop(f);

        let (mut j, events) = Journal::open(&path).unwrap();
        assert_eq!(events.len(), 1);
        j.append(&undo()).unwrap();
        let (_, events) = Journal::open(&path).unwrap();
        assert_eq!(events.len(), 2);
    }

    #[test]
    fn garbage_in_the_middle_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.jsonl");
        std::fs::write(&path, "nonsense\n{\"event\":\"undo\",\"at\":\"2024-01-01T00:00:00Z\"}\n").unwrap();
        assert!(matches!(Journal::open(&path), Err(SessionError::CorruptJournal { .. })));
    }
}
