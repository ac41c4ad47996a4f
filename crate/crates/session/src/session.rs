use std::path::Path;

use chrono::{DateTime, Utc};
use orderopt::Sign3;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::journal::{Journal, JournalEvent};
use crate::replay::{replay, FinishReason, Progress, Replay};
use crate::spec::{LabeledValue, SessionSpec};
use crate::SessionError;

/// What the client sees for the pending comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonQuery {
    pub query_id: String,
    /// Answers already in effect when this query was issued.
    pub index: u64,
    pub candidate_a: Vec<LabeledValue>,
    pub candidate_b: Vec<LabeledValue>,
    pub issued_at: DateTime<Utc>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionStatus {
    Active,
    Finished,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionState {
    pub session_id: String,
    pub status: SessionStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub finish_reason: Option<FinishReason>,
    /// Completed solver iterations (rounds for square halving).
    pub iteration: u64,
    pub queries_used: u64,
    pub query_budget: u64,
    /// Latest iterate; the coordinate solvers never accept a step the
    /// answers say is worse, so this is also the best point so far.
    pub best: Vec<LabeledValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pending_query_id: Option<String>,
    /// Fingerprint of the solver state; equal hashes mean equal states.
    pub state_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub iteration: u64,
    pub queries_used: u64,
    pub params: Vec<LabeledValue>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionTrace {
    pub session_id: String,
    pub points: Vec<TrajectoryPoint>,
    /// Answers in effect, oldest first: −1 (A preferred), 0 (tie), +1.
    pub answers: Vec<Sign3>,
}

#[derive(Debug, Clone)]
struct Pending {
    query_id: String,
    index: u64,
    a: Vec<f64>,
    b: Vec<f64>,
    issued_at: DateTime<Utc>,
}

pub struct Session {
    id: String,
    spec: SessionSpec,
    journal: Journal,
    answers: Vec<Sign3>,
    /// Queries ever issued; part of every query id, so ids never repeat.
    issued: u64,
    pending: Option<Pending>,
    replay: Replay,
}

fn same_pair(p: &Pending, a: &[f64], b: &[f64]) -> bool {
    let eq = |u: &[f64], v: &[f64]| u.len() == v.len() && u.iter().zip(v).all(|(x, y)| x.to_bits() == y.to_bits());
    eq(&p.a, a) && eq(&p.b, b)
}

impl Session {
    /// Starts a new session journaled at `dir/<id>.jsonl`.
    pub fn create(dir: &Path, id: String, spec: SessionSpec) -> Result<Self, SessionError> {
        spec.validate().map_err(SessionError::InvalidSpec)?;
        let replay = replay(&spec, &[])?;
        let mut journal = Journal::create(&dir.join(format!("{id}.jsonl")))?;
        journal.append(&JournalEvent::Created {
            session_id: id.clone(),
            spec: spec.clone(),
            at: Utc::now(),
        })?;
        let mut s = Self {
            id,
            spec,
            journal,
            answers: Vec::new(),
            issued: 0,
            pending: None,
            replay,
        };
        s.sync_pending()?;
        s.checkpoint()?;
        Ok(s)
    }

    /// Rebuilds a session from its journal.
    pub fn load(path: &Path) -> Result<Self, SessionError> {
        let (journal, events) = Journal::open(path)?;
        let corrupt = |reason: &str| SessionError::CorruptJournal {
            path: path.to_owned(),
            reason: reason.to_owned(),
        };
        let mut events = events.into_iter();
        let (id, spec) = match events.next() {
            Some(JournalEvent::Created { session_id, spec, .. }) => (session_id, spec),
            _ => return Err(corrupt("journal does not start with a created event")),
        };
        spec.validate().map_err(SessionError::InvalidSpec)?;
        let mut answers = Vec::new();
        let mut issued = 0;
        let mut last_query = None;
        let mut checkpoint = None;
        for ev in events {
            match ev {
                JournalEvent::Created { .. } => return Err(corrupt("second created event")),
                JournalEvent::Query {
                    query_id,
                    index,
                    candidate_a,
                    candidate_b,
                    issued_at,
                } => {
                    issued += 1;
                    last_query = Some(Pending {
                        query_id,
                        index,
                        a: candidate_a,
                        b: candidate_b,
                        issued_at,
                    });
                }
                JournalEvent::Answer { answer, .. } => {
                    answers.push(answer);
                    last_query = None;
                }
                JournalEvent::Undo { .. } => {
                    answers.pop().ok_or_else(|| corrupt("undo with no answer"))?;
                    last_query = None;
                }
                JournalEvent::Checkpoint { answers: n, state_hash } => checkpoint = Some((n, state_hash)),
            }
        }
        let replay = replay(&spec, &answers)?;
        // Re-serve the journaled pending query if it is still the one the
        // solver is waiting on; otherwise the process died before it was
        // written and a fresh one is issued.
        let pending = match (&replay.progress, last_query) {
            (Progress::Pending { first, second }, Some(q))
                if q.index == answers.len() as u64 && same_pair(&q, first, second) =>
            {
                Some(q)
            }
            _ => None,
        };
        let mut s = Self {
            id,
            spec,
            journal,
            answers,
            issued,
            pending,
            replay,
        };
        s.sync_pending()?;
        if let Some((n, hash)) = checkpoint {
            if n == s.answers.len() as u64 && hash != s.state_hash() {
                return Err(SessionError::ReplayMismatch(format!(
                    "journal checkpoint {hash} but replay gives {}",
                    s.state_hash()
                )));
            }
        }
        Ok(s)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn spec(&self) -> &SessionSpec {
        &self.spec
    }

    pub fn journal_path(&self) -> &Path {
        self.journal.path()
    }

    /// The pending comparison; the same one until it is answered or undone.
    pub fn next_query(&self) -> Result<ComparisonQuery, SessionError> {
        let p = self.pending.as_ref().ok_or_else(|| SessionError::Finished(Box::new(self.state())))?;
        Ok(ComparisonQuery {
            query_id: p.query_id.clone(),
            index: p.index,
            candidate_a: self.spec.labeled(&self.spec.to_params(&p.a)),
            candidate_b: self.spec.labeled(&self.spec.to_params(&p.b)),
            issued_at: p.issued_at,
        })
    }

    /// `answer` is `sign(f(A) − f(B))`: `Minus` means A is preferred.
    pub fn submit_answer(&mut self, query_id: &str, answer: Sign3) -> Result<SessionState, SessionError> {
        let p = self.pending.as_ref().ok_or_else(|| SessionError::Finished(Box::new(self.state())))?;
        if p.query_id != query_id {
            return Err(SessionError::StaleQuery {
                expected: p.query_id.clone(),
                got: query_id.to_owned(),
            });
        }
        self.journal.append(&JournalEvent::Answer {
            query_id: query_id.to_owned(),
            answer,
            at: Utc::now(),
        })?;
        self.answers.push(answer);
        self.pending = None;
        self.advance()
    }

    /// Withdraws the last answer; its comparison becomes pending again under
    /// a new id.
    pub fn undo(&mut self) -> Result<SessionState, SessionError> {
        if self.answers.is_empty() {
            return Err(SessionError::NothingToUndo);
        }
        self.journal.append(&JournalEvent::Undo { at: Utc::now() })?;
        self.answers.pop();
        self.pending = None;
        self.advance()
    }

    fn advance(&mut self) -> Result<SessionState, SessionError> {
        self.replay = replay(&self.spec, &self.answers)?;
        self.sync_pending()?;
        self.checkpoint()?;
        Ok(self.state())
    }

    /// Issues (and journals) a query for the solver's pending comparison
    /// unless the current one already matches.
    fn sync_pending(&mut self) -> Result<(), SessionError> {
        match &self.replay.progress {
            Progress::Pending { first, second } => {
                if self.pending.as_ref().is_some_and(|p| same_pair(p, first, second)) {
                    return Ok(());
                }
                let query_id = self.query_id(self.issued, first, second);
                let q = Pending {
                    query_id,
                    index: self.answers.len() as u64,
                    a: first.clone(),
                    b: second.clone(),
                    issued_at: Utc::now(),
                };
                self.journal.append(&JournalEvent::Query {
                    query_id: q.query_id.clone(),
                    index: q.index,
                    candidate_a: q.a.clone(),
                    candidate_b: q.b.clone(),
                    issued_at: q.issued_at,
                })?;
                self.issued += 1;
                self.pending = Some(q);
            }
            Progress::Finished(_) => self.pending = None,
        }
        Ok(())
    }

    fn checkpoint(&mut self) -> Result<(), SessionError> {
        let ev = JournalEvent::Checkpoint {
            answers: self.answers.len() as u64,
            state_hash: self.state_hash(),
        };
        self.journal.append(&ev)
    }

    fn query_id(&self, serial: u64, a: &[f64], b: &[f64]) -> String {
        let mut h = Sha256::new();
        h.update(self.id.as_bytes());
        h.update(serial.to_le_bytes());
        for v in a.iter().chain(b) {
            h.update(v.to_bits().to_le_bytes());
        }
        hex::encode(&h.finalize()[..16])
    }

    /// Hash of everything the solver state depends on or produces: answers,
    /// trajectory and pending pair. Query ids and timestamps are excluded,
    /// so undo followed by the same answer reproduces the hash.
    pub fn state_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.answers.len() as u64).to_le_bytes());
        for a in &self.answers {
            h.update([a.as_i8() as u8]);
        }
        for w in &self.replay.trajectory {
            h.update(w.iteration.to_le_bytes());
            h.update(w.queries_used.to_le_bytes());
            for v in &w.u {
                h.update(v.to_bits().to_le_bytes());
            }
        }
        match &self.replay.progress {
            Progress::Pending { first, second } => {
                h.update(b"pending");
                for v in first.iter().chain(second) {
                    h.update(v.to_bits().to_le_bytes());
                }
            }
            Progress::Finished(r) => {
                h.update(b"finished");
                h.update(format!("{r:?}").as_bytes());
            }
        }
        hex::encode(h.finalize())
    }

    pub fn state(&self) -> SessionState {
        let cur = self.replay.current();
        let (status, finish_reason) = match self.replay.progress {
            Progress::Pending { .. } => (SessionStatus::Active, None),
            Progress::Finished(r) => (SessionStatus::Finished, Some(r)),
        };
        SessionState {
            session_id: self.id.clone(),
            status,
            finish_reason,
            iteration: cur.iteration,
            queries_used: self.answers.len() as u64,
            query_budget: self.spec.query_budget,
            best: self.spec.labeled(&self.spec.to_params(&cur.u)),
            pending_query_id: self.pending.as_ref().map(|p| p.query_id.clone()),
            state_hash: self.state_hash(),
        }
    }

    pub fn trace(&self) -> SessionTrace {
        SessionTrace {
            session_id: self.id.clone(),
            points: self
                .replay
                .trajectory
                .iter()
                .map(|w| TrajectoryPoint {
                    iteration: w.iteration,
                    queries_used: w.queries_used,
                    params: self.spec.labeled(&self.spec.to_params(&w.u)),
                })
                .collect(),
            answers: self.answers.clone(),
        }
    }
}
