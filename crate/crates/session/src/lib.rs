//! Human-as-oracle optimization sessions. A solver runs against a person's
//! pairwise preferences: each comparison it needs becomes a query served
//! over HTTP, every answer is journaled, and the solver state is always the
//! deterministic replay of the answers so far. That makes resume after a
//! crash and undo exact.

pub mod http;
pub mod journal;
pub mod replay;
pub mod session;
pub mod spec;
pub mod store;

use std::path::{Path, PathBuf};

pub use http::{router, serve, AnswerRequest, Created, Preference};
pub use replay::{replay, FinishReason, Progress, Replay, ReplayOracle};
pub use session::{ComparisonQuery, Session, SessionState, SessionStatus, SessionTrace, TrajectoryPoint};
pub use spec::{FieldError, LabeledValue, ParamSpec, SessionSolver, SessionSpec};
pub use store::SessionStore;

#[derive(Debug, thiserror::Error)]
pub enum SessionError {
    #[error("invalid session spec: {}", describe(.0))]
    InvalidSpec(Vec<FieldError>),
    #[error("no session {0:?}")]
    NotFound(String),
    #[error("query {got:?} is not the pending query {expected:?}")]
    StaleQuery { expected: String, got: String },
    #[error("session is finished")]
    Finished(Box<SessionState>),
    #[error("nothing to undo")]
    NothingToUndo,
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: corrupt journal: {reason}")]
    CorruptJournal { path: PathBuf, reason: String },
    #[error("replay does not match the journal: {0}")]
    ReplayMismatch(String),
    #[error("solver: {0}")]
    Solver(String),
    #[error("{0}")]
    Internal(String),
}

impl SessionError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        SessionError::Io {
            path: path.to_owned(),
            source,
        }
    }
}

fn describe(fields: &[FieldError]) -> String {
    fields
        .iter()
        .map(|f| format!("{}: {}", f.field, f.reason))
        .collect::<Vec<_>>()
        .join("; ")
}
