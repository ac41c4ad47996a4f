use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, RwLock};

use sha2::{Digest, Sha256};
use tokio::sync::Mutex;

use crate::session::Session;
use crate::spec::SessionSpec;
use crate::SessionError;

/// All sessions under one journal directory. Each session sits behind its
/// own lock, so different sessions never wait on each other.
pub struct SessionStore {
    dir: PathBuf,
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
    counter: AtomicU64,
}

impl SessionStore {
    /// Opens `dir` (creating it if needed) and resumes every `*.jsonl`
    /// journal found there.
    pub fn open(dir: &Path) -> Result<Self, SessionError> {
        std::fs::create_dir_all(dir).map_err(|e| SessionError::io(dir, e))?;
        let mut sessions = HashMap::new();
        let entries = std::fs::read_dir(dir).map_err(|e| SessionError::io(dir, e))?;
        for entry in entries {
            let path = entry.map_err(|e| SessionError::io(dir, e))?.path();
            if path.extension().is_some_and(|x| x == "jsonl") {
                let s = Session::load(&path)?;
                sessions.insert(s.id().to_owned(), Arc::new(Mutex::new(s)));
            }
        }
        Ok(Self {
            dir: dir.to_owned(),
            sessions: RwLock::new(sessions),
            counter: AtomicU64::new(0),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn create(&self, spec: SessionSpec) -> Result<Arc<Mutex<Session>>, SessionError> {
        spec.validate().map_err(SessionError::InvalidSpec)?;
        let id = self.fresh_id(&spec);
        let session = Arc::new(Mutex::new(Session::create(&self.dir, id.clone(), spec)?));
        self.sessions
            .write()
            .expect("session map poisoned")
            .insert(id, session.clone());
        Ok(session)
    }

    pub fn get(&self, id: &str) -> Result<Arc<Mutex<Session>>, SessionError> {
        self.sessions
            .read()
            .expect("session map poisoned")
            .get(id)
            .cloned()
            .ok_or_else(|| SessionError::NotFound(id.to_owned()))
    }

    pub fn ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self.sessions.read().expect("session map poisoned").keys().cloned().collect();
        ids.sort();
        ids
    }

    fn fresh_id(&self, spec: &SessionSpec) -> String {
        loop {
            let mut h = Sha256::new();
            h.update(serde_json::to_vec(spec).unwrap_or_default());
            h.update(chrono::Utc::now().timestamp_nanos_opt().unwrap_or(0).to_le_bytes());
            h.update(self.counter.fetch_add(1, Ordering::Relaxed).to_le_bytes());
            h.update(std::process::id().to_le_bytes());
            let id = hex::encode(&h.finalize()[..8]);
            let taken = self.sessions.read().expect("session map poisoned").contains_key(&id)
                || self.dir.join(format!("{id}.jsonl")).exists();
            if !taken {
                return id;
            }
        }
    }
}
