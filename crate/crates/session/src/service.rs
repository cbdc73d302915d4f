//! Session registry shared by the HTTP handlers.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, MutexGuard};

use cast_core::dataset::WordTask;
use cast_core::IwdModel;
use serde::Serialize;
use thiserror::Error;
use uuid::Uuid;

use crate::clock::Clock;
use crate::session::{daily_seed, daily_tasks, GuessOutcome, Mode, Session, SessionError, SessionState};
use crate::store::{LogEntry, LogStore, StoreError};

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("no session `{0}`")]
    NotFound(Uuid),
    #[error(transparent)]
    Session(#[from] SessionError),
    #[error("participant id must not be empty")]
    EmptyParticipant,
    #[error(transparent)]
    Store(#[from] StoreError),
}

/// What the client sees of the current task. The answer stays on the server.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WordView {
    pub task_id: String,
    pub scramble: String,
    /// Position in the fixed task sequence.
    pub position: u32,
    /// 1-based index within this session.
    pub index: usize,
    pub total: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatingOutcome {
    pub iwd_crisp: f64,
    pub iwd_category: cast_core::DifficultyCategory,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub session_id: Uuid,
    pub participant_id: String,
    pub mode: Mode,
    pub state: SessionState,
    pub total: usize,
    pub records: Vec<LogEntry>,
}

pub struct SessionService {
    model: IwdModel,
    tasks: Vec<WordTask>,
    store: LogStore,
    clock: Arc<dyn Clock>,
    sessions: Mutex<HashMap<Uuid, Arc<Mutex<Session>>>>,
}

fn lock<T>(m: &Mutex<T>) -> MutexGuard<'_, T> {
    m.lock().unwrap_or_else(|e| e.into_inner())
}

impl SessionService {
    pub fn new(model: IwdModel, tasks: Vec<WordTask>, store: LogStore, clock: Arc<dyn Clock>) -> Self {
        Self {
            model,
            tasks,
            store,
            clock,
            sessions: Mutex::new(HashMap::new()),
        }
    }

    pub fn model(&self) -> &IwdModel {
        &self.model
    }

    pub fn store(&self) -> &LogStore {
        &self.store
    }

    /// Starts a session. Daily sessions draw their words from `seed`, or
    /// from the participant id and the current day when no seed is given.
    pub fn create(&self, participant_id: &str, mode: Mode, seed: Option<u64>) -> Result<Uuid, ServiceError> {
        let participant_id = participant_id.trim();
        if participant_id.is_empty() {
            return Err(ServiceError::EmptyParticipant);
        }
        let tasks = match mode {
            Mode::Full => self.tasks.clone(),
            Mode::Daily => {
                let seed = seed.unwrap_or_else(|| daily_seed(participant_id, self.clock.day()));
                daily_tasks(&self.tasks, seed)
            }
        };
        let id = Uuid::new_v4();
        let session = Session::new(id, participant_id, mode, tasks);
        lock(&self.sessions).insert(id, Arc::new(Mutex::new(session)));
        Ok(id)
    }

    fn session(&self, id: Uuid) -> Result<Arc<Mutex<Session>>, ServiceError> {
        lock(&self.sessions).get(&id).cloned().ok_or(ServiceError::NotFound(id))
    }

    pub fn next_word(&self, id: Uuid) -> Result<WordView, ServiceError> {
        let handle = self.session(id)?;
        let mut s = lock(&handle);
        let (index, total) = (s.cursor() + 1, s.tasks().len());
        let task = s.next_word(self.clock.now())?;
        Ok(WordView {
            task_id: task.task_id.clone(),
            scramble: task.scramble.clone(),
            position: task.position,
            index,
            total,
        })
    }

    pub fn guess(&self, id: Uuid, text: &str) -> Result<GuessOutcome, ServiceError> {
        let handle = self.session(id)?;
        let outcome = lock(&handle).submit_guess(text, self.clock.now())?;
        Ok(outcome)
    }

    pub fn skip(&self, id: Uuid) -> Result<(), ServiceError> {
        let handle = self.session(id)?;
        lock(&handle).submit_skip(self.clock.now())?;
        Ok(())
    }

    /// Closes the current task: scores it, appends it to the log and only
    /// then advances the session, so a failed write leaves it unchanged.
    pub fn rate(&self, id: Uuid, urd: Option<i64>) -> Result<RatingOutcome, ServiceError> {
        let handle = self.session(id)?;
        let mut s = lock(&handle);
        let record = s.rated_record(urd)?;
        let score = self.model.score(&record);
        let entry = LogEntry::new(id, s.tasks()[s.cursor()].task_id.clone(), record, &score);
        self.store.append(&entry)?;
        s.commit(entry)?;
        Ok(RatingOutcome {
            iwd_crisp: score.crisp,
            iwd_category: score.category,
        })
    }

    pub fn summary(&self, id: Uuid) -> Result<Summary, ServiceError> {
        let handle = self.session(id)?;
        let s = lock(&handle);
        Ok(Summary {
            session_id: s.id(),
            participant_id: s.participant_id().to_owned(),
            mode: s.mode(),
            state: s.state(),
            total: s.tasks().len(),
            records: s.records().to_vec(),
        })
    }
}
