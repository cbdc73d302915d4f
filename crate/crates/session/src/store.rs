//! Append-only JSONL gameplay log.

use std::fs::{self, File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use cast_core::record::{parse_jsonl, JsonlError};
use cast_core::{DifficultyCategory, GameplayRecord, IwdModel, IwdScore};
use serde::{Deserialize, Serialize};
use thiserror::Error;
use uuid::Uuid;

/// File name of the log inside the data directory.
pub const LOG_FILE: &str = "sessions.jsonl";

/// One finished task as persisted. The record fields are inlined, so a log
/// file is also a valid gameplay dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogEntry {
    pub session_id: Uuid,
    pub task_id: String,
    #[serde(flatten)]
    pub record: GameplayRecord,
    pub iwd_crisp: f64,
    pub iwd_category: DifficultyCategory,
    pub user_effort: f64,
    pub complexity_of_word: f64,
    pub degenerate: bool,
}

impl LogEntry {
    pub fn new(session_id: Uuid, task_id: impl Into<String>, record: GameplayRecord, score: &IwdScore) -> Self {
        Self {
            session_id,
            task_id: task_id.into(),
            record,
            iwd_crisp: score.crisp,
            iwd_category: score.category,
            user_effort: score.user_effort,
            complexity_of_word: score.complexity_of_word,
            degenerate: score.degenerate,
        }
    }
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: JsonlError,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug)]
pub struct LogStore {
    path: PathBuf,
    file: Mutex<File>,
}

impl LogStore {
    /// Opens (creating if needed) the log in `dir`.
    pub fn open(dir: impl AsRef<Path>) -> Result<Self, StoreError> {
        let dir = dir.as_ref();
        let io_err = |source| StoreError::Io {
            path: dir.to_path_buf(),
            source,
        };
        fs::create_dir_all(dir).map_err(io_err)?;
        let path = dir.join(LOG_FILE);
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(|source| StoreError::Io {
                path: path.clone(),
                source,
            })?;
        Ok(Self {
            path,
            file: Mutex::new(file),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Writes one line and flushes it before returning.
    pub fn append(&self, entry: &LogEntry) -> Result<(), StoreError> {
        let mut line = serde_json::to_string(entry).expect("log entries serialize");
        line.push('\n');
        let mut file = self.file.lock().unwrap_or_else(|e| e.into_inner());
        file.write_all(line.as_bytes())
            .and_then(|()| file.flush())
            .map_err(|source| StoreError::Io {
                path: self.path.clone(),
                source,
            })
    }

    pub fn entries(&self) -> Result<Vec<LogEntry>, StoreError> {
        read_log(&self.path)
    }
}

pub fn read_log(path: impl AsRef<Path>) -> Result<Vec<LogEntry>, StoreError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_jsonl(&text).map_err(|source| StoreError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Serialize)]
struct CsvRow<'a> {
    session_id: Uuid,
    task_id: &'a str,
    participant_id: &'a str,
    presentation_index: u32,
    word: &'a str,
    scramble: &'a str,
    time_taken: f64,
    num_guesses: u32,
    was_skipped: bool,
    urd: Option<u8>,
    iwd_crisp: f64,
    iwd_category: DifficultyCategory,
    user_effort: f64,
    complexity_of_word: f64,
}

/// Writes entries as CSV with a header row; a dismissed rating is an empty
/// `urd` cell.
pub fn export_csv(entries: &[LogEntry], out: impl Write) -> Result<(), StoreError> {
    let mut w = csv::Writer::from_writer(out);
    for e in entries {
        let r = &e.record;
        w.serialize(CsvRow {
            session_id: e.session_id,
            task_id: &e.task_id,
            participant_id: &r.participant_id,
            presentation_index: r.presentation_index,
            word: &r.word,
            scramble: &r.scramble,
            time_taken: r.time_taken,
            num_guesses: r.num_guesses,
            was_skipped: r.was_skipped,
            urd: r.urd,
            iwd_crisp: e.iwd_crisp,
            iwd_category: e.iwd_category,
            user_effort: e.user_effort,
            complexity_of_word: e.complexity_of_word,
        })?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplayMismatch {
    pub line: usize,
    pub logged: DifficultyCategory,
    pub replayed: DifficultyCategory,
    pub logged_crisp: f64,
    pub replayed_crisp: f64,
}

/// Re-scores every logged record offline and lists entries whose category
/// or crisp value differ from what was logged live.
pub fn replay(entries: &[LogEntry], model: &IwdModel) -> Vec<ReplayMismatch> {
    entries
        .iter()
        .enumerate()
        .filter_map(|(i, e)| {
            let s = model.score(&e.record);
            let same = s.category == e.iwd_category && s.crisp.to_bits() == e.iwd_crisp.to_bits();
            (!same).then(|| ReplayMismatch {
                line: i + 1,
                logged: e.iwd_category,
                replayed: s.category,
                logged_crisp: e.iwd_crisp,
                replayed_crisp: s.crisp,
            })
        })
        .collect()
}
