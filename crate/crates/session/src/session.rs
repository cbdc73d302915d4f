//! The per-participant state machine. Pure: callers pass the current time.

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use cast_core::dataset::WordTask;
use cast_core::GameplayRecord;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use uuid::Uuid;

use crate::store::LogEntry;

/// Words per daily session.
pub const DAILY_WORDS: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SessionError {
    #[error("{action} is not allowed while the session is {state}")]
    State { action: &'static str, state: SessionState },
    #[error("the current word has not been presented yet")]
    NotPresented,
    #[error("rating {0} is outside 1..=10")]
    Rating(i64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionState {
    AwaitingGuess,
    AwaitingRating,
    Complete,
}

impl fmt::Display for SessionState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::AwaitingGuess => "awaiting a guess",
            Self::AwaitingRating => "awaiting a rating",
            Self::Complete => "complete",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Every task in the fixed sequence.
    #[default]
    Full,
    /// A seeded sample of [`DAILY_WORDS`] tasks, kept in sequence order.
    Daily,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "full" => Ok(Self::Full),
            "daily" => Ok(Self::Daily),
            _ => Err(format!("unknown mode `{s}`")),
        }
    }
}

/// Picks the daily tasks for `seed`, in their sequence order.
pub fn daily_tasks(tasks: &[WordTask], seed: u64) -> Vec<WordTask> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = rand::seq::index::sample(&mut rng, tasks.len(), DAILY_WORDS.min(tasks.len())).into_vec();
    picked.sort_unstable();
    picked.into_iter().map(|i| tasks[i].clone()).collect()
}

/// Stable seed for a participant's daily sample (64-bit FNV-1a).
pub fn daily_seed(participant_id: &str, day: u64) -> u64 {
    format!("{participant_id}:{day}")
        .bytes()
        .fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GuessOutcome {
    pub correct: bool,
    pub guesses_so_far: u32,
}

#[derive(Debug, Clone, Copy)]
struct Attempt {
    presented_at: Option<Duration>,
    guesses: u32,
    // time taken and whether the word was skipped, once resolved
    outcome: Option<(Duration, bool)>,
}

impl Attempt {
    const FRESH: Attempt = Attempt {
        presented_at: None,
        guesses: 0,
        outcome: None,
    };
}

#[derive(Debug, Clone)]
pub struct Session {
    id: Uuid,
    participant_id: String,
    mode: Mode,
    tasks: Vec<WordTask>,
    cursor: usize,
    state: SessionState,
    attempt: Attempt,
    records: Vec<LogEntry>,
}

impl Session {
    pub fn new(id: Uuid, participant_id: impl Into<String>, mode: Mode, tasks: Vec<WordTask>) -> Self {
        let state = if tasks.is_empty() {
            SessionState::Complete
        } else {
            SessionState::AwaitingGuess
        };
        Self {
            id,
            participant_id: participant_id.into(),
            mode,
            tasks,
            cursor: 0,
            state,
            attempt: Attempt::FRESH,
            records: Vec::new(),
        }
    }

    pub fn id(&self) -> Uuid {
        self.id
    }

    pub fn participant_id(&self) -> &str {
        &self.participant_id
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn state(&self) -> SessionState {
        self.state
    }

    pub fn tasks(&self) -> &[WordTask] {
        &self.tasks
    }

    /// Index of the current task within this session.
    pub fn cursor(&self) -> usize {
        self.cursor
    }

    pub fn records(&self) -> &[LogEntry] {
        &self.records
    }

    fn require(&self, want: SessionState, action: &'static str) -> Result<(), SessionError> {
        if self.state == want {
            Ok(())
        } else {
            Err(SessionError::State { action, state: self.state })
        }
    }

    /// The current task. The first call for a task starts its timer; later
    /// calls return the same task.
    pub fn next_word(&mut self, now: Duration) -> Result<&WordTask, SessionError> {
        self.require(SessionState::AwaitingGuess, "fetching a word")?;
        self.attempt.presented_at.get_or_insert(now);
        Ok(&self.tasks[self.cursor])
    }

    fn presented(&self) -> Result<Duration, SessionError> {
        self.attempt.presented_at.ok_or(SessionError::NotPresented)
    }

    /// Counts a guess; a case-insensitive match of the word resolves the task.
    pub fn submit_guess(&mut self, text: &str, now: Duration) -> Result<GuessOutcome, SessionError> {
        self.require(SessionState::AwaitingGuess, "guessing")?;
        let start = self.presented()?;
        self.attempt.guesses += 1;
        let correct = text.trim().eq_ignore_ascii_case(&self.tasks[self.cursor].word);
        if correct {
            self.attempt.outcome = Some((now.saturating_sub(start), false));
            self.state = SessionState::AwaitingRating;
        }
        Ok(GuessOutcome {
            correct,
            guesses_so_far: self.attempt.guesses,
        })
    }

    pub fn submit_skip(&mut self, now: Duration) -> Result<(), SessionError> {
        self.require(SessionState::AwaitingGuess, "skipping")?;
        let start = self.presented()?;
        self.attempt.outcome = Some((now.saturating_sub(start), true));
        self.state = SessionState::AwaitingRating;
        Ok(())
    }

    /// Builds the record for the resolved task without advancing. `urd` is
    /// `None` when the rating popup was dismissed.
    pub fn rated_record(&self, urd: Option<i64>) -> Result<GameplayRecord, SessionError> {
        self.require(SessionState::AwaitingRating, "rating")?;
        let urd = match urd {
            None => None,
            Some(u @ 1..=10) => Some(u as u8),
            Some(u) => return Err(SessionError::Rating(u)),
        };
        let (elapsed, skipped) = self.attempt.outcome.expect("resolved before rating");
        let task = &self.tasks[self.cursor];
        Ok(GameplayRecord {
            participant_id: self.participant_id.clone(),
            word: task.word.clone(),
            scramble: task.scramble.clone(),
            time_taken: elapsed.as_millis() as f64 / 1000.0,
            num_guesses: self.attempt.guesses,
            was_skipped: skipped,
            urd,
            presentation_index: task.position,
        })
    }

    /// Stores the persisted entry for the current task and moves on.
    pub fn commit(&mut self, entry: LogEntry) -> Result<(), SessionError> {
        self.require(SessionState::AwaitingRating, "rating")?;
        self.records.push(entry);
        self.cursor += 1;
        self.attempt = Attempt::FRESH;
        self.state = if self.cursor == self.tasks.len() {
            SessionState::Complete
        } else {
            SessionState::AwaitingGuess
        };
        Ok(())
    }
}
