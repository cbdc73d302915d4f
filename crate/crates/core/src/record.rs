use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scramble::{self, ScrambleError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RecordError {
    #[error(transparent)]
    Letters(#[from] ScrambleError),
    #[error("time taken must be finite and non-negative, got {0}")]
    InvalidTime(f64),
    #[error("a solved word needs at least one guess")]
    SolvedWithoutGuess,
    #[error("rating {0} is outside 1..=10")]
    RatingOutOfRange(u8),
}

/// Outcome of one word task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRecord")]
pub struct GameplayRecord {
    pub participant_id: String,
    pub word: String,
    pub scramble: String,
    /// Seconds from presentation to solve or skip.
    pub time_taken: f64,
    pub num_guesses: u32,
    pub was_skipped: bool,
    /// User-rated difficulty, absent when the rating popup was dismissed.
    pub urd: Option<u8>,
    pub presentation_index: u32,
}

#[derive(Deserialize)]
struct RawRecord {
    participant_id: String,
    word: String,
    scramble: String,
    time_taken: f64,
    num_guesses: u32,
    was_skipped: bool,
    #[serde(default)]
    urd: Option<u8>,
    presentation_index: u32,
}

impl TryFrom<RawRecord> for GameplayRecord {
    type Error = RecordError;

    fn try_from(r: RawRecord) -> Result<Self, RecordError> {
        let rec = GameplayRecord {
            participant_id: r.participant_id,
            word: r.word,
            scramble: r.scramble,
            time_taken: r.time_taken,
            num_guesses: r.num_guesses,
            was_skipped: r.was_skipped,
            urd: r.urd,
            presentation_index: r.presentation_index,
        };
        rec.validate()?;
        Ok(rec)
    }
}

impl GameplayRecord {
    /// Checks the record invariants. Word and scramble must be equal-length
    /// ASCII words; they are not required to be a strict permutation so
    /// that logs from other word lists still score.
    pub fn validate(&self) -> Result<(), RecordError> {
        let word = scramble::normalize(&self.word)?;
        let scr = scramble::normalize(&self.scramble)?;
        if word.len() != scr.len() {
            return Err(ScrambleError::LengthMismatch(word.len(), scr.len()).into());
        }
        if !(self.time_taken.is_finite() && self.time_taken >= 0.0) {
            return Err(RecordError::InvalidTime(self.time_taken));
        }
        if !self.was_skipped && self.num_guesses == 0 {
            return Err(RecordError::SolvedWithoutGuess);
        }
        if let Some(u) = self.urd {
            if !(1..=10).contains(&u) {
                return Err(RecordError::RatingOutOfRange(u));
            }
        }
        Ok(())
    }

    pub fn word_length(&self) -> usize {
        self.word.len()
    }

    pub fn degree_of_scramble(&self) -> f64 {
        scramble::degree_of_scramble_str(
            &self.word.to_ascii_lowercase(),
            &self.scramble.to_ascii_lowercase(),
        )
        .unwrap_or(0.0)
    }
}

/// Parses newline-delimited JSON records, skipping blank lines. Errors carry
/// the 1-based line number.
pub fn parse_jsonl<T: serde::de::DeserializeOwned>(text: &str) -> Result<Vec<T>, JsonlError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|source| JsonlError {
                line: i + 1,
                source,
            })
        })
        .collect()
}

#[derive(Debug, Error)]
#[error("line {line}: {source}")]
pub struct JsonlError {
    pub line: usize,
    #[source]
    pub source: serde_json::Error,
}

pub fn to_jsonl<T: Serialize>(items: &[T]) -> String {
    let mut out = String::new();
    for item in items {
        out.push_str(&serde_json::to_string(item).expect("records serialize"));
        out.push('\n');
    }
    out
}
