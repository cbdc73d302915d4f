//! Live word-scramble sessions.
//!
//! A [`Session`] walks one participant through the task sequence:
//!
//! ```text
//! AwaitingGuess --correct guess / skip--> AwaitingRating --rating--> AwaitingGuess | Complete
//! ```
//!
//! Each rating closes a [`cast_core::GameplayRecord`], scores it with the
//! configured model and appends a [`LogEntry`] to the JSONL log before the
//! session advances. [`SessionService`] holds the sessions and [`api::router`]
//! exposes them over HTTP.

pub mod api;
pub mod clock;
pub mod service;
pub mod session;
pub mod store;

pub use clock::{Clock, ManualClock, SystemClock};
pub use service::{ServiceError, SessionService};
pub use session::{Mode, Session, SessionError, SessionState};
pub use store::{LogEntry, LogStore};

/// Environment variable naming the directory that holds the gameplay log.
pub const DATA_DIR_ENV: &str = "CAST_DATA_DIR";
