//! Individualized word difficulty for a word-scramble game.
//!
//! The pipeline turns a gameplay outcome (time, guesses, skip, the word and
//! its scramble) into a crisp difficulty on the 0-10 rating scale using a
//! two-layer cascade of Mamdani fuzzy inference nodes:
//!
//! ```text
//! guesses, time  ──► [user effort] ───────┐
//!                                         ├──► [iwd] ──► Easy / Medium / Hard
//! length, scramble ► [complexity of word] ┤
//! was skipped ────────────────────────────┘
//! ```
//!
//! The membership-function parameters can be tuned against user-rated
//! difficulty with a real-coded genetic algorithm ([`ga`]) and scored with
//! precision / recall / F-measure ([`evaluation`]).

pub mod dataset;
pub mod evaluation;
pub mod fuzzy;
pub mod ga;
pub mod model;
pub mod record;
pub mod scramble;
pub mod simulate;

pub use fuzzy::{FisNode, FuzzyError, FuzzyRule, LinguisticVariable, MembershipFunction};
pub use model::{DifficultyCategory, FisConfig, IwdModel, IwdScore};
pub use record::GameplayRecord;
