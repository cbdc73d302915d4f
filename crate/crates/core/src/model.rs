//! The two-layer difficulty cascade.
//!
//! User effort (guesses, time) and complexity of word (length, degree of
//! scramble) are independent first-layer nodes. Their crisp outputs are
//! re-fuzzified by the second-layer node together with the skip flag to give
//! the individualized word difficulty (IWD) on the 0-10 rating scale.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fuzzy::{Crisp, FisNode, FuzzyError};
use crate::record::GameplayRecord;

pub const NUM_GUESSES: &str = "num_guesses";
pub const TIME_TAKEN: &str = "time_taken";
pub const WORD_LENGTH: &str = "word_length";
pub const DEGREE_OF_SCRAMBLE: &str = "degree_of_scramble";
pub const WAS_SKIPPED: &str = "was_skipped";
pub const USER_EFFORT: &str = "user_effort";
pub const COMPLEXITY_OF_WORD: &str = "complexity_of_word";
pub const IWD: &str = "iwd";

pub const CONFIG_VERSION: u32 = 1;

const HEURISTIC_JSON: &str = include_str!("../data/heuristic_fis.json");

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("unsupported config version {0}")]
    Version(u32),
    #[error("node `{node}` must have inputs {expected:?} and output `{output}`")]
    Shape {
        node: &'static str,
        expected: &'static [&'static str],
        output: &'static str,
    },
    #[error(transparent)]
    Fuzzy(#[from] FuzzyError),
    #[error("malformed config: {0}")]
    Json(#[from] serde_json::Error),
}

/// Easy < Medium < Hard.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DifficultyCategory {
    Easy,
    Medium,
    Hard,
}

impl DifficultyCategory {
    pub const ALL: [DifficultyCategory; 3] = [Self::Easy, Self::Medium, Self::Hard];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Easy => "easy",
            Self::Medium => "medium",
            Self::Hard => "hard",
        }
    }
}

impl fmt::Display for DifficultyCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Easy => "Easy",
            Self::Medium => "Medium",
            Self::Hard => "Hard",
        })
    }
}

impl FromStr for DifficultyCategory {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "easy" => Ok(Self::Easy),
            "medium" => Ok(Self::Medium),
            "hard" => Ok(Self::Hard),
            _ => Err(format!("unknown category `{s}`")),
        }
    }
}

/// Maps a crisp IWD onto a category. The cut points sit halfway between the
/// integer rating bands 1-4, 5 and 6-10.
pub fn classify_iwd(crisp: f64) -> DifficultyCategory {
    if crisp < 4.5 {
        DifficultyCategory::Easy
    } else if crisp <= 5.5 {
        DifficultyCategory::Medium
    } else {
        DifficultyCategory::Hard
    }
}

/// Complete hierarchical model description, as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawConfig", into = "RawConfig")]
pub struct FisConfig {
    pub version: u32,
    pub name: String,
    pub notes: Vec<String>,
    user_effort: FisNode,
    complexity_of_word: FisNode,
    iwd: FisNode,
}

#[derive(Serialize, Deserialize)]
struct RawConfig {
    version: u32,
    name: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    notes: Vec<String>,
    user_effort: FisNode,
    complexity_of_word: FisNode,
    iwd: FisNode,
}

impl TryFrom<RawConfig> for FisConfig {
    type Error = ConfigError;

    fn try_from(r: RawConfig) -> Result<Self, ConfigError> {
        if r.version != CONFIG_VERSION {
            return Err(ConfigError::Version(r.version));
        }
        let mut cfg = FisConfig::new(r.user_effort, r.complexity_of_word, r.iwd)?;
        cfg.name = r.name;
        cfg.notes = r.notes;
        Ok(cfg)
    }
}

impl From<FisConfig> for RawConfig {
    fn from(c: FisConfig) -> Self {
        Self {
            version: c.version,
            name: c.name,
            notes: c.notes,
            user_effort: c.user_effort,
            complexity_of_word: c.complexity_of_word,
            iwd: c.iwd,
        }
    }
}

/// Node identifiers, in gene-layout order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    UserEffort,
    ComplexityOfWord,
    Iwd,
}

impl NodeKind {
    pub const ALL: [NodeKind; 3] = [Self::UserEffort, Self::ComplexityOfWord, Self::Iwd];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::UserEffort => USER_EFFORT,
            Self::ComplexityOfWord => COMPLEXITY_OF_WORD,
            Self::Iwd => IWD,
        }
    }
}

fn check_shape(
    node: &FisNode,
    name: &'static str,
    expected: &'static [&'static str],
    output: &'static str,
) -> Result<(), ConfigError> {
    let mut got: Vec<&str> = node.inputs().iter().map(|v| v.name()).collect();
    got.sort_unstable();
    let mut want = expected.to_vec();
    want.sort_unstable();
    if got != want || node.output().name() != output {
        return Err(ConfigError::Shape {
            node: name,
            expected,
            output,
        });
    }
    Ok(())
}

impl FisConfig {
    pub fn new(user_effort: FisNode, complexity_of_word: FisNode, iwd: FisNode) -> Result<Self, ConfigError> {
        check_shape(&user_effort, USER_EFFORT, &[NUM_GUESSES, TIME_TAKEN], USER_EFFORT)?;
        check_shape(
            &complexity_of_word,
            COMPLEXITY_OF_WORD,
            &[WORD_LENGTH, DEGREE_OF_SCRAMBLE],
            COMPLEXITY_OF_WORD,
        )?;
        check_shape(&iwd, IWD, &[USER_EFFORT, COMPLEXITY_OF_WORD, WAS_SKIPPED], IWD)?;
        Ok(Self {
            version: CONFIG_VERSION,
            name: String::new(),
            notes: Vec::new(),
            user_effort,
            complexity_of_word,
            iwd,
        })
    }

    /// The shipped hand-built model.
    pub fn heuristic() -> Self {
        Self::from_json(HEURISTIC_JSON).expect("bundled heuristic config is valid")
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    pub fn node(&self, kind: NodeKind) -> &FisNode {
        match kind {
            NodeKind::UserEffort => &self.user_effort,
            NodeKind::ComplexityOfWord => &self.complexity_of_word,
            NodeKind::Iwd => &self.iwd,
        }
    }

    /// Replaces one node, re-checking the cascade shape.
    pub fn with_node(&self, kind: NodeKind, node: FisNode) -> Result<Self, ConfigError> {
        let mut nodes = [
            self.user_effort.clone(),
            self.complexity_of_word.clone(),
            self.iwd.clone(),
        ];
        nodes[kind as usize] = node;
        let [ue, cow, iwd] = nodes;
        let mut out = Self::new(ue, cow, iwd)?;
        out.name = self.name.clone();
        out.notes = self.notes.clone();
        Ok(out)
    }
}

/// Model inputs after clamping to each variable's universe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector {
    pub time_taken: f64,
    pub num_guesses: f64,
    pub word_length: f64,
    pub degree_of_scramble: f64,
    pub was_skipped: f64,
}

/// Scored outcome of one record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IwdScore {
    pub user_effort: f64,
    pub complexity_of_word: f64,
    pub crisp: f64,
    pub category: DifficultyCategory,
    /// Some node had no active rule and fell back to its universe midpoint.
    pub degenerate: bool,
}

/// A loaded cascade ready for scoring. Immutable and `Sync`.
#[derive(Debug, Clone)]
pub struct IwdModel {
    config: FisConfig,
    // positions of the named inputs within each node
    ue_slots: [usize; 2],
    cow_slots: [usize; 2],
    iwd_slots: [usize; 3],
}

fn slot(node: &FisNode, name: &str) -> usize {
    node.input_index(name).expect("shape checked by FisConfig")
}

impl IwdModel {
    pub fn new(config: FisConfig) -> Self {
        let ue = config.node(NodeKind::UserEffort);
        let cow = config.node(NodeKind::ComplexityOfWord);
        let iwd = config.node(NodeKind::Iwd);
        Self {
            ue_slots: [slot(ue, NUM_GUESSES), slot(ue, TIME_TAKEN)],
            cow_slots: [slot(cow, WORD_LENGTH), slot(cow, DEGREE_OF_SCRAMBLE)],
            iwd_slots: [
                slot(iwd, USER_EFFORT),
                slot(iwd, COMPLEXITY_OF_WORD),
                slot(iwd, WAS_SKIPPED),
            ],
            config,
        }
    }

    pub fn heuristic() -> Self {
        Self::new(FisConfig::heuristic())
    }

    pub fn config(&self) -> &FisConfig {
        &self.config
    }

    fn universe_of(&self, kind: NodeKind, name: &str) -> crate::fuzzy::Universe {
        let node = self.config.node(kind);
        node.inputs()[slot(node, name)].universe()
    }

    pub fn extract_features(&self, rec: &GameplayRecord) -> FeatureVector {
        use NodeKind::*;
        let clamp = |kind, name, x: f64| self.universe_of(kind, name).clamp(x);
        FeatureVector {
            time_taken: clamp(UserEffort, TIME_TAKEN, rec.time_taken),
            num_guesses: clamp(UserEffort, NUM_GUESSES, f64::from(rec.num_guesses)),
            word_length: clamp(ComplexityOfWord, WORD_LENGTH, rec.word_length() as f64),
            degree_of_scramble: clamp(ComplexityOfWord, DEGREE_OF_SCRAMBLE, rec.degree_of_scramble()),
            was_skipped: clamp(Iwd, WAS_SKIPPED, if rec.was_skipped { 1.0 } else { 0.0 }),
        }
    }

    fn run<const N: usize>(node: &FisNode, slots: [usize; N], values: [f64; N]) -> Crisp {
        let mut ordered = [0.0; N];
        for (s, v) in slots.into_iter().zip(values) {
            ordered[s] = v;
        }
        node.evaluate(&ordered)
            .expect("model inputs are finite and correctly shaped")
    }

    pub fn compute_ue(&self, num_guesses: f64, time_taken: f64) -> Crisp {
        Self::run(
            self.config.node(NodeKind::UserEffort),
            self.ue_slots,
            [num_guesses, time_taken],
        )
    }

    pub fn compute_cow(&self, word_length: f64, degree_of_scramble: f64) -> Crisp {
        Self::run(
            self.config.node(NodeKind::ComplexityOfWord),
            self.cow_slots,
            [word_length, degree_of_scramble],
        )
    }

    pub fn compute_iwd(&self, user_effort: f64, complexity_of_word: f64, was_skipped: f64) -> Crisp {
        Self::run(
            self.config.node(NodeKind::Iwd),
            self.iwd_slots,
            [user_effort, complexity_of_word, was_skipped],
        )
    }

    pub fn score_features(&self, f: &FeatureVector) -> IwdScore {
        let ue = self.compute_ue(f.num_guesses, f.time_taken);
        let cow = self.compute_cow(f.word_length, f.degree_of_scramble);
        self.finish(ue, cow, f.was_skipped)
    }

    /// Second-layer evaluation from already computed first-layer outputs.
    pub fn finish(&self, ue: Crisp, cow: Crisp, was_skipped: f64) -> IwdScore {
        let iwd = self.compute_iwd(ue.value, cow.value, was_skipped);
        IwdScore {
            user_effort: ue.value,
            complexity_of_word: cow.value,
            crisp: iwd.value,
            category: classify_iwd(iwd.value),
            degenerate: ue.degenerate || cow.degenerate || iwd.degenerate,
        }
    }

    pub fn score(&self, rec: &GameplayRecord) -> IwdScore {
        self.score_features(&self.extract_features(rec))
    }
}
