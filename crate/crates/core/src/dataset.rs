//! The default word-task sequence.
//!
//! Every participant sees the same tasks in the same order. The list holds
//! 27 distinct words plus a second, fully permuted scramble of `hazardous`
//! (the first keeps its `ous` suffix in place), 28 tasks in total.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scramble::{self, generate_scramble, ScrambleError, ScramblePair};

/// Base seed for the generated default scrambles; task `n` uses
/// `DEFAULT_SCRAMBLE_SEED + n`.
pub const DEFAULT_SCRAMBLE_SEED: u64 = 20_190;

const TASKS_CSV: &str = include_str!("../data/tasks.csv");

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("task file: {0}")]
    Csv(#[from] csv::Error),
    #[error("task {position}: {source}")]
    Scramble {
        position: u32,
        #[source]
        source: ScrambleError,
    },
    #[error("task positions must run 1..={expected} in order, found {found} at row {row}")]
    Order { row: usize, expected: usize, found: u32 },
    #[error("duplicate task id `{0}`")]
    DuplicateId(String),
    #[error("no tasks")]
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WordCategory {
    General,
    Edibles,
    Items,
    Acts,
    Animals,
    Colors,
}

impl fmt::Display for WordCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::General => "general",
            Self::Edibles => "edibles",
            Self::Items => "items",
            Self::Acts => "acts",
            Self::Animals => "animals",
            Self::Colors => "colors",
        })
    }
}

impl FromStr for WordCategory {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "general" => Self::General,
            "edibles" => Self::Edibles,
            "items" => Self::Items,
            "acts" => Self::Acts,
            "animals" => Self::Animals,
            "colors" => Self::Colors,
            _ => return Err(format!("unknown word category `{s}`")),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordTask {
    pub task_id: String,
    pub word: String,
    pub scramble: String,
    pub category: WordCategory,
    /// 1-based position in the fixed sequence.
    pub position: u32,
}

impl WordTask {
    pub fn pair(&self) -> ScramblePair {
        ScramblePair::new(&self.word, &self.scramble).expect("validated on load")
    }
}

#[derive(Debug, Deserialize)]
struct TaskRow {
    position: u32,
    task_id: String,
    word: String,
    scramble: String,
    category: String,
    #[allow(dead_code)]
    source: String,
}

/// Parses a task file: CSV with `#` comment lines and the header
/// `position,task_id,word,scramble,category,source`.
pub fn parse_tasks_csv(text: &str) -> Result<Vec<WordTask>, DatasetError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut tasks = Vec::new();
    let mut ids = std::collections::HashSet::new();
    for (row, result) in reader.deserialize::<TaskRow>().enumerate() {
        let r = result?;
        if r.position as usize != row + 1 {
            return Err(DatasetError::Order {
                row: row + 1,
                expected: row + 1,
                found: r.position,
            });
        }
        let pair = ScramblePair::new(&r.word, &r.scramble).map_err(|source| DatasetError::Scramble {
            position: r.position,
            source,
        })?;
        let category = r.category.parse().map_err(|e: String| {
            DatasetError::Csv(csv::Error::from(std::io::Error::new(
                std::io::ErrorKind::InvalidData,
                e,
            )))
        })?;
        if !ids.insert(r.task_id.clone()) {
            return Err(DatasetError::DuplicateId(r.task_id));
        }
        tasks.push(WordTask {
            task_id: r.task_id,
            word: pair.word().to_owned(),
            scramble: pair.permutation().to_owned(),
            category,
            position: r.position,
        });
    }
    if tasks.is_empty() {
        return Err(DatasetError::Empty);
    }
    Ok(tasks)
}

/// The bundled 28-task sequence.
pub fn default_tasks() -> Vec<WordTask> {
    parse_tasks_csv(TASKS_CSV).expect("bundled task file is valid")
}

/// How a default scramble was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScrambleSource {
    /// Published scramble, used verbatim.
    Given(&'static str),
    /// Seeded shuffle, optionally keeping a suffix in place.
    Generated { keep_suffix: Option<&'static str> },
}

/// Words of the default sequence in presentation order.
pub const DEFAULT_WORDS: [(&str, &str, WordCategory, ScrambleSource); 28] = {
    use ScrambleSource::*;
    use WordCategory::*;
    const GEN: ScrambleSource = Generated { keep_suffix: None };
    [
        ("hazardous-v1", "hazardous", General, Generated { keep_suffix: Some("ous") }),
        ("water", "water", Edibles, Given("tarew")),
        ("prize", "prize", Items, GEN),
        ("check", "check", Acts, GEN),
        ("manatee", "manatee", Animals, GEN),
        ("khaki", "khaki", Colors, GEN),
        ("liberty", "liberty", General, GEN),
        ("mustard", "mustard", Edibles, GEN),
        ("nickel", "nickel", Items, GEN),
        ("knock", "knock", Acts, GEN),
        ("ebony", "ebony", Colors, GEN),
        ("quakes", "quakes", General, GEN),
        ("avocado", "avocado", Edibles, GEN),
        ("pickup", "pickup", Items, GEN),
        ("defuse", "defuse", Acts, GEN),
        ("orange", "orange", Colors, GEN),
        ("bright", "bright", General, GEN),
        ("raspberry", "raspberry", Edibles, GEN),
        ("gargoyle", "gargoyle", Items, GEN),
        ("harvest", "harvest", Acts, GEN),
        ("lavender", "lavender", Colors, GEN),
        ("twilight", "twilight", General, GEN),
        ("pistachio", "pistachio", Edibles, GEN),
        ("daffodil", "daffodil", Items, GEN),
        ("midnight", "midnight", General, GEN),
        ("jasmine", "jasmine", Items, GEN),
        ("brilliant", "brilliant", General, GEN),
        ("hazardous-v2", "hazardous", General, GEN),
    ]
};

/// Rebuilds the default sequence from [`DEFAULT_WORDS`] and
/// [`DEFAULT_SCRAMBLE_SEED`].
pub fn regenerate_default_tasks() -> Result<Vec<WordTask>, ScrambleError> {
    DEFAULT_WORDS
        .iter()
        .zip(1u32..)
        .map(|(&(id, word, category, source), position)| {
            let scramble = match source {
                ScrambleSource::Given(s) => ScramblePair::new(word, s)?,
                ScrambleSource::Generated { keep_suffix } => {
                    generate_scramble(word, DEFAULT_SCRAMBLE_SEED + u64::from(position), keep_suffix)?
                }
            };
            Ok(WordTask {
                task_id: id.to_owned(),
                word: word.to_owned(),
                scramble: scramble.permutation().to_owned(),
                category,
                position,
            })
        })
        .collect()
}

/// Renders tasks in the bundled file format.
pub fn tasks_to_csv(tasks: &[WordTask]) -> String {
    let mut out = String::from("position,task_id,word,scramble,category,source\n");
    for t in tasks {
        let source = DEFAULT_WORDS
            .iter()
            .find(|w| w.0 == t.task_id)
            .map(|w| match w.3 {
                ScrambleSource::Given(_) => "given".to_owned(),
                ScrambleSource::Generated { keep_suffix: Some(s) } => {
                    format!("seed={}+keep={s}", DEFAULT_SCRAMBLE_SEED + u64::from(t.position))
                }
                ScrambleSource::Generated { keep_suffix: None } => {
                    format!("seed={}", DEFAULT_SCRAMBLE_SEED + u64::from(t.position))
                }
            })
            .unwrap_or_else(|| "custom".to_owned());
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            t.position, t.task_id, t.word, t.scramble, t.category, source
        ));
    }
    out
}

/// Per-task scramble metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct ScrambleMetrics {
    pub word: String,
    pub scramble: String,
    pub degree_of_scramble: f64,
    pub normalized_hamming: f64,
}

pub fn scramble_metrics(tasks: &[WordTask]) -> Vec<ScrambleMetrics> {
    tasks
        .iter()
        .map(|t| {
            let pair = t.pair();
            ScrambleMetrics {
                word: t.word.clone(),
                scramble: t.scramble.clone(),
                degree_of_scramble: scramble::degree_of_scramble(&pair),
                normalized_hamming: scramble::normalized_hamming(&pair),
            }
        })
        .collect()
}

/// Pearson r between degree of scramble and normalized Hamming distance.
pub fn scramble_correlation(metrics: &[ScrambleMetrics]) -> Result<f64, ScrambleError> {
    let xs: Vec<f64> = metrics.iter().map(|m| m.degree_of_scramble).collect();
    let ys: Vec<f64> = metrics.iter().map(|m| m.normalized_hamming).collect();
    scramble::pearson(&xs, &ys)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_file_matches_its_generator() {
        let regenerated = regenerate_default_tasks().unwrap();
        assert_eq!(default_tasks(), regenerated);
    }

    #[test]
    fn default_sequence_shape() {
        let tasks = default_tasks();
        assert_eq!(tasks.len(), 28);
        let hazardous: Vec<&WordTask> = tasks.iter().filter(|t| t.word == "hazardous").collect();
        assert_eq!(hazardous.len(), 2);
        assert!(hazardous[0].position < 5);
        assert!(hazardous[1].position > 20);
        assert!(hazardous[0].scramble.ends_with("ous"));
        let water = tasks.iter().find(|t| t.word == "water").unwrap();
        assert_eq!(water.scramble, "tarew");
        let distinct: std::collections::HashSet<&str> = tasks.iter().map(|t| t.word.as_str()).collect();
        assert_eq!(distinct.len(), 27);
    }

    #[test]
    fn parser_rejects_bad_rows() {
        let header = "position,task_id,word,scramble,category,source\n";
        assert!(matches!(parse_tasks_csv(header), Err(DatasetError::Empty)));
        let unscrambled = format!("{header}1,a,water,water,edibles,x\n");
        assert!(matches!(parse_tasks_csv(&unscrambled), Err(DatasetError::Scramble { .. })));
        let gap = format!("{header}2,a,water,tarew,edibles,x\n");
        assert!(matches!(parse_tasks_csv(&gap), Err(DatasetError::Order { .. })));
        let dup = format!("{header}1,a,water,tarew,edibles,x\n2,a,knock,konck,acts,x\n");
        assert!(matches!(parse_tasks_csv(&dup), Err(DatasetError::DuplicateId(_))));
        let cat = format!("{header}1,a,water,tarew,drinks,x\n");
        assert!(parse_tasks_csv(&cat).is_err());
    }
}
