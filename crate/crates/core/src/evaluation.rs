//! Confusion matrices and precision / recall / F-measure against user
//! ratings, under resubstitution and leave-one-out protocols.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ga::{run_ga, GaError, GaSettings};
use crate::model::{DifficultyCategory, FisConfig, IwdModel};
use crate::record::GameplayRecord;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("rating {0} is outside 1..=10")]
    RatingOutOfRange(u8),
    #[error("no rated records to evaluate")]
    EmptyDataset,
    #[error("leave-one-out needs at least 2 {0} units, found {1}")]
    TooFewFolds(&'static str, usize),
    #[error(transparent)]
    Ga(#[from] GaError),
}

/// Rating bands 1-4 / 5 / 6-10.
pub fn map_urd(urd: u8) -> Result<DifficultyCategory, EvalError> {
    match urd {
        1..=4 => Ok(DifficultyCategory::Easy),
        5 => Ok(DifficultyCategory::Medium),
        6..=10 => Ok(DifficultyCategory::Hard),
        _ => Err(EvalError::RatingOutOfRange(urd)),
    }
}

/// Anything that assigns a category to a record.
pub trait Predictor {
    fn predict(&self, rec: &GameplayRecord) -> DifficultyCategory;
}

impl Predictor for IwdModel {
    fn predict(&self, rec: &GameplayRecord) -> DifficultyCategory {
        self.score(rec).category
    }
}

impl<F: Fn(&GameplayRecord) -> DifficultyCategory> Predictor for F {
    fn predict(&self, rec: &GameplayRecord) -> DifficultyCategory {
        self(rec)
    }
}

/// Rows are the true category, columns the predicted one.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: [[u64; 3]; 3],
}

impl ConfusionMatrix {
    pub fn new(counts: [[u64; 3]; 3]) -> Self {
        Self { counts }
    }

    pub fn add(&mut self, truth: DifficultyCategory, predicted: DifficultyCategory) {
        self.counts[truth.index()][predicted.index()] += 1;
    }

    pub fn merge(&mut self, other: &ConfusionMatrix) {
        for (row, orow) in self.counts.iter_mut().zip(&other.counts) {
            for (c, o) in row.iter_mut().zip(orow) {
                *c += o;
            }
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..3).map(|i| self.counts[i][i]).sum()
    }

    pub fn row_sum(&self, truth: DifficultyCategory) -> u64 {
        self.counts[truth.index()].iter().sum()
    }

    pub fn column_sum(&self, predicted: DifficultyCategory) -> u64 {
        self.counts.iter().map(|r| r[predicted.index()]).sum()
    }

    pub fn accuracy(&self) -> f64 {
        ratio(self.trace(), self.total()).0
    }

    pub fn prf(&self, class: DifficultyCategory) -> ClassMetrics {
        let tp = self.counts[class.index()][class.index()];
        let (precision, p_empty) = ratio(tp, self.column_sum(class));
        let (recall, r_empty) = ratio(tp, self.row_sum(class));
        let f_measure = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        ClassMetrics {
            precision,
            recall,
            f_measure,
            degenerate: p_empty || r_empty,
        }
    }

    /// Micro-averaged recall: pooled true positives over pooled row sums.
    pub fn micro_recall(&self) -> f64 {
        let tp: u64 = DifficultyCategory::ALL.iter().map(|&c| self.counts[c.index()][c.index()]).sum();
        let support: u64 = DifficultyCategory::ALL.iter().map(|&c| self.row_sum(c)).sum();
        ratio(tp, support).0
    }
}

fn ratio(num: u64, den: u64) -> (f64, bool) {
    if den == 0 {
        (0.0, true)
    } else {
        (num as f64 / den as f64, false)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    /// A denominator was zero; the affected values are reported as 0.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub confusion: ConfusionMatrix,
    pub metrics: [ClassMetrics; 3],
}

impl Report {
    pub fn from_confusion(confusion: ConfusionMatrix) -> Self {
        Self {
            metrics: DifficultyCategory::ALL.map(|c| confusion.prf(c)),
            confusion,
        }
    }

    pub fn class(&self, c: DifficultyCategory) -> &ClassMetrics {
        &self.metrics[c.index()]
    }
}

/// Records that carry a rating.
pub fn rated(records: &[GameplayRecord]) -> Vec<GameplayRecord> {
    records.iter().filter(|r| r.urd.is_some()).cloned().collect()
}

/// Scores every rated record with `model`; unrated records are skipped.
pub fn confusion<P: Predictor + Sync>(
    model: &P,
    records: &[GameplayRecord],
) -> Result<ConfusionMatrix, EvalError> {
    let pairs = records
        .par_iter()
        .filter_map(|r| r.urd.map(|u| (u, r)))
        .map(|(u, r)| Ok((map_urd(u)?, model.predict(r))))
        .collect::<Result<Vec<_>, EvalError>>()?;
    let mut cm = ConfusionMatrix::default();
    for (t, p) in pairs {
        cm.add(t, p);
    }
    Ok(cm)
}

pub fn resubstitution<P: Predictor + Sync>(
    model: &P,
    records: &[GameplayRecord],
) -> Result<Report, EvalError> {
    let cm = confusion(model, records)?;
    if cm.total() == 0 {
        return Err(EvalError::EmptyDataset);
    }
    Ok(Report::from_confusion(cm))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FoldMode {
    PerRecord,
    #[default]
    PerParticipant,
    PerWord,
}

impl FoldMode {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::PerRecord => "record",
            Self::PerParticipant => "participant",
            Self::PerWord => "word",
        }
    }

    fn key(self, index: usize, rec: &GameplayRecord) -> String {
        match self {
            Self::PerRecord => format!("{index:08}"),
            Self::PerParticipant => rec.participant_id.clone(),
            // the two scrambles of one word are separate tasks
            Self::PerWord => format!("{:04}:{}", rec.presentation_index, rec.word),
        }
    }
}

impl std::str::FromStr for FoldMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "record" | "per-record" => Ok(Self::PerRecord),
            "participant" | "per-participant" => Ok(Self::PerParticipant),
            "word" | "per-word" => Ok(Self::PerWord),
            _ => Err(format!("unknown fold mode `{s}`")),
        }
    }
}

/// Groups rated record indices into held-out units, in key order.
pub fn folds(records: &[GameplayRecord], mode: FoldMode) -> Vec<Vec<usize>> {
    let mut groups: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, r) in records.iter().enumerate().filter(|(_, r)| r.urd.is_some()) {
        groups.entry(mode.key(i, r)).or_default().push(i);
    }
    groups.into_values().collect()
}

/// How each fold builds its model from the training remainder.
#[derive(Debug, Clone)]
pub enum Trainer {
    /// Uses the given config as is; the training data is ignored.
    Fixed(FisConfig),
    /// Tunes the template with the GA on each fold's training data.
    Ga { template: FisConfig, settings: GaSettings },
}

impl Trainer {
    pub fn fit(&self, train: &[GameplayRecord]) -> Result<IwdModel, EvalError> {
        match self {
            Trainer::Fixed(cfg) => Ok(IwdModel::new(cfg.clone())),
            Trainer::Ga { template, settings } => {
                Ok(IwdModel::new(run_ga(settings, template, train)?.best))
            }
        }
    }
}

pub fn leave_one_out(
    trainer: &Trainer,
    records: &[GameplayRecord],
    mode: FoldMode,
) -> Result<Report, EvalError> {
    let units = folds(records, mode);
    if units.is_empty() {
        return Err(EvalError::EmptyDataset);
    }
    if units.len() < 2 {
        return Err(EvalError::TooFewFolds(mode.as_str(), units.len()));
    }
    let mut total = ConfusionMatrix::default();
    for held in &units {
        let held_set: std::collections::HashSet<usize> = held.iter().copied().collect();
        let train: Vec<GameplayRecord> = records
            .iter()
            .enumerate()
            .filter(|(i, r)| r.urd.is_some() && !held_set.contains(i))
            .map(|(_, r)| r.clone())
            .collect();
        let model = trainer.fit(&train)?;
        let test: Vec<GameplayRecord> = held.iter().map(|&i| records[i].clone()).collect();
        total.merge(&confusion(&model, &test)?);
    }
    Ok(Report::from_confusion(total))
}

/// Resubstitution and leave-one-out side by side, rows precision / recall /
/// F measure, columns Easy / Medium / Hard for each protocol.
pub fn render_table(resub: &Report, loo: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<12}{:^27}{:^27}", "", "Resubstitution", "Leave-One-Out");
    let _ = writeln!(
        out,
        "{:<12}{:>9}{:>9}{:>9}{:>9}{:>9}{:>9}",
        "", "Easy", "Medium", "Hard", "Easy", "Medium", "Hard"
    );
    type Pick = fn(&ClassMetrics) -> f64;
    let rows: [(&str, Pick); 3] = [
        ("Precision", |m| m.precision),
        ("Recall", |m| m.recall),
        ("F Measure", |m| m.f_measure),
    ];
    for (name, pick) in rows {
        let _ = write!(out, "{name:<12}");
        for report in [resub, loo] {
            for m in &report.metrics {
                let _ = write!(out, "{:>9.2}", pick(m));
            }
        }
        out.push('\n');
    }
    out
}

/// CSV form of [`render_table`] at full precision.
pub fn render_csv(resub: &Report, loo: &Report) -> String {
    let mut out = String::from("protocol,class,precision,recall,f_measure,degenerate\n");
    for (name, report) in [("resubstitution", resub), ("leave_one_out", loo)] {
        for (c, m) in DifficultyCategory::ALL.iter().zip(&report.metrics) {
            let _ = writeln!(
                out,
                "{name},{},{},{},{},{}",
                c.as_str(),
                m.precision,
                m.recall,
                m.f_measure,
                m.degenerate
            );
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use DifficultyCategory::*;

    #[test]
    fn urd_bands() {
        for u in 1..=4 {
            assert_eq!(map_urd(u).unwrap(), Easy);
        }
        assert_eq!(map_urd(5).unwrap(), Medium);
        for u in 6..=10 {
            assert_eq!(map_urd(u).unwrap(), Hard);
        }
        assert!(map_urd(0).is_err());
        assert!(map_urd(11).is_err());
    }

    #[test]
    fn diagonal_matrix_is_perfect() {
        let cm = ConfusionMatrix::new([[4, 0, 0], [0, 2, 0], [0, 0, 7]]);
        for c in DifficultyCategory::ALL {
            let m = cm.prf(c);
            assert_eq!((m.precision, m.recall, m.f_measure, m.degenerate), (1.0, 1.0, 1.0, false));
        }
    }

    #[test]
    fn absent_class_is_degenerate() {
        let cm = ConfusionMatrix::new([[4, 0, 1], [0, 0, 0], [2, 0, 7]]);
        let m = cm.prf(Medium);
        assert_eq!((m.precision, m.recall, m.f_measure), (0.0, 0.0, 0.0));
        assert!(m.degenerate);
    }

    #[test]
    fn hand_computed_medium_example() {
        let cm = ConfusionMatrix::new([[8, 2, 0], [1, 3, 1], [0, 2, 8]]);
        let m = cm.prf(Medium);
        assert!((m.precision - 3.0 / 7.0).abs() < 1e-12);
        assert!((m.recall - 0.6).abs() < 1e-12);
        assert!((m.f_measure - 0.5).abs() < 1e-12);
        assert!((cm.micro_recall() - cm.accuracy()).abs() < 1e-15);
        assert_eq!(cm.accuracy(), 19.0 / 25.0);
    }

    #[test]
    fn table_shape() {
        let r = Report::from_confusion(ConfusionMatrix::new([[1, 0, 0], [0, 1, 0], [0, 0, 1]]));
        let t = render_table(&r, &r);
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines.len(), 5);
        assert!(lines[0].contains("Resubstitution") && lines[0].contains("Leave-One-Out"));
        assert!(lines[2].starts_with("Precision"));
        assert!(lines[4].starts_with("F Measure"));
        assert_eq!(render_csv(&r, &r).lines().count(), 7);
    }

    #[test]
    fn fold_mode_parse() {
        assert_eq!("participant".parse::<FoldMode>(), Ok(FoldMode::PerParticipant));
        assert_eq!("per-word".parse::<FoldMode>(), Ok(FoldMode::PerWord));
        assert!("x".parse::<FoldMode>().is_err());
    }
}
