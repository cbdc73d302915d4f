//! Single-stage Mamdani inference.
//!
//! Conjunction and implication are `min`, aggregation is pointwise `max`, and
//! the aggregate is defuzzified by its centroid over the output universe
//! sampled at [`CENTROID_SAMPLES`] evenly spaced points.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Number of evenly spaced points used to sample an output universe.
pub const CENTROID_SAMPLES: usize = 1001;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FuzzyError {
    #[error("invalid {form} parameters {params:?}: {reason}")]
    InvalidParameter {
        form: Form,
        params: Vec<f64>,
        reason: &'static str,
    },
    #[error("input value {0} is not finite")]
    NonFinite(f64),
    #[error("invalid universe [{lo}, {hi}]")]
    InvalidUniverse { lo: f64, hi: f64 },
    #[error("variable `{0}` has no labels")]
    EmptyVariable(String),
    #[error("label `{label}` appears twice in variable `{variable}`")]
    DuplicateLabel { variable: String, label: String },
    #[error("variable `{0}` is declared twice in the node")]
    DuplicateVariable(String),
    #[error("rule {index}: {reason}")]
    InvalidRule { index: usize, reason: String },
    #[error("missing input `{0}`")]
    MissingInput(String),
    #[error("expected {expected} input values, got {got}")]
    InputArity { expected: usize, got: usize },
    #[error("all rule activations are zero")]
    Degenerate,
    #[error("invalid sample set: {0}")]
    InvalidSamples(&'static str),
}

pub type Result<T, E = FuzzyError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Form {
    Gaussian,
    Sigmoid,
    Triangular,
}

impl Form {
    pub fn param_count(self) -> usize {
        match self {
            Form::Gaussian | Form::Sigmoid => 2,
            Form::Triangular => 3,
        }
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Form::Gaussian => "gaussian",
            Form::Sigmoid => "sigmoid",
            Form::Triangular => "triangular",
        })
    }
}

/// A parameterized fuzzy set.
///
/// Parameter vectors follow the toolbox ordering: Gaussian `[sigma, center]`,
/// sigmoid `[slope, inflection]`, triangular `[left, peak, right]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MembershipFunction {
    Gaussian { sigma: f64, center: f64 },
    Sigmoid { slope: f64, inflection: f64 },
    Triangular { left: f64, peak: f64, right: f64 },
}

impl MembershipFunction {
    pub fn gaussian(sigma: f64, center: f64) -> Result<Self> {
        Self::from_params(Form::Gaussian, &[sigma, center])
    }

    pub fn sigmoid(slope: f64, inflection: f64) -> Result<Self> {
        Self::from_params(Form::Sigmoid, &[slope, inflection])
    }

    pub fn triangular(left: f64, peak: f64, right: f64) -> Result<Self> {
        Self::from_params(Form::Triangular, &[left, peak, right])
    }

    pub fn from_params(form: Form, params: &[f64]) -> Result<Self> {
        let invalid = |reason| FuzzyError::InvalidParameter {
            form,
            params: params.to_vec(),
            reason,
        };
        if params.len() != form.param_count() {
            return Err(invalid("wrong parameter count"));
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(invalid("parameters must be finite"));
        }
        match form {
            Form::Gaussian => {
                if params[0] <= 0.0 {
                    return Err(invalid("sigma must be positive"));
                }
                Ok(Self::Gaussian {
                    sigma: params[0],
                    center: params[1],
                })
            }
            Form::Sigmoid => Ok(Self::Sigmoid {
                slope: params[0],
                inflection: params[1],
            }),
            Form::Triangular => {
                let (left, peak, right) = (params[0], params[1], params[2]);
                if !(left <= peak && peak <= right) {
                    return Err(invalid("expected left <= peak <= right"));
                }
                if left >= right {
                    return Err(invalid("expected left < right"));
                }
                Ok(Self::Triangular { left, peak, right })
            }
        }
    }

    pub fn form(&self) -> Form {
        match self {
            Self::Gaussian { .. } => Form::Gaussian,
            Self::Sigmoid { .. } => Form::Sigmoid,
            Self::Triangular { .. } => Form::Triangular,
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match *self {
            Self::Gaussian { sigma, center } => vec![sigma, center],
            Self::Sigmoid { slope, inflection } => vec![slope, inflection],
            Self::Triangular { left, peak, right } => vec![left, peak, right],
        }
    }

    /// Membership degree of `x`, rejecting non-finite input.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(FuzzyError::NonFinite(x));
        }
        Ok(self.degree(x))
    }

    /// Membership degree of a finite `x`; always in `[0, 1]`.
    #[inline]
    pub fn degree(&self, x: f64) -> f64 {
        match *self {
            Self::Gaussian { sigma, center } => {
                let d = x - center;
                (-(d * d) / (2.0 * sigma * sigma)).exp()
            }
            Self::Sigmoid { slope, inflection } => {
                1.0 / (1.0 + (-slope * (x - inflection)).exp())
            }
            Self::Triangular { left, peak, right } => {
                if x == peak {
                    1.0
                } else if x <= left || x >= right {
                    0.0
                } else if x < peak {
                    (x - left) / (peak - left)
                } else {
                    (right - x) / (right - peak)
                }
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RawMembership {
    form: Form,
    params: Vec<f64>,
}

impl Serialize for MembershipFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawMembership {
            form: self.form(),
            params: self.params(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MembershipFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawMembership::deserialize(d)?;
        Self::from_params(raw.form, &raw.params).map_err(serde::de::Error::custom)
    }
}

/// Closed interval a variable ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct Universe {
    lo: f64,
    hi: f64,
}

impl Universe {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(FuzzyError::InvalidUniverse { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        self.lo + 0.5 * self.width()
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.lo, self.hi)
    }

    /// `n` evenly spaced points from `lo` to `hi` inclusive.
    pub fn grid(&self, n: usize) -> Vec<f64> {
        assert!(n >= 2, "a grid needs at least two points");
        let last = (n - 1) as f64;
        (0..n)
            .map(|k| if k == n - 1 { self.hi } else { self.lo + self.width() * k as f64 / last })
            .collect()
    }
}

impl TryFrom<[f64; 2]> for Universe {
    type Error = FuzzyError;

    fn try_from([lo, hi]: [f64; 2]) -> Result<Self> {
        Self::new(lo, hi)
    }
}

impl From<Universe> for [f64; 2] {
    fn from(u: Universe) -> Self {
        [u.lo, u.hi]
    }
}

/// One linguistic label of a variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub label: String,
    pub mf: MembershipFunction,
}

impl Term {
    pub fn new(label: impl Into<String>, mf: MembershipFunction) -> Self {
        Self {
            label: label.into(),
            mf,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawVariable", into = "RawVariable")]
pub struct LinguisticVariable {
    name: String,
    universe: Universe,
    terms: Vec<Term>,
}

#[derive(Serialize, Deserialize)]
struct RawVariable {
    name: String,
    universe: Universe,
    terms: Vec<Term>,
}

impl TryFrom<RawVariable> for LinguisticVariable {
    type Error = FuzzyError;

    fn try_from(raw: RawVariable) -> Result<Self> {
        Self::new(raw.name, raw.universe, raw.terms)
    }
}

impl From<LinguisticVariable> for RawVariable {
    fn from(v: LinguisticVariable) -> Self {
        Self {
            name: v.name,
            universe: v.universe,
            terms: v.terms,
        }
    }
}

impl LinguisticVariable {
    pub fn new(name: impl Into<String>, universe: Universe, terms: Vec<Term>) -> Result<Self> {
        let name = name.into();
        if terms.is_empty() {
            return Err(FuzzyError::EmptyVariable(name));
        }
        let mut seen = HashSet::new();
        for t in &terms {
            if !seen.insert(t.label.as_str()) {
                return Err(FuzzyError::DuplicateLabel {
                    variable: name,
                    label: t.label.clone(),
                });
            }
        }
        Ok(Self {
            name,
            universe,
            terms,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn term(&self, label: &str) -> Option<&Term> {
        self.terms.iter().find(|t| t.label == label)
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.terms.iter().position(|t| t.label == label)
    }

    /// Copy of this variable with every membership function replaced.
    pub fn with_membership(&self, mfs: Vec<MembershipFunction>) -> Result<Self> {
        assert_eq!(mfs.len(), self.terms.len(), "one membership function per label");
        let terms = self
            .terms
            .iter()
            .zip(mfs)
            .map(|(t, mf)| Term::new(t.label.clone(), mf))
            .collect();
        Self::new(self.name.clone(), self.universe, terms)
    }
}

/// `variable IS label`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "(String, String)", into = "(String, String)")]
pub struct Clause {
    pub variable: String,
    pub label: String,
}

impl Clause {
    pub fn new(variable: impl Into<String>, label: impl Into<String>) -> Self {
        Self {
            variable: variable.into(),
            label: label.into(),
        }
    }
}

impl From<(String, String)> for Clause {
    fn from((variable, label): (String, String)) -> Self {
        Self { variable, label }
    }
}

impl From<Clause> for (String, String) {
    fn from(c: Clause) -> Self {
        (c.variable, c.label)
    }
}

/// Conjunctive IF-THEN rule.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FuzzyRule {
    #[serde(rename = "if")]
    pub antecedent: Vec<Clause>,
    #[serde(rename = "then")]
    pub consequent: Clause,
}

impl FuzzyRule {
    pub fn new(antecedent: Vec<Clause>, consequent: Clause) -> Self {
        Self {
            antecedent,
            consequent,
        }
    }
}

#[derive(Debug, Clone)]
struct CompiledRule {
    // (input index, label index)
    antecedent: Vec<(usize, usize)>,
    consequent: usize,
}

/// Crisp node output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crisp {
    pub value: f64,
    /// No rule fired; `value` is the output universe midpoint.
    pub degenerate: bool,
}

/// Sampled output fuzzy set.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSet {
    pub xs: Vec<f64>,
    pub mu: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Inference {
    pub crisp: Crisp,
    /// Firing strength of each rule, in rule order.
    pub firing: Vec<f64>,
    pub aggregate: SampledSet,
}

/// A rule-based inference node: inputs, one output, and a rule base.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "RawNode", into = "RawNode")]
pub struct FisNode {
    inputs: Vec<LinguisticVariable>,
    output: LinguisticVariable,
    rules: Vec<FuzzyRule>,
    compiled: Vec<CompiledRule>,
    grid: Vec<f64>,
    // output label index -> membership sampled on `grid`
    output_samples: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct RawNode {
    inputs: Vec<LinguisticVariable>,
    output: LinguisticVariable,
    rules: Vec<FuzzyRule>,
}

impl TryFrom<RawNode> for FisNode {
    type Error = FuzzyError;

    fn try_from(raw: RawNode) -> Result<Self> {
        Self::new(raw.inputs, raw.output, raw.rules)
    }
}

impl From<FisNode> for RawNode {
    fn from(n: FisNode) -> Self {
        Self {
            inputs: n.inputs,
            output: n.output,
            rules: n.rules,
        }
    }
}

impl PartialEq for FisNode {
    fn eq(&self, other: &Self) -> bool {
        self.inputs == other.inputs && self.output == other.output && self.rules == other.rules
    }
}

impl FisNode {
    pub fn new(
        inputs: Vec<LinguisticVariable>,
        output: LinguisticVariable,
        rules: Vec<FuzzyRule>,
    ) -> Result<Self> {
        let mut names = HashSet::new();
        for v in inputs.iter().chain(std::iter::once(&output)) {
            if !names.insert(v.name()) {
                return Err(FuzzyError::DuplicateVariable(v.name().to_owned()));
            }
        }
        let index: HashMap<&str, usize> = inputs
            .iter()
            .enumerate()
            .map(|(i, v)| (v.name(), i))
            .collect();

        let mut compiled = Vec::with_capacity(rules.len());
        for (ri, rule) in rules.iter().enumerate() {
            let bad = |reason: String| FuzzyError::InvalidRule { index: ri, reason };
            if rule.antecedent.is_empty() {
                return Err(bad("empty antecedent".into()));
            }
            let mut antecedent = Vec::with_capacity(rule.antecedent.len());
            for clause in &rule.antecedent {
                let vi = *index.get(clause.variable.as_str()).ok_or_else(|| {
                    bad(format!("`{}` is not an input of this node", clause.variable))
                })?;
                let li = inputs[vi].label_index(&clause.label).ok_or_else(|| {
                    bad(format!("`{}` has no label `{}`", clause.variable, clause.label))
                })?;
                antecedent.push((vi, li));
            }
            if rule.consequent.variable != output.name() {
                return Err(bad(format!(
                    "consequent `{}` is not the node output `{}`",
                    rule.consequent.variable,
                    output.name()
                )));
            }
            let consequent = output.label_index(&rule.consequent.label).ok_or_else(|| {
                bad(format!(
                    "`{}` has no label `{}`",
                    output.name(),
                    rule.consequent.label
                ))
            })?;
            compiled.push(CompiledRule {
                antecedent,
                consequent,
            });
        }

        let grid = output.universe().grid(CENTROID_SAMPLES);
        let output_samples = output
            .terms()
            .iter()
            .map(|t| grid.iter().map(|&x| t.mf.degree(x)).collect())
            .collect();

        Ok(Self {
            inputs,
            output,
            rules,
            compiled,
            grid,
            output_samples,
        })
    }

    pub fn inputs(&self) -> &[LinguisticVariable] {
        &self.inputs
    }

    pub fn output(&self) -> &LinguisticVariable {
        &self.output
    }

    pub fn rules(&self) -> &[FuzzyRule] {
        &self.rules
    }

    pub fn input_index(&self, name: &str) -> Option<usize> {
        self.inputs.iter().position(|v| v.name() == name)
    }

    /// Full inference from named inputs. Extra names are ignored.
    pub fn infer(&self, inputs: &HashMap<&str, f64>) -> Result<Inference> {
        let values = self
            .inputs
            .iter()
            .map(|v| {
                inputs
                    .get(v.name())
                    .copied()
                    .ok_or_else(|| FuzzyError::MissingInput(v.name().to_owned()))
            })
            .collect::<Result<Vec<_>>>()?;
        self.infer_values(&values)
    }

    /// Full inference from positional inputs (in [`FisNode::inputs`] order).
    pub fn infer_values(&self, values: &[f64]) -> Result<Inference> {
        self.check_values(values)?;
        let firing = self.firing(values);
        let levels = self.label_levels(&firing);
        let mut mu = vec![0.0; self.grid.len()];
        self.aggregate_into(&levels, &mut mu);
        let crisp = match centroid(&self.grid, &mu) {
            Ok(value) => Crisp {
                value,
                degenerate: false,
            },
            Err(_) => self.degenerate(),
        };
        Ok(Inference {
            crisp,
            firing,
            aggregate: SampledSet {
                xs: self.grid.clone(),
                mu,
            },
        })
    }

    /// Crisp output only; same arithmetic as [`FisNode::infer_values`]
    /// without materializing the aggregate.
    pub fn evaluate(&self, values: &[f64]) -> Result<Crisp> {
        self.check_values(values)?;
        let mut levels = vec![0.0f64; self.output.terms().len()];
        for rule in &self.compiled {
            let strength = self.rule_strength(rule, values);
            let slot = &mut levels[rule.consequent];
            *slot = (*slot).max(strength);
        }
        let mut mu = [0.0f64; CENTROID_SAMPLES];
        self.aggregate_into(&levels, &mut mu);
        let (num, den) = weighted_sums(&self.grid, &mu);
        if den > 0.0 {
            Ok(Crisp {
                value: finish_centroid(num, den, &self.grid),
                degenerate: false,
            })
        } else {
            Ok(self.degenerate())
        }
    }

    fn check_values(&self, values: &[f64]) -> Result<()> {
        if values.len() != self.inputs.len() {
            return Err(FuzzyError::InputArity {
                expected: self.inputs.len(),
                got: values.len(),
            });
        }
        if let Some(&bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(FuzzyError::NonFinite(bad));
        }
        Ok(())
    }

    fn degenerate(&self) -> Crisp {
        Crisp {
            value: self.output.universe().midpoint(),
            degenerate: true,
        }
    }

    fn rule_strength(&self, rule: &CompiledRule, values: &[f64]) -> f64 {
        rule.antecedent
            .iter()
            .map(|&(vi, li)| {
                let var = &self.inputs[vi];
                var.terms()[li].mf.degree(var.universe().clamp(values[vi]))
            })
            .fold(1.0, f64::min)
    }

    fn firing(&self, values: &[f64]) -> Vec<f64> {
        self.compiled
            .iter()
            .map(|r| self.rule_strength(r, values))
            .collect()
    }

    // Highest firing strength per output label; min-implication then
    // max-aggregation collapses to one clip level per label.
    fn label_levels(&self, firing: &[f64]) -> Vec<f64> {
        let mut levels = vec![0.0f64; self.output.terms().len()];
        for (rule, &f) in self.compiled.iter().zip(firing) {
            let slot = &mut levels[rule.consequent];
            *slot = (*slot).max(f);
        }
        levels
    }

    /// Max over labels of the clipped consequent, written into `mu`.
    fn aggregate_into(&self, levels: &[f64], mu: &mut [f64]) {
        mu.fill(0.0);
        for (samples, &level) in self.output_samples.iter().zip(levels) {
            if level > 0.0 {
                for (m, &s) in mu.iter_mut().zip(samples) {
                    let clipped = if s < level { s } else { level };
                    if clipped > *m {
                        *m = clipped;
                    }
                }
            }
        }
    }
}

/// Centroid `Σ x·μ / Σ μ` of a sampled fuzzy set.
pub fn centroid(xs: &[f64], mu: &[f64]) -> Result<f64> {
    if xs.len() != mu.len() {
        return Err(FuzzyError::InvalidSamples("length mismatch"));
    }
    if xs.is_empty() {
        return Err(FuzzyError::InvalidSamples("no samples"));
    }
    if xs.windows(2).any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less)) {
        return Err(FuzzyError::InvalidSamples("xs must be strictly increasing"));
    }
    if mu.iter().any(|m| !(m.is_finite() && *m >= 0.0)) {
        return Err(FuzzyError::InvalidSamples("membership must be finite and non-negative"));
    }
    let (num, den) = weighted_sums(xs, mu);
    if den > 0.0 {
        Ok(finish_centroid(num, den, xs))
    } else {
        Err(FuzzyError::Degenerate)
    }
}

/// `(Σ x·μ, Σ μ)` with four interleaved accumulators, combined in a
/// fixed order so every caller gets the same bits.
fn weighted_sums(xs: &[f64], mu: &[f64]) -> (f64, f64) {
    let mut num = [0.0f64; 4];
    let mut den = [0.0f64; 4];
    let xc = xs.chunks_exact(4);
    let mc = mu.chunks_exact(4);
    let (xr, mr) = (xc.remainder(), mc.remainder());
    for (x, m) in xc.zip(mc) {
        for j in 0..4 {
            num[j] += x[j] * m[j];
            den[j] += m[j];
        }
    }
    let mut n = (num[0] + num[1]) + (num[2] + num[3]);
    let mut d = (den[0] + den[1]) + (den[2] + den[3]);
    for (&x, &m) in xr.iter().zip(mr) {
        n += x * m;
        d += m;
    }
    (n, d)
}

#[inline]
fn finish_centroid(num: f64, den: f64, xs: &[f64]) -> f64 {
    (num / den).clamp(xs[0], xs[xs.len() - 1])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss(s: f64, c: f64) -> MembershipFunction {
        MembershipFunction::gaussian(s, c).unwrap()
    }

    fn var(name: &str, lo: f64, hi: f64, terms: &[(&str, MembershipFunction)]) -> LinguisticVariable {
        LinguisticVariable::new(
            name,
            Universe::new(lo, hi).unwrap(),
            terms.iter().map(|(l, mf)| Term::new(*l, *mf)).collect(),
        )
        .unwrap()
    }

    fn rule(ante: &[(&str, &str)], cons: (&str, &str)) -> FuzzyRule {
        FuzzyRule::new(
            ante.iter().map(|(v, l)| Clause::new(*v, *l)).collect(),
            Clause::new(cons.0, cons.1),
        )
    }

    #[test]
    fn membership_examples() {
        assert_eq!(gauss(10.19, 0.0).eval(0.0).unwrap(), 1.0);
        let skipped = MembershipFunction::triangular(-0.01, 0.0, 0.01).unwrap();
        assert_eq!(skipped.eval(1.0).unwrap(), 0.0);
        assert_eq!(skipped.eval(0.0).unwrap(), 1.0);
        let long = MembershipFunction::sigmoid(2.38, 6.53).unwrap();
        assert_eq!(long.eval(6.53).unwrap(), 0.5);
    }

    #[test]
    fn triangle_shoulders() {
        let t = MembershipFunction::triangular(0.0, 2.0, 4.0).unwrap();
        assert_eq!(t.degree(1.0), 0.5);
        assert_eq!(t.degree(3.0), 0.5);
        assert_eq!(t.degree(-1.0), 0.0);
        let left_shoulder = MembershipFunction::triangular(0.0, 0.0, 1.0).unwrap();
        assert_eq!(left_shoulder.degree(0.0), 1.0);
        assert_eq!(left_shoulder.degree(0.25), 0.75);
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(MembershipFunction::gaussian(0.0, 1.0).is_err());
        assert!(MembershipFunction::gaussian(-1.0, 1.0).is_err());
        assert!(MembershipFunction::triangular(1.0, 0.0, 2.0).is_err());
        assert!(MembershipFunction::triangular(1.0, 1.0, 1.0).is_err());
        assert!(MembershipFunction::sigmoid(f64::NAN, 1.0).is_err());
        assert!(MembershipFunction::from_params(Form::Gaussian, &[1.0]).is_err());
        assert!(gauss(1.0, 0.0).eval(f64::INFINITY).is_err());
        assert!(Universe::new(1.0, 1.0).is_err());
    }

    #[test]
    fn variable_rejects_duplicates_and_empty() {
        let u = Universe::new(0.0, 1.0).unwrap();
        assert!(matches!(
            LinguisticVariable::new("x", u, vec![]),
            Err(FuzzyError::EmptyVariable(_))
        ));
        let dup = vec![Term::new("a", gauss(1.0, 0.0)), Term::new("a", gauss(1.0, 1.0))];
        assert!(matches!(
            LinguisticVariable::new("x", u, dup),
            Err(FuzzyError::DuplicateLabel { .. })
        ));
    }

    #[test]
    fn centroid_examples() {
        let xs: Vec<f64> = Universe::new(0.0, 1.0).unwrap().grid(11);
        let flat = vec![0.3; xs.len()];
        assert!((centroid(&xs, &flat).unwrap() - 0.5).abs() < 1e-12);

        assert_eq!(centroid(&[1.0, 3.0, 5.0], &[0.0, 0.5, 0.0]).unwrap(), 3.0);
        assert_eq!(centroid(&[0.0, 1.0], &[0.0, 1.0]).unwrap(), 1.0);
        assert_eq!(centroid(&[0.0, 1.0], &[0.0, 0.0]), Err(FuzzyError::Degenerate));
        assert!(centroid(&[1.0, 0.0], &[1.0, 1.0]).is_err());
    }

    fn single_rule_node() -> FisNode {
        let input = var("a", 0.0, 1.0, &[("hi", gauss(0.2, 1.0)), ("lo", gauss(0.2, 0.0))]);
        let output = var("y", 0.0, 10.0, &[("mid", gauss(1.0, 4.0)), ("top", gauss(1.0, 9.0))]);
        FisNode::new(
            vec![input],
            output,
            vec![rule(&[("a", "hi")], ("y", "mid")), rule(&[("a", "lo")], ("y", "top"))],
        )
        .unwrap()
    }

    #[test]
    fn fully_fired_symmetric_consequent_gives_its_center() {
        let node = single_rule_node();
        // a = 1 fires `mid` fully; `lo` fires at exp(-12.5), negligible but nonzero
        let out = node.infer(&HashMap::from([("a", 1.0)])).unwrap();
        assert!((out.crisp.value - 4.0).abs() < 1e-3 * 10.0, "{}", out.crisp.value);
        assert!(!out.crisp.degenerate);
    }

    #[test]
    fn infer_and_evaluate_agree() {
        let node = single_rule_node();
        for a in [0.0, 0.2, 0.5, 0.77, 1.0] {
            let full = node.infer_values(&[a]).unwrap();
            let fast = node.evaluate(&[a]).unwrap();
            assert_eq!(full.crisp, fast);
            assert_eq!(
                centroid(&full.aggregate.xs, &full.aggregate.mu).unwrap(),
                fast.value
            );
        }
    }

    #[test]
    fn missing_and_bad_inputs() {
        let node = single_rule_node();
        assert_eq!(
            node.infer(&HashMap::new()),
            Err(FuzzyError::MissingInput("a".into()))
        );
        assert!(matches!(node.evaluate(&[]), Err(FuzzyError::InputArity { .. })));
        assert!(matches!(node.evaluate(&[f64::NAN]), Err(FuzzyError::NonFinite(_))));
    }

    #[test]
    fn zero_activation_is_degenerate_midpoint() {
        let input = var("a", 0.0, 1.0, &[("t", MembershipFunction::triangular(0.9, 1.0, 1.1).unwrap())]);
        let output = var("y", 2.0, 6.0, &[("o", gauss(1.0, 3.0))]);
        let node = FisNode::new(vec![input], output, vec![rule(&[("a", "t")], ("y", "o"))]).unwrap();
        let c = node.evaluate(&[0.0]).unwrap();
        assert!(c.degenerate);
        assert_eq!(c.value, 4.0);
    }

    #[test]
    fn unreferenced_names_are_rejected() {
        let input = var("a", 0.0, 1.0, &[("t", gauss(1.0, 0.0))]);
        let output = var("y", 0.0, 1.0, &[("o", gauss(1.0, 0.0))]);
        for bad in [
            rule(&[("b", "t")], ("y", "o")),
            rule(&[("a", "nope")], ("y", "o")),
            rule(&[("a", "t")], ("a", "t")),
            rule(&[("a", "t")], ("y", "nope")),
            rule(&[], ("y", "o")),
        ] {
            let err = FisNode::new(vec![input.clone()], output.clone(), vec![bad]).unwrap_err();
            assert!(matches!(err, FuzzyError::InvalidRule { index: 0, .. }), "{err}");
        }
        assert!(matches!(
            FisNode::new(vec![input.clone(), input.clone()], output, vec![]),
            Err(FuzzyError::DuplicateVariable(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let node = single_rule_node();
        let text = serde_json::to_string(&node).unwrap();
        let back: FisNode = serde_json::from_str(&text).unwrap();
        assert_eq!(back, node);
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }

    #[test]
    fn json_rejects_invalid_membership() {
        let bad = r#"{"label":"x","mf":{"form":"gaussian","params":[0.0, 1.0]}}"#;
        assert!(serde_json::from_str::<Term>(bad).is_err());
        let wrong_universe = r#"{"name":"v","universe":[2.0,1.0],"terms":[]}"#;
        assert!(serde_json::from_str::<LinguisticVariable>(wrong_universe).is_err());
    }
}
