//! Real-coded genetic algorithm over membership-function parameters.
//!
//! A chromosome is the flat vector of every membership parameter of the
//! three nodes except the skip flag's, in [`Layout`] order. Fitness is the
//! sum of squared errors between crisp IWD and the user rating.
//!
//! Each generation keeps [`GaSettings::elite_count`] elites, fills
//! `crossover_fraction` of the remainder with scattered-crossover children
//! and the rest with adaptive-feasible mutants. Parents come from
//! stochastic-uniform selection over rank-scaled scores.
//!
//! All randomness comes from one ChaCha8 stream, consumed in this order:
//! initial population (row-major uniform draws), then per generation the
//! selection phase, the parent shuffle, crossover masks, and mutation
//! directions. Fitness evaluation never touches the RNG, so it may run in
//! parallel without affecting results.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fuzzy::{Form, FuzzyError, MembershipFunction};
use crate::model::{ConfigError, FeatureVector, FisConfig, IwdModel, NodeKind, WAS_SKIPPED};
use crate::record::GameplayRecord;

#[derive(Debug, Error)]
pub enum GaError {
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("record {0} has no user rating")]
    MissingRating(usize),
    #[error("expected {expected} genes, got {got}")]
    Layout { expected: usize, got: usize },
    #[error("gene {index} = {value} outside [{lo}, {hi}]")]
    OutOfBounds { index: usize, value: f64, lo: f64, hi: f64 },
    #[error("invalid settings: {0}")]
    Settings(&'static str),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Fuzzy(#[from] FuzzyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    pub lo: f64,
    pub hi: f64,
}

impl Bound {
    pub fn range(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Where a gene lives in the config.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneSpec {
    pub node: NodeKind,
    /// Index into the node's variables: inputs in order, then the output.
    pub variable: usize,
    pub variable_name: String,
    pub term: usize,
    pub label: String,
    pub param: usize,
    pub bound: Bound,
}

/// Fixed gene ordering derived from a template config: nodes in
/// [`NodeKind::ALL`] order, each node's inputs then output, each term's
/// parameters in toolbox order. The skip flag's terms are excluded.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    genes: Vec<GeneSpec>,
}

fn node_variables(cfg: &FisConfig, kind: NodeKind) -> Vec<&crate::fuzzy::LinguisticVariable> {
    let node = cfg.node(kind);
    node.inputs().iter().chain(std::iter::once(node.output())).collect()
}

// Location parameters may move half a universe width either way within the
// universe; width-like parameters (sigma, slope) move half a width but stay
// positive.
fn gene_bound(form: Form, param: usize, value: f64, lo: f64, hi: f64) -> Bound {
    let w = hi - lo;
    let is_scale = matches!(form, Form::Gaussian | Form::Sigmoid) && param == 0;
    let (mut b_lo, mut b_hi) = if is_scale {
        if value > 0.0 {
            ((value - 0.5 * w).max(1e-3 * w), value + 0.5 * w)
        } else {
            (value - 0.5 * w, (value + 0.5 * w).min(-1e-3 * w))
        }
    } else {
        ((value - 0.5 * w).max(lo), (value + 0.5 * w).min(hi))
    };
    b_lo = b_lo.min(value);
    b_hi = b_hi.max(value);
    Bound { lo: b_lo, hi: b_hi }
}

impl Layout {
    pub fn from_config(cfg: &FisConfig) -> Self {
        let mut genes = Vec::new();
        for kind in NodeKind::ALL {
            for (vi, var) in node_variables(cfg, kind).into_iter().enumerate() {
                if var.name() == WAS_SKIPPED {
                    continue;
                }
                let u = var.universe();
                for (ti, term) in var.terms().iter().enumerate() {
                    let form = term.mf.form();
                    for (pi, value) in term.mf.params().into_iter().enumerate() {
                        genes.push(GeneSpec {
                            node: kind,
                            variable: vi,
                            variable_name: var.name().to_owned(),
                            term: ti,
                            label: term.label.clone(),
                            param: pi,
                            bound: gene_bound(form, pi, value, u.lo(), u.hi()),
                        });
                    }
                }
            }
        }
        Self { genes }
    }

    pub fn len(&self) -> usize {
        self.genes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genes.is_empty()
    }

    pub fn genes(&self) -> &[GeneSpec] {
        &self.genes
    }

    pub fn bounds(&self) -> Vec<Bound> {
        self.genes.iter().map(|g| g.bound).collect()
    }

    fn read(&self, cfg: &FisConfig) -> Vec<f64> {
        self.genes
            .iter()
            .map(|g| {
                let var = node_variables(cfg, g.node)[g.variable];
                var.terms()[g.term].mf.params()[g.param]
            })
            .collect()
    }

    /// Chromosome holding `cfg`'s parameters, checked against this layout's
    /// bounds.
    pub fn encode(&self, cfg: &FisConfig) -> Result<Chromosome, GaError> {
        Chromosome::new(self.read(cfg), self.bounds())
    }

    /// Writes `genes` into a copy of `template`.
    pub fn decode(&self, genes: &[f64], template: &FisConfig) -> Result<FisConfig, GaError> {
        if genes.len() != self.genes.len() {
            return Err(GaError::Layout {
                expected: self.genes.len(),
                got: genes.len(),
            });
        }
        let mut cfg = template.clone();
        let mut start = 0;
        for kind in NodeKind::ALL {
            let end = start + self.genes[start..].iter().take_while(|g| g.node == kind).count();
            if end > start {
                cfg = cfg.with_node(kind, rebuild_node(&cfg, kind, &self.genes[start..end], &genes[start..end])?)?;
            }
            start = end;
        }
        Ok(cfg)
    }
}

fn rebuild_node(
    cfg: &FisConfig,
    kind: NodeKind,
    specs: &[GeneSpec],
    values: &[f64],
) -> Result<crate::fuzzy::FisNode, GaError> {
    let node = cfg.node(kind);
    let mut vars: Vec<_> = node_variables(cfg, kind).into_iter().cloned().collect();
    for (vi, var) in vars.iter_mut().enumerate() {
        let mut params: Vec<Vec<f64>> = var.terms().iter().map(|t| t.mf.params()).collect();
        let mut touched = false;
        for (g, &v) in specs.iter().zip(values).filter(|(g, _)| g.variable == vi) {
            params[g.term][g.param] = v;
            touched = true;
        }
        if !touched {
            continue;
        }
        let mfs = var
            .terms()
            .iter()
            .zip(params)
            .map(|(t, mut p)| {
                if t.mf.form() == Form::Triangular {
                    p.sort_by(f64::total_cmp);
                }
                MembershipFunction::from_params(t.mf.form(), &p)
            })
            .collect::<Result<Vec<_>, _>>()?;
        *var = var.with_membership(mfs)?;
    }
    let output = vars.pop().expect("node has an output");
    Ok(crate::fuzzy::FisNode::new(vars, output, node.rules().to_vec())?)
}

/// Bounded gene vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chromosome {
    genes: Vec<f64>,
    bounds: Vec<Bound>,
}

impl Chromosome {
    pub fn new(genes: Vec<f64>, bounds: Vec<Bound>) -> Result<Self, GaError> {
        if genes.len() != bounds.len() {
            return Err(GaError::Layout {
                expected: bounds.len(),
                got: genes.len(),
            });
        }
        for (index, (&value, b)) in genes.iter().zip(&bounds).enumerate() {
            if !b.contains(value) {
                return Err(GaError::OutOfBounds {
                    index,
                    value,
                    lo: b.lo,
                    hi: b.hi,
                });
            }
        }
        Ok(Self { genes, bounds })
    }

    pub fn genes(&self) -> &[f64] {
        &self.genes
    }

    pub fn bounds(&self) -> &[Bound] {
        &self.bounds
    }
}

/// Chromosome of `cfg` with bounds centered on its own parameters.
pub fn encode(cfg: &FisConfig) -> Chromosome {
    Layout::from_config(cfg)
        .encode(cfg)
        .expect("a config lies within its own bounds")
}

pub fn decode(chromosome: &Chromosome, template: &FisConfig) -> Result<FisConfig, GaError> {
    Layout::from_config(template).decode(chromosome.genes(), template)
}

/// Rated records with features precomputed for repeated scoring.
///
/// Word features depend only on the task, so the complexity node runs once
/// per distinct (length, scramble) pair.
#[derive(Debug, Clone)]
pub struct TrainingSet {
    rows: Vec<TrainingRow>,
    word_inputs: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy)]
struct TrainingRow {
    num_guesses: f64,
    time_taken: f64,
    word: usize,
    was_skipped: f64,
    urd: f64,
}

impl TrainingSet {
    /// Universes (and so clamping) come from `template`; they are not tuned.
    pub fn new(records: &[GameplayRecord], template: &FisConfig) -> Result<Self, GaError> {
        if records.is_empty() {
            return Err(GaError::EmptyDataset);
        }
        let model = IwdModel::new(template.clone());
        let mut word_inputs: Vec<(f64, f64)> = Vec::new();
        let mut rows = Vec::with_capacity(records.len());
        for (i, rec) in records.iter().enumerate() {
            let urd = rec.urd.ok_or(GaError::MissingRating(i))?;
            let f: FeatureVector = model.extract_features(rec);
            let key = (f.word_length, f.degree_of_scramble);
            let word = match word_inputs.iter().position(|k| *k == key) {
                Some(w) => w,
                None => {
                    word_inputs.push(key);
                    word_inputs.len() - 1
                }
            };
            rows.push(TrainingRow {
                num_guesses: f.num_guesses,
                time_taken: f.time_taken,
                word,
                was_skipped: f.was_skipped,
                urd: f64::from(urd),
            });
        }
        Ok(Self { rows, word_inputs })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Sum of squared errors, accumulated in record order.
    pub fn sse(&self, model: &IwdModel) -> f64 {
        let cow: Vec<_> = self
            .word_inputs
            .iter()
            .map(|&(len, s)| model.compute_cow(len, s))
            .collect();
        self.rows
            .iter()
            .map(|r| {
                let ue = model.compute_ue(r.num_guesses, r.time_taken);
                let iwd = model.finish(ue, cow[r.word], r.was_skipped).crisp;
                (iwd - r.urd).powi(2)
            })
            .sum()
    }
}

/// SSE of `config` over rated `records`.
pub fn sse(config: &FisConfig, records: &[GameplayRecord]) -> Result<f64, GaError> {
    Ok(TrainingSet::new(records, config)?.sse(&IwdModel::new(config.clone())))
}

/// SSE of the config obtained by decoding `chromosome` into `template`.
pub fn fitness(
    chromosome: &Chromosome,
    template: &FisConfig,
    records: &[GameplayRecord],
) -> Result<f64, GaError> {
    let cfg = decode(chromosome, template)?;
    sse(&cfg, records)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaSettings {
    pub population_size: usize,
    pub max_generations: usize,
    pub stall_generations: usize,
    pub stall_tolerance: f64,
    pub elite_count: usize,
    pub crossover_fraction: f64,
    pub initial_step: f64,
    pub step_grow: f64,
    pub step_shrink: f64,
    pub seed: u64,
}

impl Default for GaSettings {
    fn default() -> Self {
        Self {
            population_size: 200,
            max_generations: 100,
            stall_generations: 20,
            stall_tolerance: 1e-6,
            elite_count: 2,
            crossover_fraction: 0.8,
            initial_step: 0.01,
            step_grow: 1.1,
            step_shrink: 0.7,
            seed: 0,
        }
    }
}

impl GaSettings {
    pub fn validate(&self) -> Result<(), GaError> {
        if self.population_size < 2 {
            return Err(GaError::Settings("population_size must be at least 2"));
        }
        if self.elite_count >= self.population_size {
            return Err(GaError::Settings("elite_count must be below population_size"));
        }
        if self.max_generations == 0 {
            return Err(GaError::Settings("max_generations must be positive"));
        }
        if !(0.0..=1.0).contains(&self.crossover_fraction) {
            return Err(GaError::Settings("crossover_fraction must lie in [0, 1]"));
        }
        if !(self.initial_step > 0.0 && self.step_grow > 0.0 && self.step_shrink > 0.0) {
            return Err(GaError::Settings("step parameters must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    pub best: f64,
    pub mean: f64,
    pub step: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    MaxGenerations,
    Stalled,
    PerfectFit,
}

#[derive(Debug, Clone)]
pub struct GaOutcome {
    pub best: FisConfig,
    pub best_chromosome: Chromosome,
    pub best_fitness: f64,
    pub history: Vec<GenerationStats>,
    pub stop_reason: StopReason,
}

/// Snapshot handed to [`run_ga_observed`] after each generation is scored.
pub struct GenerationView<'a> {
    pub generation: usize,
    pub population: &'a [Vec<f64>],
    pub fitness: &'a [f64],
    pub bounds: &'a [Bound],
}

pub fn run_ga(
    settings: &GaSettings,
    template: &FisConfig,
    records: &[GameplayRecord],
) -> Result<GaOutcome, GaError> {
    run_ga_observed(settings, template, records, |_| {})
}

pub fn run_ga_observed(
    settings: &GaSettings,
    template: &FisConfig,
    records: &[GameplayRecord],
    mut observe: impl FnMut(&GenerationView<'_>),
) -> Result<GaOutcome, GaError> {
    settings.validate()?;
    let data = TrainingSet::new(records, template)?;
    let layout = Layout::from_config(template);
    let bounds = layout.bounds();
    let n = settings.population_size;

    let evaluate = |genes: &Vec<f64>| -> f64 {
        match layout.decode(genes, template) {
            Ok(cfg) => data.sse(&IwdModel::new(cfg)),
            Err(_) => f64::INFINITY,
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let mut population = Vec::with_capacity(n);
    population.push(layout.read(template));
    while population.len() < n {
        population.push(bounds.iter().map(|b| uniform_in(b, &mut rng)).collect());
    }
    let mut fitness: Vec<f64> = population.par_iter().map(evaluate).collect();

    let mut step = settings.initial_step;
    let mut history = vec![stats(0, &fitness, step)];
    observe(&GenerationView {
        generation: 0,
        population: &population,
        fitness: &fitness,
        bounds: &bounds,
    });

    let n_elite = settings.elite_count;
    let n_cross = ((n - n_elite) as f64 * settings.crossover_fraction).round() as usize;
    let n_mutate = n - n_elite - n_cross;
    let n_parents = 2 * n_cross + n_mutate;

    let stop_reason = loop {
        let best_now = history.last().expect("non-empty").best;
        if best_now == 0.0 {
            break StopReason::PerfectFit;
        }
        if history.len() >= settings.max_generations {
            break StopReason::MaxGenerations;
        }
        if history.len() > settings.stall_generations {
            let earlier = history[history.len() - 1 - settings.stall_generations].best;
            if earlier - best_now < settings.stall_tolerance {
                break StopReason::Stalled;
            }
        }

        let order = fitness_order(&fitness);
        let mut next: Vec<Vec<f64>> = order[..n_elite].iter().map(|&i| population[i].clone()).collect();
        let mut next_fitness: Vec<Option<f64>> = order[..n_elite].iter().map(|&i| Some(fitness[i])).collect();

        if n_parents > 0 {
            let scores = rank_scale(fitness.len(), n_parents);
            let mut parents: Vec<usize> = stochastic_uniform_select(&scores, n_parents, &mut rng)
                .into_iter()
                .map(|r| order[r])
                .collect();
            parents.shuffle(&mut rng);

            for k in 0..n_cross {
                let (a, b) = (&population[parents[2 * k]], &population[parents[2 * k + 1]]);
                next.push(scattered_crossover(a, b, &mut rng));
                next_fitness.push(None);
            }
            for &p in &parents[2 * n_cross..] {
                next.push(adaptive_feasible_mutate(&population[p], &bounds, step, &mut rng));
                next_fitness.push(None);
            }
        }

        let fresh: Vec<f64> = next
            .par_iter()
            .zip(&next_fitness)
            .map(|(genes, known)| known.unwrap_or_else(|| evaluate(genes)))
            .collect();
        population = next;
        fitness = fresh;

        let best = fitness.iter().copied().fold(f64::INFINITY, f64::min);
        step = if best < best_now {
            step * settings.step_grow
        } else {
            step * settings.step_shrink
        }
        .clamp(1e-6, 1.0);
        let g = history.len();
        history.push(stats(g, &fitness, step));
        observe(&GenerationView {
            generation: g,
            population: &population,
            fitness: &fitness,
            bounds: &bounds,
        });
    };

    let best_idx = fitness_order(&fitness)[0];
    let genes = population.swap_remove(best_idx);
    let mut best = layout.decode(&genes, template)?;
    best.name = "ga-tuned".to_owned();
    best.notes = vec![format!(
        "Tuned from `{}`: seed {}, population {}, {} generations, stop {:?}, SSE {}.",
        template.name,
        settings.seed,
        n,
        history.len(),
        stop_reason,
        fitness[best_idx]
    )];
    Ok(GaOutcome {
        best,
        best_chromosome: Chromosome::new(genes, bounds)?,
        best_fitness: fitness[best_idx],
        history,
        stop_reason,
    })
}

fn stats(generation: usize, fitness: &[f64], step: f64) -> GenerationStats {
    GenerationStats {
        generation,
        best: fitness.iter().copied().fold(f64::INFINITY, f64::min),
        mean: fitness.iter().sum::<f64>() / fitness.len() as f64,
        step,
    }
}

fn uniform_in(b: &Bound, rng: &mut ChaCha8Rng) -> f64 {
    if b.range() > 0.0 {
        (b.lo + rng.random::<f64>() * b.range()).min(b.hi)
    } else {
        b.lo
    }
}

/// Population indices from fittest (lowest SSE) to least fit; ties keep
/// index order.
pub fn fitness_order(fitness: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..fitness.len()).collect();
    order.sort_by(|&a, &b| fitness[a].total_cmp(&fitness[b]).then(a.cmp(&b)));
    order
}

/// Rank-based expectations for a fitness-sorted population: rank `r`
/// (1-based) scores `1/sqrt(r)`, normalized to sum to `n_parents`.
pub fn rank_scale(population: usize, n_parents: usize) -> Vec<f64> {
    let raw: Vec<f64> = (1..=population).map(|r| 1.0 / (r as f64).sqrt()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|s| s * n_parents as f64 / total).collect()
}

/// Lays `n` equally spaced pointers, starting at one random phase, along the
/// cumulative score line and returns the index under each pointer.
pub fn stochastic_uniform_select(scores: &[f64], n: usize, rng: &mut impl Rng) -> Vec<usize> {
    let total: f64 = scores.iter().sum();
    if n == 0 || scores.is_empty() {
        return Vec::new();
    }
    let stride = total / n as f64;
    let mut pointer = rng.random::<f64>() * stride;
    let mut picks = Vec::with_capacity(n);
    let mut cumulative = scores[0];
    let mut i = 0;
    for _ in 0..n {
        while pointer >= cumulative && i + 1 < scores.len() {
            i += 1;
            cumulative += scores[i];
        }
        picks.push(i);
        pointer += stride;
    }
    picks
}

/// Child taking each gene from `a` where the mask is set and from `b`
/// elsewhere.
pub fn scattered_with_mask(a: &[f64], b: &[f64], mask: &[bool]) -> Vec<f64> {
    a.iter()
        .zip(b)
        .zip(mask)
        .map(|((&x, &y), &m)| if m { x } else { y })
        .collect()
}

pub fn scattered_crossover(a: &[f64], b: &[f64], rng: &mut impl Rng) -> Vec<f64> {
    let mask: Vec<bool> = (0..a.len()).map(|_| rng.random::<bool>()).collect();
    scattered_with_mask(a, b, &mask)
}

/// Moves `parent` along a random unit direction (in bound-normalized
/// coordinates) by `step`, shortening the move so the child stays feasible.
/// Components pushing a gene that already sits on a bound further out are
/// reflected inward.
pub fn adaptive_feasible_mutate(
    parent: &[f64],
    bounds: &[Bound],
    step: f64,
    rng: &mut impl Rng,
) -> Vec<f64> {
    let mut dir: Vec<f64>;
    loop {
        dir = (0..parent.len()).map(|_| StandardNormal.sample(rng)).collect();
        let norm = dir.iter().map(|d| d * d).sum::<f64>().sqrt();
        if norm > 0.0 {
            dir.iter_mut().for_each(|d| *d /= norm);
            break;
        }
    }
    let delta: Vec<f64> = dir
        .iter()
        .zip(parent)
        .zip(bounds)
        .map(|((&d, &p), b)| {
            let mut d = d * step * b.range();
            if (p >= b.hi && d > 0.0) || (p <= b.lo && d < 0.0) {
                d = -d;
            }
            d
        })
        .collect();
    let mut scale = 1.0f64;
    for ((&d, &p), b) in delta.iter().zip(parent).zip(bounds) {
        if d > 0.0 {
            scale = scale.min((b.hi - p) / d);
        } else if d < 0.0 {
            scale = scale.min((b.lo - p) / d);
        }
    }
    let scale = scale.max(0.0);
    parent
        .iter()
        .zip(&delta)
        .zip(bounds)
        .map(|((&p, &d), b)| (p + scale * d).clamp(b.lo, b.hi))
        .collect()
}
