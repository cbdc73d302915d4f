//! Seeded synthetic gameplay.
//!
//! Each participant gets a latent ability and each task a latent complexity
//! (word length, degree of scramble, and a per-word offset). Every observable
//! (skip chance, guesses, time, rating) increases with the gap
//! `complexity - ability`, plus noise.
//!
//! RNG draw order, from one ChaCha8 stream: one word offset per task in
//! sequence order; then per participant its ability followed by, for each
//! task in order, skip, guesses, time noise, rating noise, missing-rating.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::dataset::WordTask;
use crate::record::GameplayRecord;
use crate::scramble::degree_of_scramble;

/// Share of ratings missing in the original collection (24 of 1,344).
pub const MISSING_RATING_RATE: f64 = 24.0 / 1344.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbilityModel {
    pub ability_sd: f64,
    pub length_weight: f64,
    pub scramble_weight: f64,
    pub word_offset_sd: f64,
    pub skip_bias: f64,
    pub skip_scale: f64,
    pub guess_rate: f64,
    pub guess_scale: f64,
    pub max_guesses: u32,
    pub base_time: f64,
    pub time_scale: f64,
    pub time_noise_sd: f64,
    pub skip_time_factor: f64,
    pub rating_center: f64,
    pub rating_scale: f64,
    pub rating_noise_sd: f64,
    pub skip_rating_bonus: f64,
    pub missing_rating_rate: f64,
}

impl Default for AbilityModel {
    fn default() -> Self {
        Self {
            ability_sd: 1.0,
            length_weight: 0.45,
            scramble_weight: 2.5,
            word_offset_sd: 0.6,
            skip_bias: -2.5,
            skip_scale: 1.3,
            guess_rate: 0.9,
            guess_scale: 0.6,
            max_guesses: 30,
            base_time: 12.0,
            time_scale: 0.55,
            time_noise_sd: 0.35,
            skip_time_factor: 1.5,
            rating_center: 4.5,
            rating_scale: 1.8,
            rating_noise_sd: 1.3,
            skip_rating_bonus: 1.5,
            missing_rating_rate: MISSING_RATING_RATE,
        }
    }
}

impl AbilityModel {
    pub fn task_complexity(&self, task: &WordTask, offset: f64) -> f64 {
        let len = task.word.len() as f64;
        self.length_weight * (len - 6.5)
            + self.scramble_weight * (degree_of_scramble(&task.pair()) - 0.7)
            + offset
    }

    pub fn skip_probability(&self, gap: f64) -> f64 {
        1.0 / (1.0 + (-(self.skip_bias + self.skip_scale * gap)).exp())
    }

    pub fn expected_extra_guesses(&self, gap: f64) -> f64 {
        self.guess_rate * (self.guess_scale * gap).exp()
    }
}

/// Stable participant id for index `i` of `n`.
pub fn participant_id(i: usize, n: usize) -> String {
    let width = n.to_string().len().max(2);
    format!("p{:0width$}", i + 1)
}

/// Simulates `n` participants each playing every task in order.
pub fn simulate_participants(
    n: usize,
    seed: u64,
    model: &AbilityModel,
    tasks: &[WordTask],
) -> Vec<GameplayRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let std_normal = Normal::new(0.0, 1.0).expect("unit normal");
    let complexity: Vec<f64> = tasks
        .iter()
        .map(|t| {
            let offset = model.word_offset_sd * std_normal.sample(&mut rng);
            model.task_complexity(t, offset)
        })
        .collect();

    let mut records = Vec::with_capacity(n * tasks.len());
    for p in 0..n {
        let id = participant_id(p, n);
        let ability = model.ability_sd * std_normal.sample(&mut rng);
        for (task, &c) in tasks.iter().zip(&complexity) {
            let gap = c - ability;
            let skipped = rng.random::<f64>() < model.skip_probability(gap);

            let extra = poisson(model.expected_extra_guesses(gap), &mut rng);
            let num_guesses = if skipped { extra } else { 1 + extra }.min(model.max_guesses);

            let mut time = (model.base_time.ln()
                + model.time_scale * gap
                + model.time_noise_sd * std_normal.sample(&mut rng))
            .exp();
            if skipped {
                time *= model.skip_time_factor;
            }

            let bonus = if skipped { model.skip_rating_bonus } else { 0.0 };
            let latent = model.rating_center
                + model.rating_scale * gap
                + bonus
                + model.rating_noise_sd * std_normal.sample(&mut rng);
            let rating = latent.round().clamp(1.0, 10.0) as u8;
            let missing = rng.random::<f64>() < model.missing_rating_rate;

            records.push(GameplayRecord {
                participant_id: id.clone(),
                word: task.word.clone(),
                scramble: task.scramble.clone(),
                time_taken: (time * 1000.0).round() / 1000.0,
                num_guesses,
                was_skipped: skipped,
                urd: (!missing).then_some(rating),
                presentation_index: task.position,
            });
        }
    }
    records
}

fn poisson(lambda: f64, rng: &mut ChaCha8Rng) -> u32 {
    // Poisson::new rejects lambda <= 0
    let lambda = lambda.clamp(1e-9, 1e6);
    let draw: f64 = Poisson::new(lambda).expect("positive rate").sample(rng);
    draw.min(f64::from(u32::MAX)) as u32
}
