//! Permutation metrics for scrambled words.
//!
//! The degree of scramble weights a mismatch at 1-based position `i` by
//! `2^-i`, so letters near the start of the word dominate:
//!
//! ```
//! use cast_core::scramble::{degree_of_scramble, normalized_hamming, ScramblePair};
//!
//! let pair = ScramblePair::new("water", "tarew").unwrap();
//! assert_eq!(degree_of_scramble(&pair), 0.65625);
//! assert_eq!(normalized_hamming(&pair), 0.6);
//! ```

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScrambleError {
    #[error("`{0}` must consist of ASCII letters only")]
    NotAscii(String),
    #[error("word and permutation lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("words must have at least two letters")]
    TooShort,
    #[error("`{permutation}` is not a rearrangement of `{word}`")]
    NotPermutation { word: String, permutation: String },
    #[error("permutation equals the word")]
    Unscrambled,
    #[error("`{0}` has no scramble that differs from it")]
    NoValidScramble(String),
    #[error("`{suffix}` is not a suffix of `{word}`")]
    NotSuffix { word: String, suffix: String },
    #[error("need at least 3 paired values, got {0}")]
    TooFewValues(usize),
    #[error("series lengths differ ({0} vs {1})")]
    SeriesLengthMismatch(usize, usize),
    #[error("correlation is undefined for a constant series")]
    ConstantSeries,
}

/// A word together with one of its scrambles, both lowercase ASCII.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ScramblePair {
    word: String,
    permutation: String,
}

impl ScramblePair {
    pub fn new(word: &str, permutation: &str) -> Result<Self, ScrambleError> {
        let word = normalize(word)?;
        let permutation = normalize(permutation)?;
        if word.len() != permutation.len() {
            return Err(ScrambleError::LengthMismatch(word.len(), permutation.len()));
        }
        if word.len() < 2 {
            return Err(ScrambleError::TooShort);
        }
        if letter_counts(&word) != letter_counts(&permutation) {
            return Err(ScrambleError::NotPermutation { word, permutation });
        }
        if word == permutation {
            return Err(ScrambleError::Unscrambled);
        }
        Ok(Self { word, permutation })
    }

    pub fn word(&self) -> &str {
        &self.word
    }

    pub fn permutation(&self) -> &str {
        &self.permutation
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }
}

/// Lowercases and checks the ASCII-letter alphabet.
pub fn normalize(s: &str) -> Result<String, ScrambleError> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_alphabetic()) {
        return Err(ScrambleError::NotAscii(s.to_owned()));
    }
    Ok(s.to_ascii_lowercase())
}

fn letter_counts(s: &str) -> [u16; 26] {
    let mut counts = [0u16; 26];
    for b in s.bytes() {
        counts[(b - b'a') as usize] += 1;
    }
    counts
}

/// 1 when the letters differ, 0 when they match.
#[inline]
pub fn indicator(w: u8, p: u8) -> u8 {
    u8::from(!w.eq_ignore_ascii_case(&p))
}

/// Position-weighted mismatch score `Σ 2^-i · I(w_i, p_i)` for `i = 1..n`.
pub fn degree_of_scramble(pair: &ScramblePair) -> f64 {
    weighted_mismatch(pair.word.as_bytes(), pair.permutation.as_bytes())
}

/// Degree of scramble for raw letter strings of equal length. Identical
/// strings score 0.
pub fn degree_of_scramble_str(word: &str, permutation: &str) -> Result<f64, ScrambleError> {
    if word.len() != permutation.len() {
        return Err(ScrambleError::LengthMismatch(word.len(), permutation.len()));
    }
    Ok(weighted_mismatch(word.as_bytes(), permutation.as_bytes()))
}

fn weighted_mismatch(w: &[u8], p: &[u8]) -> f64 {
    let mut weight = 1.0;
    let mut total = 0.0;
    for (&a, &b) in w.iter().zip(p) {
        weight *= 0.5;
        if indicator(a, b) == 1 {
            total += weight;
        }
    }
    total
}

/// Fraction of positions whose letters differ.
pub fn normalized_hamming(pair: &ScramblePair) -> f64 {
    hamming(pair.word.as_bytes(), pair.permutation.as_bytes()) as f64 / pair.len() as f64
}

fn hamming(w: &[u8], p: &[u8]) -> usize {
    w.iter().zip(p).filter(|(a, b)| indicator(**a, **b) == 1).count()
}

/// Sample Pearson correlation coefficient.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64, ScrambleError> {
    if xs.len() != ys.len() {
        return Err(ScrambleError::SeriesLengthMismatch(xs.len(), ys.len()));
    }
    let n = xs.len();
    if n < 3 {
        return Err(ScrambleError::TooFewValues(n));
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / n as f64;
    let (mx, my) = (mean(xs), mean(ys));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(ScrambleError::ConstantSeries);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Shuffles `word` with a seeded RNG until the result differs from it.
///
/// With `keep_suffix`, those trailing letters stay in place and only the
/// prefix is permuted.
pub fn generate_scramble(
    word: &str,
    seed: u64,
    keep_suffix: Option<&str>,
) -> Result<ScramblePair, ScrambleError> {
    let word = normalize(word)?;
    if word.len() < 2 {
        return Err(ScrambleError::TooShort);
    }
    let fixed = match keep_suffix {
        Some(suffix) => {
            let suffix = normalize(suffix)?;
            if !word.ends_with(&suffix) {
                return Err(ScrambleError::NotSuffix { word, suffix });
            }
            suffix.len()
        }
        None => 0,
    };
    let mut letters = word.clone().into_bytes();
    let head = letters.len() - fixed;
    let movable = &letters[..head];
    if movable.len() < 2 || movable.iter().all(|&b| b == movable[0]) {
        return Err(ScrambleError::NoValidScramble(word));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        letters[..head].shuffle(&mut rng);
        if letters != word.as_bytes() {
            break;
        }
    }
    let permutation = String::from_utf8(letters).expect("ASCII letters");
    ScramblePair::new(&word, &permutation)
}
