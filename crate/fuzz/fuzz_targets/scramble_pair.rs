#![no_main]

use cast_core::scramble::{degree_of_scramble, normalized_hamming, ScramblePair};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Some((word, perm)) = text.split_once('\n') else { return };
    let Ok(pair) = ScramblePair::new(word, perm) else { return };
    let (w, p) = (pair.word().as_bytes(), pair.permutation().as_bytes());
    let mut brute = 0.0f64;
    for i in 0..w.len() {
        if w[i] != p[i] {
            brute += 2f64.powi(-(i as i32 + 1));
        }
    }
    assert_eq!(degree_of_scramble(&pair).to_bits(), brute.to_bits());
    assert!((0.0..=1.0).contains(&normalized_hamming(&pair)));
});
