#![no_main]

use cast_core::dataset::{parse_tasks_csv, scramble_metrics};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(tasks) = parse_tasks_csv(text) else { return };
    for m in scramble_metrics(&tasks) {
        assert!((0.0..1.0).contains(&m.degree_of_scramble));
        assert!((0.0..=1.0).contains(&m.normalized_hamming));
    }
});
