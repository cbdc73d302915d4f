#![no_main]

use cast_core::record::{parse_jsonl, to_jsonl};
use cast_core::{GameplayRecord, IwdModel};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(records) = parse_jsonl::<GameplayRecord>(text) else { return };
    let again: Vec<GameplayRecord> = parse_jsonl(&to_jsonl(&records)).expect("written records parse");
    assert_eq!(records, again);
    let model = IwdModel::heuristic();
    for r in &records {
        let s = model.score(r);
        assert!((0.0..=10.0).contains(&s.crisp));
    }
});
