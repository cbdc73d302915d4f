#![no_main]

use cast_core::record::parse_jsonl;
use cast_core::IwdModel;
use cast_session::store::{export_csv, replay};
use cast_session::LogEntry;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(entries) = parse_jsonl::<LogEntry>(text) else { return };
    let mut csv = Vec::new();
    export_csv(&entries, &mut csv).expect("csv export");
    let mismatches = replay(&entries, &IwdModel::heuristic());
    assert!(mismatches.len() <= entries.len());
});
