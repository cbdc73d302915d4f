use std::sync::Arc;
use std::time::Duration;

use cast_core::dataset::default_tasks;
use cast_core::evaluation::rated;
use cast_core::record::parse_jsonl;
use cast_core::{FisConfig, GameplayRecord, IwdModel};
use cast_session::store::{export_csv, read_log, replay};
use cast_session::{LogStore, ManualClock, Mode, SessionService, SessionState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn play(service: &SessionService, clock: &ManualClock, participant: &str, mode: Mode, rng: &mut ChaCha8Rng) {
    let id = service.create(participant, mode, Some(rng.random())).unwrap();
    while service.summary(id).unwrap().state != SessionState::Complete {
        let word = service.next_word(id).unwrap();
        let answer = default_tasks().into_iter().find(|t| t.task_id == word.task_id).unwrap().word;
        loop {
            clock.advance(Duration::from_micros(rng.random_range(200_000..20_000_000)));
            match rng.random_range(0..10) {
                0 => {
                    service.skip(id).unwrap();
                    break;
                }
                1..=5 => {
                    service.guess(id, "nope").unwrap();
                }
                _ => {
                    assert!(service.guess(id, &answer).unwrap().correct);
                    break;
                }
            }
        }
        let urd = if rng.random_bool(0.1) { None } else { Some(rng.random_range(1..=10)) };
        service.rate(id, urd).unwrap();
    }
}

#[test]
fn persisted_log_rescores_to_live_categories() {
    let dir = tempfile::tempdir().unwrap();
    let clock = Arc::new(ManualClock::new());
    // a tuned-looking config, to show replay does not depend on the heuristic
    let mut cfg = FisConfig::heuristic();
    cfg.name = "replay-test".into();
    let service = SessionService::new(
        IwdModel::new(cfg.clone()),
        default_tasks(),
        LogStore::open(dir.path()).unwrap(),
        clock.clone(),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for p in 0..6 {
        play(&service, &clock, &format!("p{p:02}"), Mode::Full, &mut rng);
        play(&service, &clock, &format!("d{p:02}"), Mode::Daily, &mut rng);
    }

    let path = service.store().path().to_path_buf();
    let entries = read_log(&path).unwrap();
    assert_eq!(entries.len(), 6 * 28 + 6 * 4);
    let offline = IwdModel::new(FisConfig::from_json(&cfg.to_json()).unwrap());
    assert!(replay(&entries, &offline).is_empty());
    for e in &entries {
        assert_eq!(offline.score(&e.record).category, e.iwd_category);
    }

    // the log doubles as a plain gameplay dataset
    let text = std::fs::read_to_string(&path).unwrap();
    let records: Vec<GameplayRecord> = parse_jsonl(&text).unwrap();
    assert_eq!(records.len(), entries.len());
    assert!(rated(&records).len() < records.len());

    let mut csv = Vec::new();
    export_csv(&entries, &mut csv).unwrap();
    let csv = String::from_utf8(csv).unwrap();
    assert_eq!(csv.lines().count(), entries.len() + 1);
    assert!(csv.starts_with("session_id,task_id,participant_id,"));
}

#[test]
fn tampered_entries_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let clock = Arc::new(ManualClock::new());
    let service = SessionService::new(
        IwdModel::heuristic(),
        default_tasks(),
        LogStore::open(dir.path()).unwrap(),
        clock.clone(),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    play(&service, &clock, "p01", Mode::Daily, &mut rng);
    let mut entries = service.store().entries().unwrap();
    entries[2].record.num_guesses += 9;
    entries[2].record.time_taken += 50.0;
    let mismatches = replay(&entries, service.model());
    assert_eq!(mismatches.len(), 1);
    assert_eq!(mismatches[0].line, 3);
}
