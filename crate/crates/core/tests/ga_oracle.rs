use std::collections::HashMap;

use cast_core::dataset::default_tasks;
use cast_core::evaluation::rated;
use cast_core::ga::{
    decode, encode, run_ga, run_ga_observed, sse, GaError, GaSettings, Layout, StopReason,
};
use cast_core::model::{self, NodeKind};
use cast_core::simulate::{simulate_participants, AbilityModel};
use cast_core::{FisConfig, FisNode, GameplayRecord, MembershipFunction};

fn crisp(node: &FisNode, inputs: &[(&str, f64)]) -> f64 {
    let map: HashMap<&str, f64> = inputs.iter().copied().collect();
    node.infer(&map).unwrap().crisp.value
}

/// Re-runs the cascade from raw record fields through the map-based API.
fn oracle_sse(cfg: &FisConfig, records: &[GameplayRecord]) -> f64 {
    let mut total = 0.0;
    for r in records {
        let w = r.word.as_bytes();
        let p = r.scramble.as_bytes();
        let s: f64 = (0..w.len())
            .filter(|&i| w[i] != p[i])
            .map(|i| 0.5f64.powi(i as i32 + 1))
            .sum();
        let ue = crisp(
            cfg.node(NodeKind::UserEffort),
            &[(model::NUM_GUESSES, r.num_guesses as f64), (model::TIME_TAKEN, r.time_taken)],
        );
        let cow = crisp(
            cfg.node(NodeKind::ComplexityOfWord),
            &[(model::WORD_LENGTH, w.len() as f64), (model::DEGREE_OF_SCRAMBLE, s)],
        );
        let skip = if r.was_skipped { 1.0 } else { 0.0 };
        let iwd = crisp(
            cfg.node(NodeKind::Iwd),
            &[(model::USER_EFFORT, ue), (model::COMPLEXITY_OF_WORD, cow), (model::WAS_SKIPPED, skip)],
        );
        total += (iwd - f64::from(r.urd.unwrap())).powi(2);
    }
    total
}

/// The heuristic config with every IWD consequent replaced by a spike at 3
/// and a `low` effort set so wide that it is exactly 1 on the universe, so
/// any unskipped record fires the first rule at full strength and scores 3.
fn spike_at_three() -> FisConfig {
    let cfg = FisConfig::heuristic();
    let n = cfg.node(NodeKind::Iwd);
    let spike = MembershipFunction::triangular(2.995, 3.0, 3.005).unwrap();
    let out = n.output().with_membership(vec![spike; 3]).unwrap();
    let mut inputs = n.inputs().to_vec();
    let ue = n.input_index(model::USER_EFFORT).unwrap();
    let mut mfs: Vec<_> = inputs[ue].terms().iter().map(|t| t.mf).collect();
    let low = inputs[ue].label_index("low").unwrap();
    mfs[low] = MembershipFunction::gaussian(1e9, 0.0).unwrap();
    inputs[ue] = inputs[ue].with_membership(mfs).unwrap();
    let node = FisNode::new(inputs, out, n.rules().to_vec()).unwrap();
    cfg.with_node(NodeKind::Iwd, node).unwrap()
}

fn unskipped(records: Vec<GameplayRecord>) -> Vec<GameplayRecord> {
    records.into_iter().filter(|r| !r.was_skipped).collect()
}

fn synthetic(participants: usize, seed: u64) -> Vec<GameplayRecord> {
    rated(&simulate_participants(participants, seed, &AbilityModel::default(), &default_tasks()))
}

#[test]
fn fitness_matches_a_per_record_oracle() {
    let recs: Vec<_> = synthetic(4, 11).into_iter().take(100).collect();
    assert_eq!(recs.len(), 100);
    for cfg in [FisConfig::heuristic(), spike_at_three()] {
        let fast = sse(&cfg, &recs).unwrap();
        let slow = oracle_sse(&cfg, &recs);
        assert!((fast - slow).abs() <= 1e-9 * slow.max(1.0), "{fast} vs {slow}");
    }
}

#[test]
fn single_record_error() {
    let mut rec = unskipped(synthetic(1, 3)).remove(0);
    rec.urd = Some(5);
    assert_eq!(sse(&spike_at_three(), &[rec]).unwrap(), 4.0);
}

#[test]
fn fitness_rejects_bad_datasets() {
    assert!(matches!(sse(&FisConfig::heuristic(), &[]), Err(GaError::EmptyDataset)));
    let mut rec = synthetic(1, 3).remove(0);
    rec.urd = None;
    assert!(matches!(sse(&FisConfig::heuristic(), &[rec]), Err(GaError::MissingRating(0))));
}

#[test]
fn perfect_template_stops_at_generation_zero() {
    let cfg = spike_at_three();
    let recs: Vec<_> = unskipped(synthetic(2, 5))
        .into_iter()
        .map(|mut r| {
            r.urd = Some(3);
            r
        })
        .collect();
    assert_eq!(sse(&cfg, &recs).unwrap(), 0.0);
    let settings = GaSettings { population_size: 10, seed: 1, ..Default::default() };
    let out = run_ga(&settings, &cfg, &recs).unwrap();
    assert_eq!(out.best_fitness, 0.0);
    assert_eq!(out.stop_reason, StopReason::PerfectFit);
    assert_eq!(out.history.len(), 1);
    assert_eq!(out.history[0].generation, 0);
    assert_eq!(out.best_chromosome, encode(&cfg));
}

#[test]
fn encode_decode_round_trip() {
    let cfg = FisConfig::heuristic();
    let ch = encode(&cfg);
    assert_eq!(ch.genes().len(), Layout::from_config(&cfg).len());
    assert_eq!(decode(&ch, &cfg).unwrap(), cfg);
}

#[test]
fn short_run_properties() {
    let recs = synthetic(6, 21);
    let template = FisConfig::heuristic();
    let heuristic = sse(&template, &recs).unwrap();
    let settings = GaSettings {
        population_size: 24,
        max_generations: 8,
        seed: 99,
        ..Default::default()
    };
    let mut sizes = Vec::new();
    let first = run_ga_observed(&settings, &template, &recs, |view| {
        sizes.push(view.population.len());
        for genes in view.population {
            for (g, b) in genes.iter().zip(view.bounds) {
                assert!(b.contains(*g), "gene {g} outside {b:?} at generation {}", view.generation);
            }
        }
    })
    .unwrap();
    assert!(sizes.iter().all(|&n| n == 24));
    assert_eq!(sizes.len(), first.history.len());
    assert!(first.history.windows(2).all(|w| w[1].best <= w[0].best));
    assert!(first.best_fitness <= heuristic);
    assert_eq!(first.history[0].best, heuristic);
    assert_eq!(first.best_fitness, sse(&first.best, &recs).unwrap());

    let second = run_ga(&settings, &template, &recs).unwrap();
    assert_eq!(first.best_chromosome, second.best_chromosome);
    assert_eq!(first.history, second.history);
    assert_eq!(first.best.to_json(), second.best.to_json());
}
