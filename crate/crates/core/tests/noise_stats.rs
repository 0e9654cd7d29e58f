//! Statistical and structural checks of the label tampering procedure.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rmnoise_core::grid::{Constraint, SymbolKind};
use rmnoise_core::noise::{substitute, tamper_label, NoiseConfig};
use rmnoise_core::rm::{symbolworld_rm, task_state};
use rmnoise_core::{Alphabet, LabelSet, StateId};

const CALLS: usize = 100_000;

fn symbol_alphabet() -> Alphabet {
    symbolworld_rm().alphabet().clone()
}

/// |observed/n - p| within `z` binomial standard deviations.
fn within(count: usize, n: usize, p: f64, z: f64) -> bool {
    let sigma = (p * (1.0 - p) / n as f64).sqrt();
    (count as f64 / n as f64 - p).abs() <= z * sigma
}

#[test]
fn tamper_rate_matches_the_noise_level() {
    let a = symbol_alphabet();
    let label = a.label(["room_orange", "sym_club", "arrow_left"]).unwrap();
    for k in [0.01, 0.5] {
        let cfg = NoiseConfig::new(k, &a).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let changed = (0..CALLS)
            .filter(|_| tamper_label(label, &cfg, &mut rng) != label)
            .count();
        assert!(within(changed, CALLS, k, 4.0), "k={k}: {changed}/{CALLS}");
    }
}

#[test]
fn singleton_is_removed_with_probability_one_over_alphabet_size() {
    let a = symbol_alphabet();
    let n = a.len();
    let orange = a.index_of("room_orange").unwrap();
    let label = LabelSet::singleton(orange);
    let cfg = NoiseConfig::new(1.0, &a).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut counts = vec![0usize; n];
    let mut removed = 0;
    for _ in 0..CALLS {
        let out = tamper_label(label, &cfg, &mut rng);
        assert!(!out.contains(orange));
        match out.len() {
            0 => removed += 1,
            1 => counts[out.nth(0).unwrap()] += 1,
            other => panic!("size {other}"),
        }
    }
    let p = 1.0 / n as f64;
    assert!(within(removed, CALLS, p, 3.0), "removed {removed}");
    for (i, c) in counts.iter().enumerate().filter(|(i, _)| *i != orange) {
        assert!(within(*c, CALLS, p, 3.0), "substitute {i}: {c}");
    }
}

#[test]
fn target_is_uniform_over_label_members() {
    let a = symbol_alphabet();
    let label = a.label(["room_orange", "sym_club", "arrow_left"]).unwrap();
    let members: Vec<usize> = label.iter().collect();
    let cfg = NoiseConfig::new(1.0, &a).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut hit = [0usize; 3];
    for _ in 0..CALLS {
        let out = tamper_label(label, &cfg, &mut rng);
        let lost: Vec<usize> = members.iter().copied().filter(|m| !out.contains(*m)).collect();
        assert_eq!(lost.len(), 1);
        hit[members.iter().position(|m| *m == lost[0]).unwrap()] += 1;
    }
    for h in hit {
        assert!(within(h, CALLS, 1.0 / 3.0, 3.0), "{hit:?}");
    }
}

#[test]
fn seen_symbol_substitution_redirects_the_task() {
    let rm = symbolworld_rm();
    let a = rm.alphabet();
    let truth = a.label(["room_orange", "sym_club", "arrow_left"]).unwrap();
    let club = a.index_of("sym_club").unwrap();
    let spade = a.index_of("sym_spade").unwrap();
    let tampered = substitute(truth, club, spade);
    assert_eq!(tampered, a.label(["room_orange", "sym_spade", "arrow_left"]).unwrap());
    let right = rm.step(StateId(0), truth).unwrap().next_state;
    let wrong = rm.step(StateId(0), tampered).unwrap().next_state;
    assert_eq!(right.0, task_state(SymbolKind::Club, Constraint::Left));
    assert_eq!(wrong.0, task_state(SymbolKind::Spade, Constraint::Left));
}

proptest! {
    #[test]
    fn one_event_at_most_is_swapped(bits in 0u64..(1 << 11), k in 0.0f64..=1.0, seed: u64) {
        let a = symbol_alphabet();
        let label = LabelSet::from_bits(bits);
        let cfg = NoiseConfig::new(k, &a).unwrap();
        let out = tamper_label(label, &cfg, &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert!(out.is_subset(a.full()));
        prop_assert!(label.symmetric_difference(out).len() <= 2);
        prop_assert!(out.len() + 1 >= label.len() && out.len() <= label.len());
    }

    #[test]
    fn zero_level_and_empty_labels_pass_unchanged(bits in 0u64..(1 << 11), k in 0.0f64..=1.0, seed: u64) {
        let a = symbol_alphabet();
        let label = LabelSet::from_bits(bits);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let off = NoiseConfig::new(0.0, &a).unwrap();
        prop_assert_eq!(tamper_label(label, &off, &mut rng), label);
        let cfg = NoiseConfig::new(k, &a).unwrap();
        prop_assert_eq!(tamper_label(LabelSet::EMPTY, &cfg, &mut rng), LabelSet::EMPTY);
    }
}
