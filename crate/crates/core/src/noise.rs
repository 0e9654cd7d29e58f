//! Random tampering of labelling-function outputs.
//!
//! With probability `k` a label is tampered with: one member `e` is drawn
//! uniformly from the label and a substitute `ẽ` uniformly from the whole
//! alphabet. If they coincide `e` is removed, otherwise `e` is replaced by
//! `ẽ`. RNG draws happen in a fixed order (Bernoulli, target, substitute);
//! the Bernoulli draw is a half-open uniform in `[0, 1)` compared with `< k`.

use rand::Rng;
use thiserror::Error;

use crate::label::{Alphabet, LabelSet};

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum NoiseError {
    #[error("noise level {0} is outside [0, 1]")]
    Level(f64),
    #[error("alphabet is empty")]
    EmptyAlphabet,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseConfig {
    level: f64,
    alphabet_size: usize,
}

impl NoiseConfig {
    pub fn new(level: f64, alphabet: &Alphabet) -> Result<Self, NoiseError> {
        Self::with_size(level, alphabet.len())
    }

    pub fn with_size(level: f64, alphabet_size: usize) -> Result<Self, NoiseError> {
        if !(0.0..=1.0).contains(&level) {
            return Err(NoiseError::Level(level));
        }
        if alphabet_size == 0 {
            return Err(NoiseError::EmptyAlphabet);
        }
        Ok(NoiseConfig {
            level,
            alphabet_size,
        })
    }

    pub fn level(&self) -> f64 {
        self.level
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }
}

/// Removes `target` from `label` and adds `substitute` unless the two are
/// the same event.
pub fn substitute(label: LabelSet, target: usize, substitute: usize) -> LabelSet {
    let without = label.without(target);
    if target == substitute {
        without
    } else {
        without.with(substitute)
    }
}

pub fn tamper_label<R: Rng + ?Sized>(label: LabelSet, cfg: &NoiseConfig, rng: &mut R) -> LabelSet {
    let tamper = rng.random::<f64>() < cfg.level;
    if !tamper || label.is_empty() {
        return label;
    }
    let target = label
        .nth(rng.random_range(0..label.len()))
        .expect("index drawn below the label size");
    let replacement = rng.random_range(0..cfg.alphabet_size);
    substitute(label, target, replacement)
}

/// A filter applied to every ground-truth label before the agent sees it.
pub trait LabelTamper {
    fn tamper(&mut self, label: LabelSet) -> LabelSet;
}

/// Passes labels through untouched.
#[derive(Debug, Clone, Copy, Default)]
pub struct Noiseless;

impl LabelTamper for Noiseless {
    fn tamper(&mut self, label: LabelSet) -> LabelSet {
        label
    }
}

/// [`tamper_label`] driven by an owned RNG stream.
#[derive(Debug, Clone)]
pub struct RandomNoise<R> {
    cfg: NoiseConfig,
    rng: R,
}

impl<R: Rng> RandomNoise<R> {
    pub fn new(cfg: NoiseConfig, rng: R) -> Self {
        RandomNoise { cfg, rng }
    }
}

impl<R: Rng> LabelTamper for RandomNoise<R> {
    fn tamper(&mut self, label: LabelSet) -> LabelSet {
        tamper_label(label, &self.cfg, &mut self.rng)
    }
}

impl<T: LabelTamper + ?Sized> LabelTamper for &mut T {
    fn tamper(&mut self, label: LabelSet) -> LabelSet {
        (**self).tamper(label)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn symbol_alphabet() -> Alphabet {
        crate::rm::symbolworld_rm().alphabet().clone()
    }

    #[test]
    fn level_is_validated() {
        let a = symbol_alphabet();
        assert!(NoiseConfig::new(-0.1, &a).is_err());
        assert!(NoiseConfig::new(1.5, &a).is_err());
        assert!(NoiseConfig::new(f64::NAN, &a).is_err());
        assert_eq!(NoiseConfig::with_size(0.5, 0), Err(NoiseError::EmptyAlphabet));
    }

    #[test]
    fn zero_level_is_identity() {
        let a = symbol_alphabet();
        let cfg = NoiseConfig::new(0.0, &a).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let label = a.label(["room_orange", "sym_club", "arrow_left"]).unwrap();
        for _ in 0..1000 {
            assert_eq!(tamper_label(label, &cfg, &mut rng), label);
        }
    }

    #[test]
    fn forced_substitution_swaps_the_seen_symbol() {
        let a = symbol_alphabet();
        let label = a.label(["room_orange", "sym_club", "arrow_left"]).unwrap();
        let out = substitute(
            label,
            a.index_of("sym_club").unwrap(),
            a.index_of("sym_spade").unwrap(),
        );
        assert_eq!(out, a.label(["room_orange", "sym_spade", "arrow_left"]).unwrap());
    }

    #[test]
    fn substitution_into_existing_member_shrinks() {
        let a = symbol_alphabet();
        let label = a.label(["room_orange", "sym_club"]).unwrap();
        let out = substitute(
            label,
            a.index_of("sym_club").unwrap(),
            a.index_of("room_orange").unwrap(),
        );
        assert_eq!(out, a.label(["room_orange"]).unwrap());
    }

    #[test]
    fn removal_when_target_equals_substitute() {
        let a = symbol_alphabet();
        let label = a.label(["room_orange", "sym_club"]).unwrap();
        let club = a.index_of("sym_club").unwrap();
        assert_eq!(substitute(label, club, club), a.label(["room_orange"]).unwrap());
    }

    #[test]
    fn empty_label_is_never_changed() {
        let cfg = NoiseConfig::with_size(1.0, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            assert_eq!(tamper_label(LabelSet::EMPTY, &cfg, &mut rng), LabelSet::EMPTY);
        }
    }
}
