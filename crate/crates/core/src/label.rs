//! Propositional event alphabets and label sets.
//!
//! A [`LabelSet`] is a bitmask over the indices of an [`Alphabet`], so label
//! sets are only meaningful together with the alphabet that produced them.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

/// Maximum number of propositions an alphabet can hold.
pub const MAX_PROPOSITIONS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlphabetError {
    #[error("invalid proposition name {0:?} (expected [a-z][a-z0-9_]*)")]
    InvalidName(String),
    #[error("duplicate proposition {0:?}")]
    Duplicate(String),
    #[error("alphabet is empty")]
    Empty,
    #[error("alphabet has {0} propositions, at most {MAX_PROPOSITIONS} are supported")]
    TooLarge(usize),
    #[error("unknown proposition {0:?}")]
    Unknown(String),
}

/// A single high-level event name such as `room_green` or `got_club`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Proposition(String);

impl Proposition {
    pub fn new(name: &str) -> Result<Self, AlphabetError> {
        let mut chars = name.chars();
        let valid = matches!(chars.next(), Some('a'..='z'))
            && chars.all(|c| matches!(c, 'a'..='z' | '0'..='9' | '_'));
        if valid {
            Ok(Proposition(name.to_string()))
        } else {
            Err(AlphabetError::InvalidName(name.to_string()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Proposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Ordered, duplicate-free set of propositions. Position in the alphabet is
/// the bit index used by [`LabelSet`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    props: Vec<Proposition>,
}

impl Alphabet {
    pub fn new<I, S>(names: I) -> Result<Self, AlphabetError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut props: Vec<Proposition> = Vec::new();
        for name in names {
            let p = Proposition::new(name.as_ref())?;
            if props.contains(&p) {
                return Err(AlphabetError::Duplicate(p.0));
            }
            props.push(p);
        }
        if props.is_empty() {
            return Err(AlphabetError::Empty);
        }
        if props.len() > MAX_PROPOSITIONS {
            return Err(AlphabetError::TooLarge(props.len()));
        }
        Ok(Alphabet { props })
    }

    pub fn len(&self) -> usize {
        self.props.len()
    }

    pub fn is_empty(&self) -> bool {
        self.props.is_empty()
    }

    pub fn props(&self) -> &[Proposition] {
        &self.props
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.props.iter().position(|p| p.as_str() == name)
    }

    pub fn name(&self, index: usize) -> Option<&str> {
        self.props.get(index).map(Proposition::as_str)
    }

    /// The label containing every proposition of the alphabet.
    pub fn full(&self) -> LabelSet {
        if self.props.len() == 64 {
            LabelSet(u64::MAX)
        } else {
            LabelSet((1u64 << self.props.len()) - 1)
        }
    }

    /// Builds a label from proposition names.
    pub fn label<I, S>(&self, names: I) -> Result<LabelSet, AlphabetError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut set = LabelSet::EMPTY;
        for name in names {
            let name = name.as_ref();
            let idx = self
                .index_of(name)
                .ok_or_else(|| AlphabetError::Unknown(name.to_string()))?;
            set.insert(idx);
        }
        Ok(set)
    }

    /// True when `label` only uses indices of this alphabet.
    pub fn contains_label(&self, label: LabelSet) -> bool {
        label.0 & !self.full().0 == 0
    }

    /// Maps labels over `self` onto labels over `target` by proposition name.
    /// Propositions of `self` missing from `target` are dropped.
    pub fn projection_onto(&self, target: &Alphabet) -> Projection {
        let map = self.props.iter().map(|p| target.index_of(p.as_str())).collect();
        Projection { map }
    }

    /// Renders a label as a comma separated list of names, in alphabet order.
    pub fn format(&self, label: LabelSet) -> String {
        let mut out = String::new();
        for idx in label.iter() {
            if !out.is_empty() {
                out.push(',');
            }
            match self.name(idx) {
                Some(n) => out.push_str(n),
                None => out.push('?'),
            }
        }
        out
    }
}

/// Index translation between two alphabets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Projection {
    map: Vec<Option<usize>>,
}

impl Projection {
    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, m)| *m == Some(i))
    }

    pub fn apply(&self, label: LabelSet) -> LabelSet {
        let mut out = LabelSet::EMPTY;
        for idx in label.iter() {
            if let Some(Some(t)) = self.map.get(idx) {
                out.insert(*t);
            }
        }
        out
    }
}

/// A finite set of propositions, stored as a bitmask over alphabet indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct LabelSet(u64);

impl LabelSet {
    pub const EMPTY: LabelSet = LabelSet(0);

    pub const fn from_bits(bits: u64) -> Self {
        LabelSet(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    pub fn singleton(index: usize) -> Self {
        LabelSet(1u64 << index)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, index: usize) -> bool {
        index < 64 && self.0 & (1u64 << index) != 0
    }

    pub fn insert(&mut self, index: usize) {
        self.0 |= 1u64 << index;
    }

    pub fn remove(&mut self, index: usize) {
        self.0 &= !(1u64 << index);
    }

    pub fn with(mut self, index: usize) -> Self {
        self.insert(index);
        self
    }

    pub fn without(mut self, index: usize) -> Self {
        self.remove(index);
        self
    }

    pub fn is_subset(self, other: LabelSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: LabelSet) -> LabelSet {
        LabelSet(self.0 | other.0)
    }

    pub fn symmetric_difference(self, other: LabelSet) -> LabelSet {
        LabelSet(self.0 ^ other.0)
    }

    /// The `n`-th member in ascending index order.
    pub fn nth(self, n: usize) -> Option<usize> {
        self.iter().nth(n)
    }

    /// Member indices in ascending order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        core::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let idx = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(idx)
            }
        })
    }
}

impl FromIterator<usize> for LabelSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        let mut set = LabelSet::EMPTY;
        for i in iter {
            set.insert(i);
        }
        set
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn proposition_names_are_validated() {
        assert!(Proposition::new("room_orange").is_ok());
        assert!(Proposition::new("got_2").is_ok());
        assert!(Proposition::new("").is_err());
        assert!(Proposition::new("Room").is_err());
        assert!(Proposition::new("2x").is_err());
        assert!(Proposition::new("a-b").is_err());
    }

    #[test]
    fn alphabet_rejects_duplicates_and_empty() {
        assert_eq!(
            Alphabet::new(["a", "b", "a"]),
            Err(AlphabetError::Duplicate("a".into()))
        );
        assert_eq!(Alphabet::new(Vec::<&str>::new()), Err(AlphabetError::Empty));
    }

    #[test]
    fn label_iteration_is_ascending() {
        let set: LabelSet = [5, 1, 3].into_iter().collect();
        assert_eq!(set.iter().collect::<Vec<_>>(), [1, 3, 5]);
        assert_eq!(set.nth(1), Some(3));
        assert_eq!(set.len(), 3);
    }

    #[test]
    fn projection_drops_unknown_names() {
        let a = Alphabet::new(["x", "y", "z"]).unwrap();
        let b = Alphabet::new(["z", "x"]).unwrap();
        let p = a.projection_onto(&b);
        assert!(!p.is_identity());
        let l = a.label(["x", "y", "z"]).unwrap();
        assert_eq!(p.apply(l), b.label(["x", "z"]).unwrap());
        assert!(a.projection_onto(&a).is_identity());
    }

    #[test]
    fn format_uses_alphabet_order() {
        let a = Alphabet::new(["room_green", "cookie", "eaten"]).unwrap();
        let l = a.label(["eaten", "room_green"]).unwrap();
        assert_eq!(a.format(l), "room_green,eaten");
        assert_eq!(a.format(LabelSet::EMPTY), "");
    }
}
