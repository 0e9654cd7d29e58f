//! Reward machines: guarded finite-state transducers over label sets.
//!
//! A transition `(u, guard, u', r)` is eligible for label `L` when
//! `guard ⊆ L`. The eligible transition with the largest guard wins. Labels
//! matching no guard leave the machine where it is with reward 0.

mod builtin;
mod text;

pub use builtin::{cookieworld_rm, symbolworld_rm, task_state, SYMBOLWORLD_TASK_STATES};
pub use text::{parse, render};

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::label::{Alphabet, AlphabetError, LabelSet};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RmError {
    #[error(transparent)]
    Alphabet(#[from] AlphabetError),
    #[error("state {0:?} declared twice")]
    DuplicateState(String),
    #[error("unknown state {0:?}")]
    UnknownState(String),
    #[error("state index {0} out of range")]
    StateOutOfRange(usize),
    #[error("machine has no initial state")]
    MissingInitial,
    #[error("machine has no terminal state")]
    MissingTerminal,
    #[error("more than one {0} state declared")]
    MultipleMarked(&'static str),
    #[error("transition out of terminal state {0:?}")]
    TerminalOutgoing(String),
    #[error("state {state:?} has two transitions guarded by {{{guard}}}")]
    DuplicateGuard { state: String, guard: String },
    #[error("empty guard on a transition out of {0:?}")]
    EmptyGuard(String),
    #[error("guard uses proposition index {0} outside the alphabet")]
    GuardOutsideAlphabet(usize),
    #[error("reward {0} is not finite")]
    NonFiniteReward(f64),
    #[error("ambiguous label {{{label}}} in state {state:?}")]
    Ambiguous { state: String, label: String },
    #[error("cannot step from terminal state {0:?}")]
    StepFromTerminal(String),
    #[error("transition {from:?} -> {to:?} has reward {reward}, expected 1 into the terminal state and 0 elsewhere")]
    NonBinaryReward { from: String, to: String, reward: f64 },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

/// Index of a reward machine state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub usize);

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// How `step` treats two maximal eligible guards that disagree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// Report [`RmError::Ambiguous`].
    #[default]
    Reject,
    /// The transition declared first wins.
    FirstDeclared,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub source: StateId,
    pub guard: LabelSet,
    pub target: StateId,
    pub reward: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RmStep {
    pub next_state: StateId,
    pub reward: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RewardMachine {
    states: Vec<String>,
    alphabet: Alphabet,
    initial: StateId,
    terminal: StateId,
    transitions: Vec<Transition>,
    tie_break: TieBreak,
    // transition indices per source state, in declaration order
    outgoing: Vec<Vec<usize>>,
}

impl RewardMachine {
    /// Validates and assembles a machine.
    pub fn new(
        states: Vec<String>,
        alphabet: Alphabet,
        initial: StateId,
        terminal: StateId,
        transitions: Vec<Transition>,
        tie_break: TieBreak,
    ) -> Result<Self, RmError> {
        for (i, name) in states.iter().enumerate() {
            if states[..i].contains(name) {
                return Err(RmError::DuplicateState(name.clone()));
            }
        }
        let n = states.len();
        let check = |s: StateId| {
            if s.0 < n {
                Ok(())
            } else {
                Err(RmError::StateOutOfRange(s.0))
            }
        };
        check(initial)?;
        check(terminal)?;
        let full = alphabet.full();
        let mut outgoing = vec![Vec::new(); n];
        for (idx, t) in transitions.iter().enumerate() {
            check(t.source)?;
            check(t.target)?;
            let source_name = &states[t.source.0];
            if t.source == terminal {
                return Err(RmError::TerminalOutgoing(source_name.clone()));
            }
            if t.guard.is_empty() {
                return Err(RmError::EmptyGuard(source_name.clone()));
            }
            if !t.guard.is_subset(full) {
                let stray = t.guard.iter().find(|i| !full.contains(*i)).unwrap_or(0);
                return Err(RmError::GuardOutsideAlphabet(stray));
            }
            if !t.reward.is_finite() {
                return Err(RmError::NonFiniteReward(t.reward));
            }
            let siblings: &Vec<usize> = &outgoing[t.source.0];
            if siblings.iter().any(|&j| transitions[j].guard == t.guard) {
                return Err(RmError::DuplicateGuard {
                    state: source_name.clone(),
                    guard: alphabet.format(t.guard),
                });
            }
            outgoing[t.source.0].push(idx);
        }
        Ok(RewardMachine {
            states,
            alphabet,
            initial,
            terminal,
            transitions,
            tie_break,
            outgoing,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn terminal(&self) -> StateId {
        self.terminal
    }

    pub fn tie_break(&self) -> TieBreak {
        self.tie_break
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.states.len()).map(StateId)
    }

    pub fn state_name(&self, u: StateId) -> &str {
        &self.states[u.0]
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s == name).map(StateId)
    }

    pub fn is_terminal(&self, u: StateId) -> bool {
        u == self.terminal
    }

    /// Transitions leaving `u`, in declaration order.
    pub fn outgoing(&self, u: StateId) -> impl Iterator<Item = &Transition> {
        self.outgoing[u.0].iter().map(move |&i| &self.transitions[i])
    }

    /// Next state and reward after observing `label` in state `u`.
    pub fn step(&self, u: StateId, label: LabelSet) -> Result<RmStep, RmError> {
        if u.0 >= self.states.len() {
            return Err(RmError::StateOutOfRange(u.0));
        }
        if u == self.terminal {
            return Err(RmError::StepFromTerminal(self.states[u.0].clone()));
        }
        let mut best: Option<&Transition> = None;
        let mut conflict = false;
        for t in self.outgoing(u) {
            if !t.guard.is_subset(label) {
                continue;
            }
            match best {
                None => best = Some(t),
                Some(b) if t.guard.len() > b.guard.len() => {
                    best = Some(t);
                    conflict = false;
                }
                Some(b) if t.guard.len() == b.guard.len() => {
                    if t.target != b.target || t.reward != b.reward {
                        conflict = true;
                    }
                }
                Some(_) => {}
            }
        }
        if conflict && self.tie_break == TieBreak::Reject {
            return Err(RmError::Ambiguous {
                state: self.states[u.0].clone(),
                label: self.alphabet.format(label),
            });
        }
        Ok(match best {
            Some(t) => RmStep {
                next_state: t.target,
                reward: t.reward,
            },
            None => RmStep {
                next_state: u,
                reward: 0.0,
            },
        })
    }

    /// Optional lint for the binary-reward convention: reward 1 into the
    /// terminal state, 0 on every other transition.
    pub fn check_binary_rewards(&self) -> Result<(), RmError> {
        for t in &self.transitions {
            let expected = if t.target == self.terminal { 1.0 } else { 0.0 };
            if t.reward != expected {
                return Err(RmError::NonBinaryReward {
                    from: self.states[t.source.0].clone(),
                    to: self.states[t.target.0].clone(),
                    reward: t.reward,
                });
            }
        }
        Ok(())
    }
}

/// Name-based construction helper used by the text parser and the builtin
/// machines.
#[derive(Debug, Clone)]
pub struct RmBuilder {
    alphabet: Alphabet,
    states: Vec<String>,
    initial: Option<String>,
    terminal: Option<String>,
    transitions: Vec<(String, Vec<String>, String, f64)>,
    tie_break: TieBreak,
}

impl RmBuilder {
    pub fn new(alphabet: Alphabet) -> Self {
        RmBuilder {
            alphabet,
            states: Vec::new(),
            initial: None,
            terminal: None,
            transitions: Vec::new(),
            tie_break: TieBreak::Reject,
        }
    }

    pub fn state(&mut self, name: &str) -> Result<&mut Self, RmError> {
        if self.states.iter().any(|s| s == name) {
            return Err(RmError::DuplicateState(name.to_string()));
        }
        self.states.push(name.to_string());
        Ok(self)
    }

    pub fn initial(&mut self, name: &str) -> Result<&mut Self, RmError> {
        if self.initial.replace(name.to_string()).is_some() {
            return Err(RmError::MultipleMarked("initial"));
        }
        Ok(self)
    }

    pub fn terminal(&mut self, name: &str) -> Result<&mut Self, RmError> {
        if self.terminal.replace(name.to_string()).is_some() {
            return Err(RmError::MultipleMarked("terminal"));
        }
        Ok(self)
    }

    pub fn tie_break(&mut self, tie_break: TieBreak) -> &mut Self {
        self.tie_break = tie_break;
        self
    }

    pub fn transition(&mut self, from: &str, to: &str, guard: &[&str], reward: f64) -> &mut Self {
        self.transitions.push((
            from.to_string(),
            guard.iter().map(|g| g.to_string()).collect(),
            to.to_string(),
            reward,
        ));
        self
    }

    pub fn build(&self) -> Result<RewardMachine, RmError> {
        let lookup = |name: &str| {
            self.states
                .iter()
                .position(|s| s == name)
                .map(StateId)
                .ok_or_else(|| RmError::UnknownState(name.to_string()))
        };
        let initial = lookup(self.initial.as_deref().ok_or(RmError::MissingInitial)?)?;
        let terminal = lookup(self.terminal.as_deref().ok_or(RmError::MissingTerminal)?)?;
        let mut transitions = Vec::with_capacity(self.transitions.len());
        for (from, guard, to, reward) in &self.transitions {
            transitions.push(Transition {
                source: lookup(from)?,
                guard: self.alphabet.label(guard)?,
                target: lookup(to)?,
                reward: *reward,
            });
        }
        RewardMachine::new(
            self.states.clone(),
            self.alphabet.clone(),
            initial,
            terminal,
            transitions,
            self.tie_break,
        )
    }
}
