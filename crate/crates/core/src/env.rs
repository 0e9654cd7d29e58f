//! The episodic environment interface the learner and the evaluator run on.

use core::fmt;

use rand::Rng;
use thiserror::Error;

use crate::label::{Alphabet, LabelSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Action {
    Up,
    Down,
    Left,
    Right,
}

impl Action {
    pub const ALL: [Action; 4] = [Action::Up, Action::Down, Action::Left, Action::Right];
    pub const COUNT: usize = 4;

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Action> {
        Action::ALL.get(index).copied()
    }

    /// Row and column offsets, rows growing downwards.
    pub fn delta(self) -> (isize, isize) {
        match self {
            Action::Up => (-1, 0),
            Action::Down => (1, 0),
            Action::Left => (0, -1),
            Action::Right => (0, 1),
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Action::Up => "up",
            Action::Down => "down",
            Action::Left => "left",
            Action::Right => "right",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Running,
    Success,
    Failure,
    Timeout,
}

impl Status {
    pub fn is_done(self) -> bool {
        self != Status::Running
    }
}

/// Canonical integer encoding of an observation, used as a Q-table key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObsKey(pub u32);

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome<S, O> {
    pub state: S,
    pub observation: O,
    /// Ground-truth label of the transition that produced `state`.
    pub label: LabelSet,
    pub status: Status,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum EnvError {
    #[error("the episode has already finished")]
    EpisodeFinished,
}

pub trait Environment {
    type State: Clone + fmt::Debug;
    type Observation: Clone + fmt::Debug + PartialEq;

    /// Events the labelling function can emit.
    fn alphabet(&self) -> &Alphabet;

    fn reset<R: Rng + ?Sized>(&self, rng: &mut R) -> StepOutcome<Self::State, Self::Observation>;

    fn step<R: Rng + ?Sized>(
        &self,
        state: &Self::State,
        action: Action,
        rng: &mut R,
    ) -> Result<StepOutcome<Self::State, Self::Observation>, EnvError>;

    fn observation_key(&self, observation: &Self::Observation) -> ObsKey;
}
