//! Tiny fully observable environments with an exact value-iteration oracle
//! over the (cell, machine state) cross product.

#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::Rng;
use rmnoise_core::env::{EnvError, StepOutcome};
use rmnoise_core::rm::RmBuilder;
use rmnoise_core::{Action, Alphabet, Environment, LabelSet, ObsKey, RewardMachine, StateId, Status};

/// Deterministic open grid without interior walls. Moving off the grid is a
/// no-op. Each listed cell emits its event while the agent stands on it.
#[derive(Debug, Clone)]
pub struct OpenGrid {
    pub rows: usize,
    pub cols: usize,
    pub start: (usize, usize),
    pub events: Vec<((usize, usize), usize)>,
    pub alphabet: Alphabet,
    pub step_limit: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridState {
    pub cell: (usize, usize),
    pub steps: u32,
}

impl OpenGrid {
    /// Two cells side by side; the right one emits `goal`.
    pub fn corridor() -> Self {
        OpenGrid {
            rows: 1,
            cols: 2,
            start: (0, 0),
            events: vec![((0, 1), 0)],
            alphabet: Alphabet::new(["goal"]).unwrap(),
            step_limit: 50,
        }
    }

    /// 5×5 room: `a` in the bottom-right corner, `b` in the top-right one.
    pub fn room() -> Self {
        OpenGrid {
            rows: 5,
            cols: 5,
            start: (0, 0),
            events: vec![((4, 4), 0), ((0, 4), 1)],
            alphabet: Alphabet::new(["a", "b"]).unwrap(),
            step_limit: 100,
        }
    }

    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.rows).flat_map(move |r| (0..self.cols).map(move |c| (r, c)))
    }

    pub fn key(&self, cell: (usize, usize)) -> ObsKey {
        ObsKey((cell.0 * self.cols + cell.1) as u32)
    }

    pub fn label_at(&self, cell: (usize, usize)) -> LabelSet {
        self.events
            .iter()
            .filter(|(c, _)| *c == cell)
            .map(|(_, e)| *e)
            .collect()
    }

    pub fn moved(&self, (r, c): (usize, usize), action: Action) -> (usize, usize) {
        let (dr, dc) = action.delta();
        let nr = r as isize + dr;
        let nc = c as isize + dc;
        if nr < 0 || nc < 0 || nr >= self.rows as isize || nc >= self.cols as isize {
            (r, c)
        } else {
            (nr as usize, nc as usize)
        }
    }
}

impl Environment for OpenGrid {
    type State = GridState;
    type Observation = (usize, usize);

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn reset<R: Rng + ?Sized>(&self, _rng: &mut R) -> StepOutcome<GridState, (usize, usize)> {
        StepOutcome {
            state: GridState {
                cell: self.start,
                steps: 0,
            },
            observation: self.start,
            label: self.label_at(self.start),
            status: Status::Running,
        }
    }

    fn step<R: Rng + ?Sized>(
        &self,
        state: &GridState,
        action: Action,
        _rng: &mut R,
    ) -> Result<StepOutcome<GridState, (usize, usize)>, EnvError> {
        if state.steps >= self.step_limit {
            return Err(EnvError::EpisodeFinished);
        }
        let cell = self.moved(state.cell, action);
        let steps = state.steps + 1;
        Ok(StepOutcome {
            state: GridState { cell, steps },
            observation: cell,
            label: self.label_at(cell),
            status: if steps >= self.step_limit {
                Status::Timeout
            } else {
                Status::Running
            },
        })
    }

    fn observation_key(&self, cell: &(usize, usize)) -> ObsKey {
        self.key(*cell)
    }
}

/// `u0 --goal/1--> u1`.
pub fn corridor_rm() -> RewardMachine {
    let mut b = RmBuilder::new(Alphabet::new(["goal"]).unwrap());
    b.state("u0").unwrap().state("u1").unwrap();
    b.initial("u0").unwrap().terminal("u1").unwrap();
    b.transition("u0", "u1", &["goal"], 1.0);
    b.build().unwrap()
}

/// `u0 --a--> u1 --b/1--> u2`.
pub fn room_rm() -> RewardMachine {
    let mut b = RmBuilder::new(Alphabet::new(["a", "b"]).unwrap());
    for u in ["u0", "u1", "u2"] {
        b.state(u).unwrap();
    }
    b.initial("u0").unwrap().terminal("u2").unwrap();
    b.transition("u0", "u1", &["a"], 0.0)
        .transition("u1", "u2", &["b"], 1.0);
    b.build().unwrap()
}

pub type QStar = BTreeMap<(usize, (usize, usize)), [f64; Action::COUNT]>;

/// Optimal action values of the cross product, iterated to a fixed point.
pub fn value_iteration(env: &OpenGrid, rm: &RewardMachine, gamma: f64) -> QStar {
    let live: Vec<usize> = rm.states().filter(|u| !rm.is_terminal(*u)).map(|u| u.0).collect();
    let mut q: QStar = BTreeMap::new();
    for &u in &live {
        for cell in env.cells() {
            q.insert((u, cell), [0.0; Action::COUNT]);
        }
    }
    loop {
        let mut delta: f64 = 0.0;
        let mut next = q.clone();
        for (&(u, cell), row) in next.iter_mut() {
            for a in Action::ALL {
                let to = env.moved(cell, a);
                let step = rm.step(StateId(u), env.label_at(to)).unwrap();
                let future = if rm.is_terminal(step.next_state) {
                    0.0
                } else {
                    q[&(step.next_state.0, to)].iter().copied().fold(f64::NEG_INFINITY, f64::max)
                };
                let v = step.reward + gamma * future;
                delta = delta.max((v - row[a.index()]).abs());
                row[a.index()] = v;
            }
        }
        q = next;
        if delta < 1e-14 {
            return q;
        }
    }
}

/// Discounted return of following `choose` from the start state until the
/// machine terminates or `limit` steps pass.
pub fn rollout_return(
    env: &OpenGrid,
    rm: &RewardMachine,
    gamma: f64,
    limit: usize,
    mut choose: impl FnMut(StateId, (usize, usize)) -> Action,
) -> f64 {
    let mut cell = env.start;
    let mut u = rm.initial();
    let mut total = 0.0;
    let mut discount = 1.0;
    for _ in 0..limit {
        let a = choose(u, cell);
        cell = env.moved(cell, a);
        let step = rm.step(u, env.label_at(cell)).unwrap();
        total += discount * step.reward;
        discount *= gamma;
        u = step.next_state;
        if rm.is_terminal(u) {
            break;
        }
    }
    total
}
