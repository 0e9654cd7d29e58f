//! Greedy evaluation episodes under a label filter.
//!
//! The agent tracks its own copy of the reward machine on filtered labels and
//! acts greedily from its Q-tables. A second copy follows the ground-truth
//! labels and supplies the reward that is recorded. Success and failure are
//! always judged by the environment.

use alloc::vec::Vec;

use rand::Rng;

use crate::env::{Action, Environment, Status};
use crate::label::{LabelSet, Projection};
use crate::noise::LabelTamper;
use crate::qrm::{greedy_action, QTables};
use crate::rm::{RewardMachine, RmError, StateId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Outcome {
    Success,
    Failure,
    Timeout,
}

impl Outcome {
    pub fn name(self) -> &'static str {
        match self {
            Outcome::Success => "success",
            Outcome::Failure => "failure",
            Outcome::Timeout => "timeout",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeResult {
    pub outcome: Outcome,
    pub steps: u32,
    /// Ground-truth return; 0 on timeout.
    pub reward: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep {
    pub step: u32,
    /// Machine state the agent acted from.
    pub agent_state: StateId,
    pub action: Action,
    /// Ground-truth label over the environment alphabet.
    pub truth: LabelSet,
    /// Label handed to the agent after filtering.
    pub seen: LabelSet,
    pub truth_state: StateId,
    pub reward: f64,
    pub status: Status,
}

/// Runs one greedy episode of at most `step_limit` steps.
///
/// `tamper` sees labels over the environment alphabet; `projection` maps them
/// onto the machine's alphabet. Once the agent's machine copy reaches the
/// terminal state it stops updating and keeps acting from the last
/// non-terminal state.
#[allow(clippy::too_many_arguments)]
pub fn run_episode<E, T, R>(
    env: &E,
    rm: &RewardMachine,
    projection: &Projection,
    q: &QTables,
    tamper: &mut T,
    rng: &mut R,
    step_limit: u32,
    mut trace: Option<&mut Vec<TraceStep>>,
) -> Result<EpisodeResult, RmError>
where
    E: Environment,
    T: LabelTamper + ?Sized,
    R: Rng + ?Sized,
{
    let mut current = env.reset(rng);
    let mut agent_u = rm.initial();
    let mut agent_frozen = false;
    let mut truth_u = rm.initial();
    let mut total = 0.0;
    let mut taken = 0;

    for step in 1..=step_limit {
        taken = step;
        let acting_from = agent_u;
        let action = greedy_action(q, agent_u, env.observation_key(&current.observation));
        current = env.step(&current.state, action, rng).expect("episode is running");

        let truth = current.label;
        let seen = tamper.tamper(truth);
        if !agent_frozen {
            let next = rm.step(agent_u, projection.apply(seen))?.next_state;
            if rm.is_terminal(next) {
                agent_frozen = true;
            } else {
                agent_u = next;
            }
        }
        let mut reward = 0.0;
        if !rm.is_terminal(truth_u) {
            let s = rm.step(truth_u, projection.apply(truth))?;
            truth_u = s.next_state;
            reward = s.reward;
            total += reward;
        }
        if let Some(t) = trace.as_deref_mut() {
            t.push(TraceStep {
                step,
                agent_state: acting_from,
                action,
                truth,
                seen,
                truth_state: truth_u,
                reward,
                status: current.status,
            });
        }
        match current.status {
            Status::Running => {}
            Status::Success => {
                return Ok(EpisodeResult {
                    outcome: Outcome::Success,
                    steps: step,
                    reward: total,
                })
            }
            Status::Failure => {
                return Ok(EpisodeResult {
                    outcome: Outcome::Failure,
                    steps: step,
                    reward: total,
                })
            }
            Status::Timeout => break,
        }
    }
    Ok(EpisodeResult {
        outcome: Outcome::Timeout,
        steps: taken,
        reward: 0.0,
    })
}
