//! Tabular Q-learning for reward machines (QRM).
//!
//! One Q-table per non-terminal machine state, keyed by observation and
//! action. With [`Updates::Counterfactual`] every environment transition
//! updates all tables at once: each machine state `u` is advanced on the
//! transition's label and its entry moves towards `r + γ·max q_{u'}(o')`.
//! [`Updates::Current`] restricts this to the state the agent is actually in.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::env::{Action, Environment, ObsKey, Status};
use crate::label::{LabelSet, Projection};
use crate::rm::{RewardMachine, RmError, StateId};
use crate::seed::{derive_seed, Stream};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QrmError {
    #[error("invalid hyperparameter: {0}")]
    Hyperparams(&'static str),
    #[error("reward machine uses event {0:?} that the environment never emits")]
    AlphabetMismatch(String),
    #[error(transparent)]
    Rm(#[from] RmError),
    #[error("Q-tables cover {found} machine states, the machine has {expected}")]
    ShapeMismatch { expected: usize, found: usize },
}

/// Which machine states learn from each experience.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Updates {
    /// Every non-terminal state.
    #[default]
    Counterfactual,
    /// Only the state the agent occupied when acting.
    ///
    /// Needed when the machine state stands in for hidden environment state:
    /// in CookieWorld a counterfactual update of "cookie is in the blue room"
    /// from a world where it sits in the green room teaches the wrong policy.
    Current,
}

impl Updates {
    pub fn name(self) -> &'static str {
        match self {
            Updates::Counterfactual => "counterfactual",
            Updates::Current => "current",
        }
    }

    pub fn from_name(name: &str) -> Option<Updates> {
        match name {
            "counterfactual" => Some(Updates::Counterfactual),
            "current" => Some(Updates::Current),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyperparams {
    pub alpha: f64,
    pub gamma: f64,
    pub epsilon: f64,
    pub train_steps: u64,
    pub episode_cap: u32,
    pub eval_every: u64,
    pub convergence_episodes: u32,
    pub updates: Updates,
    /// Stop at the first passing probe round. When off, training uses the
    /// whole budget and convergence is judged by one final probe round.
    pub early_stop: bool,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            alpha: 0.5,
            gamma: 0.9,
            epsilon: 0.5,
            train_steps: 1_000_000,
            episode_cap: 500,
            eval_every: 5_000,
            convergence_episodes: 100,
            updates: Updates::Counterfactual,
            early_stop: true,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<(), QrmError> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(QrmError::Hyperparams("alpha must lie in (0, 1]"));
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(QrmError::Hyperparams("gamma must lie in (0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(QrmError::Hyperparams("epsilon must lie in [0, 1]"));
        }
        if self.episode_cap == 0 {
            return Err(QrmError::Hyperparams("episode_cap must be at least 1"));
        }
        Ok(())
    }
}

type Table = BTreeMap<ObsKey, [f64; Action::COUNT]>;

/// Q-functions indexed by reward machine state. The terminal state has no
/// table; its values read as 0, as do entries never written.
#[derive(Debug, Clone, PartialEq)]
pub struct QTables {
    tables: Vec<Option<Table>>,
}

impl QTables {
    pub fn new(rm: &RewardMachine) -> Self {
        QTables {
            tables: rm
                .states()
                .map(|u| (!rm.is_terminal(u)).then(BTreeMap::new))
                .collect(),
        }
    }

    pub fn num_states(&self) -> usize {
        self.tables.len()
    }

    pub fn has_table(&self, u: StateId) -> bool {
        matches!(self.tables.get(u.0), Some(Some(_)))
    }

    pub fn values(&self, u: StateId, obs: ObsKey) -> [f64; Action::COUNT] {
        self.tables
            .get(u.0)
            .and_then(Option::as_ref)
            .and_then(|t| t.get(&obs))
            .copied()
            .unwrap_or([0.0; Action::COUNT])
    }

    pub fn value(&self, u: StateId, obs: ObsKey, action: Action) -> f64 {
        self.values(u, obs)[action.index()]
    }

    pub fn max_value(&self, u: StateId, obs: ObsKey) -> f64 {
        self.values(u, obs).into_iter().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Writes one entry. Writes into the terminal state's slot are ignored.
    pub fn set(&mut self, u: StateId, obs: ObsKey, action: Action, value: f64) {
        if let Some(Some(t)) = self.tables.get_mut(u.0) {
            t.entry(obs).or_insert([0.0; Action::COUNT])[action.index()] = value;
        }
    }

    /// Stored rows of `u`, in key order.
    pub fn entries(&self, u: StateId) -> impl Iterator<Item = (ObsKey, [f64; Action::COUNT])> + '_ {
        self.tables
            .get(u.0)
            .and_then(Option::as_ref)
            .into_iter()
            .flat_map(|t| t.iter().map(|(k, v)| (*k, *v)))
    }

    /// Number of stored (observation, action) entries across all states.
    pub fn len(&self) -> usize {
        self.tables.iter().flatten().map(|t| t.len() * Action::COUNT).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn check_shape(&self, rm: &RewardMachine) -> Result<(), QrmError> {
        let shape_ok = self.tables.len() == rm.num_states()
            && rm.states().all(|u| self.has_table(u) != rm.is_terminal(u));
        if shape_ok {
            Ok(())
        } else {
            Err(QrmError::ShapeMismatch {
                expected: rm.num_states(),
                found: self.tables.len(),
            })
        }
    }
}

/// One environment transition as seen by the learner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Experience {
    pub obs: ObsKey,
    pub action: Action,
    pub next_obs: ObsKey,
    /// Label over the machine's alphabet.
    pub label: LabelSet,
    pub status: Status,
}

/// Counterfactual update of every non-terminal machine state from a single
/// experience. Bootstrapping stops when the successor machine state is
/// terminal or the environment reached success or failure; timeouts still
/// bootstrap.
pub fn qrm_update(q: &mut QTables, rm: &RewardMachine, x: &Experience, h: &Hyperparams) -> Result<(), RmError> {
    qrm_update_states(q, rm, x, h, rm.states())
}

/// Same update restricted to `states`; terminal states are skipped.
pub fn qrm_update_states(
    q: &mut QTables,
    rm: &RewardMachine,
    x: &Experience,
    h: &Hyperparams,
    states: impl Iterator<Item = StateId>,
) -> Result<(), RmError> {
    let env_ended = matches!(x.status, Status::Success | Status::Failure);
    let mut targets: Vec<(StateId, f64)> = Vec::with_capacity(rm.num_states());
    for u in states.filter(|u| !rm.is_terminal(*u)) {
        let step = rm.step(u, x.label)?;
        let future = if env_ended || rm.is_terminal(step.next_state) {
            0.0
        } else {
            q.max_value(step.next_state, x.next_obs)
        };
        targets.push((u, step.reward + h.gamma * future));
    }
    for (u, target) in targets {
        let old = q.value(u, x.obs, x.action);
        q.set(u, x.obs, x.action, old + h.alpha * (target - old));
    }
    Ok(())
}

/// Highest-valued action; ties go to the lowest action index.
pub fn greedy_action(q: &QTables, u: StateId, obs: ObsKey) -> Action {
    let values = q.values(u, obs);
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    Action::ALL[best]
}

pub fn epsilon_greedy<R: Rng + ?Sized>(q: &QTables, u: StateId, obs: ObsKey, epsilon: f64, rng: &mut R) -> Action {
    if rng.random::<f64>() < epsilon {
        Action::ALL[rng.random_range(0..Action::COUNT)]
    } else {
        greedy_action(q, u, obs)
    }
}

/// Projection from environment labels onto the machine's alphabet, failing
/// if a guard uses an event the environment does not know.
pub fn label_projection<E: Environment>(env: &E, rm: &RewardMachine) -> Result<Projection, QrmError> {
    let used = rm.transitions().iter().fold(LabelSet::EMPTY, |acc, t| acc.union(t.guard));
    for idx in used.iter() {
        let name = rm.alphabet().name(idx).unwrap_or("?");
        if env.alphabet().index_of(name).is_none() {
            return Err(QrmError::AlphabetMismatch(name.to_string()));
        }
    }
    Ok(env.alphabet().projection_onto(rm.alphabet()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub tables: QTables,
    /// Environment steps consumed.
    pub steps: u64,
    pub episodes: u64,
    /// Whether a greedy probe round passed before the budget ran out.
    pub converged: bool,
}

/// Trains QRM with ε-greedy exploration on ground-truth labels.
///
/// Every `eval_every` steps, greedy probe episodes are run; with `early_stop`
/// training ends as soon as `convergence_episodes` consecutive probes succeed.
pub fn qrm_train<E: Environment>(env: &E, rm: &RewardMachine, h: &Hyperparams, seed: u64) -> Result<TrainOutcome, QrmError> {
    h.validate()?;
    let projection = label_projection(env, rm)?;
    let mut q = QTables::new(rm);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut probe_rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, Stream::Evaluation, 0, 0));
    let mut steps = 0u64;
    let mut episodes = 0u64;

    while steps < h.train_steps {
        episodes += 1;
        let mut current = env.reset(&mut rng);
        let mut u = rm.initial();
        for _ in 0..h.episode_cap {
            let obs = env.observation_key(&current.observation);
            let action = epsilon_greedy(&q, u, obs, h.epsilon, &mut rng);
            let next = env
                .step(&current.state, action, &mut rng)
                .expect("episode is running");
            let label = projection.apply(next.label);
            let x = Experience {
                obs,
                action,
                next_obs: env.observation_key(&next.observation),
                label,
                status: next.status,
            };
            match h.updates {
                Updates::Counterfactual => qrm_update(&mut q, rm, &x, h)?,
                Updates::Current => qrm_update_states(&mut q, rm, &x, h, core::iter::once(u))?,
            }
            u = rm.step(u, label)?.next_state;
            steps += 1;
            let done = rm.is_terminal(u) || next.status.is_done();
            current = next;

            if h.early_stop
                && h.eval_every > 0
                && steps.is_multiple_of(h.eval_every)
                && probe(env, rm, &projection, &q, h, &mut probe_rng)?
            {
                return Ok(TrainOutcome {
                    tables: q,
                    steps,
                    episodes,
                    converged: true,
                });
            }
            if done || steps >= h.train_steps {
                break;
            }
        }
    }
    let converged = !h.early_stop && steps > 0 && probe(env, rm, &projection, &q, h, &mut probe_rng)?;
    Ok(TrainOutcome {
        tables: q,
        steps,
        episodes,
        converged,
    })
}

fn probe<E: Environment, R: Rng + ?Sized>(
    env: &E,
    rm: &RewardMachine,
    projection: &Projection,
    q: &QTables,
    h: &Hyperparams,
    rng: &mut R,
) -> Result<bool, QrmError> {
    for _ in 0..h.convergence_episodes {
        if greedy_episode(env, rm, projection, q, h.episode_cap, rng)? != Status::Success {
            return Ok(false);
        }
    }
    Ok(h.convergence_episodes > 0)
}

/// Runs one noiseless greedy episode and returns how it ended.
pub fn greedy_episode<E: Environment, R: Rng + ?Sized>(
    env: &E,
    rm: &RewardMachine,
    projection: &Projection,
    q: &QTables,
    cap: u32,
    rng: &mut R,
) -> Result<Status, QrmError> {
    let mut current = env.reset(rng);
    let mut u = rm.initial();
    for _ in 0..cap {
        let action = greedy_action(q, u, env.observation_key(&current.observation));
        current = env.step(&current.state, action, rng).expect("episode is running");
        let next_u = rm.step(u, projection.apply(current.label))?.next_state;
        if current.status.is_done() {
            return Ok(current.status);
        }
        if !rm.is_terminal(next_u) {
            u = next_u;
        }
    }
    Ok(Status::Timeout)
}
