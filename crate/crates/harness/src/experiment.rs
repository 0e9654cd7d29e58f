//! Multi-agent training and noise sweeps.
//!
//! Agents train in parallel, one thread each, and share nothing mutable.
//! Evaluation jobs are (agent, noise level) pairs and also run in parallel;
//! results come back in a fixed order, so output never depends on scheduling.
//!
//! Seeds: agent `i` trains on `derive_seed(master, Training, i, 0)`. Episode
//! `e` of agent `i` draws its environment randomness from
//! `derive_seed(master, Environment, i, e)` and its label noise from
//! `derive_seed(master, Noise, i, e)`, at every noise level. Levels therefore
//! face the same episodes and the same uniform draws, and 0% noise replays the
//! noiseless episodes exactly.

use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use rmnoise_core::grid::{cookie_world, symbol_world};
use rmnoise_core::label::Projection;
use rmnoise_core::metrics::EpisodeRecord;
use rmnoise_core::noise::{LabelTamper, NoiseConfig, RandomNoise};
use rmnoise_core::qrm::{label_projection, qrm_train};
use rmnoise_core::rollout::{run_episode, EpisodeResult, TraceStep};
use rmnoise_core::seed::{derive_seed, Stream};
use rmnoise_core::{Domain, Environment, GridEnv, GridMap, LabelSet, RewardMachine};

use crate::config::ExperimentConfig;
use crate::policy::{map_digest, policy_file_name, rm_digest, save_policy, Policy, PolicyMeta};
use crate::HarnessError;

/// Builds the environment a config describes, including its step limit.
pub fn build_env(cfg: &ExperimentConfig) -> Result<GridEnv, HarnessError> {
    let env = match &cfg.map {
        None => GridEnv::builtin(cfg.env),
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
            let map = GridMap::parse(&text).map_err(|e| HarnessError::Grid(e.into()))?;
            match cfg.env {
                Domain::Cookie => cookie_world(map),
                Domain::Symbol => symbol_world(map),
            }
            .map_err(HarnessError::Grid)?
        }
    };
    Ok(env.with_step_limit(cfg.step_limit))
}

/// Trains `cfg.agents` agents in parallel and returns them in agent order.
pub fn train_agents(env: &GridEnv, rm: &RewardMachine, cfg: &ExperimentConfig) -> Result<Vec<Policy>, HarnessError> {
    let (map_digest, rm_digest) = (map_digest(env), rm_digest(rm));
    (0..cfg.agents)
        .into_par_iter()
        .map(|agent| {
            let seed = derive_seed(cfg.seed, Stream::Training, u64::from(agent), 0);
            let out = qrm_train(env, rm, &cfg.hyperparams, seed)?;
            Ok(Policy {
                meta: PolicyMeta {
                    env: env.domain(),
                    map_digest: map_digest.clone(),
                    rm_digest: rm_digest.clone(),
                    agent,
                    seed,
                    hyperparams: cfg.hyperparams,
                    steps: out.steps,
                    episodes: out.episodes,
                    converged: out.converged,
                },
                tables: out.tables,
            })
        })
        .collect()
}

#[derive(Debug)]
pub struct TrainingRun {
    pub policies: Vec<Policy>,
    pub paths: Vec<PathBuf>,
}

impl TrainingRun {
    /// Agents whose greedy probes never passed.
    pub fn unconverged(&self) -> Vec<u32> {
        self.policies
            .iter()
            .filter(|p| !p.meta.converged)
            .map(|p| p.meta.agent)
            .collect()
    }
}

/// Trains every agent of `cfg` and writes one policy file per agent into
/// `cfg.out`, next to a copy of the config.
pub fn run_training(cfg: &ExperimentConfig) -> Result<TrainingRun, HarnessError> {
    cfg.validate()?;
    let env = build_env(cfg)?;
    let rm = env.companion_rm();
    let policies = train_agents(&env, &rm, cfg)?;
    std::fs::create_dir_all(&cfg.out).map_err(|e| HarnessError::io(&cfg.out, e))?;
    let config_path = cfg.out.join("config.txt");
    std::fs::write(&config_path, cfg.render()).map_err(|e| HarnessError::io(&config_path, e))?;
    let mut paths = Vec::with_capacity(policies.len());
    for p in &policies {
        let path = cfg.out.join(policy_file_name(p.meta.agent));
        save_policy(&path, p, &rm)?;
        paths.push(path);
    }
    Ok(TrainingRun { policies, paths })
}

fn check_domain(env: &GridEnv, policies: &[Policy]) -> Result<(), HarnessError> {
    match policies.iter().find(|p| p.meta.env != env.domain()) {
        Some(p) => Err(HarnessError::Mismatch {
            what: "env",
            expected: env.domain().name().to_string(),
            found: p.meta.env.name().to_string(),
        }),
        None => Ok(()),
    }
}

/// Environment and noise seeds of episode `episode` of `agent`.
pub fn episode_seeds(master: u64, agent: u32, episode: u32) -> (u64, u64) {
    let (a, e) = (u64::from(agent), u64::from(episode));
    (
        derive_seed(master, Stream::Environment, a, e),
        derive_seed(master, Stream::Noise, a, e),
    )
}

/// Runs one evaluation episode with an explicit label filter.
pub fn run_seeded_episode<T: LabelTamper + ?Sized>(
    env: &GridEnv,
    rm: &RewardMachine,
    projection: &Projection,
    policy: &Policy,
    env_seed: u64,
    tamper: &mut T,
    trace: Option<&mut Vec<TraceStep>>,
) -> Result<EpisodeResult, HarnessError> {
    let mut rng = ChaCha8Rng::seed_from_u64(env_seed);
    let limit = env.step_limit();
    Ok(run_episode(env, rm, projection, &policy.tables, tamper, &mut rng, limit, trace)?)
}

/// Greedy evaluation of every policy at every noise level (in percent).
/// Records are ordered by agent, then level, then episode.
pub fn evaluate(
    env: &GridEnv,
    rm: &RewardMachine,
    policies: &[Policy],
    noise_levels: &[f64],
    episodes: u32,
    master_seed: u64,
) -> Result<Vec<EpisodeRecord>, HarnessError> {
    check_domain(env, policies)?;
    let projection = label_projection(env, rm)?;
    let jobs: Vec<(&Policy, f64)> = policies
        .iter()
        .flat_map(|p| noise_levels.iter().map(move |l| (p, *l)))
        .collect();
    let chunks: Vec<Vec<EpisodeRecord>> = jobs
        .par_iter()
        .map(|(policy, level)| {
            let cfg = NoiseConfig::new(level / 100.0, env.alphabet())?;
            let mut out = Vec::with_capacity(episodes as usize);
            for e in 0..episodes {
                let (env_seed, noise_seed) = episode_seeds(master_seed, policy.meta.agent, e);
                let mut noise = RandomNoise::new(cfg, ChaCha8Rng::seed_from_u64(noise_seed));
                let r = run_seeded_episode(env, rm, &projection, policy, env_seed, &mut noise, None)?;
                out.push(EpisodeRecord {
                    agent: policy.meta.agent,
                    noise_level_pct: *level,
                    outcome: r.outcome,
                    steps: r.steps,
                    reward: r.reward,
                    seed: env_seed,
                });
            }
            Ok::<_, HarnessError>(out)
        })
        .collect::<Result<_, _>>()?;
    Ok(chunks.into_iter().flatten().collect())
}

/// Scripted adversary for SymbolWorld: in the first label that shows the
/// display, the seen symbol is replaced by the next one (club → spade →
/// diamond → club). Every other label passes through untouched.
#[derive(Debug, Clone)]
pub struct SwapSeenSymbol {
    orange: usize,
    seen: [usize; 3],
    fired: bool,
}

impl SwapSeenSymbol {
    pub fn new(env: &GridEnv) -> Result<Self, HarnessError> {
        let a = env.alphabet();
        let idx = |name: &str| {
            a.index_of(name)
                .ok_or_else(|| HarnessError::Config(format!("environment has no `{name}` event")))
        };
        Ok(SwapSeenSymbol {
            orange: idx("room_orange")?,
            seen: [idx("sym_club")?, idx("sym_spade")?, idx("sym_diamond")?],
            fired: false,
        })
    }
}

impl LabelTamper for SwapSeenSymbol {
    fn tamper(&mut self, label: LabelSet) -> LabelSet {
        if self.fired || !label.contains(self.orange) {
            return label;
        }
        let Some(i) = self.seen.iter().position(|s| label.contains(*s)) else {
            return label;
        };
        self.fired = true;
        label.without(self.seen[i]).with(self.seen[(i + 1) % 3])
    }
}

/// Evaluates one policy with a fresh label filter per episode.
pub fn evaluate_with<T, F>(
    env: &GridEnv,
    rm: &RewardMachine,
    policy: &Policy,
    episodes: u32,
    master_seed: u64,
    mut make_tamper: F,
) -> Result<Vec<EpisodeResult>, HarnessError>
where
    T: LabelTamper,
    F: FnMut() -> T,
{
    check_domain(env, std::slice::from_ref(policy))?;
    let projection = label_projection(env, rm)?;
    (0..episodes)
        .map(|e| {
            let (env_seed, _) = episode_seeds(master_seed, policy.meta.agent, e);
            run_seeded_episode(env, rm, &projection, policy, env_seed, &mut make_tamper(), None)
        })
        .collect()
}
