//! Trained policies on disk.
//!
//! A policy file is pretty-printed JSON holding the training metadata and the
//! sparse Q-table rows of every non-terminal machine state. Digests of the map
//! text and of the rendered reward machine tie a file to the environment it
//! was trained on; loading against anything else fails.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use rmnoise_core::env::ObsKey;
use rmnoise_core::qrm::{Hyperparams, QTables, Updates};
use rmnoise_core::rm::render;
use rmnoise_core::{Action, Domain, GridEnv, RewardMachine};

use crate::HarnessError;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyMeta {
    pub env: Domain,
    pub map_digest: String,
    pub rm_digest: String,
    pub agent: u32,
    pub seed: u64,
    pub hyperparams: Hyperparams,
    pub steps: u64,
    pub episodes: u64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Policy {
    pub meta: PolicyMeta,
    pub tables: QTables,
}

pub fn sha256_hex(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

pub fn map_digest(env: &GridEnv) -> String {
    sha256_hex(env.map().text())
}

pub fn rm_digest(rm: &RewardMachine) -> String {
    sha256_hex(&render(rm))
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolicyFile {
    format_version: u32,
    env: String,
    map_digest: String,
    rm_digest: String,
    agent: u32,
    seed: u64,
    hyperparams: HyperparamsFile,
    training: TrainingFile,
    tables: Vec<StateTable>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HyperparamsFile {
    alpha: f64,
    gamma: f64,
    epsilon: f64,
    train_steps: u64,
    episode_cap: u32,
    eval_every: u64,
    convergence_episodes: u32,
    updates: String,
    early_stop: bool,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrainingFile {
    steps: u64,
    episodes: u64,
    converged: bool,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateTable {
    state: String,
    entries: Vec<Entry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Entry {
    obs: u32,
    q: [f64; Action::COUNT],
}

impl From<&Hyperparams> for HyperparamsFile {
    fn from(h: &Hyperparams) -> Self {
        HyperparamsFile {
            alpha: h.alpha,
            gamma: h.gamma,
            epsilon: h.epsilon,
            train_steps: h.train_steps,
            episode_cap: h.episode_cap,
            eval_every: h.eval_every,
            convergence_episodes: h.convergence_episodes,
            updates: h.updates.name().to_string(),
            early_stop: h.early_stop,
        }
    }
}

impl Policy {
    /// Serializes the policy; `rm` supplies the state names.
    pub fn to_json(&self, rm: &RewardMachine) -> String {
        let m = &self.meta;
        let file = PolicyFile {
            format_version: FORMAT_VERSION,
            env: m.env.name().to_string(),
            map_digest: m.map_digest.clone(),
            rm_digest: m.rm_digest.clone(),
            agent: m.agent,
            seed: m.seed,
            hyperparams: (&m.hyperparams).into(),
            training: TrainingFile {
                steps: m.steps,
                episodes: m.episodes,
                converged: m.converged,
            },
            tables: rm
                .states()
                .filter(|u| self.tables.has_table(*u))
                .map(|u| StateTable {
                    state: rm.state_name(u).to_string(),
                    entries: self
                        .tables
                        .entries(u)
                        .map(|(obs, q)| Entry { obs: obs.0, q })
                        .collect(),
                })
                .collect(),
        };
        let mut text = serde_json::to_string_pretty(&file).expect("policy serializes");
        text.push('\n');
        text
    }

    /// Parses a policy and checks it against `env` and its reward machine.
    pub fn from_json(text: &str, env: &GridEnv, rm: &RewardMachine) -> Result<Policy, HarnessError> {
        let corrupt = |message: String| HarnessError::Corrupt {
            path: PathBuf::new(),
            message,
        };
        // Peek at the version first so newer files fail with a clear message.
        let probe: serde_json::Value = serde_json::from_str(text).map_err(|e| corrupt(e.to_string()))?;
        let version = probe.get("format_version").and_then(|v| v.as_u64());
        if version != Some(u64::from(FORMAT_VERSION)) {
            return Err(HarnessError::Version {
                found: version.map_or_else(|| "none".to_string(), |v| v.to_string()),
                expected: FORMAT_VERSION,
            });
        }
        let file: PolicyFile = serde_json::from_value(probe).map_err(|e| corrupt(e.to_string()))?;

        let mismatch = |what: &'static str, expected: String, found: String| {
            if expected == found {
                Ok(())
            } else {
                Err(HarnessError::Mismatch { what, expected, found })
            }
        };
        mismatch("env", env.domain().name().to_string(), file.env.clone())?;
        mismatch("map digest", map_digest(env), file.map_digest.clone())?;
        mismatch("reward machine digest", rm_digest(rm), file.rm_digest.clone())?;

        let hp = &file.hyperparams;
        let hyperparams = Hyperparams {
            alpha: hp.alpha,
            gamma: hp.gamma,
            epsilon: hp.epsilon,
            train_steps: hp.train_steps,
            episode_cap: hp.episode_cap,
            eval_every: hp.eval_every,
            convergence_episodes: hp.convergence_episodes,
            updates: Updates::from_name(&hp.updates)
                .ok_or_else(|| corrupt(format!("unknown update mode `{}`", hp.updates)))?,
            early_stop: hp.early_stop,
        };

        let mut tables = QTables::new(rm);
        let mut seen = Vec::new();
        for table in &file.tables {
            let u = rm
                .state_id(&table.state)
                .filter(|u| tables.has_table(*u))
                .ok_or_else(|| corrupt(format!("no table expected for state `{}`", table.state)))?;
            if seen.contains(&u) {
                return Err(corrupt(format!("state `{}` listed twice", table.state)));
            }
            seen.push(u);
            for entry in &table.entries {
                for (a, v) in Action::ALL.into_iter().zip(entry.q) {
                    tables.set(u, ObsKey(entry.obs), a, v);
                }
            }
        }

        Ok(Policy {
            meta: PolicyMeta {
                env: env.domain(),
                map_digest: file.map_digest,
                rm_digest: file.rm_digest,
                agent: file.agent,
                seed: file.seed,
                hyperparams,
                steps: file.training.steps,
                episodes: file.training.episodes,
                converged: file.training.converged,
            },
            tables,
        })
    }
}

pub fn save_policy(path: &Path, policy: &Policy, rm: &RewardMachine) -> Result<(), HarnessError> {
    std::fs::write(path, policy.to_json(rm)).map_err(|e| HarnessError::io(path, e))
}

pub fn load_policy(path: &Path, env: &GridEnv, rm: &RewardMachine) -> Result<Policy, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    Policy::from_json(&text, env, rm).map_err(|e| match e {
        HarnessError::Corrupt { message, .. } => HarnessError::Corrupt {
            path: path.to_path_buf(),
            message,
        },
        other => other,
    })
}

/// File name of agent `agent`'s policy inside a policy directory.
pub fn policy_file_name(agent: u32) -> String {
    format!("agent_{agent:03}.json")
}

/// Every `*.json` policy in `dir`, sorted by file name.
pub fn load_policy_dir(dir: &Path, env: &GridEnv, rm: &RewardMachine) -> Result<Vec<Policy>, HarnessError> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| HarnessError::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(HarnessError::Config(format!("no policy files in {}", dir.display())));
    }
    paths.iter().map(|p| load_policy(p, env, rm)).collect()
}
