//! Experiment configuration and its flat `key = value` file format.
//!
//! Keys are the field names of [`ExperimentConfig`] plus the hyperparameter
//! names (`alpha`, `gamma`, ...). Unset hyperparameters follow the defaults
//! of the chosen environment.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rmnoise_core::qrm::{Hyperparams, Updates};
use rmnoise_core::Domain;

use crate::HarnessError;

pub const DEFAULT_NOISE_LEVELS: [f64; 8] = [0.0, 1.0, 5.0, 10.0, 20.0, 30.0, 40.0, 50.0];

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub env: Domain,
    /// Custom map file; `None` uses the builtin map.
    pub map: Option<PathBuf>,
    pub agents: u32,
    pub episodes: u32,
    pub step_limit: u32,
    /// Percentages in `[0, 100]`.
    pub noise_levels: Vec<f64>,
    pub hyperparams: Hyperparams,
    pub seed: u64,
    pub out: PathBuf,
}

impl ExperimentConfig {
    pub fn new(env: Domain) -> Self {
        ExperimentConfig {
            env,
            map: None,
            agents: 10,
            episodes: 1000,
            step_limit: 500,
            noise_levels: DEFAULT_NOISE_LEVELS.to_vec(),
            hyperparams: env.default_hyperparams(),
            seed: 0,
            out: PathBuf::from("runs").join(env.name()),
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: &str| Err(HarnessError::Config(msg.to_string()));
        if self.agents == 0 {
            return bad("agents must be at least 1");
        }
        if self.episodes == 0 {
            return bad("episodes must be at least 1");
        }
        if self.step_limit == 0 {
            return bad("step_limit must be at least 1");
        }
        if self.noise_levels.is_empty() {
            return bad("noise_levels must not be empty");
        }
        if let Some(l) = self.noise_levels.iter().find(|l| !(0.0..=100.0).contains(*l)) {
            return Err(HarnessError::Config(format!("noise level {l} outside [0, 100]")));
        }
        self.hyperparams
            .validate()
            .map_err(|e| HarnessError::Config(e.to_string()))
    }

    /// Parses a config file. `env` is read first so that hyperparameter
    /// defaults follow the domain; every other key overrides a default.
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let pairs = parse_pairs(text)?;
        let env = match pairs.iter().find(|(k, _, _)| k == "env") {
            Some((_, v, line)) => parse_domain(v).map_err(|m| at(*line, m))?,
            None => return Err(HarnessError::Config("missing key `env`".into())),
        };
        let mut cfg = ExperimentConfig::new(env);
        for (key, value, line) in &pairs {
            cfg.set(key, value).map_err(|m| at(*line, m))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::parse(&text)
    }

    /// Applies a single `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let h = &mut self.hyperparams;
        match key {
            "env" => {
                let env = parse_domain(value)?;
                if env != self.env {
                    return Err(format!("env is already {}", self.env.name()));
                }
            }
            "map" => self.map = Some(PathBuf::from(value)),
            "agents" => self.agents = num(value)?,
            "episodes" => self.episodes = num(value)?,
            "step_limit" => self.step_limit = num(value)?,
            "noise_levels" => self.noise_levels = parse_levels(value)?,
            "alpha" => h.alpha = num(value)?,
            "gamma" => h.gamma = num(value)?,
            "epsilon" => h.epsilon = num(value)?,
            "train_steps" => h.train_steps = num(value)?,
            "episode_cap" => h.episode_cap = num(value)?,
            "eval_every" => h.eval_every = num(value)?,
            "convergence_episodes" => h.convergence_episodes = num(value)?,
            "updates" => {
                h.updates = Updates::from_name(value).ok_or_else(|| format!("unknown update mode `{value}`"))?
            }
            "early_stop" => h.early_stop = num(value)?,
            "seed" => self.seed = num(value)?,
            "out" => self.out = PathBuf::from(value),
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    /// Renders the config in the file format; `parse` reads it back.
    pub fn render(&self) -> String {
        let h = &self.hyperparams;
        let mut s = String::new();
        let mut kv = |k: &str, v: &dyn std::fmt::Display| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("env", &self.env.name());
        if let Some(map) = &self.map {
            kv("map", &map.display());
        }
        kv("agents", &self.agents);
        kv("episodes", &self.episodes);
        kv("step_limit", &self.step_limit);
        kv("noise_levels", &format_levels(&self.noise_levels));
        kv("alpha", &h.alpha);
        kv("gamma", &h.gamma);
        kv("epsilon", &h.epsilon);
        kv("train_steps", &h.train_steps);
        kv("episode_cap", &h.episode_cap);
        kv("eval_every", &h.eval_every);
        kv("convergence_episodes", &h.convergence_episodes);
        kv("updates", &h.updates.name());
        kv("early_stop", &h.early_stop);
        kv("seed", &self.seed);
        kv("out", &self.out.display());
        s
    }
}

fn at(line: usize, message: String) -> HarnessError {
    HarnessError::Config(format!("line {line}: {message}"))
}

fn parse_pairs(text: &str) -> Result<Vec<(String, String, usize)>, HarnessError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| at(i + 1, format!("expected `key = value`, got `{line}`")))?;
        let key = k.trim().to_string();
        if out.iter().any(|(seen, _, _)| *seen == key) {
            return Err(at(i + 1, format!("duplicate key `{key}`")));
        }
        out.push((key, v.trim().to_string(), i + 1));
    }
    Ok(out)
}

pub fn parse_domain(value: &str) -> Result<Domain, String> {
    Domain::from_name(value).ok_or_else(|| format!("unknown env `{value}` (expected cookie or symbol)"))
}

fn num<T: std::str::FromStr>(value: &str) -> Result<T, String> {
    value.parse().map_err(|_| format!("cannot parse `{value}`"))
}

/// Parses a comma-separated list of percentages.
pub fn parse_levels(value: &str) -> Result<Vec<f64>, String> {
    value
        .split(',')
        .map(|p| p.trim())
        .filter(|p| !p.is_empty())
        .map(num)
        .collect()
}

pub fn format_levels(levels: &[f64]) -> String {
    levels.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(",")
}
