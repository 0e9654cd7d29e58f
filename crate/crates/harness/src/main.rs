use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rmnoise::config::{parse_domain, parse_levels};
use rmnoise::experiment::{episode_seeds, run_seeded_episode};
use rmnoise::report::{csv_string, per_agent_csv};
use rmnoise::rmnoise_core::metrics::{compute_metrics, compute_metrics_by_agent};
use rmnoise::rmnoise_core::noise::{NoiseConfig, RandomNoise};
use rmnoise::rmnoise_core::qrm::label_projection;
use rmnoise::rmnoise_core::rm::render;
use rmnoise::rmnoise_core::Environment;
use rmnoise::{build_env, evaluate, load_policy, load_policy_dir, markdown, run_training, ExperimentConfig, HarnessError};

#[derive(Parser, Debug)]
#[command(name = "rmnoise", version, about = "Reward-machine agents under labelling noise")]
struct Cli {
    /// Config file (`key = value` lines); command-line flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct EnvArgs {
    /// cookie or symbol
    #[arg(long)]
    env: Option<String>,
    /// Map file; the builtin map when omitted.
    #[arg(long)]
    map: Option<PathBuf>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Train agents and write one policy file per agent.
    Train {
        #[command(flatten)]
        env: EnvArgs,
        /// Number of agents to train.
        #[arg(long)]
        agents: Option<u32>,
        /// Output directory for policies.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a policy directory over noise levels and print metrics.
    Sweep {
        #[command(flatten)]
        env: EnvArgs,
        /// Directory of policy files written by `train`.
        #[arg(long)]
        policies: PathBuf,
        /// Comma-separated noise levels in percent.
        #[arg(long)]
        noise: Option<String>,
        /// Episodes per agent and noise level.
        #[arg(long)]
        episodes: Option<u32>,
        /// Steps before an episode times out.
        #[arg(long)]
        step_limit: Option<u32>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Write the table here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write per-agent rows as CSV.
        #[arg(long)]
        per_agent: Option<PathBuf>,
    },
    /// Run a single policy at one noise level and print step traces.
    Eval {
        #[command(flatten)]
        env: EnvArgs,
        /// Policy file written by `train`.
        #[arg(long)]
        policy: PathBuf,
        /// Noise level in percent.
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = 1)]
        episodes: u32,
        /// Steps before an episode times out.
        #[arg(long)]
        step_limit: Option<u32>,
    },
    /// Print a builtin reward machine in the text format.
    ShowRm {
        #[arg(long)]
        env: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Md,
}

fn base_config(file: Option<&PathBuf>, env: Option<&str>) -> Result<ExperimentConfig, HarnessError> {
    let cfg = match file {
        Some(path) => ExperimentConfig::load(path)?,
        None => {
            let name = env.ok_or_else(|| HarnessError::Config("--env or --config is required".into()))?;
            ExperimentConfig::new(parse_domain(name).map_err(HarnessError::Config)?)
        }
    };
    if let Some(name) = env {
        let domain = parse_domain(name).map_err(HarnessError::Config)?;
        if domain != cfg.env {
            return Err(HarnessError::Config(format!(
                "--env {name} conflicts with env = {} in the config file",
                cfg.env.name()
            )));
        }
    }
    Ok(cfg)
}

fn with_env_args(file: Option<&PathBuf>, args: &EnvArgs) -> Result<ExperimentConfig, HarnessError> {
    let mut cfg = base_config(file, args.env.as_deref())?;
    if let Some(map) = &args.map {
        cfg.map = Some(map.clone());
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    let file = cli.config.as_ref();
    match cli.command {
        Command::Train { env, agents, out } => {
            let mut cfg = with_env_args(file, &env)?;
            if let Some(n) = agents {
                cfg.agents = n;
            }
            if let Some(out) = out {
                cfg.out = out;
            }
            let run = run_training(&cfg)?;
            for (p, path) in run.policies.iter().zip(&run.paths) {
                let m = &p.meta;
                println!(
                    "agent {:>3}: {} after {} steps, {} episodes -> {}",
                    m.agent,
                    if m.converged { "converged" } else { "NOT converged" },
                    m.steps,
                    m.episodes,
                    path.display()
                );
            }
            let bad = run.unconverged();
            if !bad.is_empty() {
                eprintln!("warning: {} agent(s) did not converge: {bad:?}", bad.len());
            }
        }
        Command::Sweep {
            env,
            policies,
            noise,
            episodes,
            step_limit,
            format,
            out,
            per_agent,
        } => {
            let mut cfg = with_env_args(file, &env)?;
            if let Some(levels) = noise {
                cfg.noise_levels = parse_levels(&levels).map_err(HarnessError::Config)?;
            }
            if let Some(n) = episodes {
                cfg.episodes = n;
            }
            if let Some(n) = step_limit {
                cfg.step_limit = n;
            }
            cfg.validate()?;
            let grid = build_env(&cfg)?;
            let rm = grid.companion_rm();
            let loaded = load_policy_dir(&policies, &grid, &rm)?;
            let records = evaluate(&grid, &rm, &loaded, &cfg.noise_levels, cfg.episodes, cfg.seed)?;
            let rows = compute_metrics(&records);
            let table = match format {
                Format::Csv => csv_string(&rows),
                Format::Md => markdown(&rows),
            };
            match out {
                Some(path) => std::fs::write(&path, table).map_err(|e| HarnessError::io(&path, e))?,
                None => print!("{table}"),
            }
            if let Some(path) = per_agent {
                let text = per_agent_csv(&compute_metrics_by_agent(&records));
                std::fs::write(&path, text).map_err(|e| HarnessError::io(&path, e))?;
            }
        }
        Command::Eval {
            env,
            policy,
            noise,
            episodes,
            step_limit,
        } => {
            let mut cfg = with_env_args(file, &env)?;
            if let Some(n) = step_limit {
                cfg.step_limit = n;
            }
            let grid = build_env(&cfg)?;
            let rm = grid.companion_rm();
            let p = load_policy(&policy, &grid, &rm)?;
            let projection = label_projection(&grid, &rm)?;
            let noise_cfg = NoiseConfig::new(noise / 100.0, grid.alphabet())?;
            let names = grid.alphabet();
            for e in 0..episodes {
                let (env_seed, noise_seed) = episode_seeds(cfg.seed, p.meta.agent, e);
                let mut tamper = RandomNoise::new(noise_cfg, ChaCha8Rng::seed_from_u64(noise_seed));
                let mut trace = Vec::new();
                let r = run_seeded_episode(&grid, &rm, &projection, &p, env_seed, &mut tamper, Some(&mut trace))?;
                println!(
                    "episode {e}: {} after {} steps, reward {}",
                    r.outcome.name(),
                    r.steps,
                    r.reward
                );
                for t in &trace {
                    let tampered = if t.seen != t.truth { " *" } else { "" };
                    println!(
                        "  {:>3} {:<4} {:<5} truth {{{}}} seen {{{}}}{tampered} -> {} r={}",
                        t.step,
                        rm.state_name(t.agent_state),
                        t.action.to_string(),
                        names.format(t.truth),
                        names.format(t.seen),
                        rm.state_name(t.truth_state),
                        t.reward
                    );
                }
            }
        }
        Command::ShowRm { env } => {
            let cfg = base_config(file, env.as_deref())?;
            print!("{}", render(&cfg.env.reward_machine()));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
