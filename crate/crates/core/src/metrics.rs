//! Episode records and the aggregate robustness statistics.
//!
//! Rows are pooled over every agent and episode at a noise level. Failure
//! statistics pool genuine failures and timeouts.

use alloc::vec::Vec;

use crate::rollout::Outcome;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeRecord {
    pub agent: u32,
    pub noise_level_pct: f64,
    pub outcome: Outcome,
    pub steps: u32,
    pub reward: f64,
    /// Environment seed of the episode.
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub noise_level_pct: f64,
    pub episodes: u64,
    pub n_success: u64,
    pub n_failure: u64,
    pub n_timeout: u64,
    pub success_rate_pct: f64,
    pub avg_steps_success: Option<f64>,
    pub avg_steps_failure: Option<f64>,
    pub avg_failure_reward: Option<f64>,
}

impl MetricsRow {
    pub fn from_records<'a>(noise_level_pct: f64, records: impl IntoIterator<Item = &'a EpisodeRecord>) -> MetricsRow {
        let mut row = MetricsRow {
            noise_level_pct,
            episodes: 0,
            n_success: 0,
            n_failure: 0,
            n_timeout: 0,
            success_rate_pct: 0.0,
            avg_steps_success: None,
            avg_steps_failure: None,
            avg_failure_reward: None,
        };
        let (mut steps_ok, mut steps_bad, mut reward_bad) = (0u64, 0u64, 0.0f64);
        for r in records {
            row.episodes += 1;
            match r.outcome {
                Outcome::Success => {
                    row.n_success += 1;
                    steps_ok += u64::from(r.steps);
                }
                Outcome::Failure | Outcome::Timeout => {
                    if r.outcome == Outcome::Failure {
                        row.n_failure += 1;
                    } else {
                        row.n_timeout += 1;
                    }
                    steps_bad += u64::from(r.steps);
                    reward_bad += r.reward;
                }
            }
        }
        let bad = row.n_failure + row.n_timeout;
        if row.episodes > 0 {
            row.success_rate_pct = 100.0 * row.n_success as f64 / row.episodes as f64;
        }
        if row.n_success > 0 {
            row.avg_steps_success = Some(steps_ok as f64 / row.n_success as f64);
        }
        if bad > 0 {
            row.avg_steps_failure = Some(steps_bad as f64 / bad as f64);
            row.avg_failure_reward = Some(reward_bad / bad as f64);
        }
        row
    }

    /// Same row with every real-valued cell rounded to two decimals.
    pub fn rounded(&self) -> MetricsRow {
        let r2 = |x: f64| round2(x);
        MetricsRow {
            noise_level_pct: r2(self.noise_level_pct),
            success_rate_pct: r2(self.success_rate_pct),
            avg_steps_success: self.avg_steps_success.map(r2),
            avg_steps_failure: self.avg_steps_failure.map(r2),
            avg_failure_reward: self.avg_failure_reward.map(r2),
            ..*self
        }
    }
}

fn round2(x: f64) -> f64 {
    // no_std: no f64::round
    let scaled = x * 100.0;
    let truncated = scaled as i64 as f64;
    let rounded = if (scaled - truncated).abs() >= 0.5 {
        truncated + scaled.signum()
    } else {
        truncated
    };
    rounded / 100.0
}

/// Noise levels present in `records`, ascending.
pub fn noise_levels(records: &[EpisodeRecord]) -> Vec<f64> {
    let mut levels: Vec<f64> = records.iter().map(|r| r.noise_level_pct).collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup_by(|a, b| a.to_bits() == b.to_bits());
    levels
}

/// One pooled row per noise level, ascending by level.
pub fn compute_metrics(records: &[EpisodeRecord]) -> Vec<MetricsRow> {
    noise_levels(records)
        .into_iter()
        .map(|level| {
            MetricsRow::from_records(
                level,
                records.iter().filter(|r| r.noise_level_pct.to_bits() == level.to_bits()),
            )
        })
        .collect()
}

/// Per-agent rows, ordered by agent then noise level.
pub fn compute_metrics_by_agent(records: &[EpisodeRecord]) -> Vec<(u32, MetricsRow)> {
    let mut agents: Vec<u32> = records.iter().map(|r| r.agent).collect();
    agents.sort_unstable();
    agents.dedup();
    let mut out = Vec::new();
    for agent in agents {
        let own: Vec<EpisodeRecord> = records.iter().filter(|r| r.agent == agent).copied().collect();
        out.extend(compute_metrics(&own).into_iter().map(|row| (agent, row)));
    }
    out
}
