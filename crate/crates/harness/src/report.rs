//! CSV and markdown output of metric rows.
//!
//! Real-valued cells carry two decimals; averages without a denominator are
//! written as empty CSV fields and as `-` in markdown.

use std::io::{Read, Write};
use std::path::Path;

use rmnoise_core::metrics::MetricsRow;

use crate::HarnessError;

pub const CSV_HEADER: [&str; 9] = [
    "noise_level_pct",
    "episodes",
    "n_success",
    "n_failure",
    "n_timeout",
    "success_rate_pct",
    "avg_steps_success",
    "avg_steps_failure",
    "avg_failure_reward",
];

fn fixed(x: f64) -> String {
    // Avoid printing "-0.00".
    let s = format!("{x:.2}");
    if s == "-0.00" {
        "0.00".to_string()
    } else {
        s
    }
}

fn cells(row: &MetricsRow) -> [String; 9] {
    let opt = |x: Option<f64>| x.map(fixed).unwrap_or_default();
    [
        fixed(row.noise_level_pct),
        row.episodes.to_string(),
        row.n_success.to_string(),
        row.n_failure.to_string(),
        row.n_timeout.to_string(),
        fixed(row.success_rate_pct),
        opt(row.avg_steps_success),
        opt(row.avg_steps_failure),
        opt(row.avg_failure_reward),
    ]
}

pub fn write_csv_to<W: Write>(rows: &[MetricsRow], out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.write_record(cells(row))?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn csv_string(rows: &[MetricsRow]) -> String {
    let mut buf = Vec::new();
    write_csv_to(rows, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv output is UTF-8")
}

pub fn write_csv(rows: &[MetricsRow], path: &Path) -> Result<(), HarnessError> {
    std::fs::write(path, csv_string(rows)).map_err(|e| HarnessError::io(path, e))
}

/// Reads rows written by [`write_csv`]. The result equals the rounded input.
pub fn read_csv_from<R: Read>(input: R) -> Result<Vec<MetricsRow>, HarnessError> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(HarnessError::Config(format!("unexpected CSV header {header:?}")));
    }
    let mut rows = Vec::new();
    for (i, record) in r.records().enumerate() {
        let record = record?;
        let bad = |col: &str| HarnessError::Config(format!("data row {}: bad `{col}`", i + 1));
        let real = |k: usize| record[k].parse::<f64>().map_err(|_| bad(CSV_HEADER[k]));
        let count = |k: usize| record[k].parse::<u64>().map_err(|_| bad(CSV_HEADER[k]));
        let opt = |k: usize| match &record[k] {
            "" => Ok(None),
            s => s.parse::<f64>().map(Some).map_err(|_| bad(CSV_HEADER[k])),
        };
        rows.push(MetricsRow {
            noise_level_pct: real(0)?,
            episodes: count(1)?,
            n_success: count(2)?,
            n_failure: count(3)?,
            n_timeout: count(4)?,
            success_rate_pct: real(5)?,
            avg_steps_success: opt(6)?,
            avg_steps_failure: opt(7)?,
            avg_failure_reward: opt(8)?,
        });
    }
    Ok(rows)
}

pub fn read_csv(path: &Path) -> Result<Vec<MetricsRow>, HarnessError> {
    let file = std::fs::File::open(path).map_err(|e| HarnessError::io(path, e))?;
    read_csv_from(file)
}

/// Markdown table in the layout of the usual robustness tables.
pub fn markdown(rows: &[MetricsRow]) -> String {
    let mut s = String::from(
        "| Noise Level (%) | Avg. Success Rate (%) | Avg. Steps to Success | Avg. Steps to Failure | Avg. Failure Reward |\n\
         |---:|---:|---:|---:|---:|\n",
    );
    let opt = |x: Option<f64>| x.map(fixed).unwrap_or_else(|| "-".to_string());
    for row in rows {
        s.push_str(&format!(
            "| {} | {} | {} | {} | {} |\n",
            fixed(row.noise_level_pct),
            fixed(row.success_rate_pct),
            opt(row.avg_steps_success),
            opt(row.avg_steps_failure),
            opt(row.avg_failure_reward),
        ));
    }
    s
}

pub fn write_markdown(rows: &[MetricsRow], path: &Path) -> Result<(), HarnessError> {
    std::fs::write(path, markdown(rows)).map_err(|e| HarnessError::io(path, e))
}

/// Per-agent rows as CSV with a leading `agent` column.
pub fn per_agent_csv(rows: &[(u32, MetricsRow)]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["agent"];
    header.extend(CSV_HEADER);
    w.write_record(&header).expect("in-memory write");
    for (agent, row) in rows {
        let mut record = vec![agent.to_string()];
        record.extend(cells(row));
        w.write_record(&record).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is UTF-8")
}
