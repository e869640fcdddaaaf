//! Side-by-side runs: controller comparisons and seed batches.

use std::fmt::Write as _;
use std::thread;

use thiserror::Error;

use crate::metrics::MetricsReport;

use super::bss::{run_scenario, RunOutput, SimError};
use super::config::ScenarioConfig;

#[derive(Debug, Error)]
pub enum CompareError {
    #[error("need at least two scenarios to compare")]
    TooFew,
    #[error("scenario {index} differs from the first in more than its controller")]
    Mismatch { index: usize },
    #[error("scenario {index}: {source}")]
    Run { index: usize, source: SimError },
}

/// Percent changes of one report against the baseline. `None` where the
/// baseline value is zero or undefined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deltas {
    pub throughput_pct: Option<f64>,
    pub utilization_pct: Option<f64>,
    pub delay_pct: Option<f64>,
    pub loss_pct: Option<f64>,
    pub capacity_pct: Option<f64>,
}

fn rel(base: f64, other: f64) -> Option<f64> {
    (base != 0.0).then(|| 100.0 * (other - base) / base)
}

pub fn deltas(base: &MetricsReport, other: &MetricsReport) -> Deltas {
    Deltas {
        throughput_pct: rel(base.throughput_bps, other.throughput_bps),
        utilization_pct: rel(base.utilization_pct, other.utilization_pct),
        delay_pct: base
            .mean_access_delay_ms
            .zip(other.mean_access_delay_ms)
            .and_then(|(b, o)| rel(b, o)),
        loss_pct: rel(base.frame_loss_ratio, other.frame_loss_ratio),
        capacity_pct: rel(base.capacity_calls, other.capacity_calls),
    }
}

/// Reports of runs differing only in controller; the first is the baseline.
#[derive(Debug, Clone)]
pub struct ComparisonTable {
    pub runs: Vec<RunOutput>,
}

impl ComparisonTable {
    /// Deltas of every run against the first, recomputed on each call.
    pub fn deltas(&self) -> Vec<Deltas> {
        let base = &self.runs[0].report;
        self.runs.iter().map(|r| deltas(base, &r.report)).collect()
    }

    pub fn render(&self) -> String {
        let pct = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), |v| format!("{v:+.1}%"));
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<40} {:>14} {:>8} {:>10} {:>8} {:>8} {:>9}",
            "controller", "throughput_bps", "util_%", "delay_ms", "loss", "free_%", "capacity"
        );
        for (run, d) in self.runs.iter().zip(self.deltas()) {
            let r = &run.report;
            let label = run
                .metadata
                .iter()
                .find(|(k, _)| k == "controller")
                .map_or("?", |(_, v)| v.as_str());
            let label: String = label.split(';').next().unwrap_or(label).chars().take(40).collect();
            let _ = writeln!(
                out,
                "{:<40} {:>14.0} {:>8.2} {:>10} {:>8.4} {:>8.2} {:>9.2}",
                label,
                r.throughput_bps,
                r.utilization_pct,
                r.mean_access_delay_ms.map_or("n/a".into(), |v| format!("{v:.3}")),
                r.frame_loss_ratio,
                r.free_bw_pct,
                r.capacity_calls,
            );
            let _ = writeln!(
                out,
                "{:<40} {:>14} {:>8} {:>10} {:>8} {:>8} {:>9}",
                "  vs first",
                pct(d.throughput_pct),
                pct(d.utilization_pct),
                pct(d.delay_pct),
                pct(d.loss_pct),
                "",
                pct(d.capacity_pct),
            );
        }
        out
    }
}

fn run_all(configs: &[ScenarioConfig]) -> Vec<Result<RunOutput, SimError>> {
    thread::scope(|s| {
        let handles: Vec<_> = configs.iter().map(|c| s.spawn(move || run_scenario(c))).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("simulation thread panicked"))
            .collect()
    })
}

/// Runs scenarios that differ only in controller, each on its own thread.
pub fn compare(configs: &[ScenarioConfig]) -> Result<ComparisonTable, CompareError> {
    if configs.len() < 2 {
        return Err(CompareError::TooFew);
    }
    if let Some(index) = configs
        .iter()
        .position(|c| !configs[0].differs_only_in_controller(c))
    {
        return Err(CompareError::Mismatch { index });
    }
    let runs = run_all(configs)
        .into_iter()
        .enumerate()
        .map(|(index, r)| r.map_err(|source| CompareError::Run { index, source }))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ComparisonTable { runs })
}

/// Runs `cfg` once per seed in `1..=n`.
pub fn run_batch(cfg: &ScenarioConfig, n: u64) -> Result<Vec<RunOutput>, SimError> {
    let configs: Vec<ScenarioConfig> = (1..=n)
        .map(|seed| ScenarioConfig { seed, ..cfg.clone() })
        .collect();
    run_all(&configs).into_iter().collect()
}
