//! Per-frame records and the figures computed from them: throughput, frame
//! loss, access delay, channel utilization and VoIP call capacity.

use thiserror::Error;

use crate::engine::{Micros, MICROS_PER_SEC};
use crate::mac::{AttemptOutcome, BusyLog, DataRate, FrameClass, StationId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("no frames recorded")]
    EmptyLog,
    #[error("no delivered frames; access delay is undefined")]
    NoDeliveries,
    #[error("per-call rate must be positive")]
    ZeroDivisor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Delivered,
    /// Dropped at the retry limit.
    Dropped,
    /// Never transmitted: the sender's queue was full.
    Overflow,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TxRecord {
    pub station: StationId,
    pub flow: usize,
    pub class: FrameClass,
    pub enqueue_time: Micros,
    pub first_attempt_time: Option<Micros>,
    pub completion_time: Micros,
    pub payload_bytes: u32,
    pub outcome: Outcome,
    pub retries: u32,
    pub rate_used: Option<DataRate>,
}

impl TxRecord {
    pub fn delivered(&self) -> bool {
        self.outcome == Outcome::Delivered
    }

    pub fn access_delay(&self) -> Micros {
        self.completion_time - self.enqueue_time
    }
}

/// One transmission attempt, retries included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttemptRecord {
    pub station: StationId,
    pub start: Micros,
    pub end: Micros,
    pub rate: DataRate,
    pub outcome: AttemptOutcome,
    /// Time from enqueue to the start of this attempt.
    pub wait: Micros,
}

/// Free-bandwidth reading taken on a monitor tick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeSample {
    pub at: Micros,
    pub free_pct: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MetricsLog {
    pub records: Vec<TxRecord>,
    pub attempts: Vec<AttemptRecord>,
    pub busy: BusyLog,
    pub free_samples: Vec<FreeSample>,
}

/// Half-open span of simulation time `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Interval {
    pub start: Micros,
    pub end: Micros,
}

impl Interval {
    pub fn new(start: Micros, end: Micros) -> Self {
        Self { start, end }
    }

    pub fn len(&self) -> Micros {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, t: Micros) -> bool {
        self.start <= t && t < self.end
    }

    fn seconds(&self) -> f64 {
        self.len() as f64 / MICROS_PER_SEC as f64
    }
}

fn completed_in(records: &[TxRecord], interval: Interval) -> impl Iterator<Item = &TxRecord> {
    records
        .iter()
        .filter(move |r| interval.contains(r.completion_time))
}

/// Delivered payload bits per second over `interval`.
pub fn throughput(records: &[TxRecord], interval: Interval) -> f64 {
    throughput_with_overhead(records, interval, 0)
}

/// Throughput counting `extra_bytes` on top of each delivered payload.
pub fn throughput_with_overhead(records: &[TxRecord], interval: Interval, extra_bytes: u32) -> f64 {
    if interval.is_empty() {
        return 0.0;
    }
    let bits: u64 = completed_in(records, interval)
        .filter(|r| r.delivered())
        .map(|r| 8 * (r.payload_bytes + extra_bytes) as u64)
        .sum();
    bits as f64 / interval.seconds()
}

/// Lost frames over all frames.
pub fn frame_loss_ratio<'a>(records: impl IntoIterator<Item = &'a TxRecord>) -> Result<f64, MetricsError> {
    let (lost, total) = records.into_iter().fold((0u64, 0u64), |(l, t), r| {
        (l + u64::from(!r.delivered()), t + 1)
    });
    if total == 0 {
        return Err(MetricsError::EmptyLog);
    }
    Ok(lost as f64 / total as f64)
}

/// Mean enqueue-to-completion time of delivered frames, in milliseconds.
pub fn mean_access_delay<'a>(records: impl IntoIterator<Item = &'a TxRecord>) -> Result<f64, MetricsError> {
    let (sum, n) = records
        .into_iter()
        .filter(|r| r.delivered())
        .fold((0u64, 0u64), |(s, n), r| (s + r.access_delay(), n + 1));
    if n == 0 {
        return Err(MetricsError::NoDeliveries);
    }
    Ok(sum as f64 / n as f64 / 1000.0)
}

pub fn utilization(busy_us: Micros, interval_us: Micros) -> f64 {
    if interval_us == 0 {
        return 0.0;
    }
    100.0 * busy_us.min(interval_us) as f64 / interval_us as f64
}

/// Calls carried at `max_throughput_bps`, un-floored.
pub fn call_capacity(max_throughput_bps: f64, per_call_rate_bps: f64) -> Result<f64, MetricsError> {
    if !(per_call_rate_bps > 0.0) {
        return Err(MetricsError::ZeroDivisor);
    }
    Ok(max_throughput_bps / per_call_rate_bps)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindowRow {
    /// Window start, seconds.
    pub time_s: f64,
    pub throughput_bps: f64,
    pub loss_ratio: f64,
    pub delay_ms: Option<f64>,
    pub utilization_pct: f64,
    pub free_bw_pct: f64,
    pub capacity_calls: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub throughput_bps: f64,
    pub frame_loss_ratio: f64,
    pub mean_access_delay_ms: Option<f64>,
    pub utilization_pct: f64,
    pub free_bw_pct: f64,
    pub capacity_calls: f64,
    pub windows: Vec<WindowRow>,
}

/// How to slice a log into a report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportSpec {
    pub run_end: Micros,
    /// Summary figures cover `[warmup, run_end)`.
    pub warmup: Micros,
    pub window: Micros,
    /// Divisor for call capacity: bits/s one call puts on the air.
    pub per_call_rate_bps: f64,
    /// Added to every delivered payload when counting throughput.
    pub overhead_bytes: u32,
}

fn row_for(log: &MetricsLog, interval: Interval, spec: &ReportSpec) -> WindowRow {
    let in_window: Vec<&TxRecord> = completed_in(&log.records, interval).collect();
    let voice_bits: u64 = in_window
        .iter()
        .filter(|r| r.delivered() && r.class == FrameClass::Voice)
        .map(|r| 8 * r.payload_bytes as u64)
        .sum();
    let secs = interval.seconds();
    let voice_bps = if secs > 0.0 { voice_bits as f64 / secs } else { 0.0 };
    let util = utilization(log.busy.busy_within(interval.start, interval.end), interval.len());
    WindowRow {
        time_s: interval.start as f64 / MICROS_PER_SEC as f64,
        throughput_bps: throughput_with_overhead(&log.records, interval, spec.overhead_bytes),
        loss_ratio: frame_loss_ratio(in_window.iter().copied()).unwrap_or(0.0),
        delay_ms: mean_access_delay(in_window.iter().copied()).ok(),
        utilization_pct: util,
        free_bw_pct: 100.0 - util,
        capacity_calls: call_capacity(voice_bps, spec.per_call_rate_bps).unwrap_or(0.0),
    }
}

/// Partitions the run into report windows and computes the summary over the
/// post-warmup span. Capacity uses the best post-warmup window.
pub fn build_report(log: &MetricsLog, spec: &ReportSpec) -> MetricsReport {
    let window = spec.window.max(1);
    let windows: Vec<WindowRow> = (0..spec.run_end)
        .step_by(window as usize)
        .map(|start| {
            let iv = Interval::new(start, (start + window).min(spec.run_end));
            row_for(log, iv, spec)
        })
        .collect();
    let steady = Interval::new(spec.warmup.min(spec.run_end), spec.run_end);
    let summary = row_for(log, steady, spec);
    let warm_s = spec.warmup as f64 / MICROS_PER_SEC as f64;
    let best_window = windows
        .iter()
        .filter(|w| w.time_s >= warm_s)
        .map(|w| w.capacity_calls)
        .fold(None, |acc: Option<f64>, c| Some(acc.map_or(c, |a| a.max(c))));
    MetricsReport {
        throughput_bps: summary.throughput_bps,
        frame_loss_ratio: summary.loss_ratio,
        mean_access_delay_ms: summary.delay_ms,
        utilization_pct: summary.utilization_pct,
        free_bw_pct: summary.free_bw_pct,
        capacity_calls: best_window.unwrap_or(summary.capacity_calls),
        windows,
    }
}
