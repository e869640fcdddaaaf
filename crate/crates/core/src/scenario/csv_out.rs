//! Report CSV: one row per time window, then a `summary` row.

use thiserror::Error;

use crate::metrics::{MetricsReport, WindowRow};

pub const CSV_HEADER: [&str; 7] = [
    "time_s",
    "throughput_bps",
    "loss_ratio",
    "delay_ms",
    "utilization_pct",
    "free_bw_pct",
    "capacity_calls",
];

pub const SUMMARY_TAG: &str = "summary";

#[derive(Debug, Error)]
pub enum CsvError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("unexpected header {0:?}")]
    Header(Vec<String>),
    #[error("row {row}: bad number {value:?}")]
    Number { row: usize, value: String },
    #[error("missing summary row")]
    NoSummary,
    #[error("rows after the summary row")]
    TrailingRows,
}

// f64 Display is the shortest text that parses back to the same value
fn fields(time: String, row: &WindowRow) -> [String; 7] {
    [
        time,
        row.throughput_bps.to_string(),
        row.loss_ratio.to_string(),
        row.delay_ms.map(|d| d.to_string()).unwrap_or_default(),
        row.utilization_pct.to_string(),
        row.free_bw_pct.to_string(),
        row.capacity_calls.to_string(),
    ]
}

pub fn summary_row(report: &MetricsReport) -> WindowRow {
    WindowRow {
        time_s: f64::NAN,
        throughput_bps: report.throughput_bps,
        loss_ratio: report.frame_loss_ratio,
        delay_ms: report.mean_access_delay_ms,
        utilization_pct: report.utilization_pct,
        free_bw_pct: report.free_bw_pct,
        capacity_calls: report.capacity_calls,
    }
}

pub fn emit_csv(report: &MetricsReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let write = |w: &mut csv::Writer<Vec<u8>>, rec: &[String]| {
        w.write_record(rec).expect("writing to memory cannot fail");
    };
    write(&mut w, &CSV_HEADER.map(String::from));
    for row in &report.windows {
        write(&mut w, &fields(row.time_s.to_string(), row));
    }
    write(&mut w, &fields(SUMMARY_TAG.to_string(), &summary_row(report)));
    let bytes = w.into_inner().expect("flush to memory");
    String::from_utf8(bytes).expect("ascii output")
}

fn num(row: usize, s: &str) -> Result<f64, CsvError> {
    s.parse().map_err(|_| CsvError::Number {
        row,
        value: s.to_string(),
    })
}

/// Reads back what [`emit_csv`] wrote.
pub fn parse_csv(text: &str) -> Result<MetricsReport, CsvError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = r.headers()?.iter().map(String::from).collect();
    if header != CSV_HEADER {
        return Err(CsvError::Header(header));
    }
    let mut windows = Vec::new();
    let mut summary = None;
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = i + 2;
        if summary.is_some() {
            return Err(CsvError::TrailingRows);
        }
        let delay = match &rec[3] {
            "" => None,
            s => Some(num(row, s)?),
        };
        let parsed = WindowRow {
            time_s: f64::NAN,
            throughput_bps: num(row, &rec[1])?,
            loss_ratio: num(row, &rec[2])?,
            delay_ms: delay,
            utilization_pct: num(row, &rec[4])?,
            free_bw_pct: num(row, &rec[5])?,
            capacity_calls: num(row, &rec[6])?,
        };
        if &rec[0] == SUMMARY_TAG {
            summary = Some(parsed);
        } else {
            windows.push(WindowRow {
                time_s: num(row, &rec[0])?,
                ..parsed
            });
        }
    }
    let s = summary.ok_or(CsvError::NoSummary)?;
    Ok(MetricsReport {
        throughput_bps: s.throughput_bps,
        frame_loss_ratio: s.loss_ratio,
        mean_access_delay_ms: s.delay_ms,
        utilization_pct: s.utilization_pct,
        free_bw_pct: s.free_bw_pct,
        capacity_calls: s.capacity_calls,
        windows,
    })
}
