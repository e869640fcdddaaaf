use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use wlan_bdm::scenario::{compare, emit_csv, parse_scenario, run_batch, run_scenario, RunOutput, ScenarioConfig};
use wlan_bdm::voip::{erlang_b, number_of_calls, per_call_bandwidth, CapacityInputs, CodecProfile, HeaderMode, VoipFlow};

#[derive(Parser)]
#[command(name = "sim", version, about = "802.11b VoIP simulator with BDM rate and bandwidth control")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and emit its report CSV.
    Run {
        scenario: PathBuf,
        /// Override the scenario's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run seeds 1..=N; with --out, one file per seed.
        #[arg(long, conflicts_with = "seed")]
        batch: Option<u64>,
    },
    /// Run scenarios differing only in controller and print a delta table.
    Compare {
        #[arg(required = true, num_args = 2..)]
        scenarios: Vec<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// VoIP planning calculators.
    Calc {
        #[command(subcommand)]
        op: Calc,
    },
}

#[derive(Subcommand)]
enum Calc {
    /// One-direction bandwidth of a call in bits/s.
    Bandwidth {
        codec: CodecProfile,
        ptime_ms: u32,
        header: HeaderMode,
    },
    /// Calls that fit: floor(correc_fac * (rb - rbt) / codec_bw).
    Calls {
        correc_fac: f64,
        rb: f64,
        rbt: f64,
        codec_bw: f64,
    },
    /// Erlang-B blocking probability.
    Erlang { servers: u32, offered: f64 },
}

fn load(path: &Path, seed: Option<u64>) -> Result<ScenarioConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut cfg = parse_scenario(&text).with_context(|| format!("{}", path.display()))?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

/// Writes via a sibling temp file so a failure never leaves a partial CSV.
fn write_atomic(path: &Path, text: &str) -> Result<()> {
    let tmp = path.with_extension("csv.partial");
    fs::write(&tmp, text).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming to {}", path.display()))
}

fn summary_line(run: &RunOutput) -> String {
    let r = &run.report;
    format!(
        "seed={} throughput_bps={:.0} loss={:.4} delay_ms={} util_pct={:.2} free_pct={:.2} capacity={:.2} admitted={} blocked={}",
        run.config.seed,
        r.throughput_bps,
        r.frame_loss_ratio,
        r.mean_access_delay_ms.map_or("n/a".into(), |d| format!("{d:.3}")),
        r.utilization_pct,
        r.free_bw_pct,
        r.capacity_calls,
        run.calls_admitted,
        run.calls_blocked,
    )
}

fn seeded_path(out: &Path, seed: u64) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("report");
    out.with_file_name(format!("{stem}.seed{seed}.csv"))
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let mut stdout = std::io::stdout().lock();
    match cli.command {
        Command::Run {
            scenario,
            seed,
            out,
            batch: None,
        } => {
            let run = run_scenario(&load(&scenario, seed)?)?;
            let csv = emit_csv(&run.report);
            match out {
                Some(path) => {
                    write_atomic(&path, &csv)?;
                    writeln!(stdout, "{}", summary_line(&run))?;
                }
                None => stdout.write_all(csv.as_bytes())?,
            }
        }
        Command::Run {
            scenario,
            out,
            batch: Some(n),
            ..
        } => {
            let runs = run_batch(&load(&scenario, None)?, n)?;
            for run in &runs {
                if let Some(out) = &out {
                    write_atomic(&seeded_path(out, run.config.seed), &emit_csv(&run.report))?;
                }
                writeln!(stdout, "{}", summary_line(run))?;
            }
        }
        Command::Compare { scenarios, seed } => {
            let configs = scenarios
                .iter()
                .map(|p| load(p, seed))
                .collect::<Result<Vec<_>>>()?;
            let table = compare(&configs)?;
            stdout.write_all(table.render().as_bytes())?;
        }
        Command::Calc { op } => {
            let text = match op {
                Calc::Bandwidth {
                    codec,
                    ptime_ms,
                    header,
                } => {
                    anyhow::ensure!(ptime_ms > 0, "ptime_ms must be positive");
                    per_call_bandwidth(&VoipFlow::new(codec, ptime_ms, header)).to_string()
                }
                Calc::Calls {
                    correc_fac,
                    rb,
                    rbt,
                    codec_bw,
                } => number_of_calls(&CapacityInputs {
                    correc_fac,
                    rb,
                    rbt,
                    codec_bw,
                })?
                .to_string(),
                Calc::Erlang { servers, offered } => format!("{:.6}", erlang_b(servers, offered)?),
            };
            writeln!(stdout, "{text}")?;
        }
    }
    Ok(())
}
