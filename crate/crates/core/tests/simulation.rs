use std::path::PathBuf;

use wlan_bdm::engine::MICROS_PER_SEC;
use wlan_bdm::mac::{DataRate, FrameClass, MacTiming};
use wlan_bdm::metrics::{throughput, Interval, Outcome};
use wlan_bdm::scenario::{
    compare, emit_csv, parse_csv, parse_scenario, run_batch, run_scenario, CompareError, ControllerKind,
    ScenarioConfig, Traffic,
};

fn voice(stations: usize, controller: ControllerKind, secs: f64) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::new(stations);
    cfg.controller = controller;
    cfg.duration_s = secs;
    cfg
}

fn saturated(stations: usize, rate: DataRate, secs: f64) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::new(stations);
    cfg.traffic = Traffic::Saturated;
    cfg.controller = ControllerKind::Fixed(rate);
    cfg.ber = wlan_bdm::mac::BerTable::CLEAN;
    cfg.duration_s = secs;
    cfg.warmup_s = Some(0.0);
    cfg
}

fn scenario_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

#[test]
fn same_seed_gives_identical_csv() {
    let cfg = voip_with_data();
    let a = emit_csv(&run_scenario(&cfg).unwrap().report);
    let b = emit_csv(&run_scenario(&cfg).unwrap().report);
    assert_eq!(a, b);
    let other = ScenarioConfig { seed: 2, ..cfg };
    assert_ne!(a, emit_csv(&run_scenario(&other).unwrap().report));
}

fn voip_with_data() -> ScenarioConfig {
    let mut cfg = voice(4, ControllerKind::Bdm, 8.0);
    cfg.data_stations = 1;
    cfg.data_load = wlan_bdm::scenario::DataLoad::Poisson { bps: 300_000.0 };
    cfg
}

#[test]
fn single_saturated_station_matches_cycle_model() {
    let t = MacTiming::default();
    let rate = DataRate::Mbps2;
    let run = run_scenario(&saturated(1, rate, 10.0)).unwrap();
    let cycle = t.difs as f64 + 15.5 * t.slot as f64 + t.data_airtime(60, rate) as f64 + t.sifs as f64 + t.ack_time as f64;
    let oracle = 480.0 / cycle * 1e6;
    let frames = run.log.records.len();
    assert!(frames > 5000, "{frames}");
    let err = (run.report.throughput_bps - oracle).abs() / oracle;
    assert!(err < 0.02, "sim {} oracle {oracle}", run.report.throughput_bps);
}

#[test]
fn records_respect_time_order() {
    let run = run_scenario(&voip_with_data()).unwrap();
    assert!(!run.log.records.is_empty());
    for r in &run.log.records {
        if r.delivered() {
            let first = r.first_attempt_time.unwrap();
            assert!(r.enqueue_time <= first && first <= r.completion_time, "{r:?}");
            assert!(r.retries <= 7);
        }
    }
    for w in run.log.attempts.windows(2) {
        assert!(w[0].start <= w[1].start);
    }
    let busy = run.log.busy.intervals();
    assert!(busy.windows(2).all(|w| w[0].1 < w[1].0));
}

#[test]
fn window_rows_sum_to_whole_run() {
    let cfg = voice(3, ControllerKind::Bdm, 5.5);
    let run = run_scenario(&cfg).unwrap();
    let total = throughput(&run.log.records, Interval::new(0, cfg.duration())) * 5.5;
    let windowed: f64 = run
        .report
        .windows
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let start = i as u64 * MICROS_PER_SEC;
            let len = (start + MICROS_PER_SEC).min(cfg.duration()) - start;
            w.throughput_bps * len as f64 / 1e6
        })
        .sum();
    assert_eq!(run.report.windows.len(), 6);
    assert!((total - windowed).abs() < 1e-6 * total);
    for w in &run.report.windows {
        assert_eq!(w.utilization_pct + w.free_bw_pct, 100.0);
    }
}

#[test]
fn csv_round_trips_a_real_run() {
    let run = run_scenario(&voice(2, ControllerKind::Edca, 3.0)).unwrap();
    let text = emit_csv(&run.report);
    assert_eq!(parse_csv(&text).unwrap(), run.report);
}

#[test]
fn bdm_carries_more_calls_than_basic_rate() {
    let bdm = run_scenario(&voice(10, ControllerKind::Bdm, 15.0)).unwrap();
    let slow = run_scenario(&voice(10, ControllerKind::Fixed(DataRate::Mbps1), 15.0)).unwrap();
    assert!(bdm.report.capacity_calls > slow.report.capacity_calls);
}

#[test]
fn voice_flows_run_at_codec_rate() {
    let cfg = voice(2, ControllerKind::Fixed(DataRate::Mbps11), 6.0);
    let run = run_scenario(&cfg).unwrap();
    let voice: Vec<_> = run
        .log
        .records
        .iter()
        .filter(|r| r.class == FrameClass::Voice)
        .cloned()
        .collect();
    let bps = throughput(&voice, Interval::new(cfg.warmup(), cfg.duration()));
    // two calls, both directions, 60-byte packets every 20 ms
    assert!((bps - 2.0 * 2.0 * 24_000.0).abs() < 0.02 * 96_000.0, "{bps}");
    assert_eq!(run.calls_admitted, 2);
}

#[test]
fn identical_controllers_compare_to_zero() {
    let cfg = voice(3, ControllerKind::Bdm, 4.0);
    let table = compare(&[cfg.clone(), cfg]).unwrap();
    let d = table.deltas()[1];
    for v in [d.throughput_pct, d.utilization_pct, d.delay_pct, d.loss_pct, d.capacity_pct] {
        assert!(v.is_none() || v == Some(0.0), "{d:?}");
    }
    assert!(table.render().contains("vs first"));
}

#[test]
fn compare_rejects_other_differences() {
    let a = voice(3, ControllerKind::Bdm, 4.0);
    let b = voice(4, ControllerKind::Edca, 4.0);
    assert!(matches!(compare(&[a.clone(), b]), Err(CompareError::Mismatch { index: 1 })));
    assert!(matches!(compare(&[a]), Err(CompareError::TooFew)));
}

#[test]
fn batch_runs_are_individually_reproducible() {
    let cfg = voice(3, ControllerKind::Bdm, 3.0);
    let runs = run_batch(&cfg, 3).unwrap();
    assert_eq!(runs.iter().map(|r| r.config.seed).collect::<Vec<_>>(), vec![1, 2, 3]);
    for r in &runs {
        let again = run_scenario(&r.config).unwrap();
        assert_eq!(emit_csv(&again.report), emit_csv(&r.report));
    }
}

#[test]
fn overloaded_basic_rate_loses_frames_to_full_queues() {
    let run = run_scenario(&voice(10, ControllerKind::Fixed(DataRate::Mbps1), 10.0)).unwrap();
    assert!(run.log.records.iter().any(|r| r.outcome == Outcome::Overflow));
    assert!(run.report.frame_loss_ratio > 0.05);
}

#[test]
fn admission_blocks_calls_beyond_the_reserve() {
    let mut cfg = voice(12, ControllerKind::Fixed(DataRate::Mbps1), 20.0);
    cfg.admission = wlan_bdm::scenario::Admission::On;
    cfg.admission_target_pct = Some(5.0);
    let run = run_scenario(&cfg).unwrap();
    assert!(run.calls_blocked > 0, "{} admitted", run.calls_admitted);
    assert_eq!(run.calls_admitted + run.calls_blocked, 12);
}

#[test]
fn shipped_scenarios_parse() {
    let mut n = 0;
    for entry in std::fs::read_dir(scenario_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "conf") {
            let text = std::fs::read_to_string(&path).unwrap();
            parse_scenario(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            n += 1;
        }
    }
    assert!(n >= 5);
}

mod random_configs {
    use super::*;
    use proptest::prelude::*;
    use wlan_bdm::scenario::DataLoad;

    fn controller() -> impl Strategy<Value = ControllerKind> {
        prop_oneof![
            Just(ControllerKind::Bdm),
            Just(ControllerKind::Arf),
            Just(ControllerKind::Edca),
            prop::sample::select(DataRate::LADDER.to_vec()).prop_map(ControllerKind::Fixed),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn reports_stay_well_formed(
            stations in 1usize..8,
            data in 0usize..3,
            kbps in 0.0f64..600.0,
            ctrl in controller(),
            rts in any::<bool>(),
            seed in 1u64..1000,
        ) {
            let mut cfg = voice(stations, ctrl, 3.0);
            cfg.data_stations = data;
            cfg.data_load = DataLoad::Poisson { bps: kbps * 1000.0 };
            cfg.rts_cts = rts;
            cfg.call_spacing_ms = 200;
            cfg.seed = seed;
            let run = run_scenario(&cfg).unwrap();
            let r = &run.report;
            prop_assert_eq!(r.windows.len(), 3);
            prop_assert!((0.0..=1.0).contains(&r.frame_loss_ratio));
            prop_assert!((0.0..=100.0).contains(&r.utilization_pct));
            prop_assert_eq!(r.utilization_pct + r.free_bw_pct, 100.0);
            prop_assert!(r.capacity_calls >= 0.0);
            prop_assert_eq!((run.calls_admitted + run.calls_blocked) as usize, stations);
            for w in &r.windows {
                prop_assert_eq!(w.utilization_pct + w.free_bw_pct, 100.0);
            }
            prop_assert_eq!(parse_csv(&emit_csv(r)).unwrap(), r.clone());
        }
    }
}
