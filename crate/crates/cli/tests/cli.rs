use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn sim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sim"))
        .args(args)
        .output()
        .expect("spawn sim")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn scenario(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn write_scenario(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

const SMALL: &str = "stations = 2\nduration_s = 3\ncontroller = bdm\n";

#[test]
fn calc_subcommands() {
    let out = sim(&["calc", "bandwidth", "g729", "20", "full"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "24000");

    let out = sim(&["calc", "erlang", "2", "2"]);
    assert_eq!(stdout(&out).trim(), "0.400000");

    let out = sim(&["calc", "calls", "0.7", "11000000", "1000000", "50000"]);
    assert_eq!(stdout(&out).trim(), "140");
}

#[test]
fn bad_arguments_exit_nonzero() {
    assert!(!sim(&["calc", "bandwidth", "opus", "20", "full"]).status.success());
    assert!(!sim(&["calc", "bandwidth", "g729", "0", "full"]).status.success());
    assert!(!sim(&["calc", "calls", "1.5", "11000000", "0", "24000"]).status.success());
    assert!(!sim(&["run", "/nonexistent/scenario.conf"]).status.success());
    assert!(!sim(&["frobnicate"]).status.success());
}

#[test]
fn run_prints_csv_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(dir.path(), "small.conf", SMALL);
    let out = sim(&["run", &path]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "time_s,throughput_bps,loss_ratio,delay_ms,utilization_pct,free_bw_pct,capacity_calls"
    );
    assert_eq!(text.lines().filter(|l| l.starts_with("summary,")).count(), 1);
    assert!(text.lines().last().unwrap().starts_with("summary,"));
    assert_eq!(text, stdout(&sim(&["run", &path])));
}

#[test]
fn run_with_out_writes_file_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(dir.path(), "small.conf", SMALL);
    let csv = dir.path().join("report.csv");
    let out = sim(&["run", &path, "--seed", "7", "--out", csv.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("seed=7 "));
    let written = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(written, stdout(&sim(&["run", &path, "--seed", "7"])));
}

#[test]
fn invalid_scenario_leaves_no_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(dir.path(), "bad.conf", "stations = 2\nbogus_key = 3\n");
    let csv = dir.path().join("report.csv");
    let out = sim(&["run", &path, "--out", csv.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus_key"));
    let leftovers: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n != "bad.conf")
        .collect();
    assert!(leftovers.is_empty(), "{leftovers:?}");
}

#[test]
fn batch_writes_one_file_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(dir.path(), "small.conf", SMALL);
    let csv = dir.path().join("out.csv");
    let out = sim(&["run", &path, "--batch", "3", "--out", csv.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 3);
    for seed in 1..=3 {
        let file = dir.path().join(format!("out.seed{seed}.csv"));
        let single = stdout(&sim(&["run", &path, "--seed", &seed.to_string()]));
        assert_eq!(std::fs::read_to_string(file).unwrap(), single);
    }
}

#[test]
fn compare_prints_delta_table() {
    let out = sim(&["compare", &scenario("voip10_bdm.conf"), &scenario("voip10_fixed1.conf")]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.starts_with("controller"));
    assert!(text.contains("bdm"));
    assert!(text.contains("fixed 1 Mbps"));
    assert_eq!(text.matches("vs first").count(), 2);
}

#[test]
fn compare_rejects_unrelated_scenarios() {
    let out = sim(&["compare", &scenario("voip10_bdm.conf"), &scenario("voip25_bdm.conf")]);
    assert!(!out.status.success());
}
