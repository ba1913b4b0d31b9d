use std::fs;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_mbios-bounds"));
    cmd.env_remove("MBIOS_BOUNDS_SEED").env_remove("SOURCE_DATE_EPOCH");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Value column of the first CSV row whose method is `method`.
fn value(csv: &str, ensemble: &str, method: &str) -> f64 {
    csv.lines()
        .map(|l| l.split(',').collect::<Vec<_>>())
        .find(|f| f[0] == ensemble && f[2] == method)
        .unwrap_or_else(|| panic!("no row {ensemble}/{method} in\n{csv}"))[3]
        .parse()
        .unwrap()
}

#[test]
fn capacity_of_bec() {
    let csv = stdout(&run(&["capacity", "--channel", "bec:p=0.5"]));
    assert_eq!(csv.lines().next().unwrap(), "ensemble,design_rate,method,value,unit,trivial,provenance");
    assert_eq!(value(&csv, "", "capacity"), 0.5);
}

#[test]
fn q4_threshold_of_gallager_3_6() {
    let csv = stdout(&run(&["threshold", "--ensemble", "builtin=gallager_3_6", "--method", "q4"]));
    assert!((value(&csv, "gallager_3_6", "q4") - 0.332).abs() <= 0.005);
}

#[test]
fn table_json_renders_to_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("t1.json");
    stdout(&run(&["table", "1", "--out", json.to_str().unwrap()]));
    let direct = stdout(&run(&["table", "1", "--format", "csv"]));
    assert!((value(&direct, "gallager_3_6", "unq") - 0.371).abs() <= 0.005);
    assert!(direct.contains("gallager_3_6,0.500000,density_evolution,1.1100,dB,,reference"));
    let rendered = stdout(&run(&["render", json.to_str().unwrap()]));
    assert_eq!(rendered, direct);
}

#[test]
fn repeated_runs_are_identical() {
    let args = ["rate-bound", "--channel", "biawgn:sigma=0.95", "--ensemble", "builtin=table2_row1", "--method", "q8", "--format", "json"];
    assert_eq!(stdout(&run(&args)), stdout(&run(&args)));
}

#[test]
fn malformed_input_exits_with_2_and_names_the_field() {
    for (args, needle) in [
        (vec!["capacity", "--channel", "bsc:epsilon=0.1"], "'epsilon'"),
        (vec!["capacity", "--channel", "bec:p=lots"], "'p'"),
        (vec!["capacity", "--channel", "biawgn:ebn0_db=1"], "'rate'"),
        (vec!["threshold", "--ensemble", "builtin=nope"], "nope"),
        (vec!["threshold", "--ensemble", "builtin=gallager_3_6", "--method", "q16"], "q16"),
        (vec!["table", "4"], "4"),
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(needle), "{args:?}: {err}");
    }
}

#[test]
fn numerical_failure_exits_with_3() {
    let out = run(&["density-bound", "--channel", "bec:p=0", "--epsilon", "0.1"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn seed_and_timestamp_come_from_the_environment() {
    let bad = bin()
        .args(["capacity", "--channel", "bec:p=0.5"])
        .env("MBIOS_BOUNDS_SEED", "abc")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
    let out = bin()
        .args(["capacity", "--channel", "bec:p=0.5", "--format", "json"])
        .env("MBIOS_BOUNDS_SEED", "7")
        .env("SOURCE_DATE_EPOCH", "1700000000")
        .output()
        .unwrap();
    let json = stdout(&out);
    assert!(json.contains("\"seed\": 7"));
    assert!(json.contains("\"timestamp\": \"1700000000\""));
    let plain = stdout(&run(&["capacity", "--channel", "bec:p=0.5", "--format", "json"]));
    assert!(plain.contains("\"timestamp\": null"));
}

#[test]
fn files_for_channel_and_ensemble() {
    let dir = tempfile::tempdir().unwrap();
    let channel = dir.path().join("bsc.json");
    let t = (0.9f64 / 0.1).ln();
    fs::write(&channel, format!(r#"{{"atoms": [[{t}, 0.9], [{}, 0.1]]}}"#, -t)).unwrap();
    let ensemble = dir.path().join("e.json");
    fs::write(&ensemble, r#"{"name": "g36", "lambda": [[3, 1.0]], "rho": [[6, 1.0]]}"#).unwrap();
    let custom = stdout(&run(&[
        "rate-bound",
        "--channel",
        &format!("custom:file={}", channel.display()),
        "--ensemble",
        &format!("file={}", ensemble.display()),
        "--method",
        "2level",
    ]));
    let reference = stdout(&run(&[
        "rate-bound",
        "--channel",
        "bsc:eps=0.1",
        "--ensemble",
        "builtin=gallager_3_6",
        "--method",
        "2level",
    ]));
    assert!((value(&custom, "g36", "2level") - value(&reference, "gallager_3_6", "2level")).abs() < 1e-9);
}

#[test]
fn ber_example_reports_both_bounds() {
    let csv = stdout(&run(&["ber-bound", "--channel", "biawgn:sigma=0.975", "--rate", "0.495", "--t", "2"]));
    let series = value(&csv, "t=2", "unq");
    let legacy = value(&csv, "t=2", "legacy");
    assert!(series >= legacy && series > 0.0);
}

#[test]
fn density_sweep_flags_points_beyond_capacity() {
    let csv = stdout(&run(&["sweep", "fig4", "--rates", "0.75"]));
    let first = csv.lines().nth(1).unwrap();
    assert_eq!(first, "ebn0_db=0.000,0.750000,2level,,ones_per_info_bit,true,beyond-capacity");
    assert!(csv.contains("ebn0_db=4.000,0.750000,unq,"));
}
