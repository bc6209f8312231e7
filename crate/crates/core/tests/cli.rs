use std::process::{Command, Output};

use serde_json::Value;

fn wiener(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wiener")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

const MC: [&str; 11] = ["mc-recovery", "--n", "127", "--t", "4", "--omega", "60", "--trials", "100", "--seed", "42"];

#[test]
fn repeated_runs_are_byte_identical() {
    let first = wiener(&MC);
    let second = wiener(&MC);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn thread_count_does_not_change_output() {
    let default = wiener(&MC);
    let single = Command::new(env!("CARGO_BIN_EXE_wiener"))
        .args(MC)
        .env("RAYON_NUM_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(default.stdout, single.stdout);
}

#[test]
fn report_envelope() {
    let v = json(&wiener(&MC));
    assert_eq!(v["command"], "mc-recovery");
    assert_eq!(v["version"], "1");
    for key in ["config", "results", "bounds", "threshold_vacuous"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert_eq!(v["results"]["mc"]["trials"], 100);
}

#[test]
fn comb_samples_do_not_single_out_a_spike() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("samples.json");
    std::fs::write(&path, r#"[{"omega":0,"re":1,"im":0},{"omega":2,"re":1,"im":0}]"#).unwrap();
    let v = json(&wiener(&[
        "recover",
        "--n",
        "4",
        "--samples-file",
        path.to_str().unwrap(),
        "--truth",
        "2,0,0,0",
    ]));
    assert_eq!(v["results"]["recovered"], false);
    assert!((v["results"]["objective"].as_f64().unwrap() - 2.0).abs() < 1e-6);
}

#[test]
fn comb_uncertainty_is_tight() {
    let v = json(&wiener(&["uncertainty", "--n", "9", "--comb"]));
    assert_eq!(v["results"]["product"], 9);
    assert_eq!(v["results"]["equality"], true);
}

#[test]
fn bad_input_exits_with_two() {
    assert_eq!(wiener(&["recover", "--bogus"]).status.code(), Some(2));
    assert_eq!(wiener(&["mc-iv", "--n", "31", "--t", "2"]).status.code(), Some(2));
    assert_eq!(wiener(&["uncertainty", "--n", "4", "--support", "9"]).status.code(), Some(2));
}

#[test]
fn csv_has_one_row_per_trial() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trials.csv");
    let out = wiener(&[
        "mc-iv", "--n", "31", "--t", "2", "--tau", "0.5", "--trials", "25", "--seed", "3", "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("trial_index,seed,omega_size,success,objective,residual"));
    assert_eq!(lines.count(), 25);
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.conf");
    std::fs::write(&path, "# comb witness\nn = 9\ncomb = true\n").unwrap();
    let v = json(&wiener(&["uncertainty", "--config", path.to_str().unwrap()]));
    assert_eq!(v["results"]["n"], 9);
}
