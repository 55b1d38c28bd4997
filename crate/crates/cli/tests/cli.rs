use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use cvand::record::read_csv;

const BIN: &str = env!("CARGO_BIN_EXE_cvand");

fn cvand(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const SPECTRUM: &str = r#"{
    "experiment": "spectrum",
    "clusters": [{"s": 2}, {"s": 1}, {"s": 3}, {"s": 1}],
    "theta": 1.0,
    "N_range": [100, 300],
    "Nh_range": [0.001, 0.1],
    "samples": 12
}"#;

#[test]
fn spectrum_csv_is_byte_identical_across_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "s.json", SPECTRUM);
    let mut outputs = Vec::new();
    for jobs in ["1", "3"] {
        let out = dir.path().join(format!("out{jobs}"));
        let o = cvand(&["spectrum", "--config", &cfg, "--seed", "11", "--jobs", jobs, "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        outputs.push(fs::read(out.join("spectrum.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let records = read_csv(outputs[0].as_slice()).unwrap();
    assert_eq!(records.len(), 12);
    assert!(records.iter().all(|r| r.sigma.len() == 7 && r.all_finite()));

    let other = dir.path().join("other");
    cvand(&["spectrum", "--config", &cfg, "--seed", "12", "--out", other.to_str().unwrap()]);
    assert_ne!(fs::read(other.join("spectrum.csv")).unwrap(), outputs[0]);
}

#[test]
fn svg_and_metadata_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "a.json",
        r#"{"experiment": "angles", "clusters": [{"s": 4}, {"s": 2}], "theta": 1.0,
            "Nh": 1e-10, "N_range": [100, 10000], "samples": 5}"#,
    );
    let out = dir.path().join("o");
    let o = cvand(&["angles", "--config", &cfg, "--format", "both", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let svg = fs::read_to_string(out.join("angles.svg")).unwrap();
    let slope: f64 = svg.split("slope ").nth(1).and_then(|t| t.split('<').next()).unwrap().parse().unwrap();
    assert!((slope + 1.0).abs() < 0.1, "{slope}");
    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("angles_metadata.json")).unwrap()).unwrap();
    assert_eq!(meta["rng"], "chacha8");
    assert_eq!(meta["records"], 5);
    assert_eq!(meta["config"]["Nh"], 1e-10);
}

#[test]
fn single_sample_gives_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "a.json",
        r#"{"experiment": "angles", "clusters": [{"s": 2}, {"s": 2}], "theta": 0.5, "N": 300, "Nh": 0.01}"#,
    );
    let out = dir.path().join("o");
    assert!(cvand(&["angles", "--config", &cfg, "--out", out.to_str().unwrap()]).status.success());
    let text = fs::read_to_string(out.join("angles.csv")).unwrap();
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let out = out.to_str().unwrap();

    let bad = write_config(dir.path(), "bad.json", &SPECTRUM.replace("\"samples\"", "\"extra\": 1, \"samples\""));
    let o = cvand(&["spectrum", "--config", &bad, "--out", out]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown field"));

    let good = write_config(dir.path(), "good.json", SPECTRUM);
    assert_eq!(cvand(&["leastsq", "--config", &good, "--out", out]).status.code(), Some(1));
    assert_eq!(cvand(&["spectrum", "--config", "/nonexistent/cfg.json"]).status.code(), Some(3));

    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let o = cvand(&["spectrum", "--config", &good, "--out", blocker.join("sub").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));

    let zero_noise = write_config(
        dir.path(),
        "z.json",
        r#"{"experiment": "leastsq", "clusters": [{"s": 2}, {"s": 1}], "theta": 1.0, "N": 100,
            "Nh": 0.01, "noise_eps_range": [0, 0]}"#,
    );
    assert_eq!(cvand(&["leastsq", "--config", &zero_noise]).status.code(), Some(1));
}

#[test]
fn verify_single_suite_and_unknown_suite() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v");
    let o = cvand(&["verify", "--suite", "trig-cancellation", "--seed", "3", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("PASS trig-cancellation"));
    assert!(!out.exists(), "no failure files on success");
    assert_eq!(cvand(&["verify", "--suite", "nope"]).status.code(), Some(1));
}
