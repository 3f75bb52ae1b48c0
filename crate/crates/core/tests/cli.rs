use std::path::Path;
use std::process::{Command, Output};

fn grf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_grf-swarm"))
        .args(args)
        .env_remove("GRF_SWARM_THREADS")
        .output()
        .expect("binary runs")
}

fn scenario_file(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(name)
        .display()
        .to_string()
}

#[test]
fn shipped_scenarios_validate() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    let mut count = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let out = grf(&["validate", path.to_str().unwrap()]);
        assert!(
            out.status.success(),
            "{}: {}",
            path.display(),
            String::from_utf8_lossy(&out.stderr)
        );
        count += 1;
    }
    assert!(count >= 5);
}

#[test]
fn validate_reports_the_bad_field() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(scenario_file("scalability_10.json")).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["robot_count"] = 0.into();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, v.to_string()).unwrap();
    let out = grf(&["validate", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("robot_count"));

    let out = grf(&[
        "validate",
        dir.path().join("missing.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = grf(&["run", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn run_trace_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    for (path, threads) in [(&a, "1"), (&b, "2")] {
        let out = grf(&[
            "--threads",
            threads,
            "run",
            "--scenario",
            "scalability",
            "--robots",
            "2",
            "--seed",
            "7",
            "--tick-limit",
            "400",
            "--trace",
            path.to_str().unwrap(),
        ]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let ta = std::fs::read(&a).unwrap();
    assert_eq!(ta, std::fs::read(&b).unwrap());
    let lines = String::from_utf8(ta).unwrap();
    assert_eq!(lines.lines().count(), 400);
    // no temporary files left behind
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 2);
}

#[test]
fn run_writes_manifest_and_result() {
    let dir = tempfile::tempdir().unwrap();
    let out = grf(&[
        "run",
        "--config",
        &scenario_file("scalability_10.json"),
        "--seed",
        "3",
        "--tick-limit",
        "50",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["seeds"], serde_json::json!([3]));
    assert_eq!(manifest["config_sha256"].as_str().unwrap().len(), 64);
    assert!(manifest["config_path"]
        .as_str()
        .unwrap()
        .ends_with("scalability_10.json"));
    let trial: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("trial.json")).unwrap())
            .unwrap();
    assert_eq!(trial["outcome"], "timeout");
    assert_eq!(trial["seed"], 3);
}

#[test]
fn batch_writes_summary_and_times() {
    let dir = tempfile::tempdir().unwrap();
    let out = grf(&[
        "batch",
        "--scenario",
        "scalability",
        "--robots",
        "4",
        "--trials",
        "3",
        "--seed",
        "42",
        "--tick-limit",
        "20",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let summary = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    let lines: Vec<&str> = summary.lines().collect();
    assert_eq!(
        lines[0],
        "scenario,robots,shape,scale,mass_kg,n,success_rate,mean_time_s,ci95_s"
    );
    assert!(lines[1].starts_with("scalability,4,rect,1,0.2,0,0,"));
    let times = std::fs::read_to_string(dir.path().join("trials.csv")).unwrap();
    let seeds: Vec<&str> = times
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(seeds, ["42", "43", "44"]);
    let series = std::fs::read_to_string(dir.path().join("series.csv")).unwrap();
    assert_eq!(series.lines().count(), 1 + 3 * 20);
    assert_eq!(
        std::fs::read_to_string(dir.path().join("trials.jsonl"))
            .unwrap()
            .lines()
            .count(),
        3
    );
}

#[test]
fn show_prints_a_loadable_config() {
    let out = grf(&[
        "show",
        "--scenario",
        "robustness",
        "--shape",
        "triangle",
        "--scale",
        "2",
        "--mass",
        "0.4",
    ]);
    assert!(out.status.success());
    let cfg =
        grf_swarm::experiments::ScenarioConfig::from_json(&String::from_utf8(out.stdout).unwrap())
            .unwrap();
    assert_eq!(cfg.object.scale, 2.0);
    assert_eq!(cfg.object.mass, 0.4);

    let out = grf(&["show", "--scenario", "robustness", "--shape", "hexagon"]);
    assert_eq!(out.status.code(), Some(2));
}
