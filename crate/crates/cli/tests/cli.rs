use std::path::Path;
use std::process::{Command, Output};

fn farmgrid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_farmgrid"))
        .args(args)
        .env_remove("FARMGRID_CONFIG")
        .output()
        .unwrap()
}

fn ok(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn error_kind(out: &Output) -> String {
    assert!(!out.status.success());
    let line = String::from_utf8_lossy(&out.stderr);
    let v: serde_json::Value = serde_json::from_str(line.trim()).unwrap();
    assert!(v["message"].is_string());
    v["error"].as_str().unwrap().to_string()
}

/// Two weeks cut from the default synthetic year.
fn short_trace(dir: &Path) -> String {
    let year = dir.join("year.csv");
    ok(&farmgrid(&["synth-data", "--out", year.to_str().unwrap()]));
    let text = std::fs::read_to_string(&year).unwrap();
    let short: Vec<&str> = text.lines().take(1 + 14 * 24).collect();
    let path = dir.join("short.csv");
    std::fs::write(&path, short.join("\n") + "\n").unwrap();
    path.to_str().unwrap().to_string()
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn synth_data_writes_a_full_year() {
    let dir = tempfile::tempdir().unwrap();
    let out = p(dir.path(), "year.csv");
    let stdout = ok(&farmgrid(&["synth-data", "--cows", "120", "--seed", "3", "--out", &out]));
    assert!(stdout.contains("8760 steps"));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().next(), Some("step,load_kw,pv_kw"));
    assert_eq!(text.lines().count(), 8761);
}

#[test]
fn simulate_compare_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let trace = short_trace(d);
    for policy in ["msc", "tou"] {
        ok(&farmgrid(&["simulate", "--policy", policy, "--trace", &trace, "--out", &p(d, policy)]));
    }
    ok(&farmgrid(&["train", "--trace", &trace, "--episodes", "100", "--out", &p(d, "q")]));
    assert!(d.join("q/qtable.csv").exists());
    assert!(d.join("q/training_curve.csv").exists());

    let cmp = p(d, "cmp.json");
    let table = ok(&farmgrid(&["compare", "--runs", &p(d, "msc"), &p(d, "tou"), &p(d, "q"), "--out", &cmp]));
    assert!(table.contains("qlearn") && table.contains("tou"));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&cmp).unwrap()).unwrap();
    assert_eq!(report["baseline"], "tou");
    assert_eq!(report["pairwise"].as_array().unwrap().len(), 2);
    assert!(report["provenance"]["qlearn"]["config_hash"].is_string());

    let plot = p(d, "plot.csv");
    ok(&farmgrid(&[
        "plot-data", "--runs", &p(d, "msc"), &p(d, "q"), "--kind", "hourly_import", "--window", "0..48", "--out", &plot,
    ]));
    let rows = std::fs::read_to_string(&plot).unwrap();
    assert_eq!(rows.lines().count(), 1 + 2 * 48);

    // a saved table reproduces the trained rollout exactly
    ok(&farmgrid(&[
        "simulate", "--policy", "qlearn", "--trace", &trace, "--qtable", &p(d, "q/qtable.csv"), "--out", &p(d, "q2"),
    ]));
    let a = std::fs::read_to_string(d.join("q/series.csv")).unwrap();
    let b = std::fs::read_to_string(d.join("q2/series.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn identical_seeds_give_identical_tables() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let trace = short_trace(d);
    for name in ["a", "b"] {
        ok(&farmgrid(&["train", "--trace", &trace, "--episodes", "50", "--seed", "5", "--out", &p(d, name)]));
    }
    let a = std::fs::read(d.join("a/qtable.csv")).unwrap();
    let b = std::fs::read(d.join("b/qtable.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn config_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let trace = short_trace(d);
    let cfg = p(d, "cfg.json");
    let json = serde_json::json!({ "trace": { "csv": { "path": trace } }, "policy": "msc" });
    std::fs::write(&cfg, json.to_string()).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_farmgrid"))
        .args(["simulate", "--out", &p(d, "run")])
        .env("FARMGRID_CONFIG", &cfg)
        .output()
        .unwrap();
    let stdout = ok(&out);
    assert!(stdout.starts_with("msc:"), "{stdout}");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.join("run/report.json")).unwrap()).unwrap();
    assert_eq!(report["aggregates"]["horizon_steps"], 336);
}

#[test]
fn sweep_reports_both_baselines() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let trace = short_trace(d);
    let cfg = p(d, "cfg.json");
    let json = serde_json::json!({ "trace": { "csv": { "path": trace } }, "qlearn": { "episodes": 30 } });
    std::fs::write(&cfg, json.to_string()).unwrap();
    let out = p(d, "sweep.json");
    let stdout = ok(&farmgrid(&["sweep", "--config", &cfg, "--seeds", "3", "--out", &out]));
    assert!(stdout.contains("qlearn vs msc") && stdout.contains("qlearn vs tou"));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["runs"].as_array().unwrap().len(), 3);
}

#[test]
fn errors_are_one_json_line() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();

    let missing = farmgrid(&["simulate", "--trace", &p(d, "nope.csv"), "--out", &p(d, "x")]);
    assert_eq!(error_kind(&missing), "io-error");

    let bad = p(d, "bad.csv");
    std::fs::write(&bad, "step,load_kw,pv_kw\n0,1.0,abc\n").unwrap();
    assert_eq!(error_kind(&farmgrid(&["simulate", "--trace", &bad, "--out", &p(d, "x")])), "parse-error");

    let short = p(d, "short.csv");
    std::fs::write(&short, "step,load_kw,pv_kw\n0,1.0,0.0\n").unwrap();
    assert_eq!(error_kind(&farmgrid(&["simulate", "--trace", &short, "--out", &p(d, "x")])), "length-error");

    let trace = short_trace(d);
    ok(&farmgrid(&["simulate", "--policy", "msc", "--trace", &trace, "--out", &p(d, "msc")]));
    let one = farmgrid(&["compare", "--runs", &p(d, "msc"), &p(d, "msc"), "--baseline", "tou"]);
    assert_eq!(error_kind(&one), "config-error");

    ok(&farmgrid(&["simulate", "--policy", "tou", "--trace", &trace, "--out", &p(d, "tou")]));
    let window = farmgrid(&["plot-data", "--runs", &p(d, "tou"), "--kind", "soc_trace", "--window", "0..9999", "--out", &p(d, "p.csv")]);
    assert_eq!(error_kind(&window), "bad-window");

    let hp = farmgrid(&["train", "--trace", &trace, "--alpha", "0", "--out", &p(d, "q")]);
    assert_eq!(error_kind(&hp), "invalid-hyperparams");
}
