//! End-to-end tests of the `gt2` binary: exit codes, report shape and
//! byte-level determinism.

use std::path::Path;
use std::process::{Command, Output};

fn gt2(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gt2"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn fit_on_bundled_covid_reproduces_published_estimates() {
    let dir = tempfile::tempdir().unwrap();
    let out = gt2(&["fit", "--bundled-covid", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(&dir.path().join("report.json"));
    let alpha = report["results"]["fit"]["estimate"]["alpha"].as_f64().unwrap();
    let beta = report["results"]["fit"]["estimate"]["beta"].as_f64().unwrap();
    assert!((alpha - 2.0130).abs() / 2.0130 < 0.005, "alpha {alpha}");
    assert!((beta - 82.7737).abs() / 82.7737 < 0.005, "beta {beta}");
    assert_eq!(report["config"]["count"], 90);
    assert_eq!(report["command"], "fit");
}

#[test]
fn unknown_command_exits_2_with_usage() {
    let out = gt2(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.to_lowercase().contains("usage") || err.contains("Usage"), "{err}");
}

#[test]
fn missing_input_exits_2() {
    let out = gt2(&["fit"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn parse_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "a,b\n").unwrap();
    let out = gt2(&["fit", "--input", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));

    let empty = dir.path().join("empty.csv");
    std::fs::write(&empty, "").unwrap();
    let out = gt2(&["fit", "--input", empty.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let missing = dir.path().join("nope.csv");
    let out = gt2(&["fit", "--input", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn seeded_reports_are_byte_identical() {
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    let run = |dir: &Path| {
        let out = gt2(&[
            "bayes",
            "--bundled-covid",
            "--n", "90",
            "--m", "40",
            "--T", "15",
            "--removals", "0*39,50",
            "--seed", "11",
            "--chain", "2000",
            "--prior", "3,2,3,4",
            "--out", dir.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        std::fs::read(dir.join("report.json")).unwrap()
    };
    assert_eq!(run(d1.path()), run(d2.path()));
}

#[test]
fn censor_applies_run_length_removals() {
    let dir = tempfile::tempdir().unwrap();
    let out = gt2(&[
        "censor",
        "--bundled-covid",
        "--m", "40",
        "--T", "15",
        "--removals", "0*39,50",
        "--out", dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let lines: Vec<String> = std::fs::read_to_string(dir.path().join("censored.csv"))
        .unwrap()
        .lines()
        .map(String::from)
        .collect();
    assert_eq!(lines.len(), 41); // header + 40 observations
    let report = read_json(&dir.path().join("report.json"));
    assert_eq!(report["results"]["sample"]["n"], 90);
    assert_eq!(report["results"]["sample"]["m"], 40);

    // Without a plan the command must refuse.
    let out = gt2(&["censor", "--bundled-covid"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gof_emits_comparator_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = gt2(&[
        "gof",
        "--bundled-covid",
        "--boot-b", "200",
        "--comparator", "BurrIII:2.0256,85.8196",
        "--out", dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("gof.csv")).unwrap();
    assert!(csv.starts_with("model,p1,p2,neg_loglik,aic,bic,cvm,ad,p_value"));
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.contains("BurrIII"));
    let report = read_json(&dir.path().join("report.json"));
    let models = report["results"]["models"].as_array().unwrap();
    let nll = models[1]["neg_loglik"].as_f64().unwrap();
    assert!((nll - 300.7166).abs() < 1e-3);
}

#[test]
fn plotdata_writes_all_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = gt2(&["plotdata", "--bundled-covid", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for file in ["ecdf.csv", "qq.csv", "boxplot.csv", "ttt.csv", "profile_alpha.csv", "profile_beta.csv"] {
        assert!(dir.path().join(file).exists(), "{file} missing");
    }
    let ttt = std::fs::read_to_string(dir.path().join("ttt.csv")).unwrap();
    let last = ttt.lines().last().unwrap();
    assert!(last.ends_with("1.00000000"), "TTT last row: {last}");
}

#[test]
fn simulate_runs_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("campaign.toml");
    std::fs::write(
        &config,
        r#"
[campaign]
replications = 2
chain_length = 500
bootstrap_b = 100
gamma = 0.05
master_seed = 3
interval_methods = []

[campaign.truth]
alpha = 1.5
beta = 0.75

[[campaign.plans]]
n = 20
m = 10
threshold = 1.5
scheme = 1

[campaign.estimators]
mle = true
mps = false
self_loss = false
linex_p = []
gelf_q = []

[campaign.prior]
a = 3.0
b = 2.0
c = 3.0
d = 4.0
"#,
    )
    .unwrap();
    let out = gt2(&[
        "simulate",
        "--config", config.to_str().unwrap(),
        "--out", dir.path().join("res").to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = std::fs::read_to_string(dir.path().join("res/summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 2); // header + one (plan, estimator) row
    assert!(summary.lines().nth(1).unwrap().starts_with("20,10,scheme-1,1.5,MLE"));

    // replications=1 gives a single-row summary as well.
    let out = gt2(&[
        "simulate",
        "--config", config.to_str().unwrap(),
        "--reps", "1",
        "--out", dir.path().join("res1").to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let results = read_json(&dir.path().join("res1/results.json"));
    assert_eq!(results["results"]["campaign"]["replications"], 1);

    // Missing campaign section is a configuration error.
    let bare = dir.path().join("bare.toml");
    std::fs::write(&bare, "seed = 1\n").unwrap();
    let out = gt2(&["simulate", "--config", bare.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.toml");
    std::fs::write(&config, "bundled_covid = true\nseed = 5\n").unwrap();
    let out_dir = dir.path().join("o");
    let out = gt2(&[
        "fit",
        "--config", config.to_str().unwrap(),
        "--seed", "9",
        "--out", out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(&out_dir.join("report.json"));
    assert_eq!(report["config"]["seed"], 9);
    assert_eq!(report["config"]["input"], "bundled-covid");
}
