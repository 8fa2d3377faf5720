use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn agrorec(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_agrorec"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let o = agrorec(dir, args);
    assert!(o.status.success(), "{args:?} failed: {}", stderr(&o));
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn pipeline_from_synthetic_sources_to_recommendation() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    fs::write(dir.join("fast.toml"), "[rf]\nn_trees = 10\n[protocol]\nfolds = 3\n").unwrap();

    ok(dir, &["synth", "--rows", "300", "--seed", "3", "--out", "syn.csv"]);
    assert!(dir.join("syn_env.csv").is_file() && dir.join("syn_econ.csv").is_file());

    ok(
        dir,
        &["ingest", "--env", "syn_env.csv", "--econ", "syn_econ.csv", "--out", "ing"],
    );
    let log = fs::read_to_string(dir.join("ing/cleaning_log.tsv")).unwrap();
    assert!(log.starts_with("config-hash\t"));

    ok(dir, &["eda", "--data", "ing/cleaned.csv", "--out", "eda"]);
    assert!(dir.join("eda/vif.csv").is_file() && dir.join("eda/correlation.csv").is_file());

    let eval = [
        "--config",
        "fast.toml",
        "evaluate",
        "--data",
        "ing/cleaned.csv",
        "--model",
        "rf",
        "--out",
        "rep",
    ];
    ok(dir, &eval);
    for a in 1..=3 {
        assert!(dir.join(format!("rep/report_a{a}_rf.json")).is_file());
        assert!(dir.join(format!("rep/report_a{a}_rf.txt")).is_file());
    }
    let first = fs::read(dir.join("rep/report_a2_rf.json")).unwrap();
    ok(dir, &eval);
    assert_eq!(
        first,
        fs::read(dir.join("rep/report_a2_rf.json")).unwrap(),
        "reports must be reproducible"
    );

    let table = ok(dir, &["report", "--in", "rep"]);
    assert!(table.lines().count() >= 4, "{table}");

    ok(
        dir,
        &[
            "--config",
            "fast.toml",
            "train",
            "--data",
            "ing/cleaned.csv",
            "--out",
            "m.model",
        ],
    );
    let csv = fs::read_to_string(dir.join("ing/cleaned.csv")).unwrap();
    let mut lines = csv.lines();
    let record = format!("{}\n{}\n", lines.next().unwrap(), lines.next().unwrap());
    fs::write(dir.join("row.csv"), record).unwrap();
    let out = ok(
        dir,
        &["recommend", "--model", "m.model", "--input", "row.csv", "--out", "recs.csv"],
    );
    assert!(out.lines().next().unwrap().trim_start().starts_with("1 "));
    let recs = fs::read_to_string(dir.join("recs.csv")).unwrap();
    let total: f64 = recs
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().parse::<f64>().unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-9);
}

#[test]
fn errors_are_one_line_with_kind_and_exit_code() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();

    let o = agrorec(dir, &["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error: kind=UnknownCommand"), "{}", stderr(&o));

    let o = agrorec(dir, &["eda", "--data", "missing.csv"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error: kind=MissingFile"), "{}", stderr(&o));

    fs::write(dir.join("bad.toml"), "[rf]\ntrees = 3\n").unwrap();
    let o = agrorec(dir, &["--config", "bad.toml", "report", "--in", "."]);
    assert_eq!(o.status.code(), Some(1));
    assert!(
        stderr(&o).starts_with("error: kind=ConfigInvalid key=rf.trees"),
        "{}",
        stderr(&o)
    );

    ok(dir, &["synth", "--rows", "120", "--out", "s.csv"]);
    fs::write(dir.join("wide.toml"), "[rf]\nmtry = 999\n").unwrap();
    let o = agrorec(
        dir,
        &["--config", "wide.toml", "train", "--data", "s.csv", "--out", "m.model"],
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(
        stderr(&o).starts_with("error: kind=ConfigInvalid key=rf.mtry"),
        "{}",
        stderr(&o)
    );

    fs::write(dir.join("small.toml"), "[rf]\nn_trees = 3\n").unwrap();
    ok(
        dir,
        &["--config", "small.toml", "train", "--data", "s.csv", "--out", "m.model"],
    );
    let o = agrorec(dir, &["recommend", "--model", "m.model", "--input", "temperature=25"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(
        err.starts_with("error: kind=IncompleteInput") && err.contains("humidity"),
        "{err}"
    );
    assert_eq!(err.lines().count(), 1);
}
