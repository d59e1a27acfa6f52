use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use floodopt::model::{CityDesign, DesignFile};
use floodopt::report::render::parse_trait_grids;
use floodopt::run::RunReport;

fn floodopt(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_floodopt"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn ga_run_writes_report_trace_grids_and_meta() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("cfg.json"),
        r#"{"ga": {"population_size": 20, "generations": 10}}"#,
    )
    .unwrap();
    let o = floodopt(
        &[
            "ga",
            "--config",
            "cfg.json",
            "--seed",
            "4",
            "--out",
            "out/ga.json",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{o:?}");
    let out = dir.path().join("out");
    let report: RunReport =
        serde_json::from_str(&fs::read_to_string(out.join("ga.json")).unwrap()).unwrap();
    assert_eq!(report.seed, 4);
    assert_eq!(report.evaluations, 20 * 11);
    assert_eq!(report.trace.len(), 11);
    let csv = fs::read_to_string(out.join("ga.trace.csv")).unwrap();
    assert_eq!(csv.lines().count(), 12);
    let grids = fs::read_to_string(out.join("ga.grids.txt")).unwrap();
    assert_eq!(parse_trait_grids(&grids).unwrap(), report.best_design);
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("ga.meta.json")).unwrap()).unwrap();
    assert!(meta["wall_time_seconds"].is_number());
}

#[test]
fn output_options_suppress_side_files() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("cfg.json"),
        r#"{"grid": {"n": 3}, "output": {"trace_csv": false, "render_grids": false}}"#,
    )
    .unwrap();
    let o = floodopt(
        &["sa", "--config", "cfg.json", "--out", "sa.json"],
        dir.path(),
    );
    assert!(o.status.success(), "{o:?}");
    assert!(dir.path().join("sa.json").exists());
    assert!(!dir.path().join("sa.trace.csv").exists());
    assert!(!dir.path().join("sa.grids.txt").exists());
}

#[test]
fn oracle_then_render_and_floodplain() {
    let dir = tempfile::tempdir().unwrap();
    let o = floodopt(&["oracle", "--out", "opt.json"], dir.path());
    assert!(o.status.success());
    assert_eq!(stdout(&o), "exact optimum 1256.94\n");
    let opt: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("opt.json")).unwrap()).unwrap();
    assert_eq!(opt["total"], 1256.9447962823285);

    let o = floodopt(
        &["render", "--design", "opt.json", "--trait", "poverty"],
        dir.path(),
    );
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("(D) "));
    assert_eq!(text.matches("legend:").count(), 1);

    let o = floodopt(&["floodplain", "--design", "opt.json"], dir.path());
    assert!(o.status.success());
    assert!(stdout(&o).contains("floodplain 6 cells"));
}

#[test]
fn bare_design_files_render() {
    let dir = tempfile::tempdir().unwrap();
    let design = CityDesign::zeros(2).unwrap();
    fs::write(
        dir.path().join("d.json"),
        serde_json::to_string(&DesignFile::from(design.clone())).unwrap(),
    )
    .unwrap();
    let o = floodopt(&["render", "--design", "d.json", "--no-legend"], dir.path());
    assert!(o.status.success(), "{o:?}");
    assert_eq!(parse_trait_grids(&stdout(&o)).unwrap(), design);
}

#[test]
fn compare_writes_summary_files() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("cfg.json"),
        r#"{"grid": {"n": 3}, "ga": {"population_size": 20, "generations": 20}}"#,
    )
    .unwrap();
    let o = floodopt(
        &[
            "compare", "--config", "cfg.json", "--seeds", "1,2", "--out", "cmp",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{o:?}");
    for f in ["summary.json", "runs.csv", "report.txt", "meta.json"] {
        assert!(dir.path().join("cmp").join(f).exists(), "{f}");
    }
    let csv = fs::read_to_string(dir.path().join("cmp/runs.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn show_config_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let o = floodopt(&["show-config"], dir.path());
    assert!(o.status.success());
    fs::write(dir.path().join("full.json"), stdout(&o)).unwrap();
    let again = floodopt(&["show-config", "--config", "full.json"], dir.path());
    assert_eq!(stdout(&again), stdout(&o));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("bad.json"),
        r#"{"sa": {"cooling_ratio": 1.5}}"#,
    )
    .unwrap();
    let o = floodopt(&["sa", "--config", "bad.json"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("sa.cooling_ratio"));

    let o = floodopt(&["ga", "--config", "missing.json"], dir.path());
    assert_eq!(o.status.code(), Some(2));

    fs::write(
        dir.path().join("d.json"),
        r#"{"n": 2, "cells": [[[0,0,0,0,0,0,9]]]}"#,
    )
    .unwrap();
    let o = floodopt(&["render", "--design", "d.json"], dir.path());
    assert_eq!(o.status.code(), Some(2));

    let o = floodopt(&["compare", "--out", "x"], dir.path());
    assert_eq!(o.status.code(), Some(2));

    // The output path is a directory, so writing the report fails.
    fs::create_dir(dir.path().join("taken.json")).unwrap();
    fs::write(dir.path().join("small.json"), r#"{"grid": {"n": 2}}"#).unwrap();
    let o = floodopt(
        &["oracle", "--config", "small.json", "--out", "taken.json"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(3));
}
