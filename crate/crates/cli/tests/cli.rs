//! End-to-end tests of the `bframe` binary: exit codes, JSON schemas,
//! and the build-then-check round trip.

use std::path::Path;
use std::process::{Command, Output};

fn bframe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bframe"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&out.stdout);
    serde_json::from_str(text.trim()).unwrap_or_else(|e| panic!("bad JSON ({e}): {text}"))
}

fn write_frame(dir: &Path, name: &str, json: &serde_json::Value) -> String {
    let path = dir.join(name);
    std::fs::write(&path, json.to_string()).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn build_then_check_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = bframe(&["build", "roots-of-unity", "5"]);
    assert!(out.status.success());
    let frame = stdout_json(&out);
    assert_eq!(frame["field"], "real");
    assert_eq!(frame["d"], 2);
    assert_eq!(frame["K"], 5);

    let path = write_frame(dir.path(), "r5.json", &frame);
    let out = bframe(&["check", &path]);
    assert!(out.status.success());
    let report = stdout_json(&out);
    assert_eq!(report["balanced"], true);
    assert_eq!(report["unit_norm"], true);
    assert_eq!(report["tight"]["is_tight"], true);
    let constant = report["tight"]["constant"].as_f64().unwrap();
    assert!((constant - 2.5).abs() < 1e-9);
    assert_eq!(report["equivalences"]["consistent"], true);
    // schema stability: the same keys on a very different frame
    let out2 = bframe(&["build", "simplex", "3"]);
    let path2 = write_frame(dir.path(), "s3.json", &stdout_json(&out2));
    let report2 = stdout_json(&bframe(&["check", &path2]));
    let keys =
        |v: &serde_json::Value| -> Vec<String> { v.as_object().unwrap().keys().cloned().collect() };
    assert_eq!(keys(&report), keys(&report2));
    assert_eq!(report2["simplex"], true);
    assert_eq!(report2["parseval"], true);
}

#[test]
fn builders_cover_the_families() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["build", "harmonic", "4", "--rows", "1,2"],
        vec!["build", "hadamard", "4", "--rows", "1,2"],
        vec!["build", "cross", "3"],
        vec!["build", "partition", "1,2,2"],
        vec!["build", "simplex", "2"],
    ] {
        let out = bframe(&args);
        assert!(out.status.success(), "{args:?}: {:?}", out);
        stdout_json(&out);
    }

    // combination builders take frame files
    let roots = stdout_json(&bframe(&["build", "roots-of-unity", "3"]));
    let a = write_frame(dir.path(), "a.json", &roots);
    let out = bframe(&["build", "sum", &a, &a]);
    assert!(out.status.success());
    let sum = stdout_json(&out);
    assert_eq!(sum["K"], 9);
    assert_eq!(sum["d"], 4);

    // a report wraps frame and checklist
    let out = bframe(&["build", "--report", "lift-antipodal", &a]);
    assert!(out.status.success());
    let report = stdout_json(&out);
    assert_eq!(report["all_hypotheses_pass"], true);
    assert_eq!(report["claim"], "balanced unit-norm tight frame");
    assert!(report["checks"].as_array().unwrap().len() >= 3);

    // failed hypotheses error by default, pass with --unchecked
    let roots4 = stdout_json(&bframe(&["build", "roots-of-unity", "4"]));
    let b = write_frame(dir.path(), "b.json", &roots4);
    let out = bframe(&["build", "disjoint-union", &a, &b]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["code"], "hypotheses_failed");
    let out = bframe(&["build", "--unchecked", "disjoint-union", &a, &b]);
    assert!(out.status.success());
    let wrapped = stdout_json(&out);
    assert_eq!(wrapped["all_hypotheses_pass"], false);
    assert_eq!(wrapped["frame"]["K"], 7);
}

#[test]
fn dual_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let roots = stdout_json(&bframe(&["build", "roots-of-unity", "4"]));
    let path = write_frame(dir.path(), "r4.json", &roots);

    // canonical dual of a 2-tight frame is the frame over 2
    let dual = stdout_json(&bframe(&["dual", "canonical", &path]));
    let col = dual["columns"][0].as_array().unwrap();
    assert!((col[0].as_f64().unwrap() - 0.5).abs() < 1e-12);

    // balanced sample echoes the seed
    let out = stdout_json(&bframe(&["dual", "balanced-sample", &path, "--seed", "9"]));
    assert_eq!(out["seed"], 9);
    assert_eq!(out["frame"]["K"], 4);

    // default seed is fixed and reported
    let out = stdout_json(&bframe(&["dual", "balanced-sample", &path]));
    assert_eq!(out["seed"], 42);

    // erasure dual pair
    let out = stdout_json(&bframe(&["dual", "erasure", &path, "--index", "2"]));
    assert_eq!(out["kept_frame"]["K"], 3);
    assert_eq!(out["shifted_dual"]["K"], 3);

    // tight dual of a K <= 2d Parseval frame is itself
    let simplex = stdout_json(&bframe(&["build", "simplex", "2"]));
    let spath = write_frame(dir.path(), "s2.json", &simplex);
    let out = stdout_json(&bframe(&["dual", "tight", &spath, "--rho", "1.5"]));
    assert_eq!(out["unique_self"], true);

    // complements
    let partition = stdout_json(&bframe(&["build", "partition", "1,2"]));
    let ppath = write_frame(dir.path(), "p12.json", &partition);
    let bc = stdout_json(&bframe(&["complement", &ppath, "--kind", "b"]));
    assert_eq!(bc["d"], 1);
    let classical = stdout_json(&bframe(&["dual", "complement", &ppath]));
    assert_eq!(classical["d"], 2); // K - d = 3 - 1
}

#[test]
fn nearest_reports() {
    let dir = tempfile::tempdir().unwrap();
    let f = serde_json::json!({
        "field": "real", "d": 2, "K": 3,
        "columns": [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]],
    });
    let path = write_frame(dir.path(), "f.json", &f);

    let out = stdout_json(&bframe(&["nearest", &path, "--norm", "l2"]));
    assert_eq!(out["exists"], true);
    assert!((out["distance"].as_f64().unwrap() - 8.0 / 3.0).abs() < 1e-12);
    assert_eq!(out["frame"]["K"], 3);

    let out = stdout_json(&bframe(&["nearest", &path, "--norm", "l1"]));
    assert_eq!(out["exists"], true);
    assert!((out["distance"].as_f64().unwrap() - 8f64.sqrt()).abs() < 1e-12);
    assert!(out["weights"].as_array().unwrap().len() == 3);

    // weights file
    let wpath = dir.path().join("w.json");
    std::fs::write(&wpath, "[0.5, 0.25, 0.25]").unwrap();
    let out = stdout_json(&bframe(&[
        "nearest",
        &path,
        "--norm",
        "l1",
        "--weights",
        wpath.to_str().unwrap(),
    ]));
    assert_eq!(out["weights"][0], 0.5);

    // non-existence: the classical complement of a simplex frame
    let simplex = stdout_json(&bframe(&["build", "simplex", "2"]));
    let spath = write_frame(dir.path(), "s.json", &simplex);
    let comp = stdout_json(&bframe(&["dual", "complement", &spath]));
    let cpath = write_frame(dir.path(), "c.json", &comp);
    let out = stdout_json(&bframe(&["nearest", &cpath, "--norm", "l2"]));
    assert_eq!(out["exists"], false);
    assert_eq!(out["reason"], "all_ones_in_analysis_range");
    assert!(out["frame"].is_null());
}

#[test]
fn simulate_reports() {
    let dir = tempfile::tempdir().unwrap();
    let roots = stdout_json(&bframe(&["build", "roots-of-unity", "4"]));
    let path = write_frame(dir.path(), "r4.json", &roots);

    // systematic offsets decode exactly and show up in the sums
    let out = stdout_json(&bframe(&[
        "simulate",
        "--frame",
        &path,
        "--noise",
        "systematic:c=0.5",
        "--seed",
        "3",
    ]));
    assert_eq!(out["seed"], 3);
    assert!(out["report"]["reconstruction_error_l2"].as_f64().unwrap() < 1e-9);
    assert!((out["report"]["coefficient_sum"][0].as_f64().unwrap() - 2.0).abs() < 1e-9);

    // additive noise with an MSE estimate and detector verdict
    let out = stdout_json(&bframe(&[
        "simulate",
        "--frame",
        &path,
        "--noise",
        "additive:mu=0.7,sigma=1,dist=gaussian",
        "--trials",
        "2000",
        "--detector-batches",
        "12",
        "--seed",
        "5",
    ]));
    let mse = out["report"]["empirical_mse"]["mean"].as_f64().unwrap();
    assert!((mse - 0.5).abs() < 0.1, "mse {mse}");
    assert_eq!(out["report"]["detector_verdict"], "random");
    assert_eq!(out["report"]["bound_values"]["all_satisfied"], true);

    // erasure with an explicit signal file
    let sig = dir.path().join("sig.json");
    std::fs::write(&sig, "[0.25, -1.5]").unwrap();
    let out = stdout_json(&bframe(&[
        "simulate",
        "--frame",
        &path,
        "--noise",
        "erasure:1",
        "--signal",
        sig.to_str().unwrap(),
    ]));
    assert!(out["report"]["reconstruction_error_l2"].as_f64().unwrap() < 1e-9);
    assert_eq!(out["signal"][1], -1.5);
}

#[test]
fn exit_codes_and_formats() {
    // domain error: structured JSON, exit 1
    let out = bframe(&["build", "roots-of-unity", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let err = stdout_json(&out);
    assert_eq!(err["code"], "invalid_argument");
    assert_eq!(err["context"]["command"], "build");
    assert!(err["message"].as_str().unwrap().contains("K >= 3"));

    // usage error: exit 2
    let out = bframe(&["nearest"]);
    assert_eq!(out.status.code(), Some(2));
    let out = bframe(&["simulate", "--frame", "x.json", "--noise", "bogus:1"]);
    assert_eq!(out.status.code(), Some(2));

    // csv applies to frames only
    let out = bframe(&["build", "simplex", "2", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("# field=real d=2 K=3"));
    assert_eq!(text.trim().lines().count(), 4);

    let dir = tempfile::tempdir().unwrap();
    let simplex = stdout_json(&bframe(&["build", "simplex", "2"]));
    let path = write_frame(dir.path(), "s.json", &simplex);
    let out = bframe(&["check", &path, "--format", "csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["code"], "invalid_argument");

    // missing file is a domain error
    let out = bframe(&["check", "/nonexistent/frame.json"]);
    assert_eq!(out.status.code(), Some(1));
}
