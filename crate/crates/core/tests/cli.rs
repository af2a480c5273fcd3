//! End-to-end runs of the `soblab` binary: output shape and exit codes.

use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn soblab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_soblab")).args(args).output().expect("spawn soblab")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

#[test]
fn classify_subcritical_pair() {
    let out = soblab(&["classify", "--dim", "2", "--source", "1/2,2", "--target", "0,4"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["continuous"], "yes");
    assert_eq!(v["compact"], "not-applicable");
    assert_eq!(v["regime"], "subcritical");
    assert_eq!(v["justification"], "Thm-1.1");
    assert_eq!(v["boundary_flags"], serde_json::json!(["target-p-max"]));
}

#[test]
fn classify_failure_names_optimality() {
    let out = soblab(&["classify", "--dim", "2", "--source", "1/2,2", "--target", "0,5"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["continuous"], "no");
    assert_eq!(v["continuous_tag"], "Lemma-2.4");
    assert_eq!(v["optimality"], "Prop-2.8");
}

#[test]
fn classify_compact_mode_on_bounded_domain() {
    let out = soblab(&[
        "classify", "--dim", "1", "--source", "1/2,2", "--target", "1/4,2", "--domain", "bounded", "--mode", "compact",
    ]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["continuous"], "yes");
    assert_eq!(v["compact"], "yes");
    assert_eq!(v["justification"], v["compact_tag"]);
}

#[test]
fn usage_errors_exit_2() {
    let cases: &[&[&str]] = &[
        &[],
        &["classify", "--dim", "1", "--source", "1/2", "--target", "0,2"],
        &["classify", "--dim", "1", "--source", "1/2,2", "--target", "0,2", "--domain", "torus"],
        &["classify", "--dim", "1", "--source", "1/2,2", "--target", "0,2", "--mode", "sideways"],
        &["norm", "--dim", "1", "--s", "1/2", "--p", "2", "--fn", "tent", "--tol", "1e-30"],
        &["norm", "--dim", "2", "--s", "1/2", "--p", "2", "--fn", "tent"],
        &["frobnicate"],
    ];
    for args in cases {
        let out = soblab(args);
        assert_eq!(code(&out), 2, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn help_and_version_exit_0() {
    for args in [&["--help"][..], &["--version"], &["classify", "--help"]] {
        let out = soblab(args);
        assert_eq!(code(&out), 0, "{args:?}");
        assert!(!out.stdout.is_empty());
    }
}

#[test]
fn index_outside_hypotheses_exits_3() {
    for args in [
        &["classify", "--dim", "2", "--source", "3/2,2", "--target", "0,2"][..],
        &["classify", "--dim", "2", "--source", "1/2,1/2", "--target", "0,2"],
    ] {
        let out = soblab(args);
        assert_eq!(code(&out), 3, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(String::from_utf8_lossy(&out.stderr).contains("1 <= p <= inf"));
    }
}

#[test]
fn unknown_label_exits_4() {
    let out = soblab(&["norm", "--dim", "1", "--s", "1/2", "--p", "2", "--fn", "nope"]);
    assert_eq!(code(&out), 4);
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope"));
}

#[test]
fn failed_experiment_exits_5() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("strict.cfg");
    fs::write(&cfg, "tol.slope = 1e-9\n").unwrap();
    let out = soblab(&[
        "--config",
        cfg.to_str().unwrap(),
        "counterexample",
        "--dim",
        "1",
        "--source",
        "1/2,2",
        "--target",
        "1/4,8",
    ]);
    assert_eq!(code(&out), 5, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["pass"], false);
}

#[test]
fn bad_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    for (i, text) in ["bogus = 1\n", "tol.quadrature = 1\n", "seed = -3\n", "formats = csv, gif\n"].iter().enumerate() {
        let cfg = dir.path().join(format!("bad{i}.cfg"));
        fs::write(&cfg, text).unwrap();
        let out = soblab(&["--config", cfg.to_str().unwrap(), "classify", "--dim", "1", "--source", "1/2,2", "--target", "0,2"]);
        assert_eq!(code(&out), 2, "{text:?}");
    }
    let missing = dir.path().join("absent.cfg");
    let out = soblab(&["--config", missing.to_str().unwrap(), "classify", "--dim", "1", "--source", "1/2,2", "--target", "0,2"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn bad_thread_count_exits_2() {
    let out = Command::new(env!("CARGO_BIN_EXE_soblab"))
        .args(["classify", "--dim", "1", "--source", "1/2,2", "--target", "0,2"])
        .env("SOBLAB_THREADS", "x")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn region_writes_grid_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = soblab(&["region", "--dim", "2", "--source", "1/2,2", "--resolution", "2x3", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let stem = dir.path().join("region-N2-1_2-2-rn-continuous");
    let csv = fs::read_to_string(stem.with_extension("csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 7);
    assert!(lines[0].starts_with("s_tilde,inv_p_tilde,p_tilde,continuous"));
    assert!(lines.contains(&"0,1/2,2,yes,not-applicable,Thm-1.1,,false"));
    let svg = fs::read_to_string(stem.with_extension("svg")).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
    let grid: Value = serde_json::from_str(&fs::read_to_string(stem.with_extension("json")).unwrap()).unwrap();
    assert!(grid.is_object());
}

#[test]
fn norm_of_tent() {
    let out = soblab(&["norm", "--dim", "1", "--s", "1", "--p", "2", "--fn", "tent"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let lp = v["lp"]["value"].as_f64().unwrap();
    let full = v["norm"]["value"].as_f64().unwrap();
    assert!((lp - (2.0f64 / 3.0).sqrt()).abs() < 1e-9);
    assert!((full - (8.0f64 / 3.0).sqrt()).abs() < 1e-9);
}

#[test]
fn manifest_label_shadows_builtin() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("corpus.json");
    fs::write(&manifest, r#"[{"label": "tent", "family": "bump", "parameters": {"radius": 2}}]"#).unwrap();
    let out = soblab(&["norm", "--dim", "1", "--s", "0", "--p", "2", "--fn", "tent", "--manifest", manifest.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["function"], "tent");
    let lp = v["lp"]["value"].as_f64().unwrap();
    assert!((lp - (2.0f64 / 3.0).sqrt()).abs() > 0.1, "builtin tent was used: {lp}");
}

#[test]
fn scaling_with_lemma_parameters() {
    let out = soblab(&["scaling", "--source", "1/2,2", "--fn", "bump", "--lemma", "Lemma-2.3"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["pass"], true);
    assert_eq!(v["kind"], "scaling-identity");
}
