//! Every JSON artifact the CLI writes validates against its schema in `schemas/`.

use std::fs;
use std::path::Path;
use std::process::Command;

use jsonschema::JSONSchema;
use serde_json::Value;

fn schema(name: &str) -> JSONSchema {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(format!("{name}.schema.json"));
    let value: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    JSONSchema::compile(&value).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn run(args: &[&str]) -> Value {
    let out = Command::new(env!("CARGO_BIN_EXE_soblab")).args(args).output().unwrap();
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn check(name: &str, instance: &Value) {
    let s = schema(name);
    if let Err(errors) = s.validate(instance) {
        let msgs: Vec<String> = errors.map(|e| format!("{} at {}", e, e.instance_path)).collect();
        panic!("{name} schema rejected instance:\n{}\n{instance:#}", msgs.join("\n"));
    };
}

#[test]
fn verdicts() {
    for args in [
        &["classify", "--dim", "2", "--source", "1/2,2", "--target", "0,4"][..],
        &["classify", "--dim", "2", "--source", "1/2,2", "--target", "0,5"],
        &["classify", "--dim", "1", "--source", "1/2,2", "--target", "1/2,2", "--domain", "bounded", "--mode", "compact"],
        &["classify", "--dim", "1", "--source", "9/10,2", "--target", "1/2,inf", "--domain", "bounded"],
    ] {
        check("verdict", &run(args));
    }
}

#[test]
fn norms() {
    for args in [
        &["norm", "--dim", "1", "--s", "1/2", "--p", "2", "--fn", "tent"][..],
        &["norm", "--dim", "1", "--s", "0", "--p", "3", "--fn", "bump"],
        &["norm", "--dim", "1", "--s", "1/2", "--p", "inf", "--fn", "tent"],
        &["norm", "--dim", "1", "--s", "1", "--p", "2", "--fn", "tent", "--domain", "bounded"],
    ] {
        check("norm", &run(args));
    }
}

#[test]
fn experiments() {
    for args in [
        &["scaling", "--source", "1/2,2", "--fn", "bump", "--lemma", "Lemma-2.3"][..],
        &["counterexample", "--dim", "1", "--source", "1/2,2", "--target", "1/4,8"],
        &["interpolate", "--fn", "bump", "--first", "1/4,2", "--second", "3/4,2"],
    ] {
        check("experiment", &run(args));
    }
}

#[test]
fn region_grid() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    run_quiet(&["region", "--dim", "2", "--source", "1/2,2", "--resolution", "3x3", "--out", d]);
    run_quiet(&["region", "--dim", "1", "--source", "9/10,2", "--domain", "bounded", "--mode", "compact", "--resolution", "4x2", "--out", d]);
    let mut seen = 0;
    for entry in fs::read_dir(dir.path()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "json") {
            let v: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
            check("region", &v);
            seen += 1;
        }
    }
    assert_eq!(seen, 2);
}

fn run_quiet(args: &[&str]) {
    let out = Command::new(env!("CARGO_BIN_EXE_soblab")).args(args).output().unwrap();
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn schemas_reject_foreign_fields() {
    let mut v = run(&["classify", "--dim", "2", "--source", "1/2,2", "--target", "0,4"]);
    v["extra"] = Value::Bool(true);
    assert!(!schema("verdict").is_valid(&v));
    let mut v = run(&["classify", "--dim", "2", "--source", "1/2,2", "--target", "0,4"]);
    v["continuous"] = Value::String("maybe".into());
    assert!(!schema("verdict").is_valid(&v));
}

#[test]
fn report_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_soblab")).arg("report").arg("--out").arg(dir.path()).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let (experiment, region) = (schema("experiment"), schema("region"));
    let (mut experiments, mut regions) = (0, 0);
    for entry in fs::read_dir(dir.path()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_none_or(|e| e != "json") {
            continue;
        }
        let v: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        let is_region = path.file_name().unwrap().to_string_lossy().starts_with("region-");
        let s = if is_region { &region } else { &experiment };
        assert!(s.is_valid(&v), "{} does not match its schema", path.display());
        if is_region {
            regions += 1;
        } else {
            experiments += 1;
        }
    }
    assert_eq!(regions, 5);
    assert!(experiments >= 30, "{experiments}");
}
