mod common;

use std::path::Path;
use std::process::Command;

use regex::Regex;
use serde_json::Value;
use wavectl::cli::{run_cli, EXIT_CONFIG, EXIT_OK};
use wavectl::config::ExperimentConfig;
use wavectl::report::{ITERATE_HEADER, SUMMARY_SCHEMA};

use common::*;

fn wavectl(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_wavectl")).args(args).output().unwrap()
}

fn edited_preset(dir: &Path, name: &str, edit: impl FnOnce(&mut Value)) -> String {
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(preset(name)).unwrap()).unwrap();
    edit(&mut v);
    let path = dir.join(format!("{name}-edited.json"));
    std::fs::write(&path, serde_json::to_string_pretty(&v).unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

fn run_in(out: &Path, config: &Path, command: &str) -> i32 {
    run_cli(["wavectl", command, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()])
}

/// Checks `value` against the keywords used by the bundled schema:
/// type, const, enum, pattern, minimum, minItems, required, properties,
/// additionalProperties = false, items, oneOf and local `$ref`.
fn validate(schema: &Value, root: &Value, value: &Value, path: &str) -> Vec<String> {
    let mut errs = Vec::new();
    if let Some(r) = schema.get("$ref").and_then(Value::as_str) {
        let target = r.trim_start_matches("#/").split('/').fold(root, |s, key| &s[key]);
        return validate(target, root, value, path);
    }
    if let Some(types) = schema.get("type") {
        let allowed: Vec<&str> = match types {
            Value::String(s) => vec![s.as_str()],
            Value::Array(a) => a.iter().filter_map(Value::as_str).collect(),
            _ => vec![],
        };
        let ok = allowed.iter().any(|t| match *t {
            "object" => value.is_object(),
            "array" => value.is_array(),
            "string" => value.is_string(),
            "boolean" => value.is_boolean(),
            "null" => value.is_null(),
            "number" => value.is_number(),
            "integer" => value.is_u64() || value.is_i64(),
            _ => false,
        });
        if !ok {
            errs.push(format!("{path}: expected {allowed:?}, got {value}"));
            return errs;
        }
    }
    if let Some(c) = schema.get("const") {
        if c != value {
            errs.push(format!("{path}: expected const {c}"));
        }
    }
    if let Some(Value::Array(options)) = schema.get("enum") {
        if !options.contains(value) {
            errs.push(format!("{path}: {value} not in enum"));
        }
    }
    if let (Some(p), Some(s)) = (schema.get("pattern").and_then(Value::as_str), value.as_str()) {
        if !Regex::new(p).unwrap().is_match(s) {
            errs.push(format!("{path}: {s:?} does not match {p}"));
        }
    }
    if let (Some(m), Some(x)) = (schema.get("minimum").and_then(Value::as_f64), value.as_f64()) {
        if x < m {
            errs.push(format!("{path}: {x} < {m}"));
        }
    }
    if let Some(Value::Array(options)) = schema.get("oneOf") {
        let passing = options.iter().filter(|s| validate(s, root, value, path).is_empty()).count();
        if passing != 1 {
            errs.push(format!("{path}: {passing} oneOf branches match"));
        }
    }
    if let Value::Object(obj) = value {
        for key in schema.get("required").and_then(Value::as_array).into_iter().flatten() {
            if !obj.contains_key(key.as_str().unwrap()) {
                errs.push(format!("{path}: missing {key}"));
            }
        }
        let props = schema.get("properties").and_then(Value::as_object);
        for (key, v) in obj {
            match props.and_then(|p| p.get(key)) {
                Some(sub) => errs.extend(validate(sub, root, v, &format!("{path}.{key}"))),
                None if schema.get("additionalProperties") == Some(&Value::Bool(false)) => {
                    errs.push(format!("{path}: unexpected key {key}"))
                }
                None => {}
            }
        }
    }
    if let Value::Array(items) = value {
        if let Some(m) = schema.get("minItems").and_then(Value::as_u64) {
            if (items.len() as u64) < m {
                errs.push(format!("{path}: fewer than {m} items"));
            }
        }
        if let Some(sub) = schema.get("items") {
            for (i, v) in items.iter().enumerate() {
                errs.extend(validate(sub, root, v, &format!("{path}[{i}]")));
            }
        }
    }
    errs
}

fn schema_errors(summary: &Value) -> Vec<String> {
    let schema: Value = serde_json::from_str(SUMMARY_SCHEMA).unwrap();
    validate(&schema, &schema, summary, "$")
}

#[test]
fn schema_validator_rejects_bad_documents() {
    let good = serde_json::json!({
        "schema_version": 1,
        "config_hash": "a".repeat(64),
        "scenario_id": "x",
        "e_scale": 1.0,
        "geometry": null,
        "methods": [{
            "method": "picard", "status": "diverged", "iterations": 3, "initial_e": 1.0,
            "final_e": null, "final_sqrt_2e": null, "order": null, "order_fit_residual": null, "wall_time": 0.5
        }]
    });
    assert!(schema_errors(&good).is_empty(), "{:?}", schema_errors(&good));
    let mut bad = good.clone();
    bad["config_hash"] = Value::from("XYZ");
    bad["extra"] = Value::from(1);
    bad["methods"][0]["status"] = Value::from("fine");
    bad["geometry"] = serde_json::json!({"holds": true});
    assert_eq!(schema_errors(&bad).len(), 4, "{:?}", schema_errors(&bad));
}

#[test]
fn linear_sanity_run_succeeds_and_writes_valid_outputs() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run_in(dir.path(), &preset("linear_sanity"), "run"), EXIT_OK);

    let summary: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert!(schema_errors(&summary).is_empty(), "{:?}", schema_errors(&summary));
    let config = ExperimentConfig::load(&preset("linear_sanity")).unwrap();
    assert_eq!(summary["config_hash"], Value::from(config.hash()));
    let e_scale = summary["e_scale"].as_f64().unwrap();
    let final_e = summary["methods"][0]["final_e"].as_f64().unwrap();
    assert!(final_e <= 1e-16 * e_scale, "E_final {final_e:e}, scale {e_scale:e}");
    assert_eq!(summary["geometry"]["holds"], Value::Bool(true));

    let mut reader = csv::Reader::from_path(dir.path().join("iterates.csv")).unwrap();
    assert_eq!(reader.headers().unwrap().iter().collect::<Vec<_>>(), ITERATE_HEADER);
    for row in reader.records() {
        assert_eq!(&row.unwrap()[0], config.hash());
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert_eq!(run_in(a.path(), &preset("linear_forced"), "run"), EXIT_OK);
    assert_eq!(run_in(b.path(), &preset("linear_forced"), "run"), EXIT_OK);
    let read = |d: &Path| std::fs::read(d.join("iterates.csv")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
}

#[test]
fn negative_horizon_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = edited_preset(dir.path(), "linear_sanity", |v| v["scenario"]["T"] = Value::from(-1.0));
    let out = wavectl(&["run", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(EXIT_CONFIG));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("T"), "{stderr}");
    assert!(!dir.path().join("summary.json").exists());
}

#[test]
fn empty_sweep_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = edited_preset(dir.path(), "sweep_resolution", |v| v["sweep"]["values"] = Value::Array(vec![]));
    let out = wavectl(&["sweep", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(EXIT_CONFIG));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sweep"));
}

#[test]
fn unknown_keys_and_missing_files_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = edited_preset(dir.path(), "linear_sanity", |v| v["scenario"]["colour"] = Value::from("red"));
    let out = wavectl(&["check", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(EXIT_CONFIG));
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));
    let missing = wavectl(&["check", "--config", "/nonexistent/config.json"]);
    assert_eq!(missing.status.code(), Some(EXIT_CONFIG));
    assert_eq!(wavectl(&["frobnicate"]).status.code(), Some(EXIT_CONFIG));
}

#[test]
fn check_reports_the_geometric_condition() {
    let holds = wavectl(&["check", "--config", preset("geometry_holds").to_str().unwrap()]);
    assert_eq!(holds.status.code(), Some(EXIT_OK));
    let text = String::from_utf8_lossy(&holds.stdout);
    assert!(text.contains("(H0) holds"), "{text}");
    assert!(text.contains("T_min = 2.2"), "{text}");
    let fails = wavectl(&["check", "--config", preset("geometry_fails").to_str().unwrap()]);
    assert_eq!(fails.status.code(), Some(EXIT_OK));
    assert!(String::from_utf8_lossy(&fails.stdout).contains("(H0) fails"));
}

#[test]
fn sweep_writes_one_row_per_point_and_method() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = edited_preset(dir.path(), "sweep_resolution", |v| {
        v["sweep"]["values"] = serde_json::json!([30, 60]);
        v["scenario"]["nodes"] = serde_json::json!([60]);
        v["scenario"]["nt"] = Value::from(180);
    });
    let code = run_cli(["wavectl", "sweep", "--config", &cfg, "--out", dir.path().to_str().unwrap(), "--threads", "2"]);
    assert_eq!(code, EXIT_OK);
    let mut reader = csv::Reader::from_path(dir.path().join("sweep.csv")).unwrap();
    let values: Vec<String> = reader.records().map(|r| r.unwrap()[2].to_string()).collect();
    assert_eq!(values, ["30.0", "60.0"]);
}
