//! The binary's stable surface: exit codes (0 ok, 1 usage, 2 caps and gates,
//! 3 verification failures) and byte-replayable reports.

use std::process::Command;

fn edt() -> Command {
    Command::new(env!("CARGO_BIN_EXE_edt"))
}

fn write_tmp(name: &str, content: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join("edt-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path
}

#[test]
fn analyze_ok_and_replayable() {
    let f = write_tmp("digon.el", "a b\nb a\n");
    let out1 = edt().args(["analyze"]).arg(&f).output().unwrap();
    assert!(out1.status.success());
    let out2 = edt().args(["analyze"]).arg(&f).output().unwrap();
    let v1: serde_json::Value = serde_json::from_slice(&out1.stdout).unwrap();
    let v2: serde_json::Value = serde_json::from_slice(&out2.stdout).unwrap();
    assert_eq!(v1["payload"], v2["payload"]);
    assert_eq!(v1["payload"]["non_even"], serde_json::json!(true));
}

#[test]
fn usage_error_is_exit_1() {
    let out = edt().args(["analyze", "/nonexistent/file"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn cap_exceeded_is_exit_2() {
    let bicycle = edt::evenness::odd_bicycle(3).unwrap().to_edge_list();
    let f = write_tmp("bicycle.el", &bicycle);
    let out = edt()
        .args(["--dicycle-cap", "2", "analyze"])
        .arg(&f)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verification_failure_is_exit_3() {
    let g = write_tmp("digon2.el", "a b\nb a\n");
    let dec = write_tmp(
        "bad-dec.json",
        r#"{"schema":"edt-dtd-v1","nodes":[{"id":0,"parent":null,"bag":["a","b"],"guard":[],"alpha":[]}]}"#,
    );
    let out = edt()
        .args(["extract"])
        .arg(&g)
        .arg(&dec)
        .args(["--k", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn generate_json_format() {
    let out = edt()
        .args(["generate", "oddbicycle", "3", "--format", "json"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["vertices"].as_array().unwrap().len(), 3);
    assert_eq!(v["edges"].as_array().unwrap().len(), 6);
}

#[test]
fn generate_writes_sidecar() {
    let dir = std::env::temp_dir().join("edt-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let out_path = dir.join("wall3.el");
    let out = edt()
        .args(["generate", "wall", "3", "--out"])
        .arg(&out_path)
        .output()
        .unwrap();
    assert!(out.status.success());
    let body = std::fs::read_to_string(&out_path).unwrap();
    let d = edt::digraph::parse_edge_list(&body).unwrap();
    assert_eq!((d.n(), d.m()), (72, 96));
    let sidecar: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("wall3.el.json")).unwrap()).unwrap();
    assert_eq!(sidecar["order"], serde_json::json!(3));
}
