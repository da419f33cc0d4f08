mod support;

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Stdio};

use secdec_core::fixtures::BASE_SCENARIO_JSON;
use serde_json::Value;
use support::{parity_cases, secdec, service, stdout};

fn scratch_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("secdec-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn evaluate_json_and_table() {
    let out = secdec(&["evaluate", "--scenario", "@base_scenario"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((v["i_g"].as_f64().unwrap() - 0.017).abs() < 1e-12);
    assert!((v["i_gs"].as_f64().unwrap() - 0.011).abs() < 1e-12);

    let out = secdec(&["evaluate", "--scenario", "@base_scenario", "--format", "table"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let row = text.lines().find(|l| l.starts_with("C1 ")).unwrap();
    assert_eq!(
        row.split_whitespace().take(3).collect::<Vec<_>>(),
        ["C1", "satisfied", "+0.0200"]
    );
    assert_eq!(
        text,
        stdout(&secdec(&[
            "evaluate",
            "--scenario",
            "@base_scenario",
            "--format",
            "table"
        ]))
    );
}

#[test]
fn json_output_matches_the_service() {
    for (args, method, path, body) in parity_cases() {
        let out = secdec(&args);
        assert!(
            out.status.success(),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let (status, served) = service(method, path, &body);
        assert_eq!(status, 200, "{path}: {served}");
        assert_eq!(stdout(&out), served, "{args:?}");
    }
}

#[test]
fn invalid_input_exits_with_1() {
    let dir = scratch_dir("invalid");
    let path = dir.join("bad.json");
    let mut v: Value = serde_json::from_str(BASE_SCENARIO_JSON).unwrap();
    v["fractions"]["s"] = serde_json::json!(1.5);
    std::fs::write(&path, v.to_string()).unwrap();
    let out = secdec(&["evaluate", "--scenario", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("fractions.s"), "{err}");

    assert_eq!(
        secdec(&["evaluate", "--scenario", "/definitely/not/here.json"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        secdec(&["evaluate", "--scenario", "@no_such_fixture"]).status.code(),
        Some(1)
    );
    assert_eq!(
        secdec(&["sensitivity", "--scenario", "@base_scenario", "--name", "dX(V_s|V_d)"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(secdec(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        secdec(&["optimize", "--scenario", "@base_scenario", "--grid", "1"])
            .status
            .code(),
        Some(1)
    );
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn help_exits_with_0() {
    let out = secdec(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("evaluate"));
}

#[test]
fn fixtures_directory_override() {
    let dir = scratch_dir("fixtures");
    let mut v: Value = serde_json::from_str(BASE_SCENARIO_JSON).unwrap();
    v["rates"]["i_i"] = serde_json::json!(0.09);
    std::fs::write(dir.join("base_scenario.json"), v.to_string()).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_secdec"))
        .args(["evaluate", "--scenario", "@base_scenario"])
        .env("SECDEC_FIXTURES", &dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let r: Value = serde_json::from_str(&stdout(&out)).unwrap();
    // I_g rises one for one with I_i.
    assert!((r["i_g"].as_f64().unwrap() - 0.027).abs() < 1e-12);
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn scenario_from_stdin() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_secdec"))
        .args(["evaluate", "--scenario", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(BASE_SCENARIO_JSON.as_bytes())
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    assert_eq!(
        stdout(&out),
        stdout(&secdec(&["evaluate", "--scenario", "@base_scenario"]))
    );
}

#[test]
fn decide_threshold_override() {
    let out = secdec(&[
        "decide",
        "--scenario",
        "@base_scenario",
        "--weights",
        "@uniform_weights",
        "--threshold",
        "0.05",
    ]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["decision"]["threshold"], 0.05);
    // 2 of 29 conditions hold on BASE without exogenous inputs.
    assert!((v["decision"]["indicator"].as_f64().unwrap() - 2.0 / 29.0).abs() < 1e-15);
    assert_eq!(v["decision"]["recommendation"], "securitize");
    let out = secdec(&[
        "decide",
        "--scenario",
        "@base_scenario",
        "--weights",
        "@uniform_weights",
        "--threshold",
        "1.5",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn volume_scan_overrides() {
    let out = secdec(&[
        "volume",
        "--market",
        "@example_market",
        "--v-min",
        "140",
        "--v-max",
        "150",
        "--step",
        "0.5",
    ]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["scan"]["grid_points"], 21);
    let i = &v["scan"]["intervals"][0];
    assert_eq!(i["lo"], 140.0);
    assert_eq!(i["hi"], 148.0);
    let out = secdec(&["volume", "--market", "@constant_market", "--format", "table"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("no feasible volume"), "{}", stdout(&out));
}
