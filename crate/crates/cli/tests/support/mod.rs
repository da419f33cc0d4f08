#![allow(dead_code)]

use std::process::{Command, Output};

use axum::body::Body;
use axum::http::Request;
use http_body_util::BodyExt;
use tower::ServiceExt;

pub fn secdec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_secdec"))
        .args(args)
        .env_remove("SECDEC_FIXTURES")
        .output()
        .expect("binary runs")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Status and body of one request against a fresh router.
pub fn service(method: &str, path: &str, body: &str) -> (u16, String) {
    let runtime = tokio::runtime::Builder::new_current_thread()
        .enable_all()
        .build()
        .unwrap();
    runtime.block_on(async {
        let req = Request::builder()
            .method(method)
            .uri(path)
            .header("content-type", "application/json")
            .body(Body::from(body.to_string()))
            .unwrap();
        let res = secdec_service::router(&secdec_service::ServiceConfig::default())
            .oneshot(req)
            .await
            .unwrap();
        let status = res.status().as_u16();
        let bytes = res.into_body().collect().await.unwrap().to_bytes();
        (status, String::from_utf8(bytes.to_vec()).unwrap())
    })
}

/// Pairs of (CLI arguments, service method, path, body) that must agree byte for byte on BASE.
pub fn parity_cases() -> Vec<(Vec<&'static str>, &'static str, &'static str, String)> {
    use secdec_core::fixtures::{BASE_SCENARIO_JSON, EXAMPLE_MARKET_JSON, UNIFORM_WEIGHTS_JSON};
    let base: serde_json::Value = serde_json::from_str(BASE_SCENARIO_JSON).unwrap();
    let mut decide: serde_json::Value = serde_json::from_str(UNIFORM_WEIGHTS_JSON).unwrap();
    decide["scenario"] = base.clone();
    vec![
        (
            vec!["evaluate", "--scenario", "@base_scenario"],
            "POST",
            "/api/v1/evaluate",
            BASE_SCENARIO_JSON.to_string(),
        ),
        (
            vec![
                "decide",
                "--scenario",
                "@base_scenario",
                "--weights",
                "@uniform_weights",
            ],
            "POST",
            "/api/v1/decide",
            decide.to_string(),
        ),
        (
            vec!["optimize", "--scenario", "@base_scenario"],
            "POST",
            "/api/v1/optimize",
            serde_json::json!({ "scenario": base }).to_string(),
        ),
        (
            vec![
                "sensitivity",
                "--scenario",
                "@base_scenario",
                "--name",
                "d1(I_gs|I_ts)",
                "--name",
                "d2(I_gs|S,S_s)",
            ],
            "POST",
            "/api/v1/sensitivity",
            serde_json::json!({ "scenario": base, "names": ["d1(I_gs|I_ts)", "d2(I_gs|S,S_s)"] }).to_string(),
        ),
        (
            vec!["volume", "--market", "@example_market"],
            "POST",
            "/api/v1/volume",
            EXAMPLE_MARKET_JSON.to_string(),
        ),
        (vec!["conditions"], "GET", "/api/v1/conditions", String::new()),
    ]
}
