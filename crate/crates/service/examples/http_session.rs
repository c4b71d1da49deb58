// Drives one analysis session through the HTTP router without opening a
// socket: upload, features, clustering, a selection pair, survival.

use axum::body::Body;
use axum::http::Request;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use stratix::synth::{generate_synthetic, SyntheticCohortSpec};
use stratix_service::{router, AppState, ServiceConfig};
use tower::ServiceExt;

async fn send(app: &axum::Router, method: &str, uri: &str, body: Value) -> Value {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(if body.is_null() { Body::empty() } else { Body::from(body.to_string()) })
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let value: Value = serde_json::from_slice(&bytes).unwrap();
    assert!(status.is_success(), "{method} {uri}: {status} {value}");
    value
}

pub async fn run_example() -> Value {
    let cohort = generate_synthetic(&SyntheticCohortSpec::planted_2x2(21)).unwrap();
    let app = router(AppState::new(ServiceConfig::default()));

    let created = send(&app, "POST", "/sessions", json!({
        "matrix_a": cohort.matrix_a.to_csv(),
        "matrix_b": cohort.matrix_b.to_csv(),
        "clinical": cohort.clinical.to_csv(),
    }))
    .await;
    let id = created["session_id"].as_str().unwrap().to_string();
    println!("session {id}: {} patients", created["summary"]["samples"]);

    send(&app, "POST", &format!("/sessions/{id}/features/a"), json!({ "features": ["gene_001", "gene_002", "gene_003", "gene_004"] })).await;
    send(&app, "POST", &format!("/sessions/{id}/features/b"), json!({ "features": ["mir_001", "mir_002"] })).await;
    for side in ["a", "b"] {
        let p = send(&app, "POST", &format!("/sessions/{id}/cluster/{side}"), json!({ "method": "kmeans", "k": 2, "seed": 1 })).await;
        println!("modality {side}: sizes {}", p["partition"]["cluster_sizes"]);
    }

    let sets = send(&app, "GET", &format!("/sessions/{id}/views/parallel_sets"), Value::Null).await;
    for r in sets["ribbons"].as_array().unwrap() {
        println!("ribbon {} -> {}: {}", r["a"], r["b"], r["size"]);
    }

    for (name, atoms) in [
        ("concordant", json!([{ "kind": "ribbon", "a": 0, "b": 0 }, { "kind": "ribbon", "a": 1, "b": 1 }])),
        ("discordant", json!([{ "kind": "ribbon", "a": 0, "b": 1 }, { "kind": "ribbon", "a": 1, "b": 0 }])),
    ] {
        send(&app, "POST", &format!("/sessions/{id}/selections"), json!({ "name": name, "atoms": atoms })).await;
    }
    let survival = send(&app, "POST", &format!("/sessions/{id}/survival"), json!({ "selections": ["concordant", "discordant"] })).await;
    println!(
        "log-rank chi2 = {:.3}, p = {:.2e}",
        survival["logrank"]["statistic"].as_f64().unwrap(),
        survival["logrank"]["p_value"].as_f64().unwrap()
    );
    survival
}

#[tokio::main]
async fn main() {
    run_example().await;
}
