mod common;

use std::time::Duration;

use axum::http::StatusCode;
use axum::Router;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use atelier_service::ServiceConfig;
use common::*;

const EDITS: [&str; 6] = ["long sleeves", "make it blue", "short skirt", "v-neck", "striped shirt", "red hair"];

/// Edit log of session `k`: endpoint and body per step.
fn script(k: usize) -> Vec<(&'static str, Value)> {
    vec![
        ("edit/text", json!({ "text": EDITS[k % EDITS.len()] })),
        ("params", json!({ "view": { "yaw": (k as f64) * 10.0 - 80.0 } })),
        ("edit/text", json!({ "text": EDITS[(k + 2) % EDITS.len()] })),
        ("undo", json!({})),
        ("edit/text", json!({ "text": EDITS[(k + 3) % EDITS.len()] })),
    ]
}

async fn replay(app: &Router, k: usize) -> Vec<String> {
    let id = session(app, json!({ "seed": k as u64 })).await;
    let mut hashes = Vec::new();
    for (path, body) in script(k) {
        let r = post(app, &format!("/session/{id}/{path}"), body).await;
        assert_eq!(r.status, StatusCode::OK, "{}", String::from_utf8_lossy(&r.body));
        hashes.push(hex::encode(Sha256::digest(r.png())));
    }
    hashes
}

#[tokio::test(flavor = "multi_thread", worker_threads = 8)]
async fn parallel_sessions_match_serial_replay() {
    let app = app();
    let live: Vec<_> = (0..16).map(|k| tokio::spawn({
        let app = app.clone();
        async move { replay(&app, k).await }
    })).collect();
    let mut live_logs = Vec::new();
    for h in live {
        live_logs.push(h.await.unwrap());
    }
    let serial = common::app();
    for (k, log) in live_logs.iter().enumerate() {
        assert_eq!(&replay(&serial, k).await, log, "session {k}");
    }
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn requests_to_one_session_are_serialized() {
    let app = app();
    let id = session(&app, json!({ "seed": 2 })).await;
    let tasks: Vec<_> = (0..8).map(|i| tokio::spawn({
        let (app, id) = (app.clone(), id.clone());
        async move { post(&app, &format!("/session/{id}/edit/text"), json!({ "text": EDITS[i % EDITS.len()] })).await.status }
    })).collect();
    for t in tasks {
        assert_eq!(t.await.unwrap(), StatusCode::OK);
    }
    let info = get(&app, &format!("/session/{id}")).await.json();
    assert_eq!(info["history"], 8);
    // Render ids are handed out one at a time.
    assert_eq!(info["render_id"], 8);
}

#[tokio::test]
async fn idle_sessions_are_evicted() {
    let (app, state) = app_with(ServiceConfig { idle_timeout: Duration::from_millis(200) });
    let stale = session(&app, json!({})).await;
    let kept = session(&app, json!({})).await;
    assert_eq!(state.len(), 2);
    for _ in 0..3 {
        tokio::time::sleep(Duration::from_millis(100)).await;
        assert_eq!(get(&app, &format!("/session/{kept}")).await.status, StatusCode::OK);
    }
    assert_eq!(state.evict_idle(), 1);
    assert_eq!(get(&app, &format!("/session/{stale}")).await.status, StatusCode::NOT_FOUND);
    assert_eq!(get(&app, &format!("/session/{kept}")).await.status, StatusCode::OK);

    tokio::time::sleep(Duration::from_millis(300)).await;
    // Lookups also refuse expired sessions.
    assert_eq!(get(&app, &format!("/session/{kept}")).await.status, StatusCode::NOT_FOUND);
    assert!(state.is_empty());
}

#[tokio::test]
async fn tokens_are_unique() {
    let app = app();
    let mut ids = std::collections::BTreeSet::new();
    for _ in 0..20 {
        assert!(ids.insert(session(&app, json!({})).await));
    }
}

#[tokio::test]
async fn scripts_replay_like_http() {
    use atelier_core::editors::EditSession;
    use atelier_service::script::{apply_step, ScriptStep};

    let app = app();
    let k = 7;
    let http = replay(&app, k).await;
    let mut s = EditSession::random("script", index(), k as u64).unwrap();
    let local: Vec<String> = script(k)
        .into_iter()
        .map(|(op, body)| {
            let o = apply_step(&mut s, &ScriptStep { op: op.into(), body }).unwrap();
            hex::encode(Sha256::digest(o.render.color_png()))
        })
        .collect();
    assert_eq!(local, http);
    let bad = ScriptStep { op: "edit/dance".into(), body: Value::Null };
    assert_eq!(apply_step(&mut s, &bad).unwrap_err().code(), "invalid-argument");
}
