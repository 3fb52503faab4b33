#![allow(dead_code)]

use std::sync::{Arc, OnceLock};

use axum::body::Body;
use axum::http::{HeaderMap, Method, Request, StatusCode};
use axum::Router;
use base64::Engine;
use http_body_util::BodyExt;
use serde_json::Value;
use tower::ServiceExt;

use atelier_core::corpus::{generate_synthetic_corpus, MultimodalIndex};
use atelier_service::{router, AppState, ServiceConfig};

pub fn index() -> Arc<MultimodalIndex> {
    static I: OnceLock<Arc<MultimodalIndex>> = OnceLock::new();
    I.get_or_init(|| Arc::new(generate_synthetic_corpus(1, 64).unwrap())).clone()
}

pub fn app() -> Router {
    app_with(ServiceConfig::default()).0
}

pub fn app_with(config: ServiceConfig) -> (Router, Arc<AppState>) {
    let state = Arc::new(AppState::new(index(), config));
    (router(state.clone()), state)
}

pub struct Reply {
    pub status: StatusCode,
    pub headers: HeaderMap,
    pub body: Vec<u8>,
}

impl Reply {
    pub fn json(&self) -> Value {
        serde_json::from_slice(&self.body).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&self.body)))
    }

    pub fn png(&self) -> Vec<u8> {
        let b64 = self.json()["png_base64"].as_str().expect("png_base64").to_string();
        base64::engine::general_purpose::STANDARD.decode(b64).unwrap()
    }
}

pub async fn call(app: &Router, method: Method, uri: &str, body: Option<Value>) -> Reply {
    let mut req = Request::builder().method(method).uri(uri);
    let body = match body {
        Some(v) => {
            req = req.header("content-type", "application/json");
            Body::from(serde_json::to_vec(&v).unwrap())
        }
        None => Body::empty(),
    };
    let resp = app.clone().oneshot(req.body(body).unwrap()).await.unwrap();
    let status = resp.status();
    let headers = resp.headers().clone();
    let body = resp.into_body().collect().await.unwrap().to_bytes().to_vec();
    Reply { status, headers, body }
}

pub async fn post(app: &Router, uri: &str, body: Value) -> Reply {
    call(app, Method::POST, uri, Some(body)).await
}

pub async fn get(app: &Router, uri: &str) -> Reply {
    call(app, Method::GET, uri, None).await
}

/// New session; returns its token.
pub async fn session(app: &Router, body: Value) -> String {
    let r = post(app, "/session", body).await;
    assert_eq!(r.status, StatusCode::OK, "{}", String::from_utf8_lossy(&r.body));
    r.json()["session_id"].as_str().unwrap().to_string()
}

pub fn decode_png(bytes: &[u8]) -> image::RgbImage {
    image::load_from_memory(bytes).expect("valid PNG").to_rgb8()
}
