#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, RwLock};

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use chrono::{DateTime, Utc};
use csre4soc_api::{router, AppState, SharedStore};
use csre4soc_core::{parse_catalog, ActionCatalog, FileStore, RecordId};
use http_body_util::BodyExt;
use serde_json::Value;
use tower::ServiceExt;

pub fn fixtures_dir() -> PathBuf {
    // also compiled into other crates' test targets, so anchor at the api crate
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../api/tests/fixtures")
}

pub fn load_catalog(name: &str) -> ActionCatalog {
    parse_catalog(&std::fs::read(fixtures_dir().join(name)).unwrap()).unwrap()
}

/// Store-backed state with a fixed clock and `format`-numbered record ids.
pub fn deterministic_state(
    catalog: ActionCatalog,
    store_path: &Path,
    clock: DateTime<Utc>,
) -> (AppState, Arc<RwLock<FileStore>>) {
    let store = Arc::new(RwLock::new(FileStore::open(store_path).unwrap()));
    let shared: SharedStore = store.clone();
    let counter = AtomicUsize::new(0);
    let state = AppState::new(catalog, shared)
        .with_clock(move || clock)
        .with_id_source(move || {
            RecordId::new(format!("rec-{:04}", counter.fetch_add(1, Ordering::SeqCst) + 1))
        });
    (state, store)
}

pub struct Reply {
    pub status: StatusCode,
    pub body: Vec<u8>,
}

impl Reply {
    pub fn json(&self) -> Value {
        serde_json::from_slice(&self.body)
            .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&self.body)))
    }

    pub fn text(&self) -> String {
        String::from_utf8(self.body.clone()).unwrap()
    }
}

pub async fn call(app: &Router, method: &str, path: &str, body: Option<Vec<u8>>) -> Reply {
    let mut req = Request::builder().method(method).uri(path);
    if body.is_some() {
        req = req.header("content-type", "application/json");
    }
    let req = req.body(body.map_or_else(Body::empty, Body::from)).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let body = resp.into_body().collect().await.unwrap().to_bytes().to_vec();
    Reply { status, body }
}

/// Replays `golden_scenario.json` against a fresh service. Returns one entry
/// per exchange: its name and either success or a mismatch description.
pub async fn run_golden_scenario(store_path: &Path) -> Vec<(String, Result<(), String>)> {
    let scenario: Value = serde_json::from_slice(
        &std::fs::read(fixtures_dir().join("golden_scenario.json")).unwrap(),
    )
    .unwrap();
    let catalog = load_catalog(scenario["catalog"].as_str().unwrap());
    let clock = DateTime::parse_from_rfc3339(scenario["clock"].as_str().unwrap())
        .unwrap()
        .with_timezone(&Utc);
    let (state, _) = deterministic_state(catalog, store_path, clock);
    let app = router(state);
    let mut outcomes = Vec::new();
    for ex in scenario["exchanges"].as_array().unwrap() {
        let name = ex["name"].as_str().unwrap().to_string();
        let req = &ex["request"];
        let body = match (req.get("body"), req.get("body_raw")) {
            (Some(v), _) => Some(v.to_string().into_bytes()),
            (None, Some(raw)) => Some(raw.as_str().unwrap().as_bytes().to_vec()),
            (None, None) => None,
        };
        let reply = call(
            &app,
            req["method"].as_str().unwrap(),
            req["path"].as_str().unwrap(),
            body,
        )
        .await;
        let expected = &ex["response"];
        let outcome = if reply.status.as_u16() as u64 != expected["status"].as_u64().unwrap() {
            Err(format!(
                "status {} != {}: {}",
                reply.status,
                expected["status"],
                String::from_utf8_lossy(&reply.body)
            ))
        } else if let Some(text) = expected.get("body_text") {
            if reply.text() == text.as_str().unwrap() {
                Ok(())
            } else {
                Err(format!("body {:?} != {text}", reply.text()))
            }
        } else {
            let got: Result<Value, _> = serde_json::from_slice(&reply.body);
            match got {
                Ok(v) if v == expected["body"] => Ok(()),
                Ok(v) => Err(format!("body mismatch\n got: {v}\nwant: {}", expected["body"])),
                Err(e) => Err(format!("body is not JSON: {e}")),
            }
        };
        outcomes.push((name, outcome));
    }
    outcomes
}
