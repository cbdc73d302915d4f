use std::sync::Arc;
use std::time::Duration;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use cast_core::dataset::default_tasks;
use cast_core::IwdModel;
use cast_session::api::router;
use cast_session::{LogStore, ManualClock, SessionService};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

struct Harness {
    app: Router,
    clock: Arc<ManualClock>,
    service: Arc<SessionService>,
    _dir: tempfile::TempDir,
}

fn harness() -> Harness {
    let dir = tempfile::tempdir().unwrap();
    let clock = Arc::new(ManualClock::new());
    let store = LogStore::open(dir.path()).unwrap();
    let service = Arc::new(SessionService::new(IwdModel::heuristic(), default_tasks(), store, clock.clone()));
    Harness {
        app: router(service.clone()),
        clock,
        service,
        _dir: dir,
    }
}

impl Harness {
    async fn call(&self, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
        let req = Request::builder().method(method).uri(uri);
        let req = match body {
            Some(b) => req
                .header("content-type", "application/json")
                .body(Body::from(b.to_string())),
            None => req.body(Body::empty()),
        }
        .unwrap();
        let resp = self.app.clone().oneshot(req).await.unwrap();
        let status = resp.status();
        let bytes = resp.into_body().collect().await.unwrap().to_bytes();
        let value = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).unwrap() };
        (status, value)
    }

    async fn create(&self, body: Value) -> String {
        let (status, v) = self.call(Method::POST, "/sessions", Some(body)).await;
        assert_eq!(status, StatusCode::CREATED, "{v}");
        v["session_id"].as_str().unwrap().to_owned()
    }

    async fn word(&self, id: &str) -> Value {
        let (status, v) = self.call(Method::GET, &format!("/sessions/{id}/word"), None).await;
        assert_eq!(status, StatusCode::OK, "{v}");
        v
    }

    async fn guess(&self, id: &str, text: &str) -> Value {
        let (status, v) = self
            .call(Method::POST, &format!("/sessions/{id}/guess"), Some(json!({ "text": text })))
            .await;
        assert_eq!(status, StatusCode::OK, "{v}");
        v
    }

    fn answer(&self, task_id: &str) -> String {
        default_tasks().into_iter().find(|t| t.task_id == task_id).unwrap().word
    }
}

#[tokio::test]
async fn daily_session_round_trip() {
    let h = harness();
    let id = h.create(json!({ "participant_id": "p01", "mode": "daily", "seed": 5 })).await;

    // word 1: one wrong guess, then right after 12 s, rated 2
    let w = h.word(&id).await;
    assert_eq!((w["index"].as_u64(), w["total"].as_u64()), (Some(1), Some(4)));
    assert_eq!(h.guess(&id, "zzz").await, json!({ "correct": false, "guesses_so_far": 1 }));
    h.clock.advance(Duration::from_millis(12_250));
    let answer = h.answer(w["task_id"].as_str().unwrap()).to_uppercase();
    assert_eq!(h.guess(&id, &answer).await, json!({ "correct": true, "guesses_so_far": 2 }));
    let (status, r) = h.call(Method::POST, &format!("/sessions/{id}/rating"), Some(json!({ "urd": 2 }))).await;
    assert_eq!(status, StatusCode::OK);
    assert!(r["iwd_crisp"].is_f64());
    assert!(["easy", "medium", "hard"].contains(&r["iwd_category"].as_str().unwrap()));

    // word 2: skipped, rated 7
    h.word(&id).await;
    h.clock.advance(Duration::from_secs(40));
    let (status, v) = h.call(Method::POST, &format!("/sessions/{id}/skip"), None).await;
    assert_eq!((status, v), (StatusCode::OK, json!({})));
    let (status, _) = h.call(Method::POST, &format!("/sessions/{id}/rating"), Some(json!({ "urd": 7 }))).await;
    assert_eq!(status, StatusCode::OK);

    // word 3: solved, popup dismissed with an empty body
    let w = h.word(&id).await;
    h.guess(&id, &h.answer(w["task_id"].as_str().unwrap())).await;
    let (status, _) = h.call(Method::POST, &format!("/sessions/{id}/rating"), None).await;
    assert_eq!(status, StatusCode::OK);

    // word 4: solved, popup dismissed with an empty object
    let w = h.word(&id).await;
    h.guess(&id, &h.answer(w["task_id"].as_str().unwrap())).await;
    let (status, _) = h.call(Method::POST, &format!("/sessions/{id}/rating"), Some(json!({}))).await;
    assert_eq!(status, StatusCode::OK);

    let (status, summary) = h.call(Method::GET, &format!("/sessions/{id}/summary"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(summary["state"], "complete");
    let records = summary["records"].as_array().unwrap();
    assert_eq!(records.len(), 4);
    assert_eq!(records[0]["num_guesses"], 2);
    assert_eq!(records[0]["time_taken"], 12.25);
    assert_eq!(records[0]["urd"], 2);
    assert_eq!(records[1]["was_skipped"], true);
    assert_eq!(records[1]["time_taken"], 40.0);
    assert_eq!(records[1]["urd"], 7);
    assert_eq!(records.iter().filter(|r| r["urd"].is_null()).count(), 2);
    let positions: Vec<u64> = records.iter().map(|r| r["presentation_index"].as_u64().unwrap()).collect();
    assert!(positions.windows(2).all(|p| p[0] < p[1]));

    let logged = h.service.store().entries().unwrap();
    let logged_json = serde_json::to_value(&logged).unwrap();
    assert_eq!(&logged_json, &summary["records"]);

    let (status, _) = h.call(Method::GET, &format!("/sessions/{id}/word"), None).await;
    assert_eq!(status, StatusCode::CONFLICT);
}

#[tokio::test]
async fn full_sessions_share_the_sequence() {
    let h = harness();
    let a = h.create(json!({ "participant_id": "p01", "mode": "full" })).await;
    let b = h.create(json!({ "participant_id": "p02" })).await;
    let mut orders = Vec::new();
    for id in [&a, &b] {
        let mut order = Vec::new();
        for _ in 0..28 {
            let w = h.word(id).await;
            order.push(w["position"].as_u64().unwrap());
            h.call(Method::POST, &format!("/sessions/{id}/skip"), None).await;
            let (status, _) = h.call(Method::POST, &format!("/sessions/{id}/rating"), Some(json!({ "urd": 5 }))).await;
            assert_eq!(status, StatusCode::OK);
        }
        orders.push(order);
    }
    assert_eq!(orders[0], (1..=28).collect::<Vec<u64>>());
    assert_eq!(orders[0], orders[1]);
    let (_, summary) = h.call(Method::GET, &format!("/sessions/{a}/summary"), None).await;
    assert_eq!(summary["records"].as_array().unwrap().len(), 28);
    assert_eq!(h.service.store().entries().unwrap().len(), 56);
}

#[tokio::test]
async fn daily_sample_follows_participant_and_day() {
    let h = harness();
    let mut samples = Vec::new();
    for day in [20_000, 20_000, 20_001, 20_002, 20_003] {
        h.clock.set_day(day);
        let id = h.create(json!({ "participant_id": "p01", "mode": "daily" })).await;
        let summary = h.service.summary(id.parse().unwrap()).unwrap();
        assert_eq!(summary.total, 4);
        samples.push(h.word(&id).await["task_id"].clone());
    }
    assert_eq!(samples[0], samples[1]);
    assert!(samples[2..].iter().any(|w| *w != samples[0]), "{samples:?}");
}

#[tokio::test]
async fn errors() {
    let h = harness();
    let id = h.create(json!({ "participant_id": "p09" })).await;

    let missing = uuid::Uuid::nil();
    let (status, v) = h.call(Method::GET, &format!("/sessions/{missing}/word"), None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert!(v["error"].is_string());
    let (status, _) = h.call(Method::GET, "/sessions/not-a-uuid/word", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);

    let (status, _) = h.call(Method::POST, &format!("/sessions/{id}/guess"), Some(json!({ "text": "x" }))).await;
    assert_eq!(status, StatusCode::CONFLICT, "guess before the word is shown");
    h.word(&id).await;
    let (status, _) = h.call(Method::POST, &format!("/sessions/{id}/rating"), Some(json!({ "urd": 3 }))).await;
    assert_eq!(status, StatusCode::CONFLICT, "rating before resolving");
    let (status, _) = h.call(Method::POST, &format!("/sessions/{id}/guess"), Some(json!({ "txt": "x" }))).await;
    assert!(status.is_client_error());
    h.call(Method::POST, &format!("/sessions/{id}/skip"), None).await;
    let (status, _) = h.call(Method::GET, &format!("/sessions/{id}/word"), None).await;
    assert_eq!(status, StatusCode::CONFLICT, "new word before rating");
    for bad in [json!({ "urd": 11 }), json!({ "urd": 0 }), json!({ "urd": -3 }), json!({ "urd": "high" })] {
        let (status, v) = h.call(Method::POST, &format!("/sessions/{id}/rating"), Some(bad)).await;
        assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY, "{v}");
    }
    let (status, _) = h.call(Method::POST, "/sessions", Some(json!({ "participant_id": "  " }))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let (status, _) = h.call(Method::POST, "/sessions", Some(json!({ "participant_id": "p", "mode": "weekly" }))).await;
    assert!(status.is_client_error());
    assert!(h.service.store().entries().unwrap().is_empty());
}
