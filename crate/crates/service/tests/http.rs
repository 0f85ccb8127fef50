mod common;

use std::sync::Arc;

use axum::body::{to_bytes, Body};
use axum::http::{header, Request, StatusCode};
use axum::Router;
use coronavis_core::analysis::{AnalyticsConfig, AnalyticsSnapshot};
use coronavis_core::StateCode;
use coronavis_service::{router, AppState, Clock, SnapshotStore};
use serde_json::Value;
use tower::ServiceExt;

use common::day;

fn app_with(config: Arc<AnalyticsConfig>, clock: Clock, origins: &[&str]) -> Router {
    let files = (12..=16).map(|d| day(2020, 6, d)).collect();
    let snapshot = AnalyticsSnapshot::build(config, common::five_day_records(), files);
    let state = AppState {
        store: Arc::new(SnapshotStore::new(snapshot)),
        clock,
    };
    let origins: Vec<String> = origins.iter().map(|o| o.to_string()).collect();
    router(state, &origins, None)
}

fn app() -> Router {
    let config = Arc::new(AnalyticsConfig {
        lda: None,
        ..(*common::fixture_config()).clone()
    });
    app_with(config, Clock::Snapshot, &["http://localhost:5173"])
}

async fn send(app: &Router, request: Request<Body>) -> (StatusCode, axum::http::HeaderMap, Value) {
    let response = app.clone().oneshot(request).await.unwrap();
    let (status, headers) = (response.status(), response.headers().clone());
    let bytes = to_bytes(response.into_body(), usize::MAX).await.unwrap();
    (status, headers, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

async fn get(app: &Router, uri: &str) -> (StatusCode, Value) {
    let (status, _, body) = send(app, Request::builder().uri(uri).body(Body::empty()).unwrap()).await;
    (status, body)
}

fn error_code(body: &Value) -> &str {
    body["error"]["code"].as_str().unwrap_or_default()
}

#[tokio::test]
async fn health_reports_counts() {
    let app = app();
    let (status, body) = get(&app, "/api/health").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["data"]["status"], "ok");
    assert_eq!(body["data"]["tweets"], 3000);
    assert_eq!(body["data"]["files"], 5);
    assert_eq!(body["data"]["lda_ready"], false);
    assert_eq!(body["as_of"], "2020-06-16");
}

#[tokio::test]
async fn state_frequencies_sum_to_nationwide() {
    let app = app();
    let (_, national) = get(&app, "/api/frequency").await;
    let national: Vec<u64> = national["data"]["points"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["count"].as_u64().unwrap())
        .collect();
    assert_eq!(national.len(), 5);
    assert_eq!(national.iter().sum::<u64>(), 3000);
    let mut summed = vec![0u64; national.len()];
    for code in StateCode::all() {
        let (status, body) = get(&app, &format!("/api/frequency?state={}", code.as_str())).await;
        assert_eq!(status, StatusCode::OK);
        for (slot, p) in summed.iter_mut().zip(body["data"]["points"].as_array().unwrap()) {
            *slot += p["count"].as_u64().unwrap();
        }
    }
    assert_eq!(summed, national);
}

#[tokio::test]
async fn state_codes_are_case_insensitive_and_validated() {
    let app = app();
    let (status, lower) = get(&app, "/api/words/top?state=ny&k=3").await;
    assert_eq!(status, StatusCode::OK);
    let (_, upper) = get(&app, "/api/words/top?state=NY&k=3").await;
    assert_eq!(lower, upper);
    assert_eq!(upper["data"]["words"].as_array().unwrap().len(), 3);

    let (status, body) = get(&app, "/api/words/top?state=ZZ").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(error_code(&body), "STATE_UNKNOWN");
}

#[tokio::test]
async fn parameter_errors_use_the_envelope() {
    let app = app();
    for (uri, status, code) in [
        ("/api/words/top?k=abc", StatusCode::BAD_REQUEST, "BAD_PARAMETER"),
        ("/api/words/top?k=0", StatusCode::BAD_REQUEST, "BAD_PARAMETER"),
        ("/api/sentiment/series?range=week", StatusCode::BAD_REQUEST, "BAD_PARAMETER"),
        ("/api/sentiment/series?range=custom&from=2020-06-15", StatusCode::BAD_REQUEST, "BAD_PARAMETER"),
        (
            "/api/sentiment/series?range=custom&from=2020-06-15&to=2020-06-12",
            StatusCode::BAD_REQUEST,
            "BAD_RANGE",
        ),
        ("/api/frequency?from=June", StatusCode::BAD_REQUEST, "BAD_PARAMETER"),
        ("/api/sentiment/labels?cohort=bots", StatusCode::BAD_REQUEST, "BAD_PARAMETER"),
        ("/api/wordcloud?polarity=neutral", StatusCode::BAD_REQUEST, "BAD_PARAMETER"),
        ("/api/mobility/weekly?lag=-1", StatusCode::BAD_REQUEST, "BAD_PARAMETER"),
        ("/api/lda/topics", StatusCode::SERVICE_UNAVAILABLE, "LDA_UNAVAILABLE"),
        ("/api/nothing/here", StatusCode::NOT_FOUND, "NOT_FOUND"),
        ("/index.html", StatusCode::NOT_FOUND, "NOT_FOUND"),
    ] {
        let (got, body) = get(&app, uri).await;
        assert_eq!(got, status, "{uri}: {body}");
        assert_eq!(error_code(&body), code, "{uri}");
        assert!(body["error"]["message"].as_str().is_some_and(|m| !m.is_empty()), "{uri}");
    }
}

#[tokio::test]
async fn lda_endpoints_when_enabled() {
    let app = app_with(common::fixture_config(), Clock::Snapshot, &["*"]);
    let (status, topics) = get(&app, "/api/lda/topics").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(topics["data"]["schema_version"], 1);
    assert_eq!(topics["data"]["k"], 4);
    let (status, terms) = get(&app, "/api/lda/terms?topic=1&lambda=0.5&n=7").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(terms["data"]["terms"].as_array().unwrap().len(), 7);
    let (status, body) = get(&app, "/api/lda/terms?topic=4").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(error_code(&body), "TOPIC_UNKNOWN");
    let (status, body) = get(&app, "/api/lda/terms?topic=0&lambda=1.5").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(error_code(&body), "BAD_PARAMETER");
}

#[tokio::test]
async fn fixed_clock_selects_today() {
    let config = Arc::new(AnalyticsConfig {
        lda: None,
        ..(*common::fixture_config()).clone()
    });
    let app = app_with(config, Clock::Fixed(day(2020, 6, 14)), &["*"]);
    let (_, today) = get(&app, "/api/sentiment/series?range=today").await;
    let points = today["data"]["points"].as_array().unwrap();
    assert_eq!(points.len(), 1);
    assert_eq!(points[0]["date"], "2020-06-14");
    let (_, yesterday) = get(&app, "/api/subjectivity/series?range=yesterday").await;
    assert_eq!(yesterday["data"]["points"][0]["date"], "2020-06-13");
}

#[tokio::test]
async fn cors_allows_configured_origin_only() {
    let app = app();
    let request = |origin: &str| {
        Request::builder()
            .uri("/api/health")
            .header(header::ORIGIN, origin)
            .body(Body::empty())
            .unwrap()
    };
    let (_, headers, _) = send(&app, request("http://localhost:5173")).await;
    assert_eq!(
        headers.get(header::ACCESS_CONTROL_ALLOW_ORIGIN).unwrap(),
        "http://localhost:5173"
    );
    let (status, headers, _) = send(&app, request("http://evil.example")).await;
    assert_eq!(status, StatusCode::OK);
    assert!(headers.get(header::ACCESS_CONTROL_ALLOW_ORIGIN).is_none());
}

#[tokio::test]
async fn schema_registry_is_served() {
    let app = app();
    let (status, body) = get(&app, "/api/schemas").await;
    assert_eq!(status, StatusCode::OK);
    let map = body.as_object().unwrap();
    assert!(map.contains_key("/api/health"));
    assert!(map.contains_key("error"));
    assert_eq!(map.len(), 16);
}

#[tokio::test]
async fn static_directory_serves_non_api_paths() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("index.html"), "<html>dashboard</html>").unwrap();
    let snapshot = AnalyticsSnapshot::empty(Arc::new(AnalyticsConfig::default()));
    let state = AppState {
        store: Arc::new(SnapshotStore::new(snapshot)),
        clock: Clock::Snapshot,
    };
    let app = router(state, &[], Some(dir.path()));
    let response = app
        .clone()
        .oneshot(Request::builder().uri("/index.html").body(Body::empty()).unwrap())
        .await
        .unwrap();
    assert_eq!(response.status(), StatusCode::OK);
    let (status, body) = get(&app, "/api/unknown").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(error_code(&body), "NOT_FOUND");
    let (status, body) = get(&app, "/api/health").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["as_of"], Value::Null);
    assert_eq!(body["data"]["tweets"], 0);
}
