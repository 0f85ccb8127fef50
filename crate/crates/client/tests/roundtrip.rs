use std::net::SocketAddr;
use std::sync::Arc;

use chrono::{Duration, NaiveDate, TimeZone, Utc};
use coronavis_api::ErrorCode;
use coronavis_client::{Client, ClientError, Params};
use coronavis_core::analysis::{AnalyticsConfig, AnalyticsSnapshot, Polarity};
use coronavis_core::corpus::{write_daily_file, DailyFile};
use coronavis_core::sentiment::Cohort;
use coronavis_core::{DateRange, Scope, StateCode, Timeframe, TweetRecord};
use coronavis_service::config::{LdaConfig, ServiceConfig};
use tokio::sync::oneshot;

const TEXTS: &[&str] = &[
    "stay home and stay safe everyone",
    "testing sites are overwhelmed terrible news",
    "great work by the nurses today",
    "masks should be required in every store",
    "new cases rising again in the city",
    "happy to see parks open with social distancing",
    "lockdown is hurting small business badly",
    "vaccine trials look promising",
];
const STATES: &[&str] = &["NY", "CA", "TX", "GA"];

fn records() -> Vec<TweetRecord> {
    (0..120)
        .map(|i: usize| TweetRecord {
            tweet_id: (1_271_000_000_000_000_000u64 + i as u64).to_string(),
            created_at: Utc.with_ymd_and_hms(2020, 6, 12, 8, 0, 0).unwrap()
                + Duration::days((i % 3) as i64)
                + Duration::minutes(i as i64),
            loc: StateCode::parse(STATES[(i * 7 / 3) % STATES.len()]).unwrap(),
            text: TEXTS[i % TEXTS.len()].to_string(),
            user_id: format!("{:016x}", i % 17),
            verified: i % 17 == 0,
        })
        .collect()
}

struct Running {
    client: Client,
    shutdown: oneshot::Sender<()>,
    _dir: tempfile::TempDir,
}

async fn start(lda: bool) -> Running {
    let dir = tempfile::tempdir().unwrap();
    for file in DailyFile::split_by_day(records()) {
        write_daily_file(dir.path(), &file).unwrap();
    }
    let config = ServiceConfig {
        port: 0,
        data_dir: dir.path().to_path_buf(),
        lda: LdaConfig {
            enabled: lda,
            k: 2,
            iterations: 30,
            ..LdaConfig::default()
        },
        ..ServiceConfig::default()
    };
    let (bound_tx, bound_rx) = oneshot::channel::<SocketAddr>();
    let (shutdown, stop) = oneshot::channel::<()>();
    tokio::spawn(coronavis_service::serve(
        config,
        move |addr| {
            let _ = bound_tx.send(addr);
        },
        async move {
            let _ = stop.await;
        },
    ));
    let addr = bound_rx.await.expect("server did not bind");
    Running {
        client: Client::new(format!("http://{addr}")),
        shutdown,
        _dir: dir,
    }
}

fn local_snapshot() -> AnalyticsSnapshot {
    let files = (12..=14).map(|d| NaiveDate::from_ymd_opt(2020, 6, d).unwrap()).collect();
    AnalyticsSnapshot::build(Arc::new(AnalyticsConfig::default()), records(), files)
}

#[tokio::test]
async fn typed_calls_match_local_analysis() {
    let server = start(false).await;
    let c = &server.client;
    let local = local_snapshot();
    let ny = Scope::State(StateCode::parse("NY").unwrap());

    let health = c.health().await.unwrap();
    assert_eq!(health.data.tweets, 120);
    assert_eq!(health.as_of, local.as_of());

    assert_eq!(c.frequency(ny, None, None).await.unwrap().data.points, local.frequency(ny, None, None).unwrap());
    assert_eq!(c.top_words(ny, Some(5)).await.unwrap().data.words, local.top_words(ny, 5));
    assert_eq!(
        c.top_bigrams(Scope::Nationwide, None).await.unwrap().data.bigrams,
        local.top_bigrams(Scope::Nationwide, 20)
    );
    assert_eq!(
        c.featured_topics(Scope::Nationwide, Some(4)).await.unwrap().data.series,
        local.featured_topics(Scope::Nationwide, 4)
    );
    let range = DateRange::new(
        NaiveDate::from_ymd_opt(2020, 6, 12).unwrap(),
        NaiveDate::from_ymd_opt(2020, 6, 13).unwrap(),
    )
    .unwrap();
    assert_eq!(
        c.sentiment_series(ny, Timeframe::Custom(range)).await.unwrap().data,
        local.sentiment_series(ny, Timeframe::Custom(range), local.clock())
    );
    assert_eq!(
        c.subjectivity_series(Scope::Nationwide, Timeframe::Today).await.unwrap().data,
        local.subjectivity_series(Scope::Nationwide, Timeframe::Today, local.clock())
    );
    assert_eq!(c.distribution(Some(10)).await.unwrap().data, local.distribution(10));
    assert_eq!(c.labels(Cohort::Verified).await.unwrap().data, local.labels(Cohort::Verified));
    assert_eq!(c.cohorts(Some(3)).await.unwrap().data, local.cohorts(3));
    assert_eq!(
        c.wordcloud(Scope::Nationwide, Timeframe::All, Polarity::Neg, Cohort::NonVerified, Some(5))
            .await
            .unwrap()
            .data,
        local.wordcloud(Scope::Nationwide, Timeframe::All, local.clock(), Polarity::Neg, Cohort::NonVerified, 5)
    );
    assert_eq!(c.mobility(Some(0)).await.unwrap().data, local.mobility(0));

    let err = c.lda_topics().await.unwrap_err();
    assert!(matches!(err, ClientError::Api { status: 503, .. }), "{err}");
    let _ = server.shutdown.send(());
}

#[tokio::test]
async fn errors_and_raw_queries() {
    let server = start(true).await;
    let c = &server.client;

    let topics = c.lda_topics().await.unwrap().data;
    assert_eq!(topics.k, 2);
    let terms = c.lda_terms(1, Some(1.0), Some(3)).await.unwrap().data;
    assert_eq!(terms.terms.len(), 3);
    assert_eq!(terms.topic, 1);

    let err = c.lda_terms(9, None, None).await.unwrap_err();
    assert_eq!(err.api_error().map(|e| e.code()), Some(ErrorCode::TopicUnknown));

    let err = c.get_json("/api/frequency", &Params::new().set("state", "XX")).await.unwrap_err();
    match err {
        ClientError::Api { status, error } => {
            assert_eq!(status, 400);
            assert_eq!(error.code(), ErrorCode::StateUnknown);
        }
        other => panic!("unexpected {other}"),
    }

    let raw = c.get_json("/api/words/top", &Params::new().set("k", 2)).await.unwrap();
    assert_eq!(raw["data"]["words"].as_array().unwrap().len(), 2);

    let unreachable = Client::new("http://127.0.0.1:9");
    assert!(matches!(unreachable.health().await, Err(ClientError::Http(_))));
    let _ = server.shutdown.send(());
}
