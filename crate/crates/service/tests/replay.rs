mod common;

use std::sync::Arc;
use std::time::Duration;

use coronavis_core::analysis::{AnalyticsConfig, AnalyticsSnapshot};
use coronavis_service::config::ServiceConfig;
use coronavis_service::{replay, serve_replay, ReplayConfig, ReplayError, SnapshotStore};

use common::day;

fn plain_config() -> Arc<AnalyticsConfig> {
    Arc::new(AnalyticsConfig {
        lda: None,
        ..(*common::fixture_config()).clone()
    })
}

fn three_days(dir: &std::path::Path) {
    let records = common::synthetic_records(31, 600, day(2020, 6, 12), 3, 100);
    assert_eq!(common::write_corpus(dir, &records).len(), 3);
}

fn replay_config(dir: &std::path::Path, speedup: f64) -> ReplayConfig {
    ReplayConfig {
        data_dir: dir.to_path_buf(),
        speedup,
        start: None,
        end: None,
    }
}

#[tokio::test]
async fn three_day_replay_publishes_three_growing_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    three_days(dir.path());
    let store = Arc::new(SnapshotStore::new(AnalyticsSnapshot::empty(plain_config())));
    let mut updates = store.subscribe();
    let watcher = {
        let store = store.clone();
        tokio::spawn(async move {
            let mut seen = Vec::new();
            while seen.len() < 3 && updates.changed().await.is_ok() {
                let n = *updates.borrow_and_update();
                let snap = store.load();
                seen.push((n, snap.tweet_count(), snap.as_of()));
            }
            seen
        })
    };
    let summary = replay(&replay_config(dir.path(), 86_400.0 * 5.0), store.clone()).await.unwrap();
    assert_eq!(summary.published, 3);
    assert_eq!(summary.rows, 600);
    assert!(summary.gaps.is_empty() && summary.unreadable.is_empty());
    assert_eq!(store.publications(), 3);

    let seen = watcher.await.unwrap();
    assert_eq!(seen.len(), 3);
    assert!(seen.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 < w[1].1));
    assert_eq!(seen[2].1, 600);
    assert_eq!(seen[2].2, Some(day(2020, 6, 14)));
}

#[tokio::test(start_paused = true)]
async fn gap_days_are_paced_and_skipped() {
    let dir = tempfile::tempdir().unwrap();
    let records = common::synthetic_records(32, 400, day(2020, 6, 12), 4, 80);
    let mut files = common::write_corpus(dir.path(), &records);
    std::fs::remove_file(dir.path().join("2020-06-13.csv")).unwrap();
    files.retain(|d| *d != day(2020, 6, 13));
    std::fs::write(dir.path().join("2020-06-14.csv"), "not,a,corpus\n").unwrap();

    let store = Arc::new(SnapshotStore::new(AnalyticsSnapshot::empty(plain_config())));
    let started = tokio::time::Instant::now();
    let summary = replay(&replay_config(dir.path(), 86_400.0), store.clone()).await.unwrap();
    let elapsed = started.elapsed();

    assert_eq!(summary.gaps, vec![day(2020, 6, 13)]);
    assert_eq!(summary.unreadable.len(), 1);
    assert_eq!(summary.unreadable[0].0, day(2020, 6, 14));
    assert_eq!(summary.published, 2);
    assert!(elapsed >= Duration::from_secs(3) && elapsed < Duration::from_secs(4), "{elapsed:?}");
    let snap = store.load();
    assert_eq!(snap.files(), &[day(2020, 6, 12), day(2020, 6, 15)]);
    assert_eq!(snap.as_of(), Some(day(2020, 6, 15)));
}

#[tokio::test]
async fn range_bounds_restrict_the_replay() {
    let dir = tempfile::tempdir().unwrap();
    three_days(dir.path());
    let store = Arc::new(SnapshotStore::new(AnalyticsSnapshot::empty(plain_config())));
    let config = ReplayConfig {
        start: Some(day(2020, 6, 13)),
        end: Some(day(2020, 6, 13)),
        ..replay_config(dir.path(), 1e9)
    };
    let summary = replay(&config, store.clone()).await.unwrap();
    assert_eq!(summary.published, 1);
    assert_eq!(store.load().files(), &[day(2020, 6, 13)]);

    let outside = ReplayConfig {
        start: Some(day(2020, 6, 1)),
        ..replay_config(dir.path(), 1e9)
    };
    assert!(matches!(replay(&outside, store.clone()).await, Err(ReplayError::OutOfRange { .. })));
    let empty = tempfile::tempdir().unwrap();
    assert!(matches!(
        replay(&replay_config(empty.path(), 1e9), store).await,
        Err(ReplayError::NoFiles(_))
    ));
}

#[tokio::test]
async fn serve_replay_exits_when_done() {
    let dir = tempfile::tempdir().unwrap();
    three_days(dir.path());
    let config = ServiceConfig {
        port: 0,
        data_dir: dir.path().to_path_buf(),
        lda: coronavis_service::config::LdaConfig {
            enabled: false,
            ..Default::default()
        },
        ..ServiceConfig::default()
    };
    let (tx, rx) = tokio::sync::oneshot::channel();
    let summary = tokio::time::timeout(
        Duration::from_secs(60),
        serve_replay(
            config,
            replay_config(dir.path(), 1e9),
            true,
            move |addr| {
                let _ = tx.send(addr);
            },
            std::future::pending(),
        ),
    )
    .await
    .expect("replay server did not stop")
    .unwrap();
    assert_eq!(summary.published, 3);
    assert_ne!(rx.await.unwrap().port(), 0);
}
