//! HTTP JSON service over the analytics snapshot, plus the replay engine
//! that feeds historical daily files through the same publication path.

pub mod config;
pub mod replay;
pub mod routes;
pub mod store;

use std::future::Future;
use std::net::SocketAddr;
use std::sync::Arc;

use coronavis_core::analysis::{AnalyticsConfig, AnalyticsSnapshot};
use coronavis_core::corpus::{read_corpus, CorpusError, ParseMode};

pub use config::{ConfigError, ServiceConfig};
pub use replay::{replay, ReplayConfig, ReplayError, ReplaySummary};
pub use routes::{router, AppState};
pub use store::{Clock, SnapshotStore};

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Replay(#[from] ReplayError),
    #[error("no loadable daily files in {0}")]
    NoData(String),
    #[error("binding {addr}: {source}")]
    Bind { addr: String, source: std::io::Error },
    #[error("server: {0}")]
    Server(std::io::Error),
}

/// One-shot analysis of every daily file in the configured data directory.
pub fn load_snapshot(config: &ServiceConfig, analytics: Arc<AnalyticsConfig>) -> Result<AnalyticsSnapshot, ServiceError> {
    let (records, files, report) = read_corpus(&config.data_dir, ParseMode::Lenient, None)?;
    if files.is_empty() {
        return Err(ServiceError::NoData(config.data_dir.display().to_string()));
    }
    if !report.skipped.is_empty() {
        tracing::warn!(skipped = report.skipped.len(), "skipped malformed rows");
    }
    Ok(AnalyticsSnapshot::build(analytics, records, files))
}

fn clock_of(config: &ServiceConfig) -> Clock {
    config.clock.map_or(Clock::Snapshot, Clock::Fixed)
}

async fn bind(config: &ServiceConfig) -> Result<tokio::net::TcpListener, ServiceError> {
    let addr = format!("{}:{}", config.host, config.port);
    tokio::net::TcpListener::bind(&addr)
        .await
        .map_err(|source| ServiceError::Bind { addr, source })
}

async fn run_server(
    listener: tokio::net::TcpListener,
    config: &ServiceConfig,
    store: Arc<SnapshotStore>,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> Result<(), ServiceError> {
    let state = AppState {
        store,
        clock: clock_of(config),
    };
    let app = router(state, &config.cors_origins, config.static_dir.as_deref());
    if let Ok(addr) = listener.local_addr() {
        tracing::info!(%addr, "listening");
    }
    axum::serve(listener, app)
        .with_graceful_shutdown(shutdown)
        .await
        .map_err(ServiceError::Server)
}

/// Batch-loads the data directory and serves it until `shutdown` resolves.
/// `on_bound` receives the listening address.
pub async fn serve(
    config: ServiceConfig,
    on_bound: impl FnOnce(SocketAddr),
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> Result<(), ServiceError> {
    let analytics = Arc::new(config.analytics_config()?);
    let cfg = config.clone();
    let snapshot = tokio::task::spawn_blocking(move || load_snapshot(&cfg, analytics))
        .await
        .expect("loader panicked")?;
    tracing::info!(tweets = snapshot.tweet_count(), files = snapshot.files().len(), "loaded corpus");
    let store = Arc::new(SnapshotStore::new(snapshot));
    let listener = bind(&config).await?;
    if let Ok(addr) = listener.local_addr() {
        on_bound(addr);
    }
    run_server(listener, &config, store, shutdown).await
}

/// Serves an initially empty snapshot while replaying the data directory.
/// With `exit_when_done` the server stops after the last publication;
/// otherwise it keeps serving the final snapshot until `shutdown`.
pub async fn serve_replay(
    config: ServiceConfig,
    replay_config: ReplayConfig,
    exit_when_done: bool,
    on_bound: impl FnOnce(SocketAddr),
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> Result<ReplaySummary, ServiceError> {
    let analytics = Arc::new(config.analytics_config()?);
    let store = Arc::new(SnapshotStore::new(AnalyticsSnapshot::empty(analytics)));
    let listener = bind(&config).await?;
    if let Ok(addr) = listener.local_addr() {
        on_bound(addr);
    }
    let (done_tx, done_rx) = tokio::sync::oneshot::channel::<()>();
    let stop = async move {
        if exit_when_done {
            tokio::select! {
                _ = shutdown => {}
                _ = done_rx => {}
            }
        } else {
            shutdown.await;
        }
    };
    let server_config = config.clone();
    let server_store = store.clone();
    let server = tokio::spawn(async move { run_server(listener, &server_config, server_store, stop).await });
    let summary = replay(&replay_config, store).await;
    let _ = done_tx.send(());
    server.await.expect("server task panicked")?;
    Ok(summary?)
}
