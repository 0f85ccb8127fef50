use std::sync::Arc;

use axum::extract::rejection::QueryRejection;
use axum::extract::{Query, State};
use axum::http::{HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{any, get};
use axum::{Json, Router};
use coronavis_api::query::{
    parse_cohort, parse_date, parse_k, parse_polarity, parse_scope, parse_timeframe, CohortsQuery, DistributionQuery,
    FrequencyQuery, LabelsQuery, LdaTermsQuery, MobilityQuery, SeriesQuery, TopQuery, WordcloudQuery,
};
use coronavis_api::{
    schema_registry, ApiError, CohortReport, DailySentimentSeries, Endpoint, Envelope, ErrorCode, FrequencySeries,
    Health, Histogram, LabelSummary, MobilityView, RelevanceRanking, SubjectivitySeries, TopBigrams, TopWords,
    TopicTrends, TopicVisPayload, WordCloud, SCHEMAS_PATH,
};
use coronavis_core::analysis::{AnalyticsSnapshot, LdaState};
use serde::Serialize;
use tower_http::cors::{AllowOrigin, CorsLayer};
use tower_http::services::ServeDir;
use tower_http::trace::TraceLayer;

use crate::store::{Clock, SnapshotStore};

#[derive(Clone)]
pub struct AppState {
    pub store: Arc<SnapshotStore>,
    pub clock: Clock,
}

/// Error response: status from the code, body `{"error": {...}}`.
pub struct Failure(pub ApiError);

impl IntoResponse for Failure {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.0.code().http_status()).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, Json(self.0)).into_response()
    }
}

impl<E: Into<ApiError>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.into())
    }
}

type ApiResult<T> = Result<Json<Envelope<T>>, Failure>;

fn query<T>(q: Result<Query<T>, QueryRejection>) -> Result<T, Failure> {
    q.map(|Query(q)| q)
        .map_err(|e| Failure(ApiError::new(ErrorCode::BadParameter, e.body_text())))
}

/// Runs a query against the current snapshot on the blocking pool and wraps
/// the result with that snapshot's as-of date.
async fn answer<T, F>(state: &AppState, f: F) -> ApiResult<T>
where
    T: Serialize + Send + 'static,
    F: FnOnce(&AnalyticsSnapshot, Clock) -> Result<T, ApiError> + Send + 'static,
{
    let snapshot = state.store.load();
    let clock = state.clock;
    tokio::task::spawn_blocking(move || {
        let data = f(&snapshot, clock)?;
        Ok(Json(Envelope {
            as_of: snapshot.as_of(),
            data,
        }))
    })
    .await
    .map_err(|e| Failure(ApiError::new(ErrorCode::Internal, e.to_string())))?
}

async fn health(State(s): State<AppState>) -> ApiResult<Health> {
    answer(&s, |snap, _| {
        Ok(Health {
            status: "ok".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            tweets: snap.tweet_count() as u64,
            files: snap.files().len() as u64,
            lda_ready: matches!(snap.lda(), LdaState::Ready { .. }),
        })
    })
    .await
}

async fn frequency(State(s): State<AppState>, q: Result<Query<FrequencyQuery>, QueryRejection>) -> ApiResult<FrequencySeries> {
    let q = query(q)?;
    let scope = parse_scope(q.state.as_deref())?;
    let from = parse_date("from", q.from.as_deref())?;
    let to = parse_date("to", q.to.as_deref())?;
    answer(&s, move |snap, _| {
        Ok(FrequencySeries {
            scope,
            points: snap.frequency(scope, from, to)?,
        })
    })
    .await
}

async fn top_words(State(s): State<AppState>, q: Result<Query<TopQuery>, QueryRejection>) -> ApiResult<TopWords> {
    let q = query(q)?;
    let scope = parse_scope(q.state.as_deref())?;
    answer(&s, move |snap, _| {
        let k = parse_k(q.k.as_deref(), snap.config().defaults.top_words)?;
        Ok(TopWords {
            scope,
            words: snap.top_words(scope, k),
        })
    })
    .await
}

async fn top_bigrams(State(s): State<AppState>, q: Result<Query<TopQuery>, QueryRejection>) -> ApiResult<TopBigrams> {
    let q = query(q)?;
    let scope = parse_scope(q.state.as_deref())?;
    answer(&s, move |snap, _| {
        let k = parse_k(q.k.as_deref(), snap.config().defaults.top_bigrams)?;
        Ok(TopBigrams {
            scope,
            bigrams: snap.top_bigrams(scope, k),
        })
    })
    .await
}

async fn frequent_topics(State(s): State<AppState>, q: Result<Query<TopQuery>, QueryRejection>) -> ApiResult<TopicTrends> {
    let q = query(q)?;
    let scope = parse_scope(q.state.as_deref())?;
    answer(&s, move |snap, _| {
        let k = parse_k(q.k.as_deref(), snap.config().defaults.frequent_topics)?;
        Ok(TopicTrends {
            scope,
            series: snap.frequent_topics(scope, k),
        })
    })
    .await
}

async fn featured_topics(State(s): State<AppState>, q: Result<Query<TopQuery>, QueryRejection>) -> ApiResult<TopicTrends> {
    let q = query(q)?;
    let scope = parse_scope(q.state.as_deref())?;
    answer(&s, move |snap, _| {
        let k = parse_k(q.k.as_deref(), snap.config().defaults.featured_topics)?;
        Ok(TopicTrends {
            scope,
            series: snap.featured_topics(scope, k),
        })
    })
    .await
}

async fn sentiment_series(
    State(s): State<AppState>,
    q: Result<Query<SeriesQuery>, QueryRejection>,
) -> ApiResult<DailySentimentSeries> {
    let q = query(q)?;
    let scope = parse_scope(q.state.as_deref())?;
    let timeframe = parse_timeframe(q.range.as_deref(), q.from.as_deref(), q.to.as_deref())?;
    answer(&s, move |snap, clock| Ok(snap.sentiment_series(scope, timeframe, clock.today(snap)))).await
}

async fn subjectivity_series(
    State(s): State<AppState>,
    q: Result<Query<SeriesQuery>, QueryRejection>,
) -> ApiResult<SubjectivitySeries> {
    let q = query(q)?;
    let scope = parse_scope(q.state.as_deref())?;
    let timeframe = parse_timeframe(q.range.as_deref(), q.from.as_deref(), q.to.as_deref())?;
    answer(&s, move |snap, clock| Ok(snap.subjectivity_series(scope, timeframe, clock.today(snap)))).await
}

async fn distribution(
    State(s): State<AppState>,
    q: Result<Query<DistributionQuery>, QueryRejection>,
) -> ApiResult<Histogram> {
    let q = query(q)?;
    answer(&s, move |snap, _| Ok(snap.distribution(q.bins(snap.config().defaults.histogram_bins)?))).await
}

async fn labels(State(s): State<AppState>, q: Result<Query<LabelsQuery>, QueryRejection>) -> ApiResult<LabelSummary> {
    let q = query(q)?;
    let cohort = parse_cohort(q.cohort.as_deref())?;
    answer(&s, move |snap, _| Ok(snap.labels(cohort))).await
}

async fn cohorts(State(s): State<AppState>, q: Result<Query<CohortsQuery>, QueryRejection>) -> ApiResult<CohortReport> {
    let q = query(q)?;
    answer(&s, move |snap, _| Ok(snap.cohorts(q.min_tweets(snap.config().defaults.cohort_min_tweets)?))).await
}

async fn wordcloud(State(s): State<AppState>, q: Result<Query<WordcloudQuery>, QueryRejection>) -> ApiResult<WordCloud> {
    let q = query(q)?;
    let scope = parse_scope(q.state.as_deref())?;
    let timeframe = parse_timeframe(q.range.as_deref(), q.from.as_deref(), q.to.as_deref())?;
    let polarity = parse_polarity(q.polarity.as_deref())?;
    let cohort = parse_cohort(q.cohort.as_deref())?;
    answer(&s, move |snap, clock| {
        let k = parse_k(q.k.as_deref(), snap.config().defaults.wordcloud_words)?;
        Ok(snap.wordcloud(scope, timeframe, clock.today(snap), polarity, cohort, k))
    })
    .await
}

async fn mobility(State(s): State<AppState>, q: Result<Query<MobilityQuery>, QueryRejection>) -> ApiResult<MobilityView> {
    let q = query(q)?;
    answer(&s, move |snap, _| Ok(snap.mobility(q.lag(snap.config().defaults.lag_weeks)?))).await
}

async fn lda_topics(State(s): State<AppState>) -> ApiResult<TopicVisPayload> {
    answer(&s, |snap, _| Ok(snap.lda_topics()?.clone())).await
}

async fn lda_terms(State(s): State<AppState>, q: Result<Query<LdaTermsQuery>, QueryRejection>) -> ApiResult<RelevanceRanking> {
    let q = query(q)?;
    let topic = q.topic()?;
    answer(&s, move |snap, _| {
        let (lambda, n) = match &snap.config().lda {
            Some(l) => (q.lambda(l.lambda)?, q.n(l.top_terms)?),
            None => (q.lambda(0.6)?, q.n(30)?),
        };
        Ok(snap.lda_terms(topic, lambda, n)?)
    })
    .await
}

async fn schemas() -> Json<std::collections::BTreeMap<String, serde_json::Value>> {
    Json(schema_registry())
}

async fn api_not_found() -> Failure {
    Failure(ApiError::new(ErrorCode::NotFound, "no such endpoint"))
}

/// CORS policy for a list of origins; `*` allows any origin.
pub fn cors_layer(origins: &[String]) -> CorsLayer {
    let allow = if origins.iter().any(|o| o == "*") {
        AllowOrigin::any()
    } else {
        AllowOrigin::list(origins.iter().filter_map(|o| HeaderValue::from_str(o).ok()))
    };
    CorsLayer::new().allow_origin(allow).allow_methods([Method::GET])
}

/// All API routes. Non-API paths fall through to `static_dir` when given.
pub fn router(state: AppState, cors_origins: &[String], static_dir: Option<&std::path::Path>) -> Router {
    let route = |e: Endpoint| e.path();
    let api = Router::new()
        .route(route(Endpoint::Health), get(health))
        .route(route(Endpoint::Frequency), get(frequency))
        .route(route(Endpoint::TopWords), get(top_words))
        .route(route(Endpoint::TopBigrams), get(top_bigrams))
        .route(route(Endpoint::FrequentTopics), get(frequent_topics))
        .route(route(Endpoint::FeaturedTopics), get(featured_topics))
        .route(route(Endpoint::SentimentSeries), get(sentiment_series))
        .route(route(Endpoint::SentimentDistribution), get(distribution))
        .route(route(Endpoint::SentimentLabels), get(labels))
        .route(route(Endpoint::SentimentCohorts), get(cohorts))
        .route(route(Endpoint::Wordcloud), get(wordcloud))
        .route(route(Endpoint::SubjectivitySeries), get(subjectivity_series))
        .route(route(Endpoint::MobilityWeekly), get(mobility))
        .route(route(Endpoint::LdaTopics), get(lda_topics))
        .route(route(Endpoint::LdaTerms), get(lda_terms))
        .route(SCHEMAS_PATH, get(schemas))
        .route("/api/{*rest}", any(api_not_found))
        .with_state(state);
    let app = match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.fallback(api_not_found),
    };
    app.layer(cors_layer(cors_origins)).layer(TraceLayer::new_for_http())
}
