//! Typed client for the CoronaVis HTTP API.

use chrono::NaiveDate;
use coronavis_api::{
    ApiError, CohortReport, DailySentimentSeries, Endpoint, Envelope, FrequencySeries, Health, Histogram,
    LabelSummary, MobilityView, RelevanceRanking, SubjectivitySeries, TopBigrams, TopWords, TopicTrends,
    TopicVisPayload, WordCloud,
};
use coronavis_core::analysis::Polarity;
use coronavis_core::sentiment::Cohort;
use coronavis_core::{Scope, Timeframe};
use serde::de::DeserializeOwned;

#[derive(Debug, thiserror::Error)]
pub enum ClientError {
    #[error("request failed: {0}")]
    Http(#[from] reqwest::Error),
    #[error("server returned {status}: {error}")]
    Api { status: u16, error: ApiError },
    #[error("server returned {status} with an unexpected body: {body}")]
    Unexpected { status: u16, body: String },
}

impl ClientError {
    /// The API error code, when the server sent a structured error.
    pub fn api_error(&self) -> Option<&ApiError> {
        match self {
            ClientError::Api { error, .. } => Some(error),
            _ => None,
        }
    }
}

/// Query parameters, omitting unset values.
#[derive(Debug, Default, Clone)]
pub struct Params(Vec<(&'static str, String)>);

impl Params {
    pub fn new() -> Self {
        Params::default()
    }

    pub fn set(mut self, key: &'static str, value: impl ToString) -> Self {
        self.0.push((key, value.to_string()));
        self
    }

    pub fn opt(self, key: &'static str, value: Option<impl ToString>) -> Self {
        match value {
            Some(v) => self.set(key, v),
            None => self,
        }
    }

    fn scope(self, scope: Scope) -> Self {
        match scope {
            Scope::Nationwide => self,
            s => self.set("state", s),
        }
    }

    fn timeframe(self, timeframe: Timeframe) -> Self {
        match timeframe {
            Timeframe::Today => self.set("range", "today"),
            Timeframe::Yesterday => self.set("range", "yesterday"),
            Timeframe::All => self.set("range", "all"),
            Timeframe::Custom(r) => self.set("range", "custom").set("from", r.from).set("to", r.to),
        }
    }

    pub fn pairs(&self) -> &[(&'static str, String)] {
        &self.0
    }
}

fn cohort_param(c: Cohort) -> &'static str {
    match c {
        Cohort::All => "all",
        Cohort::Verified => "verified",
        Cohort::NonVerified => "nonverified",
    }
}

#[derive(Debug, Clone)]
pub struct Client {
    base: String,
    http: reqwest::Client,
}

impl Client {
    /// `base_url` like `http://127.0.0.1:8080`.
    pub fn new(base_url: impl Into<String>) -> Self {
        Client::with_http(base_url, reqwest::Client::new())
    }

    pub fn with_http(base_url: impl Into<String>, http: reqwest::Client) -> Self {
        Client {
            base: base_url.into().trim_end_matches('/').to_string(),
            http,
        }
    }

    /// GET `path` and return the raw JSON body; structured errors become
    /// [`ClientError::Api`].
    pub async fn get_json(&self, path: &str, params: &Params) -> Result<serde_json::Value, ClientError> {
        let resp = self
            .http
            .get(format!("{}{}", self.base, path))
            .query(params.pairs())
            .send()
            .await?;
        let status = resp.status().as_u16();
        let body = resp.text().await?;
        if (200..300).contains(&status) {
            return serde_json::from_str(&body).map_err(|_| ClientError::Unexpected { status, body });
        }
        match serde_json::from_str::<ApiError>(&body) {
            Ok(error) => Err(ClientError::Api { status, error }),
            Err(_) => Err(ClientError::Unexpected { status, body }),
        }
    }

    async fn get<T: DeserializeOwned>(&self, endpoint: Endpoint, params: Params) -> Result<Envelope<T>, ClientError> {
        let value = self.get_json(endpoint.path(), &params).await?;
        serde_json::from_value(value.clone()).map_err(|_| ClientError::Unexpected {
            status: 200,
            body: value.to_string(),
        })
    }

    pub async fn health(&self) -> Result<Envelope<Health>, ClientError> {
        self.get(Endpoint::Health, Params::new()).await
    }

    pub async fn frequency(
        &self,
        scope: Scope,
        from: Option<NaiveDate>,
        to: Option<NaiveDate>,
    ) -> Result<Envelope<FrequencySeries>, ClientError> {
        let p = Params::new().scope(scope).opt("from", from).opt("to", to);
        self.get(Endpoint::Frequency, p).await
    }

    pub async fn top_words(&self, scope: Scope, k: Option<usize>) -> Result<Envelope<TopWords>, ClientError> {
        self.get(Endpoint::TopWords, Params::new().scope(scope).opt("k", k)).await
    }

    pub async fn top_bigrams(&self, scope: Scope, k: Option<usize>) -> Result<Envelope<TopBigrams>, ClientError> {
        self.get(Endpoint::TopBigrams, Params::new().scope(scope).opt("k", k)).await
    }

    pub async fn frequent_topics(&self, scope: Scope, k: Option<usize>) -> Result<Envelope<TopicTrends>, ClientError> {
        self.get(Endpoint::FrequentTopics, Params::new().scope(scope).opt("k", k)).await
    }

    pub async fn featured_topics(&self, scope: Scope, k: Option<usize>) -> Result<Envelope<TopicTrends>, ClientError> {
        self.get(Endpoint::FeaturedTopics, Params::new().scope(scope).opt("k", k)).await
    }

    pub async fn sentiment_series(
        &self,
        scope: Scope,
        timeframe: Timeframe,
    ) -> Result<Envelope<DailySentimentSeries>, ClientError> {
        let p = Params::new().scope(scope).timeframe(timeframe);
        self.get(Endpoint::SentimentSeries, p).await
    }

    pub async fn subjectivity_series(
        &self,
        scope: Scope,
        timeframe: Timeframe,
    ) -> Result<Envelope<SubjectivitySeries>, ClientError> {
        let p = Params::new().scope(scope).timeframe(timeframe);
        self.get(Endpoint::SubjectivitySeries, p).await
    }

    pub async fn distribution(&self, bins: Option<usize>) -> Result<Envelope<Histogram>, ClientError> {
        self.get(Endpoint::SentimentDistribution, Params::new().opt("bins", bins)).await
    }

    pub async fn labels(&self, cohort: Cohort) -> Result<Envelope<LabelSummary>, ClientError> {
        let p = Params::new().set("cohort", cohort_param(cohort));
        self.get(Endpoint::SentimentLabels, p).await
    }

    pub async fn cohorts(&self, min_tweets: Option<u64>) -> Result<Envelope<CohortReport>, ClientError> {
        let p = Params::new().opt("min_tweets", min_tweets);
        self.get(Endpoint::SentimentCohorts, p).await
    }

    pub async fn wordcloud(
        &self,
        scope: Scope,
        timeframe: Timeframe,
        polarity: Polarity,
        cohort: Cohort,
        k: Option<usize>,
    ) -> Result<Envelope<WordCloud>, ClientError> {
        let polarity = match polarity {
            Polarity::Pos => "pos",
            Polarity::Neg => "neg",
        };
        let p = Params::new()
            .scope(scope)
            .timeframe(timeframe)
            .set("polarity", polarity)
            .set("cohort", cohort_param(cohort))
            .opt("k", k);
        self.get(Endpoint::Wordcloud, p).await
    }

    pub async fn mobility(&self, lag_weeks: Option<u32>) -> Result<Envelope<MobilityView>, ClientError> {
        self.get(Endpoint::MobilityWeekly, Params::new().opt("lag", lag_weeks)).await
    }

    pub async fn lda_topics(&self) -> Result<Envelope<TopicVisPayload>, ClientError> {
        self.get(Endpoint::LdaTopics, Params::new()).await
    }

    pub async fn lda_terms(
        &self,
        topic: usize,
        lambda: Option<f64>,
        n: Option<usize>,
    ) -> Result<Envelope<RelevanceRanking>, ClientError> {
        let p = Params::new().set("topic", topic).opt("lambda", lambda).opt("n", n);
        self.get(Endpoint::LdaTerms, p).await
    }
}
