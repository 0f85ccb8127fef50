//! Shared HTTP API contract: endpoint paths, response envelopes, error
//! bodies, query parsing and the JSON schema of every response.

mod error;
pub mod query;

use std::collections::BTreeMap;

use chrono::NaiveDate;
use schemars::{schema_for, JsonSchema};
use serde::{Deserialize, Serialize};

pub use coronavis_core::analysis::{LabelSummary, MobilityView, SubjectivitySeries, WordCloud};
pub use coronavis_core::counting::WordCount;
pub use coronavis_core::sentiment::{CohortReport, DailySentimentSeries, Histogram};
pub use coronavis_core::topicmodel::{RelevanceRanking, TopicVisPayload};
pub use coronavis_core::trends::{BigramCount, DailyCount, TopicTrendSeries};
pub use coronavis_core::Scope;
pub use error::{ApiError, ErrorCode, ErrorDetail};

/// Every successful response: the snapshot's as-of date and the payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct Envelope<T> {
    /// Date of the newest tweet in the answering snapshot.
    pub as_of: Option<NaiveDate>,
    pub data: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct Health {
    pub status: String,
    pub version: String,
    pub tweets: u64,
    pub files: u64,
    pub lda_ready: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct FrequencySeries {
    pub scope: Scope,
    pub points: Vec<DailyCount>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct TopWords {
    pub scope: Scope,
    pub words: Vec<WordCount>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct TopBigrams {
    pub scope: Scope,
    pub bigrams: Vec<BigramCount>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct TopicTrends {
    pub scope: Scope,
    pub series: Vec<TopicTrendSeries>,
}

/// The served endpoints. All are `GET`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Endpoint {
    Health,
    Frequency,
    TopWords,
    TopBigrams,
    FrequentTopics,
    FeaturedTopics,
    SentimentSeries,
    SentimentDistribution,
    SentimentLabels,
    SentimentCohorts,
    Wordcloud,
    SubjectivitySeries,
    MobilityWeekly,
    LdaTopics,
    LdaTerms,
}

impl Endpoint {
    pub const ALL: [Endpoint; 15] = [
        Endpoint::Health,
        Endpoint::Frequency,
        Endpoint::TopWords,
        Endpoint::TopBigrams,
        Endpoint::FrequentTopics,
        Endpoint::FeaturedTopics,
        Endpoint::SentimentSeries,
        Endpoint::SentimentDistribution,
        Endpoint::SentimentLabels,
        Endpoint::SentimentCohorts,
        Endpoint::Wordcloud,
        Endpoint::SubjectivitySeries,
        Endpoint::MobilityWeekly,
        Endpoint::LdaTopics,
        Endpoint::LdaTerms,
    ];

    pub fn path(&self) -> &'static str {
        match self {
            Endpoint::Health => "/api/health",
            Endpoint::Frequency => "/api/frequency",
            Endpoint::TopWords => "/api/words/top",
            Endpoint::TopBigrams => "/api/bigrams/top",
            Endpoint::FrequentTopics => "/api/topics/frequent",
            Endpoint::FeaturedTopics => "/api/topics/featured",
            Endpoint::SentimentSeries => "/api/sentiment/series",
            Endpoint::SentimentDistribution => "/api/sentiment/distribution",
            Endpoint::SentimentLabels => "/api/sentiment/labels",
            Endpoint::SentimentCohorts => "/api/sentiment/cohorts",
            Endpoint::Wordcloud => "/api/wordcloud",
            Endpoint::SubjectivitySeries => "/api/subjectivity/series",
            Endpoint::MobilityWeekly => "/api/mobility/weekly",
            Endpoint::LdaTopics => "/api/lda/topics",
            Endpoint::LdaTerms => "/api/lda/terms",
        }
    }

    pub fn from_path(path: &str) -> Option<Endpoint> {
        Endpoint::ALL.into_iter().find(|e| e.path() == path)
    }

    /// Schema of the success body (the envelope around the payload).
    pub fn response_schema(&self) -> serde_json::Value {
        let schema = match self {
            Endpoint::Health => schema_for!(Envelope<Health>),
            Endpoint::Frequency => schema_for!(Envelope<FrequencySeries>),
            Endpoint::TopWords => schema_for!(Envelope<TopWords>),
            Endpoint::TopBigrams => schema_for!(Envelope<TopBigrams>),
            Endpoint::FrequentTopics | Endpoint::FeaturedTopics => schema_for!(Envelope<TopicTrends>),
            Endpoint::SentimentSeries => schema_for!(Envelope<DailySentimentSeries>),
            Endpoint::SentimentDistribution => schema_for!(Envelope<Histogram>),
            Endpoint::SentimentLabels => schema_for!(Envelope<LabelSummary>),
            Endpoint::SentimentCohorts => schema_for!(Envelope<CohortReport>),
            Endpoint::Wordcloud => schema_for!(Envelope<WordCloud>),
            Endpoint::SubjectivitySeries => schema_for!(Envelope<SubjectivitySeries>),
            Endpoint::MobilityWeekly => schema_for!(Envelope<MobilityView>),
            Endpoint::LdaTopics => schema_for!(Envelope<TopicVisPayload>),
            Endpoint::LdaTerms => schema_for!(Envelope<RelevanceRanking>),
        };
        serde_json::to_value(schema).expect("schemas serialize")
    }
}

/// Schema of every error body.
pub fn error_schema() -> serde_json::Value {
    serde_json::to_value(schema_for!(ApiError)).expect("schemas serialize")
}

/// Path to success schema for every endpoint, plus `"error"`.
pub fn schema_registry() -> BTreeMap<String, serde_json::Value> {
    let mut out: BTreeMap<String, serde_json::Value> = Endpoint::ALL
        .iter()
        .map(|e| (e.path().to_string(), e.response_schema()))
        .collect();
    out.insert("error".to_string(), error_schema());
    out
}

pub const SCHEMAS_PATH: &str = "/api/schemas";
