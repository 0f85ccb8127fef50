//! Immutable analytics snapshot over one record set.
//!
//! A snapshot scores every tweet once, eagerly computes the default report
//! and answers parameterized queries from the same scored set. Snapshots
//! built incrementally with [`AnalyticsSnapshot::extend`] compare equal to one
//! built from the union of the same records in a single pass.

use std::collections::HashSet;
use std::sync::Arc;

use chrono::{Duration, NaiveDate};
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::corpus::{dedup, TweetRecord};
use crate::counting::WordCount;
use crate::mobility::{
    build_trajectories, default_epoch, detect_movements, lagged_join, mobility_correlation, weekly_mobility,
    CorrelationReport, InfectionSeries, JoinedRow, WeekBins, WeeklyMobility, WeeklyMobilityReport,
    DEFAULT_WINDOW_DAYS,
};
use crate::scope::{DateRange, Scope, Timeframe};
use crate::sentiment::{
    aggregate_series, cohort_stats, label_counts, polarity_wordclouds, sentiment_histogram, Cohort, CohortReport,
    DailySentimentSeries, Histogram, LabelCounts, LabelFractions, ScoredTweet, SentimentScorer, WordClouds,
};
use crate::textproc::StopwordPolicy;
use crate::topicmodel::{
    export_topicvis, fit_records, relevant_terms, LdaModel, LdaParams, RelevanceRanking, TopicModelError,
    TopicVisPayload, VocabParams, DEFAULT_LAMBDA, DEFAULT_TOP_TERMS,
};
use crate::trends::{
    featured_topic_trends, frequent_topic_trends, top_bigrams, top_words_in, tweet_frequency_in, BigramCount,
    DailyCount, FeaturedTopicList, TopicTrendSeries,
};

/// Sizes used for the eagerly computed report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ReportDefaults {
    pub top_words: usize,
    pub top_bigrams: usize,
    pub frequent_topics: usize,
    pub featured_topics: usize,
    pub histogram_bins: usize,
    pub cohort_min_tweets: u64,
    pub wordcloud_words: usize,
    pub lag_weeks: u32,
}

impl Default for ReportDefaults {
    fn default() -> Self {
        ReportDefaults {
            top_words: 50,
            top_bigrams: 20,
            frequent_topics: 10,
            featured_topics: 50,
            histogram_bins: 20,
            cohort_min_tweets: 500,
            wordcloud_words: 50,
            lag_weeks: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdaSettings {
    pub vocab: VocabParams,
    pub params: LdaParams,
    pub lambda: f64,
    pub top_terms: usize,
}

impl Default for LdaSettings {
    fn default() -> Self {
        LdaSettings {
            vocab: VocabParams::default(),
            params: LdaParams::default(),
            lambda: DEFAULT_LAMBDA,
            top_terms: DEFAULT_TOP_TERMS,
        }
    }
}

/// Everything a snapshot needs besides the records.
#[derive(Debug, Clone)]
pub struct AnalyticsConfig {
    pub policy: StopwordPolicy,
    pub featured: FeaturedTopicList,
    pub scorer: SentimentScorer,
    pub mobility_epoch: NaiveDate,
    pub mobility_window_days: i64,
    pub infections: Option<InfectionSeries>,
    /// `None` disables topic modeling.
    pub lda: Option<LdaSettings>,
    pub defaults: ReportDefaults,
}

impl Default for AnalyticsConfig {
    fn default() -> Self {
        AnalyticsConfig {
            policy: StopwordPolicy::default(),
            featured: FeaturedTopicList::bundled(),
            scorer: SentimentScorer::default(),
            mobility_epoch: default_epoch(),
            mobility_window_days: DEFAULT_WINDOW_DAYS,
            infections: None,
            lda: None,
            defaults: ReportDefaults::default(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum QueryError {
    #[error("invalid date range: from {from} is after to {to}")]
    InvalidRange { from: NaiveDate, to: NaiveDate },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("topic model unavailable: {0}")]
    LdaUnavailable(String),
    #[error(transparent)]
    Topic(#[from] TopicModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Pos,
    Neg,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct SubjectivityPoint {
    pub date: NaiveDate,
    pub mean_subjectivity: Option<f64>,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct SubjectivitySeries {
    pub scope: Scope,
    pub points: Vec<SubjectivityPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct LabelSummary {
    pub cohort: Cohort,
    pub counts: LabelCounts,
    pub fractions: LabelFractions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct WordCloud {
    pub scope: Scope,
    pub cohort: Cohort,
    pub polarity: Polarity,
    pub words: Vec<WordCount>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct MobilityView {
    pub lag_weeks: u32,
    pub window_days: i64,
    pub movements: u64,
    pub weeks: Vec<WeeklyMobility>,
    pub overflow: u64,
    /// Empty when no infection counts are loaded.
    pub joined: Vec<JoinedRow>,
    /// `None` without infection data or with too few joined rows.
    pub correlation: Option<CorrelationReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct CohortLabels {
    pub all: LabelSummary,
    pub verified: LabelSummary,
    pub nonverified: LabelSummary,
}

/// Default-parameter aggregates for every analytic, one field per figure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct AnalyticsReport {
    pub as_of: Option<NaiveDate>,
    pub tweet_count: u64,
    pub user_count: u64,
    pub date_range: Option<DateRange>,
    pub files: Vec<NaiveDate>,
    pub frequency: Vec<DailyCount>,
    pub top_words: Vec<WordCount>,
    pub top_bigrams: Vec<BigramCount>,
    pub frequent_topics: Vec<TopicTrendSeries>,
    pub featured_topics: Vec<TopicTrendSeries>,
    pub sentiment_series: DailySentimentSeries,
    pub subjectivity_series: SubjectivitySeries,
    pub distribution: Histogram,
    pub labels: CohortLabels,
    pub cohorts: CohortReport,
    pub wordclouds: WordClouds,
    pub mobility: MobilityView,
    pub topics: Option<TopicVisPayload>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LdaState {
    Disabled,
    Failed(String),
    Ready { model: LdaModel, vis: TopicVisPayload },
}

#[derive(Debug, Clone)]
pub struct AnalyticsSnapshot {
    config: Arc<AnalyticsConfig>,
    files: Vec<NaiveDate>,
    tweets: Vec<ScoredTweet>,
    weekly: WeeklyMobilityReport,
    movements: u64,
    lda: LdaState,
    report: AnalyticsReport,
}

impl PartialEq for AnalyticsSnapshot {
    fn eq(&self, other: &Self) -> bool {
        self.files == other.files
            && self.tweets == other.tweets
            && self.weekly == other.weekly
            && self.movements == other.movements
            && self.lda == other.lda
            && self.report == other.report
    }
}

fn canonical_order(tweets: &mut [ScoredTweet]) {
    tweets.sort_by(|a, b| {
        a.record
            .created_at
            .cmp(&b.record.created_at)
            .then_with(|| a.record.tweet_id.len().cmp(&b.record.tweet_id.len()))
            .then_with(|| a.record.tweet_id.cmp(&b.record.tweet_id))
    });
}

impl AnalyticsSnapshot {
    /// Snapshot of no data.
    pub fn empty(config: Arc<AnalyticsConfig>) -> Self {
        Self::from_scored(config, Vec::new(), Vec::new())
    }

    /// Scores, deduplicates and analyzes `records` in one pass. `files`
    /// lists the daily files the records came from.
    pub fn build(config: Arc<AnalyticsConfig>, records: Vec<TweetRecord>, mut files: Vec<NaiveDate>) -> Self {
        let tweets = dedup(records).into_iter().map(|r| config.scorer.score(r)).collect();
        files.sort();
        files.dedup();
        Self::from_scored(config, tweets, files)
    }

    /// New snapshot with one more day of records. Existing tweets keep their
    /// scores; only unseen tweet ids are scored.
    pub fn extend(&self, records: Vec<TweetRecord>, file: Option<NaiveDate>) -> Self {
        let mut seen: HashSet<&str> = self.tweets.iter().map(|t| t.record.tweet_id.as_str()).collect();
        let mut fresh = Vec::new();
        for r in &records {
            if seen.insert(r.tweet_id.as_str()) {
                fresh.push(r.clone());
            }
        }
        let mut tweets = self.tweets.clone();
        tweets.extend(fresh.into_iter().map(|r| self.config.scorer.score(r)));
        let mut files = self.files.clone();
        files.extend(file);
        files.sort();
        files.dedup();
        Self::from_scored(self.config.clone(), tweets, files)
    }

    fn from_scored(config: Arc<AnalyticsConfig>, mut tweets: Vec<ScoredTweet>, files: Vec<NaiveDate>) -> Self {
        canonical_order(&mut tweets);
        let range = DateRange::covering(tweets.iter().map(|t| &t.record));

        let movements = match range {
            Some(_) => detect_movements(
                &build_trajectories(&tweets),
                Duration::days(config.mobility_window_days),
            ),
            None => Vec::new(),
        };
        let bins = match range {
            Some(r) => WeekBins::through(config.mobility_epoch, r.to),
            None => WeekBins::new(config.mobility_epoch, 0),
        };
        let weekly = weekly_mobility(&movements, bins);

        let lda = match &config.lda {
            None => LdaState::Disabled,
            Some(settings) => fit_lda(&tweets, &config.policy, settings),
        };

        let mut snapshot = AnalyticsSnapshot {
            config,
            files,
            tweets,
            weekly,
            movements: movements.len() as u64,
            lda,
            report: placeholder_report(),
        };
        snapshot.report = snapshot.compute_report(range);
        snapshot
    }

    fn compute_report(&self, range: Option<DateRange>) -> AnalyticsReport {
        let d = &self.config.defaults;
        let clock = self.clock();
        let users: HashSet<&str> = self.tweets.iter().map(|t| t.record.user_id.as_str()).collect();
        let label_summary = |cohort| self.labels(cohort);
        AnalyticsReport {
            as_of: self.as_of(),
            tweet_count: self.tweets.len() as u64,
            user_count: users.len() as u64,
            date_range: range,
            files: self.files.clone(),
            frequency: range
                .map(|r| tweet_frequency_in(&self.tweets, Scope::Nationwide, r))
                .unwrap_or_default(),
            top_words: self.top_words(Scope::Nationwide, d.top_words),
            top_bigrams: self.top_bigrams(Scope::Nationwide, d.top_bigrams),
            frequent_topics: self.frequent_topics(Scope::Nationwide, d.frequent_topics),
            featured_topics: self.featured_topics(Scope::Nationwide, d.featured_topics),
            sentiment_series: self.sentiment_series(Scope::Nationwide, Timeframe::All, clock),
            subjectivity_series: self.subjectivity_series(Scope::Nationwide, Timeframe::All, clock),
            distribution: self.distribution(d.histogram_bins),
            labels: CohortLabels {
                all: label_summary(Cohort::All),
                verified: label_summary(Cohort::Verified),
                nonverified: label_summary(Cohort::NonVerified),
            },
            cohorts: self.cohorts(d.cohort_min_tweets),
            wordclouds: polarity_wordclouds(&self.tweets, Cohort::All, d.wordcloud_words, &self.config.policy),
            mobility: self.mobility(d.lag_weeks),
            topics: self.lda_topics().ok().cloned(),
        }
    }

    pub fn config(&self) -> &AnalyticsConfig {
        &self.config
    }

    /// Date of the latest tweet, the default reference for "today".
    pub fn as_of(&self) -> Option<NaiveDate> {
        self.tweets.last().map(|t| t.record.date())
    }

    /// Reference date for "today": the later of `as_of` and the newest
    /// ingested file, or the mobility epoch for an empty snapshot.
    pub fn clock(&self) -> NaiveDate {
        self.as_of()
            .max(self.files.last().copied())
            .unwrap_or(self.config.mobility_epoch)
    }

    pub fn files(&self) -> &[NaiveDate] {
        &self.files
    }

    /// Scored tweets in time order.
    pub fn tweets(&self) -> &[ScoredTweet] {
        &self.tweets
    }

    pub fn tweet_count(&self) -> usize {
        self.tweets.len()
    }

    pub fn date_range(&self) -> Option<DateRange> {
        self.report.date_range
    }

    pub fn report(&self) -> &AnalyticsReport {
        &self.report
    }

    pub fn lda(&self) -> &LdaState {
        &self.lda
    }

    /// Daily tweet counts. Missing bounds default to the corpus span.
    pub fn frequency(
        &self,
        scope: Scope,
        from: Option<NaiveDate>,
        to: Option<NaiveDate>,
    ) -> Result<Vec<DailyCount>, QueryError> {
        let corpus = self.date_range();
        let (Some(from), Some(to)) = (from.or(corpus.map(|r| r.from)), to.or(corpus.map(|r| r.to))) else {
            return Ok(Vec::new());
        };
        let range = DateRange::new(from, to).ok_or(QueryError::InvalidRange { from, to })?;
        Ok(tweet_frequency_in(&self.tweets, scope, range))
    }

    pub fn top_words(&self, scope: Scope, k: usize) -> Vec<WordCount> {
        top_words_in(&self.tweets, scope, k, &self.config.policy)
    }

    pub fn top_bigrams(&self, scope: Scope, k: usize) -> Vec<BigramCount> {
        top_bigrams(&self.tweets, scope, k, &self.config.policy)
    }

    pub fn frequent_topics(&self, scope: Scope, k: usize) -> Vec<TopicTrendSeries> {
        frequent_topic_trends(&self.tweets, scope, k, &self.config.policy)
    }

    pub fn featured_topics(&self, scope: Scope, k: usize) -> Vec<TopicTrendSeries> {
        featured_topic_trends(&self.tweets, scope, &self.config.featured, k)
    }

    pub fn sentiment_series(&self, scope: Scope, timeframe: Timeframe, clock: NaiveDate) -> DailySentimentSeries {
        aggregate_series(&self.tweets, scope, timeframe, clock)
    }

    pub fn subjectivity_series(&self, scope: Scope, timeframe: Timeframe, clock: NaiveDate) -> SubjectivitySeries {
        let series = aggregate_series(&self.tweets, scope, timeframe, clock);
        SubjectivitySeries {
            scope: series.scope,
            points: series
                .points
                .into_iter()
                .map(|p| SubjectivityPoint {
                    date: p.date,
                    mean_subjectivity: p.mean_subjectivity,
                    count: p.count,
                })
                .collect(),
        }
    }

    pub fn distribution(&self, bins: usize) -> Histogram {
        sentiment_histogram(self.tweets.iter().map(|t| t.polarity.compound), bins)
    }

    pub fn labels(&self, cohort: Cohort) -> LabelSummary {
        let counts = label_counts(&self.tweets, cohort);
        LabelSummary {
            cohort,
            counts,
            fractions: counts.normalized(),
        }
    }

    pub fn cohorts(&self, min_tweets: u64) -> CohortReport {
        cohort_stats(&self.tweets, min_tweets)
    }

    pub fn wordcloud(
        &self,
        scope: Scope,
        timeframe: Timeframe,
        clock: NaiveDate,
        polarity: Polarity,
        cohort: Cohort,
        k: usize,
    ) -> WordCloud {
        let range = timeframe.resolve(clock, self.date_range());
        let selected = self
            .tweets
            .iter()
            .filter(|t| scope.contains(&t.record) && range.is_some_and(|r| r.contains(t.record.date())));
        let clouds = polarity_wordclouds(selected, cohort, k, &self.config.policy);
        WordCloud {
            scope,
            cohort,
            polarity,
            words: match polarity {
                Polarity::Pos => clouds.positive,
                Polarity::Neg => clouds.negative,
            },
        }
    }

    pub fn mobility(&self, lag_weeks: u32) -> MobilityView {
        let joined = self
            .config
            .infections
            .as_ref()
            .map(|inf| lagged_join(&self.weekly.weeks, inf, lag_weeks))
            .unwrap_or_default();
        MobilityView {
            lag_weeks,
            window_days: self.config.mobility_window_days,
            movements: self.movements,
            weeks: self.weekly.weeks.clone(),
            overflow: self.weekly.overflow,
            correlation: mobility_correlation(&joined).ok(),
            joined,
        }
    }

    pub fn lda_topics(&self) -> Result<&TopicVisPayload, QueryError> {
        match &self.lda {
            LdaState::Ready { vis, .. } => Ok(vis),
            LdaState::Disabled => Err(QueryError::LdaUnavailable("topic modeling is disabled".into())),
            LdaState::Failed(msg) => Err(QueryError::LdaUnavailable(msg.clone())),
        }
    }

    pub fn lda_terms(&self, topic: usize, lambda: f64, n: usize) -> Result<RelevanceRanking, QueryError> {
        match &self.lda {
            LdaState::Ready { model, .. } => Ok(relevant_terms(model, topic, lambda, n)?),
            _ => Err(self.lda_topics().err().expect("not ready")),
        }
    }
}

fn fit_lda(tweets: &[ScoredTweet], policy: &StopwordPolicy, settings: &LdaSettings) -> LdaState {
    let records: Vec<TweetRecord> = tweets.iter().map(|t| t.record.clone()).collect();
    let fitted = match fit_records(&records, policy, &settings.vocab, &settings.params) {
        Ok(f) => f,
        Err(e) => return LdaState::Failed(e.to_string()),
    };
    let rankings: Result<Vec<RelevanceRanking>, TopicModelError> = (0..fitted.model.k)
        .map(|t| relevant_terms(&fitted.model, t, settings.lambda, settings.top_terms))
        .collect();
    match rankings {
        Ok(rankings) => LdaState::Ready {
            vis: export_topicvis(&fitted.model, &rankings),
            model: fitted.model,
        },
        Err(e) => LdaState::Failed(e.to_string()),
    }
}

fn placeholder_report() -> AnalyticsReport {
    AnalyticsReport {
        as_of: None,
        tweet_count: 0,
        user_count: 0,
        date_range: None,
        files: Vec::new(),
        frequency: Vec::new(),
        top_words: Vec::new(),
        top_bigrams: Vec::new(),
        frequent_topics: Vec::new(),
        featured_topics: Vec::new(),
        sentiment_series: DailySentimentSeries {
            scope: Scope::Nationwide,
            points: Vec::new(),
        },
        subjectivity_series: SubjectivitySeries {
            scope: Scope::Nationwide,
            points: Vec::new(),
        },
        distribution: sentiment_histogram(std::iter::empty(), 1),
        labels: CohortLabels {
            all: empty_labels(Cohort::All),
            verified: empty_labels(Cohort::Verified),
            nonverified: empty_labels(Cohort::NonVerified),
        },
        cohorts: cohort_stats(&[], 0),
        wordclouds: WordClouds::default(),
        mobility: MobilityView {
            lag_weeks: 0,
            window_days: 0,
            movements: 0,
            weeks: Vec::new(),
            overflow: 0,
            joined: Vec::new(),
            correlation: None,
        },
        topics: None,
    }
}

fn empty_labels(cohort: Cohort) -> LabelSummary {
    let counts = LabelCounts::default();
    LabelSummary {
        cohort,
        counts,
        fractions: counts.normalized(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::StateCode;
    use chrono::{Datelike, TimeZone, Utc};

    fn rec(id: u64, day: u32, state: &str, user: &str, text: &str) -> TweetRecord {
        TweetRecord {
            tweet_id: id.to_string(),
            created_at: Utc.with_ymd_and_hms(2020, 6, day, 10, 0, id as u32 % 60).unwrap(),
            loc: StateCode::parse(state).unwrap(),
            text: text.into(),
            user_id: user.into(),
            verified: id % 3 == 0,
        }
    }

    fn records() -> Vec<TweetRecord> {
        vec![
            rec(1, 11, "NY", "a", "great news on covid testing"),
            rec(2, 11, "GA", "b", "terrible covid cases rising"),
            rec(3, 12, "GA", "a", "stay home stay safe"),
            rec(4, 13, "NY", "b", "masks help slow the spread"),
            rec(5, 13, "FL", "c", "cases cases everywhere"),
        ]
    }

    #[test]
    fn incremental_matches_batch() {
        let config = Arc::new(AnalyticsConfig::default());
        let all = records();
        let batch = AnalyticsSnapshot::build(config.clone(), all.clone(), vec![]);
        let mut snap = AnalyticsSnapshot::empty(config);
        for day in [11, 12, 13] {
            let part = all.iter().filter(|r| r.date().day() == day).cloned().collect();
            snap = snap.extend(part, None);
        }
        assert_eq!(snap, batch);
        assert_eq!(batch.report().tweet_count, 5);
        assert_eq!(batch.report().user_count, 3);
        assert_eq!(batch.as_of(), NaiveDate::from_ymd_opt(2020, 6, 13));
    }

    #[test]
    fn extend_skips_known_ids() {
        let config = Arc::new(AnalyticsConfig::default());
        let snap = AnalyticsSnapshot::build(config, records(), vec![]);
        let again = snap.extend(records(), None);
        assert_eq!(again.tweet_count(), 5);
    }

    #[test]
    fn queries() {
        let snap = AnalyticsSnapshot::build(Arc::new(AnalyticsConfig::default()), records(), vec![]);
        let ga = Scope::State(StateCode::parse("GA").unwrap());
        let f = snap.frequency(ga, None, None).unwrap();
        assert_eq!(f.iter().map(|c| c.count).collect::<Vec<_>>(), [1, 1, 0]);
        let d = |day| NaiveDate::from_ymd_opt(2020, 6, day);
        assert!(matches!(snap.frequency(ga, d(13), d(11)), Err(QueryError::InvalidRange { .. })));
        let today = snap.sentiment_series(Scope::Nationwide, Timeframe::Today, snap.clock());
        assert_eq!(today.points.len(), 1);
        assert_eq!(today.points[0].count, 2);
        assert!(matches!(snap.lda_topics(), Err(QueryError::LdaUnavailable(_))));
        let cloud = snap.wordcloud(Scope::Nationwide, Timeframe::All, snap.clock(), Polarity::Pos, Cohort::All, 10);
        assert!(cloud.words.iter().any(|w| w.word == "great"));
    }

    #[test]
    fn lda_failure_is_reported() {
        let config = AnalyticsConfig {
            lda: Some(LdaSettings {
                vocab: VocabParams {
                    min_df: 100,
                    max_df_fraction: 1.0,
                },
                ..LdaSettings::default()
            }),
            ..AnalyticsConfig::default()
        };
        let snap = AnalyticsSnapshot::build(Arc::new(config), records(), vec![]);
        assert!(matches!(snap.lda(), LdaState::Failed(_)));
    }
}
