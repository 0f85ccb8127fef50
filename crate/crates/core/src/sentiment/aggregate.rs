use std::collections::HashMap;

use chrono::NaiveDate;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::{ScoredTweet, SentimentLabel};
use crate::counting::{top_words, WordCount};
use crate::scope::{DateRange, Scope, Timeframe};
use crate::textproc::{content_tokens, StopwordPolicy};

/// Order-independent mean: values are summed in sorted order so the result
/// does not depend on input permutation.
fn stable_mean(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    Some(values.iter().sum::<f64>() / values.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct DailySentimentPoint {
    pub date: NaiveDate,
    /// `None` on days without tweets.
    pub mean_compound: Option<f64>,
    pub mean_subjectivity: Option<f64>,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct DailySentimentSeries {
    pub scope: Scope,
    pub points: Vec<DailySentimentPoint>,
}

/// One point per calendar day of the resolved timeframe. `All` spans the
/// dates of the whole tweet set, not only the in-scope ones.
pub fn aggregate_series(
    tweets: &[ScoredTweet],
    scope: Scope,
    timeframe: Timeframe,
    clock: NaiveDate,
) -> DailySentimentSeries {
    let corpus = DateRange::covering(tweets.iter().map(|t| &t.record));
    let Some(range) = timeframe.resolve(clock, corpus) else {
        return DailySentimentSeries {
            scope,
            points: Vec::new(),
        };
    };
    let mut by_day: HashMap<NaiveDate, (Vec<f64>, Vec<f64>)> = HashMap::new();
    for t in tweets {
        let day = t.record.date();
        if scope.contains(&t.record) && range.contains(day) {
            let (c, s) = by_day.entry(day).or_default();
            c.push(t.polarity.compound);
            s.push(t.subjectivity);
        }
    }
    let points = range
        .days()
        .map(|date| {
            let (mut c, mut s) = by_day.remove(&date).unwrap_or_default();
            DailySentimentPoint {
                date,
                count: c.len() as u64,
                mean_compound: stable_mean(&mut c),
                mean_subjectivity: stable_mean(&mut s),
            }
        })
        .collect();
    DailySentimentSeries { scope, points }
}

/// Uniform bins over [-1, 1]; `edges` has `bins + 1` entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn bin_index(value: f64, bins: usize) -> usize {
        let pos = ((value.clamp(-1.0, 1.0) + 1.0) / 2.0 * bins as f64).floor() as usize;
        pos.min(bins - 1)
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Histogram of compound scores. `bins` of zero is treated as one.
pub fn sentiment_histogram(compounds: impl IntoIterator<Item = f64>, bins: usize) -> Histogram {
    let bins = bins.max(1);
    let mut counts = vec![0u64; bins];
    for c in compounds {
        counts[Histogram::bin_index(c, bins)] += 1;
    }
    let edges = (0..=bins)
        .map(|i| -1.0 + 2.0 * i as f64 / bins as f64)
        .collect();
    Histogram { edges, counts }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "lowercase")]
pub enum Cohort {
    #[default]
    All,
    Verified,
    #[serde(rename = "nonverified")]
    NonVerified,
}

impl Cohort {
    pub fn admits(&self, verified: bool) -> bool {
        match self {
            Cohort::All => true,
            Cohort::Verified => verified,
            Cohort::NonVerified => !verified,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize, JsonSchema)]
pub struct LabelCounts {
    pub positive: u64,
    pub negative: u64,
    pub neutral: u64,
}

impl LabelCounts {
    pub fn add(&mut self, label: SentimentLabel) {
        match label {
            SentimentLabel::Positive => self.positive += 1,
            SentimentLabel::Negative => self.negative += 1,
            SentimentLabel::Neutral => self.neutral += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.positive + self.negative + self.neutral
    }

    /// Fractions summing to 1, or all zero for an empty set.
    pub fn normalized(&self) -> LabelFractions {
        let total = self.total();
        if total == 0 {
            return LabelFractions::default();
        }
        let t = total as f64;
        LabelFractions {
            positive: self.positive as f64 / t,
            negative: self.negative as f64 / t,
            neutral: self.neutral as f64 / t,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize, JsonSchema)]
pub struct LabelFractions {
    pub positive: f64,
    pub negative: f64,
    pub neutral: f64,
}

pub fn label_counts<'a>(tweets: impl IntoIterator<Item = &'a ScoredTweet>, cohort: Cohort) -> LabelCounts {
    let mut counts = LabelCounts::default();
    for t in tweets {
        if cohort.admits(t.record.verified) {
            counts.add(t.label);
        }
    }
    counts
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct CohortStats {
    pub cohort: Cohort,
    pub tweet_count: u64,
    pub user_count: u64,
    pub max_tweets_single_user: u64,
    pub labels: LabelCounts,
    pub histogram: LabelFractions,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct PowerUser {
    pub user_id: String,
    pub verified: bool,
    pub tweet_count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct CohortReport {
    pub min_tweets: u64,
    pub verified: CohortStats,
    pub non_verified: CohortStats,
    /// Sorted by tweet count descending, then user id.
    pub power_users: Vec<PowerUser>,
}

/// Verified vs non-verified sentiment among users with more than
/// `min_tweets` tweets. A user's cohort is taken from their most recent
/// tweet's verified flag.
pub fn cohort_stats(tweets: &[ScoredTweet], min_tweets: u64) -> CohortReport {
    struct UserAcc<'a> {
        count: u64,
        latest: (&'a chrono::DateTime<chrono::Utc>, &'a str),
        verified: bool,
        labels: LabelCounts,
    }
    let mut users: HashMap<&str, UserAcc<'_>> = HashMap::new();
    for t in tweets {
        let r = &t.record;
        let key = (&r.created_at, r.tweet_id.as_str());
        let acc = users.entry(r.user_id.as_str()).or_insert(UserAcc {
            count: 0,
            latest: key,
            verified: r.verified,
            labels: LabelCounts::default(),
        });
        acc.count += 1;
        acc.labels.add(t.label);
        if key >= acc.latest {
            acc.latest = key;
            acc.verified = r.verified;
        }
    }

    let mut power_users = Vec::new();
    let mut stats = [Cohort::Verified, Cohort::NonVerified].map(|cohort| CohortStats {
        cohort,
        tweet_count: 0,
        user_count: 0,
        max_tweets_single_user: 0,
        labels: LabelCounts::default(),
        histogram: LabelFractions::default(),
    });
    for (user_id, acc) in &users {
        if acc.count <= min_tweets {
            continue;
        }
        let s = &mut stats[if acc.verified { 0 } else { 1 }];
        s.tweet_count += acc.count;
        s.user_count += 1;
        s.max_tweets_single_user = s.max_tweets_single_user.max(acc.count);
        s.labels.positive += acc.labels.positive;
        s.labels.negative += acc.labels.negative;
        s.labels.neutral += acc.labels.neutral;
        power_users.push(PowerUser {
            user_id: user_id.to_string(),
            verified: acc.verified,
            tweet_count: acc.count,
        });
    }
    for s in &mut stats {
        s.histogram = s.labels.normalized();
    }
    power_users.sort_by(|a, b| {
        b.tweet_count
            .cmp(&a.tweet_count)
            .then_with(|| a.user_id.cmp(&b.user_id))
    });
    let [verified, non_verified] = stats;
    CohortReport {
        min_tweets,
        verified,
        non_verified,
        power_users,
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize, JsonSchema)]
pub struct WordClouds {
    pub positive: Vec<WordCount>,
    pub negative: Vec<WordCount>,
}

/// Top-`k` content words of the positive- and negative-labeled tweets in a
/// cohort, by occurrence count with lexicographic tie-break.
pub fn polarity_wordclouds<'a>(
    tweets: impl IntoIterator<Item = &'a ScoredTweet>,
    cohort: Cohort,
    k: usize,
    policy: &StopwordPolicy,
) -> WordClouds {
    let mut pos: HashMap<String, u64> = HashMap::new();
    let mut neg: HashMap<String, u64> = HashMap::new();
    for t in tweets {
        if !cohort.admits(t.record.verified) {
            continue;
        }
        let target = match t.label {
            SentimentLabel::Positive => &mut pos,
            SentimentLabel::Negative => &mut neg,
            SentimentLabel::Neutral => continue,
        };
        for tok in content_tokens(&t.record.text, policy).into_vec() {
            *target.entry(tok).or_default() += 1;
        }
    }
    WordClouds {
        positive: top_words(pos, k),
        negative: top_words(neg, k),
    }
}
