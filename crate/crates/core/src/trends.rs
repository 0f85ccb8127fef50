//! Word-frequency analytics: tweet counts per day, top words and bigrams, and
//! daily trend series for frequent and featured topics.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs;
use std::path::Path;

use chrono::NaiveDate;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::TweetRecord;
use crate::counting::{top_k, top_words as rank_words, WordCount};
use crate::scope::{DateRange, Scope};
use crate::textproc::{content_tokens, tokenize, StopwordPolicy, TokenList};

const DEFAULT_FEATURED: &str = include_str!("../data/featured_topics.txt");

#[derive(Debug, Error)]
pub enum TrendsError {
    #[error("featured topic list is empty")]
    EmptyFeatured,
    #[error("featured topic `{0}` listed twice")]
    DuplicateTopic(String),
    #[error("featured topic `{0}` must be lowercase")]
    NotLowercase(String),
    #[error("reading featured topics {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct DailyCount {
    pub date: NaiveDate,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct TopicTrendSeries {
    pub topic: String,
    pub scope: Scope,
    /// Cumulative count over the whole series, used for ranking.
    pub total: u64,
    pub points: Vec<DailyCount>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct BigramCount {
    pub first: String,
    pub second: String,
    pub count: u64,
}

/// Curated watch-list of words and phrases; lowercase, unique, non-empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeaturedTopicList {
    topics: Vec<String>,
}

impl FeaturedTopicList {
    pub fn new<I, S>(topics: I) -> Result<Self, TrendsError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for t in topics {
            let t: String = t.into();
            let t = t.split_whitespace().collect::<Vec<_>>().join(" ");
            if t.is_empty() {
                continue;
            }
            if t.to_lowercase() != t {
                return Err(TrendsError::NotLowercase(t));
            }
            if !seen.insert(t.clone()) {
                return Err(TrendsError::DuplicateTopic(t));
            }
            out.push(t);
        }
        if out.is_empty() {
            return Err(TrendsError::EmptyFeatured);
        }
        Ok(FeaturedTopicList { topics: out })
    }

    /// One topic per line; blank lines and `#` comments are skipped.
    pub fn parse(contents: &str) -> Result<Self, TrendsError> {
        Self::new(
            contents
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#')),
        )
    }

    pub fn from_file(path: &Path) -> Result<Self, TrendsError> {
        let s = fs::read_to_string(path).map_err(|source| TrendsError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&s)
    }

    /// The shipped 100-topic list.
    pub fn bundled() -> Self {
        Self::parse(DEFAULT_FEATURED).expect("bundled featured topics are valid")
    }

    pub fn topics(&self) -> &[String] {
        &self.topics
    }

    pub fn len(&self) -> usize {
        self.topics.len()
    }

    pub fn is_empty(&self) -> bool {
        self.topics.is_empty()
    }
}

fn in_scope<'a, R: AsRef<TweetRecord>>(records: &'a [R], scope: Scope) -> impl Iterator<Item = &'a TweetRecord> {
    records.iter().map(AsRef::as_ref).filter(move |r| scope.contains(r))
}

/// Tweets per day over the date span of the whole record set (zero-filled).
pub fn tweet_frequency<R: AsRef<TweetRecord>>(records: &[R], scope: Scope) -> Vec<DailyCount> {
    let Some(range) = DateRange::covering(records.iter().map(AsRef::as_ref)) else {
        return Vec::new();
    };
    tweet_frequency_in(records, scope, range)
}

/// Tweets per day over an explicit range (zero-filled).
pub fn tweet_frequency_in<R: AsRef<TweetRecord>>(records: &[R], scope: Scope, range: DateRange) -> Vec<DailyCount> {
    let mut counts: HashMap<NaiveDate, u64> = HashMap::new();
    for r in in_scope(records, scope) {
        if range.contains(r.date()) {
            *counts.entry(r.date()).or_default() += 1;
        }
    }
    range
        .days()
        .map(|date| DailyCount {
            date,
            count: counts.get(&date).copied().unwrap_or(0),
        })
        .collect()
}

/// Most frequent content words (occurrence counts), stopwords excluded.
pub fn top_words_in<R: AsRef<TweetRecord>>(records: &[R], scope: Scope, k: usize, policy: &StopwordPolicy) -> Vec<WordCount> {
    let mut counts: HashMap<String, u64> = HashMap::new();
    for r in in_scope(records, scope) {
        for t in content_tokens(&r.text, policy).into_vec() {
            *counts.entry(t).or_default() += 1;
        }
    }
    rank_words(counts, k)
}

/// Nationwide [`top_words_in`].
pub fn top_words<R: AsRef<TweetRecord>>(records: &[R], k: usize, policy: &StopwordPolicy) -> Vec<WordCount> {
    top_words_in(records, Scope::Nationwide, k, policy)
}

/// Most frequent adjacent pairs of stopword-filtered tokens. Pairs never span
/// two tweets.
pub fn top_bigrams<R: AsRef<TweetRecord>>(records: &[R], scope: Scope, k: usize, policy: &StopwordPolicy) -> Vec<BigramCount> {
    let mut counts: HashMap<(String, String), u64> = HashMap::new();
    for r in in_scope(records, scope) {
        let toks = content_tokens(&r.text, policy);
        for w in toks.as_slice().windows(2) {
            *counts.entry((w[0].clone(), w[1].clone())).or_default() += 1;
        }
    }
    top_k(counts, k)
        .into_iter()
        .map(|((first, second), count)| BigramCount { first, second, count })
        .collect()
}

/// Shared series builder: `hits(record)` yields the topics a record counts
/// toward (each at most once per record).
fn topic_series<R: AsRef<TweetRecord>, F>(
    records: &[R],
    scope: Scope,
    k: usize,
    seed_topics: &[String],
    mut hits: F,
) -> Vec<TopicTrendSeries>
where
    F: FnMut(&TweetRecord) -> Vec<String>,
{
    let Some(range) = DateRange::covering(records.iter().map(AsRef::as_ref)) else {
        return Vec::new();
    };
    let mut per_topic: HashMap<String, BTreeMap<NaiveDate, u64>> = HashMap::new();
    let mut totals: HashMap<String, u64> = seed_topics.iter().map(|t| (t.clone(), 0)).collect();
    for r in in_scope(records, scope) {
        for topic in hits(r) {
            *per_topic.entry(topic.clone()).or_default().entry(r.date()).or_default() += 1;
            *totals.entry(topic).or_default() += 1;
        }
    }
    top_k(totals, k)
        .into_iter()
        .map(|(topic, total)| {
            let days = per_topic.remove(&topic).unwrap_or_default();
            let points = range
                .days()
                .map(|date| DailyCount {
                    date,
                    count: days.get(&date).copied().unwrap_or(0),
                })
                .collect();
            TopicTrendSeries {
                topic,
                scope,
                total,
                points,
            }
        })
        .collect()
}

/// Top-`k` words by the number of tweets containing them over the whole
/// range, each with its per-day tweet count. Days span the full record set.
pub fn frequent_topic_trends<R: AsRef<TweetRecord>>(
    records: &[R],
    scope: Scope,
    k: usize,
    policy: &StopwordPolicy,
) -> Vec<TopicTrendSeries> {
    topic_series(records, scope, k, &[], |r| {
        let toks = content_tokens(&r.text, policy).into_vec();
        let unique: HashSet<String> = toks.into_iter().collect();
        unique.into_iter().collect()
    })
}

fn contains_phrase(haystack: &[String], phrase: &[String]) -> bool {
    !phrase.is_empty() && haystack.windows(phrase.len()).any(|w| w == phrase)
}

/// Featured topics ranked by how many tweets mention them; the top `k` are
/// returned as daily series. A phrase matches when its tokens appear
/// contiguously in the tweet after standard stopword removal (the phrase is
/// filtered the same way, so "stay at home" matches "stay home").
pub fn featured_topic_trends<R: AsRef<TweetRecord>>(
    records: &[R],
    scope: Scope,
    featured: &FeaturedTopicList,
    k: usize,
) -> Vec<TopicTrendSeries> {
    let policy = StopwordPolicy::standard_only();
    let phrases: Vec<(String, TokenList)> = featured
        .topics()
        .iter()
        .map(|t| {
            let toks: TokenList = tokenize(t).iter().filter(|w| !policy.is_stopword(w)).cloned().collect();
            (t.clone(), toks)
        })
        .collect();
    let k = k.min(featured.len());
    topic_series(records, scope, k, featured.topics(), |r| {
        let toks = content_tokens(&r.text, &policy);
        phrases
            .iter()
            .filter(|(_, p)| contains_phrase(toks.as_slice(), p.as_slice()))
            .map(|(t, _)| t.clone())
            .collect()
    })
}
