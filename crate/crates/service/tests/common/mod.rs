//! Deterministic synthetic corpora shared by the integration tests.
#![allow(dead_code)]

use std::path::Path;
use std::sync::Arc;

use chrono::{DateTime, Duration, NaiveDate, TimeZone, Utc};
use coronavis_core::analysis::{AnalyticsConfig, LdaSettings};
use coronavis_core::corpus::{write_daily_file, DailyFile};
use coronavis_core::mobility::{InfectionCount, InfectionSeries};
use coronavis_core::topicmodel::{LdaParams, VocabParams};
use coronavis_core::{StateCode, TweetRecord};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Word pool in rough frequency order; earlier words are drawn more often.
pub const WORDS: &[&str] = &[
    "the", "covid", "people", "cases", "and", "mask", "is", "testing", "home", "stay", "not", "good", "lockdown",
    "we", "new", "bad", "today", "corona", "help", "need", "safe", "hospital", "love", "vaccine", "to", "great",
    "family", "#stayhome", "sad", "deaths", "it's", "happy", "social", "distancing", "news", "quarantine", "work",
    "school", "terrible", "hope", "scared", "thanks", "nurses", "doctors", "sick", "fever", "cough", "icu",
    "crisis", "worst", "best", "grocery", "store", "rt", "amp", "positive", "tested", "symptoms", "governor",
    "#covid19", "don't", "death", "toll", "outbreak", "masks", "week", "very", "our", "of", "friends", "beach",
    "open", "closed", "parks", "protest", "unemployment", "relief", "wash", "hands", "breathing", "ventilator",
];

pub const STATES: &[&str] = &["NY", "CA", "TX", "FL", "GA", "WA", "IL", "NJ", "MA", "PA", "DC", "AK"];

pub fn day(y: i32, m: u32, d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, d).unwrap()
}

pub fn at(date: NaiveDate, seconds: i64) -> DateTime<Utc> {
    Utc.from_utc_datetime(&date.and_hms_opt(0, 0, 0).unwrap()) + Duration::seconds(seconds)
}

pub fn state(code: &str) -> StateCode {
    StateCode::parse(code).unwrap()
}

/// A skewed draw from `0..n`: index `i` is roughly `1/(i+1)` likely.
pub fn skewed(rng: &mut ChaCha8Rng, n: usize) -> usize {
    let u: f64 = rng.random();
    (((n as f64 + 1.0).powf(u) - 1.0) as usize).min(n - 1)
}

pub fn random_text(rng: &mut ChaCha8Rng) -> String {
    let len = rng.random_range(3..=14);
    (0..len).map(|_| WORDS[skewed(rng, WORDS.len())]).collect::<Vec<_>>().join(" ")
}

/// `n` tweets spread over `days` consecutive days from `start`, written by
/// `users` accounts. Each account has a home state and posts from elsewhere
/// about one time in five, so the corpus contains cross-state movements.
/// Ids increase with time.
pub fn synthetic_records(seed: u64, n: usize, start: NaiveDate, days: u32, users: usize) -> Vec<TweetRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let accounts: Vec<(String, &str, bool)> = (0..users)
        .map(|u| {
            let id = format!("{:016x}", rng.random::<u64>());
            let home = STATES[skewed(&mut rng, STATES.len())];
            (id, home, u % 10 == 0)
        })
        .collect();
    let mut stamps: Vec<(DateTime<Utc>, usize)> = (0..n)
        .map(|_| {
            let d = start + Duration::days(rng.random_range(0..days) as i64);
            (at(d, rng.random_range(0..86_400)), skewed(&mut rng, users))
        })
        .collect();
    stamps.sort();
    stamps
        .into_iter()
        .enumerate()
        .map(|(i, (created_at, u))| {
            let (user_id, home, verified) = &accounts[u];
            let loc = if rng.random_bool(0.2) {
                STATES[rng.random_range(0..STATES.len())]
            } else {
                home
            };
            TweetRecord {
                tweet_id: (1_270_000_000_000_000_000u64 + i as u64).to_string(),
                created_at,
                loc: state(loc),
                text: random_text(&mut rng),
                user_id: user_id.clone(),
                verified: *verified,
            }
        })
        .collect()
}

pub fn write_corpus(dir: &Path, records: &[TweetRecord]) -> Vec<NaiveDate> {
    DailyFile::split_by_day(records.iter().cloned())
        .into_iter()
        .map(|f| {
            write_daily_file(dir, &f).unwrap();
            f.date
        })
        .collect()
}

/// Weekly case counts for every fixture state on the given week starts.
pub fn infections(seed: u64, weeks: &[NaiveDate]) -> InfectionSeries {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let entries = weeks
        .iter()
        .flat_map(|&w| STATES.iter().map(move |s| (w, *s)))
        .map(|(week_start, s)| InfectionCount {
            state: state(s),
            week_start,
            cases: rng.random_range(0..5_000),
        })
        .collect();
    InfectionSeries { entries }
}

/// Analytics configuration with a small, fast topic model and case counts
/// for the June 2020 fixture weeks.
pub fn fixture_config() -> Arc<AnalyticsConfig> {
    let lda = LdaSettings {
        vocab: VocabParams::default(),
        params: LdaParams {
            iterations: 40,
            seed: 7,
            ..LdaParams::with_topics(4)
        },
        ..LdaSettings::default()
    };
    Arc::new(AnalyticsConfig {
        infections: Some(infections(11, &[day(2020, 6, 4), day(2020, 6, 11), day(2020, 6, 18)])),
        lda: Some(lda),
        ..AnalyticsConfig::default()
    })
}

/// The five-day corpus used for the batch, replay and API checks.
pub fn five_day_records() -> Vec<TweetRecord> {
    synthetic_records(2020, 3_000, day(2020, 6, 12), 5, 400)
}
