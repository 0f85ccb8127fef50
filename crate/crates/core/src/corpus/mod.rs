//! Canonical tweet records, the daily CSV codec, raw-stream filtering and
//! user anonymization.

mod csv_codec;
mod ingest;
mod state;

use std::collections::HashSet;
use std::sync::OnceLock;

use chrono::{DateTime, NaiveDate, NaiveDateTime, TimeZone, Timelike, Utc};
use hmac::{Hmac, Mac};
use regex::Regex;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};
use sha2::Sha256;
use thiserror::Error;

pub use csv_codec::{
    parse_daily_csv, read_corpus, read_daily_file, read_data_dir, write_daily_csv, write_daily_file,
    write_records_csv, ParseMode, ParseReport, CSV_HEADER,
};
pub use ingest::{ingest_raw, IngestReport};
pub use state::StateCode;

/// Storage format for `created_at`.
pub const TIMESTAMP_FORMAT: &str = "%Y-%m-%dT%H:%M:%SZ";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CorpusError {
    #[error("missing column `{0}` in header")]
    MissingColumn(String),
    #[error("row {0}: unparseable timestamp")]
    BadTimestamp(usize),
    #[error("row {0}: unknown state")]
    BadState(usize),
    #[error("row {0}: verified flag must be 1 or 0")]
    BadVerified(usize),
    #[error("row {0}: tweet_id must be a non-empty decimal string")]
    BadTweetId(usize),
    #[error("row {row}: tweet created on {found}, file is for {expected}")]
    WrongDay {
        row: usize,
        expected: NaiveDate,
        found: NaiveDate,
    },
    #[error("row {0}: malformed CSV record: {1}")]
    Malformed(usize, String),
    #[error("unknown state code `{0}`")]
    UnknownState(String),
    #[error("user handle must not be empty")]
    InvalidHandle,
    #[error("file name `{0}` is not YYYY-MM-DD.csv")]
    BadFileName(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for CorpusError {
    fn from(e: std::io::Error) -> Self {
        CorpusError::Io(e.to_string())
    }
}

/// One processed, geo-resolved tweet.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize, JsonSchema)]
pub struct TweetRecord {
    pub tweet_id: String,
    pub created_at: DateTime<Utc>,
    pub loc: StateCode,
    pub text: String,
    pub user_id: String,
    pub verified: bool,
}

impl AsRef<TweetRecord> for TweetRecord {
    fn as_ref(&self) -> &TweetRecord {
        self
    }
}

impl TweetRecord {
    pub fn date(&self) -> NaiveDate {
        self.created_at.date_naive()
    }
}

/// All records for one UTC calendar day, stored as `YYYY-MM-DD.csv`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DailyFile {
    pub date: NaiveDate,
    pub records: Vec<TweetRecord>,
}

impl DailyFile {
    pub fn new(date: NaiveDate) -> Self {
        DailyFile {
            date,
            records: Vec::new(),
        }
    }

    pub fn file_name(&self) -> String {
        file_name_for(self.date)
    }

    /// Splits records into one file per UTC day, ordered by date. Record order
    /// within a day is preserved.
    pub fn split_by_day(records: impl IntoIterator<Item = TweetRecord>) -> Vec<DailyFile> {
        let mut days: std::collections::BTreeMap<NaiveDate, Vec<TweetRecord>> = Default::default();
        for r in records {
            days.entry(r.date()).or_default().push(r);
        }
        days.into_iter()
            .map(|(date, records)| DailyFile { date, records })
            .collect()
    }
}

pub fn file_name_for(date: NaiveDate) -> String {
    format!("{}.csv", date.format("%Y-%m-%d"))
}

/// Parses a `YYYY-MM-DD.csv` file name.
pub fn date_from_file_name(name: &str) -> Result<NaiveDate, CorpusError> {
    name.strip_suffix(".csv")
        .and_then(|stem| NaiveDate::parse_from_str(stem, "%Y-%m-%d").ok())
        .ok_or_else(|| CorpusError::BadFileName(name.to_string()))
}

/// True when the lowercased text contains `covid` or `corona` anywhere,
/// including inside longer words ("coronavirus", "covid19").
pub fn keyword_match(raw_text: &str) -> bool {
    let lower = raw_text.to_lowercase();
    lower.contains("covid") || lower.contains("corona")
}

fn url_pattern() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?:https?://|www\.)\S*").expect("valid regex"))
}

fn mention_pattern() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"@\w+").expect("valid regex"))
}

/// Lowercases and reduces text to the storage alphabet `[a-z0-9 '#]`.
///
/// URLs and @-mentions are removed first. Remaining ASCII characters outside
/// the alphabet become word breaks; non-ASCII characters are dropped in place
/// ("grüße" becomes "gre"). Whitespace is collapsed. No stopwords are removed.
pub fn normalize_text(raw_text: &str) -> String {
    let lower = raw_text.to_lowercase();
    let no_urls = url_pattern().replace_all(&lower, " ");
    let cleaned = mention_pattern().replace_all(&no_urls, " ");

    let mut out = String::with_capacity(cleaned.len());
    let mut pending_space = false;
    for c in cleaned.chars() {
        let keep = c.is_ascii_lowercase() || c.is_ascii_digit() || c == '\'' || c == '#';
        if keep {
            if pending_space && !out.is_empty() {
                out.push(' ');
            }
            pending_space = false;
            out.push(c);
        } else if c.is_ascii() {
            pending_space = true;
        }
    }
    out
}

/// Whether `text` satisfies the stored-text invariant.
pub fn is_normalized(text: &str) -> bool {
    text.chars()
        .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '\'' || c == '#' || c == ' ')
        && !text.starts_with(' ')
        && !text.ends_with(' ')
        && !text.contains("  ")
}

/// Keyed one-way pseudonym for a user handle: HMAC-SHA256, first 16 hex chars.
pub fn anonymize_user(raw_handle: &str, salt: &[u8]) -> Result<String, CorpusError> {
    if raw_handle.is_empty() {
        return Err(CorpusError::InvalidHandle);
    }
    let mut mac = Hmac::<Sha256>::new_from_slice(salt).expect("hmac accepts any key length");
    mac.update(raw_handle.as_bytes());
    let digest = mac.finalize().into_bytes();
    Ok(hex::encode(&digest[..8]))
}

/// Keeps the first occurrence of each `tweet_id`, preserving order.
pub fn dedup(records: Vec<TweetRecord>) -> Vec<TweetRecord> {
    let mut seen = HashSet::with_capacity(records.len());
    records
        .into_iter()
        .filter(|r| seen.insert(r.tweet_id.clone()))
        .collect()
}

/// Parses the storage format and the Twitter-style formats seen in raw data
/// (`Thu Mar 05 20:37:08 2020`, `Thu Mar 05 20:37:08 +0000 2020`).
/// Sub-second precision is truncated.
pub fn parse_timestamp(s: &str) -> Option<DateTime<Utc>> {
    let s = s.trim();
    let parsed = DateTime::parse_from_rfc3339(s)
        .map(|dt| dt.with_timezone(&Utc))
        .ok()
        .or_else(|| {
            DateTime::parse_from_str(s, "%a %b %d %H:%M:%S %z %Y")
                .map(|dt| dt.with_timezone(&Utc))
                .ok()
        })
        .or_else(|| {
            ["%a %b %d %H:%M:%S %Y", "%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M:%S"]
                .iter()
                .find_map(|f| NaiveDateTime::parse_from_str(s, f).ok())
                .map(|naive| Utc.from_utc_datetime(&naive))
        })?;
    parsed.with_nanosecond(0)
}

pub fn format_timestamp(ts: &DateTime<Utc>) -> String {
    ts.format(TIMESTAMP_FORMAT).to_string()
}

pub(crate) fn is_decimal_id(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}
