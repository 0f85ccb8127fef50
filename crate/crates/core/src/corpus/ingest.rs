use std::io::BufRead;

use serde_json::Value;

use super::{
    anonymize_user, is_decimal_id, keyword_match, normalize_text, parse_timestamp, StateCode,
    TweetRecord,
};

/// Line counts from one `ingest_raw` pass. `kept + malformed + off_topic +
/// no_location == lines` (blank lines are not counted).
#[derive(Debug, Clone, Default, PartialEq, Eq, serde::Serialize)]
pub struct IngestReport {
    pub lines: usize,
    pub kept: usize,
    pub malformed: usize,
    pub off_topic: usize,
    pub no_location: usize,
}

struct RawTweet<'a> {
    id: String,
    created_at: &'a str,
    text: &'a str,
    handle: &'a str,
    verified: bool,
    location: Option<&'a str>,
}

fn str_at<'a>(v: &'a Value, path: &[&str]) -> Option<&'a str> {
    path.iter()
        .try_fold(v, |cur, key| cur.get(key))
        .and_then(Value::as_str)
}

/// Accepts both the platform's streaming object layout and a flat layout
/// (`id`, `created_at`, `text`, `user`, `verified`, `location`).
fn extract(v: &Value) -> Option<RawTweet<'_>> {
    let id = match (v.get("id_str"), v.get("id"), v.get("tweet_id")) {
        (Some(Value::String(s)), _, _) => s.clone(),
        (_, Some(Value::Number(n)), _) | (_, _, Some(Value::Number(n))) => n.to_string(),
        (_, Some(Value::String(s)), _) | (_, _, Some(Value::String(s))) => s.clone(),
        _ => return None,
    };
    let text = str_at(v, &["extended_tweet", "full_text"])
        .or_else(|| str_at(v, &["full_text"]))
        .or_else(|| str_at(v, &["text"]))?;
    let created_at = str_at(v, &["created_at"])?;
    let user = v.get("user");
    let handle = user
        .and_then(|u| u.get("screen_name"))
        .and_then(Value::as_str)
        .or_else(|| user.and_then(Value::as_str))
        .or_else(|| str_at(v, &["screen_name"]))?;
    let verified = user
        .and_then(|u| u.get("verified"))
        .or_else(|| v.get("verified"))
        .and_then(Value::as_bool)
        .unwrap_or(false);

    let place = v.get("place").filter(|p| !p.is_null());
    let us_place = place
        .filter(|p| p.get("country_code").and_then(Value::as_str) == Some("US"))
        .and_then(|p| p.get("full_name"))
        .and_then(Value::as_str);
    let location = us_place
        .or_else(|| user.and_then(|u| u.get("location")).and_then(Value::as_str))
        .or_else(|| str_at(v, &["location"]));

    Some(RawTweet {
        id,
        created_at,
        text,
        handle,
        verified,
        location,
    })
}

/// Filters a JSON-lines stream of raw tweets down to qualified, located,
/// normalized and anonymized records. Malformed lines are counted and skipped.
pub fn ingest_raw<R: BufRead>(reader: R, salt: &[u8]) -> (Vec<TweetRecord>, IngestReport) {
    let mut report = IngestReport::default();
    let mut out = Vec::new();
    for line in reader.lines() {
        let Ok(line) = line else {
            report.lines += 1;
            report.malformed += 1;
            continue;
        };
        if line.trim().is_empty() {
            continue;
        }
        report.lines += 1;
        let Ok(value) = serde_json::from_str::<Value>(&line) else {
            report.malformed += 1;
            continue;
        };
        let Some(raw) = extract(&value) else {
            report.malformed += 1;
            continue;
        };
        let (Some(created_at), true, Ok(user_id)) = (
            parse_timestamp(raw.created_at),
            is_decimal_id(&raw.id),
            anonymize_user(raw.handle, salt),
        ) else {
            report.malformed += 1;
            continue;
        };
        if !keyword_match(raw.text) {
            report.off_topic += 1;
            continue;
        }
        let Some(loc) = raw.location.and_then(StateCode::resolve_location) else {
            report.no_location += 1;
            continue;
        };
        report.kept += 1;
        out.push(TweetRecord {
            tweet_id: raw.id,
            created_at,
            loc,
            text: normalize_text(raw.text),
            user_id,
            verified: raw.verified,
        });
    }
    (out, report)
}
