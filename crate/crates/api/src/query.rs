//! Query-string structs and their validation. Every field arrives as an
//! optional string so that malformed values produce API error codes rather
//! than extractor rejections.

use chrono::NaiveDate;
use coronavis_core::analysis::Polarity;
use coronavis_core::corpus::StateCode;
use coronavis_core::sentiment::Cohort;
use coronavis_core::{DateRange, Scope, Timeframe};
use serde::{Deserialize, Serialize};

use crate::error::{ApiError, ErrorCode};

pub const MAX_K: usize = 1000;
pub const MAX_BINS: usize = 1000;
pub const MAX_LAG_WEEKS: u32 = 52;

/// `state` absent, empty or `US` is nationwide.
pub fn parse_scope(state: Option<&str>) -> Result<Scope, ApiError> {
    match state.map(str::trim) {
        None | Some("") => Ok(Scope::Nationwide),
        Some(s) if s.eq_ignore_ascii_case("us") => Ok(Scope::Nationwide),
        Some(s) => StateCode::parse(s)
            .map(Scope::State)
            .map_err(|_| ApiError::new(ErrorCode::StateUnknown, format!("unknown state `{s}`"))),
    }
}

pub fn parse_date(name: &str, value: Option<&str>) -> Result<Option<NaiveDate>, ApiError> {
    value
        .filter(|v| !v.is_empty())
        .map(|v| NaiveDate::parse_from_str(v, "%Y-%m-%d").map_err(|_| ApiError::bad_parameter(name, "expected YYYY-MM-DD")))
        .transpose()
}

fn parse_bounded<T>(name: &str, value: Option<&str>, default: T, min: T, max: T) -> Result<T, ApiError>
where
    T: std::str::FromStr + PartialOrd + std::fmt::Display + Copy,
{
    let Some(v) = value.filter(|v| !v.is_empty()) else {
        return Ok(default);
    };
    let parsed: T = v
        .parse()
        .map_err(|_| ApiError::bad_parameter(name, format!("`{v}` is not a valid number")))?;
    if parsed < min || parsed > max {
        return Err(ApiError::bad_parameter(name, format!("must be between {min} and {max}")));
    }
    Ok(parsed)
}

pub fn parse_k(value: Option<&str>, default: usize) -> Result<usize, ApiError> {
    parse_bounded("k", value, default, 1, MAX_K)
}

/// `range=today|yesterday|all|custom`; `custom` needs both `from` and `to`.
pub fn parse_timeframe(range: Option<&str>, from: Option<&str>, to: Option<&str>) -> Result<Timeframe, ApiError> {
    match range.unwrap_or("all").to_ascii_lowercase().as_str() {
        "" | "all" => Ok(Timeframe::All),
        "today" => Ok(Timeframe::Today),
        "yesterday" => Ok(Timeframe::Yesterday),
        "custom" => {
            let (Some(f), Some(t)) = (parse_date("from", from)?, parse_date("to", to)?) else {
                return Err(ApiError::bad_parameter("range", "custom range needs `from` and `to`"));
            };
            DateRange::new(f, t)
                .map(Timeframe::Custom)
                .ok_or_else(|| ApiError::new(ErrorCode::BadRange, format!("from {f} is after to {t}")))
        }
        other => Err(ApiError::bad_parameter(
            "range",
            format!("`{other}` is not one of today, yesterday, all, custom"),
        )),
    }
}

pub fn parse_cohort(value: Option<&str>) -> Result<Cohort, ApiError> {
    match value.unwrap_or("all").to_ascii_lowercase().as_str() {
        "" | "all" => Ok(Cohort::All),
        "verified" => Ok(Cohort::Verified),
        "nonverified" => Ok(Cohort::NonVerified),
        other => Err(ApiError::bad_parameter(
            "cohort",
            format!("`{other}` is not one of all, verified, nonverified"),
        )),
    }
}

pub fn parse_polarity(value: Option<&str>) -> Result<Polarity, ApiError> {
    match value.unwrap_or("pos").to_ascii_lowercase().as_str() {
        "" | "pos" => Ok(Polarity::Pos),
        "neg" => Ok(Polarity::Neg),
        other => Err(ApiError::bad_parameter("polarity", format!("`{other}` is not one of pos, neg"))),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyQuery {
    pub state: Option<String>,
    pub from: Option<String>,
    pub to: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopQuery {
    pub k: Option<String>,
    pub state: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesQuery {
    pub state: Option<String>,
    pub range: Option<String>,
    pub from: Option<String>,
    pub to: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistributionQuery {
    pub bins: Option<String>,
}

impl DistributionQuery {
    pub fn bins(&self, default: usize) -> Result<usize, ApiError> {
        parse_bounded("bins", self.bins.as_deref(), default, 1, MAX_BINS)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelsQuery {
    pub cohort: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohortsQuery {
    pub min_tweets: Option<String>,
}

impl CohortsQuery {
    pub fn min_tweets(&self, default: u64) -> Result<u64, ApiError> {
        parse_bounded("min_tweets", self.min_tweets.as_deref(), default, 0, u64::MAX)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordcloudQuery {
    pub state: Option<String>,
    pub range: Option<String>,
    pub from: Option<String>,
    pub to: Option<String>,
    pub polarity: Option<String>,
    pub cohort: Option<String>,
    pub k: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MobilityQuery {
    pub lag: Option<String>,
}

impl MobilityQuery {
    pub fn lag(&self, default: u32) -> Result<u32, ApiError> {
        parse_bounded("lag", self.lag.as_deref(), default, 0, MAX_LAG_WEEKS)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LdaTermsQuery {
    pub topic: Option<String>,
    pub lambda: Option<String>,
    pub n: Option<String>,
}

impl LdaTermsQuery {
    pub fn topic(&self) -> Result<usize, ApiError> {
        parse_bounded("topic", self.topic.as_deref(), 0, 0, usize::MAX)
    }

    pub fn lambda(&self, default: f64) -> Result<f64, ApiError> {
        parse_bounded("lambda", self.lambda.as_deref(), default, 0.0, 1.0)
    }

    pub fn n(&self, default: usize) -> Result<usize, ApiError> {
        parse_bounded("n", self.n.as_deref(), default, 1, MAX_K)
    }
}
