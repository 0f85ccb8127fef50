//! Geographic scope and timeframe selection shared by the analytics modules.

use std::fmt;

use chrono::{Days, NaiveDate};
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::corpus::{StateCode, TweetRecord};

/// A single state or the whole country.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Scope {
    #[default]
    Nationwide,
    State(StateCode),
}

impl Scope {
    pub fn contains(&self, record: &TweetRecord) -> bool {
        match self {
            Scope::Nationwide => true,
            Scope::State(s) => record.loc == *s,
        }
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::Nationwide => f.write_str("US"),
            Scope::State(s) => f.write_str(s.as_str()),
        }
    }
}

impl From<Scope> for String {
    fn from(s: Scope) -> String {
        s.to_string()
    }
}

impl TryFrom<String> for Scope {
    type Error = crate::corpus::CorpusError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        if s.eq_ignore_ascii_case("us") || s.is_empty() {
            Ok(Scope::Nationwide)
        } else {
            StateCode::parse(&s).map(Scope::State)
        }
    }
}

impl JsonSchema for Scope {
    fn schema_name() -> String {
        "Scope".to_string()
    }

    fn json_schema(_: &mut schemars::gen::SchemaGenerator) -> schemars::schema::Schema {
        use schemars::schema::{InstanceType, SchemaObject};
        SchemaObject {
            instance_type: Some(InstanceType::String.into()),
            enum_values: Some(
                std::iter::once("US".into())
                    .chain(StateCode::all().map(|c| c.as_str().into()))
                    .collect(),
            ),
            ..Default::default()
        }
        .into()
    }
}

impl From<Option<StateCode>> for Scope {
    fn from(s: Option<StateCode>) -> Self {
        s.map_or(Scope::Nationwide, Scope::State)
    }
}

/// Inclusive calendar-date range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct DateRange {
    pub from: NaiveDate,
    pub to: NaiveDate,
}

impl DateRange {
    /// `None` when `from > to`.
    pub fn new(from: NaiveDate, to: NaiveDate) -> Option<Self> {
        (from <= to).then_some(DateRange { from, to })
    }

    pub fn single(day: NaiveDate) -> Self {
        DateRange { from: day, to: day }
    }

    pub fn contains(&self, day: NaiveDate) -> bool {
        self.from <= day && day <= self.to
    }

    pub fn days(&self) -> impl Iterator<Item = NaiveDate> {
        let to = self.to;
        self.from.iter_days().take_while(move |d| *d <= to)
    }

    pub fn len_days(&self) -> usize {
        (self.to - self.from).num_days() as usize + 1
    }

    /// Smallest range covering every record's UTC date.
    pub fn covering<'a>(records: impl IntoIterator<Item = &'a TweetRecord>) -> Option<Self> {
        let mut iter = records.into_iter().map(TweetRecord::date);
        let first = iter.next()?;
        let (from, to) = iter.fold((first, first), |(lo, hi), d| (lo.min(d), hi.max(d)));
        Some(DateRange { from, to })
    }
}

/// Dashboard timeframe selector. `Today` and `Yesterday` resolve against an
/// injected reference date, never wall time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Timeframe {
    Today,
    Yesterday,
    All,
    Custom(DateRange),
}

impl Timeframe {
    /// `corpus` is the date span of the full record set, used for `All`.
    pub fn resolve(&self, clock: NaiveDate, corpus: Option<DateRange>) -> Option<DateRange> {
        match self {
            Timeframe::Today => Some(DateRange::single(clock)),
            Timeframe::Yesterday => clock.checked_sub_days(Days::new(1)).map(DateRange::single),
            Timeframe::All => corpus,
            Timeframe::Custom(r) => Some(*r),
        }
    }
}
