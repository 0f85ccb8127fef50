use std::fmt;
use std::str::FromStr;

use schemars::JsonSchema;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::CorpusError;

/// USPS code and full name for the 50 states plus DC.
const STATES: [(&str, &str); 51] = [
    ("AL", "alabama"),
    ("AK", "alaska"),
    ("AZ", "arizona"),
    ("AR", "arkansas"),
    ("CA", "california"),
    ("CO", "colorado"),
    ("CT", "connecticut"),
    ("DE", "delaware"),
    ("DC", "district of columbia"),
    ("FL", "florida"),
    ("GA", "georgia"),
    ("HI", "hawaii"),
    ("ID", "idaho"),
    ("IL", "illinois"),
    ("IN", "indiana"),
    ("IA", "iowa"),
    ("KS", "kansas"),
    ("KY", "kentucky"),
    ("LA", "louisiana"),
    ("ME", "maine"),
    ("MD", "maryland"),
    ("MA", "massachusetts"),
    ("MI", "michigan"),
    ("MN", "minnesota"),
    ("MS", "mississippi"),
    ("MO", "missouri"),
    ("MT", "montana"),
    ("NE", "nebraska"),
    ("NV", "nevada"),
    ("NH", "new hampshire"),
    ("NJ", "new jersey"),
    ("NM", "new mexico"),
    ("NY", "new york"),
    ("NC", "north carolina"),
    ("ND", "north dakota"),
    ("OH", "ohio"),
    ("OK", "oklahoma"),
    ("OR", "oregon"),
    ("PA", "pennsylvania"),
    ("RI", "rhode island"),
    ("SC", "south carolina"),
    ("SD", "south dakota"),
    ("TN", "tennessee"),
    ("TX", "texas"),
    ("UT", "utah"),
    ("VT", "vermont"),
    ("VA", "virginia"),
    ("WA", "washington"),
    ("WV", "west virginia"),
    ("WI", "wisconsin"),
    ("WY", "wyoming"),
];

/// Trailing location components that name the country rather than a state.
const COUNTRY_SUFFIXES: [&str; 7] = [
    "usa",
    "us",
    "u.s.",
    "u.s.a.",
    "united states",
    "united states of america",
    "america",
];

/// Two-letter USPS abbreviation of one of the 50 states or DC.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateCode(u8);

impl StateCode {
    /// Parses an exact USPS code. Case-insensitive.
    pub fn parse(code: &str) -> Result<Self, CorpusError> {
        let upper = code.trim().to_ascii_uppercase();
        STATES
            .iter()
            .position(|(c, _)| *c == upper)
            .map(|i| StateCode(i as u8))
            .ok_or_else(|| CorpusError::UnknownState(code.to_string()))
    }

    pub fn as_str(&self) -> &'static str {
        STATES[self.0 as usize].0
    }

    /// Lowercase full name, e.g. `"new york"`.
    pub fn name(&self) -> &'static str {
        STATES[self.0 as usize].1
    }

    pub fn all() -> impl Iterator<Item = StateCode> {
        (0..STATES.len() as u8).map(StateCode)
    }

    fn from_name(name: &str) -> Option<Self> {
        STATES
            .iter()
            .position(|(_, n)| *n == name)
            .map(|i| StateCode(i as u8))
    }

    /// Resolves a free-text profile or place location to a state.
    ///
    /// Accepts full names ("Texas"), codes ("TX"), "City, ST", "City, State"
    /// and any of those followed by a country suffix ("New York, USA").
    /// Returns `None` for foreign, empty or ambiguous locations.
    pub fn resolve_location(location: &str) -> Option<Self> {
        let mut parts: Vec<String> = location
            .split(',')
            .map(|p| p.trim().trim_end_matches('.').to_lowercase())
            .filter(|p| !p.is_empty())
            .collect();
        while parts.len() > 1 {
            let last = parts.last().map(String::as_str).unwrap_or_default();
            let last_dotted = format!("{last}.");
            if COUNTRY_SUFFIXES.contains(&last) || COUNTRY_SUFFIXES.contains(&last_dotted.as_str()) {
                parts.pop();
            } else {
                break;
            }
        }
        let last = parts.last()?;
        if COUNTRY_SUFFIXES.contains(&last.as_str()) {
            return None;
        }
        if last == "d.c" || last == "dc" || last == "washington dc" || last == "washington d.c" {
            return StateCode::parse("DC").ok();
        }
        if let Some(code) = Self::from_name(last) {
            return Some(code);
        }
        // Bare two-letter strings are only trusted after a comma or in uppercase,
        // so words like "in" or "me" are not read as states.
        if last.len() == 2 && last.chars().all(|c| c.is_ascii_alphabetic()) {
            let original_last = location.rsplit(',').find(|p| !p.trim().is_empty())?;
            let after_comma = parts.len() > 1;
            let is_upper = original_last.trim().chars().all(|c| c.is_ascii_uppercase());
            if after_comma || is_upper {
                return StateCode::parse(last).ok();
            }
        }
        None
    }
}

impl fmt::Display for StateCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Debug for StateCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StateCode({})", self.as_str())
    }
}

impl FromStr for StateCode {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StateCode::parse(s)
    }
}

impl Serialize for StateCode {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for StateCode {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        StateCode::parse(&s).map_err(serde::de::Error::custom)
    }
}

impl JsonSchema for StateCode {
    fn schema_name() -> String {
        "StateCode".to_string()
    }

    fn json_schema(_: &mut schemars::gen::SchemaGenerator) -> schemars::schema::Schema {
        use schemars::schema::{InstanceType, SchemaObject};
        SchemaObject {
            instance_type: Some(InstanceType::String.into()),
            enum_values: Some(STATES.iter().map(|(c, _)| (*c).into()).collect()),
            ..Default::default()
        }
        .into()
    }
}
