//! Polarity and subjectivity scoring, three-way labels, and daily, cohort and
//! word-cloud aggregations over scored tweets.

mod aggregate;
mod vader;

use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::sync::OnceLock;

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::TweetRecord;
use crate::textproc::tokenize;

pub use aggregate::{
    aggregate_series, cohort_stats, label_counts, polarity_wordclouds, sentiment_histogram, Cohort,
    CohortReport, CohortStats, DailySentimentPoint, DailySentimentSeries, Histogram, LabelCounts, LabelFractions,
    PowerUser, WordClouds,
};
pub use vader::{normalize_compound, polarity_scores, token_sentiments, ValenceLexicon, ALPHA, NEGATION_SCALAR};

/// Half-width of the neutral band around zero.
pub const NEUTRAL_THRESHOLD: f64 = 0.05;

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("reading lexicon {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("lexicon {path}: {message}")]
    Format { path: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct PolarityScore {
    pub compound: f64,
    pub pos: f64,
    pub neg: f64,
    pub neu: f64,
}

impl PolarityScore {
    pub fn neutral() -> Self {
        PolarityScore {
            compound: 0.0,
            pos: 0.0,
            neg: 0.0,
            neu: 1.0,
        }
    }

    pub fn label(&self) -> SentimentLabel {
        classify(self.compound)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "lowercase")]
pub enum SentimentLabel {
    Negative,
    Neutral,
    Positive,
}

/// Neutral is the open interval (-0.05, 0.05); the boundaries are signed.
pub fn classify(compound: f64) -> SentimentLabel {
    if compound >= NEUTRAL_THRESHOLD {
        SentimentLabel::Positive
    } else if compound <= -NEUTRAL_THRESHOLD {
        SentimentLabel::Negative
    } else {
        SentimentLabel::Neutral
    }
}

const DEFAULT_SUBJECTIVITY_LEXICON: &str = include_str!("../../data/subjectivity_lexicon.tsv");

/// Term to subjectivity in [0, 1] (`term<TAB>subjectivity`).
#[derive(Debug, Clone, Default)]
pub struct SubjectivityLexicon {
    values: HashMap<String, f64>,
}

impl SubjectivityLexicon {
    pub fn parse(contents: &str) -> Result<Self, String> {
        let mut values = HashMap::new();
        for (n, line) in contents.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((term, v)) = line.split_once('\t') else {
                return Err(format!("line {}: expected term<TAB>subjectivity", n + 1));
            };
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| format!("line {}: bad value `{v}`", n + 1))?;
            if !(0.0..=1.0).contains(&v) {
                return Err(format!("line {}: subjectivity {v} outside [0, 1]", n + 1));
            }
            values.insert(term.trim().to_lowercase(), v);
        }
        Ok(SubjectivityLexicon { values })
    }

    /// Adjective subjectivity lexicon, averaged over word senses.
    pub fn bundled() -> &'static SubjectivityLexicon {
        static LEX: OnceLock<SubjectivityLexicon> = OnceLock::new();
        LEX.get_or_init(|| {
            SubjectivityLexicon::parse(DEFAULT_SUBJECTIVITY_LEXICON).expect("bundled lexicon parses")
        })
    }

    pub fn get(&self, term: &str) -> Option<f64> {
        self.values.get(term).copied()
    }

    pub fn insert(&mut self, term: impl Into<String>, value: f64) {
        self.values.insert(term.into(), value.clamp(0.0, 1.0));
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Mean subjectivity of the lexicon-matched tokens; 0 when nothing matches.
pub fn score_subjectivity(text: &str, lexicon: &SubjectivityLexicon) -> f64 {
    let (sum, n) = tokenize(text)
        .iter()
        .filter_map(|t| lexicon.get(t))
        .fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        (sum / n as f64).clamp(0.0, 1.0)
    }
}

/// Both lexicons needed to score a tweet.
#[derive(Debug, Clone)]
pub struct SentimentScorer {
    pub valence: ValenceLexicon,
    pub subjectivity: SubjectivityLexicon,
}

impl Default for SentimentScorer {
    fn default() -> Self {
        SentimentScorer {
            valence: ValenceLexicon::bundled().clone(),
            subjectivity: SubjectivityLexicon::bundled().clone(),
        }
    }
}

fn read_lexicon<T>(path: &Path, parse: impl Fn(&str) -> Result<T, String>) -> Result<T, LexiconError> {
    let contents = fs::read_to_string(path).map_err(|source| LexiconError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse(&contents).map_err(|message| LexiconError::Format {
        path: path.display().to_string(),
        message,
    })
}

impl SentimentScorer {
    /// Loads either lexicon from disk, falling back to the bundled one.
    pub fn from_paths(valence: Option<&Path>, subjectivity: Option<&Path>) -> Result<Self, LexiconError> {
        Ok(SentimentScorer {
            valence: match valence {
                Some(p) => read_lexicon(p, ValenceLexicon::parse)?,
                None => ValenceLexicon::bundled().clone(),
            },
            subjectivity: match subjectivity {
                Some(p) => read_lexicon(p, SubjectivityLexicon::parse)?,
                None => SubjectivityLexicon::bundled().clone(),
            },
        })
    }

    pub fn score_polarity(&self, text: &str) -> PolarityScore {
        polarity_scores(text, &self.valence)
    }

    pub fn score_subjectivity(&self, text: &str) -> f64 {
        score_subjectivity(text, &self.subjectivity)
    }

    pub fn score(&self, record: TweetRecord) -> ScoredTweet {
        let polarity = self.score_polarity(&record.text);
        let subjectivity = self.score_subjectivity(&record.text);
        ScoredTweet {
            label: polarity.label(),
            polarity,
            subjectivity,
            record,
        }
    }
}

/// A record with its sentiment scores attached.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredTweet {
    pub record: TweetRecord,
    pub polarity: PolarityScore,
    pub subjectivity: f64,
    pub label: SentimentLabel,
}

impl AsRef<TweetRecord> for ScoredTweet {
    fn as_ref(&self) -> &TweetRecord {
        &self.record
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classify_boundaries() {
        assert_eq!(classify(0.0), SentimentLabel::Neutral);
        assert_eq!(classify(0.05), SentimentLabel::Positive);
        assert_eq!(classify(-0.05), SentimentLabel::Negative);
        assert_eq!(classify(0.0499), SentimentLabel::Neutral);
        assert_eq!(classify(-0.6), SentimentLabel::Negative);
    }

    #[test]
    fn subjectivity_examples() {
        let mut lex = SubjectivityLexicon::default();
        lex.insert("awful", 1.0);
        lex.insert("serious", 0.4);
        lex.insert("scary", 0.8);
        assert_eq!(score_subjectivity("", &lex), 0.0);
        assert_eq!(score_subjectivity("awful", &lex), 1.0);
        assert!((score_subjectivity("serious and scary", &lex) - 0.6).abs() < 1e-12);
        assert_eq!(score_subjectivity("nothing matches here", &lex), 0.0);
    }

    #[test]
    fn bundled_subjectivity_in_range() {
        let lex = SubjectivityLexicon::bundled();
        assert!(lex.len() > 1000);
        let s = score_subjectivity("this is a terrible and scary situation", lex);
        assert!((0.0..=1.0).contains(&s) && s > 0.0);
    }

    #[test]
    fn lexicon_parse_errors() {
        assert!(SubjectivityLexicon::parse("good\t1.5\n").is_err());
        assert!(SubjectivityLexicon::parse("good\n").is_err());
        assert!(ValenceLexicon::parse("good\tx\n").is_err());
    }
}
