//! Tokenization, stopword filtering and n-grams.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use thiserror::Error;

const STANDARD_STOPWORDS: &str = include_str!("../data/stopwords_en.txt");
const DOMAIN_STOPWORDS: &str = include_str!("../data/stopwords_domain.txt");

/// Minimum token length in characters.
pub const MIN_TOKEN_LEN: usize = 2;

#[derive(Debug, Error)]
pub enum TextError {
    #[error("n-gram arity must be at least 1")]
    InvalidArity,
    #[error("reading word list {path}: {source}")]
    WordList {
        path: String,
        source: std::io::Error,
    },
}

/// Ordered lowercase word tokens. No token is empty or contains whitespace.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TokenList(Vec<String>);

impl TokenList {
    pub fn as_slice(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, String> {
        self.0.iter()
    }

    pub fn into_vec(self) -> Vec<String> {
        self.0
    }
}

impl<'a> IntoIterator for &'a TokenList {
    type Item = &'a String;
    type IntoIter = std::slice::Iter<'a, String>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// Builds a token list from already-clean tokens, dropping any that would
/// break the type's invariants.
impl<S: Into<String>> FromIterator<S> for TokenList {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        TokenList(
            iter.into_iter()
                .map(Into::into)
                .filter(|t: &String| !t.is_empty() && !t.chars().any(char::is_whitespace))
                .collect(),
        )
    }
}

/// Splits on whitespace, trims non-alphanumeric characters from both ends of
/// each token and drops tokens shorter than two characters. Inner punctuation
/// is kept, so "covid-19" stays whole.
pub fn tokenize(text: &str) -> TokenList {
    TokenList(
        text.split_whitespace()
            .map(|t| t.trim_matches(|c: char| !c.is_alphanumeric()))
            .filter(|t| t.chars().count() >= MIN_TOKEN_LEN)
            .map(|t| t.to_lowercase())
            .collect(),
    )
}

/// Three stopword sets: a fixed English list, query/noise terms that every
/// tweet in this corpus trivially contains, and caller extras.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StopwordPolicy {
    pub standard: HashSet<String>,
    pub domain: HashSet<String>,
    pub extra: HashSet<String>,
}

fn word_lines(s: &str) -> HashSet<String> {
    s.lines()
        .map(|l| l.trim().to_lowercase())
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect()
}

fn read_word_list(path: &Path) -> Result<HashSet<String>, TextError> {
    fs::read_to_string(path)
        .map(|s| word_lines(&s))
        .map_err(|source| TextError::WordList {
            path: path.display().to_string(),
            source,
        })
}

impl Default for StopwordPolicy {
    fn default() -> Self {
        StopwordPolicy {
            standard: word_lines(STANDARD_STOPWORDS),
            domain: word_lines(DOMAIN_STOPWORDS),
            extra: HashSet::new(),
        }
    }
}

impl StopwordPolicy {
    /// Standard English list only; used where query terms must stay matchable
    /// (featured topics such as "corona outbreak").
    pub fn standard_only() -> Self {
        StopwordPolicy {
            domain: HashSet::new(),
            ..Default::default()
        }
    }

    pub fn empty() -> Self {
        StopwordPolicy {
            standard: HashSet::new(),
            domain: HashSet::new(),
            extra: HashSet::new(),
        }
    }

    /// Replaces the standard and/or domain lists with files and adds extras.
    /// `covid`, `corona` and `rt` are always part of the domain set.
    pub fn from_files(
        standard: Option<&Path>,
        domain: Option<&Path>,
        extra: Option<&Path>,
    ) -> Result<Self, TextError> {
        let mut policy = StopwordPolicy::default();
        if let Some(p) = standard {
            policy.standard = read_word_list(p)?;
        }
        if let Some(p) = domain {
            policy.domain = read_word_list(p)?;
            for w in ["covid", "corona", "rt"] {
                policy.domain.insert(w.to_string());
            }
        }
        if let Some(p) = extra {
            policy.extra = read_word_list(p)?;
        }
        Ok(policy)
    }

    pub fn with_extra<I, S>(mut self, words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.extra.extend(words.into_iter().map(Into::into));
        self
    }

    pub fn is_stopword(&self, token: &str) -> bool {
        self.standard.contains(token) || self.domain.contains(token) || self.extra.contains(token)
    }
}

pub fn remove_stopwords(tokens: &TokenList, policy: &StopwordPolicy) -> TokenList {
    TokenList(
        tokens
            .iter()
            .filter(|t| !policy.is_stopword(t))
            .cloned()
            .collect(),
    )
}

/// `tokenize` followed by `remove_stopwords`.
pub fn content_tokens(text: &str, policy: &StopwordPolicy) -> TokenList {
    let mut tokens = tokenize(text);
    tokens.0.retain(|t| !policy.is_stopword(t));
    tokens
}

/// All consecutive windows of length `n`, in order.
pub fn ngrams(tokens: &TokenList, n: usize) -> Result<Vec<&[String]>, TextError> {
    if n == 0 {
        return Err(TextError::InvalidArity);
    }
    Ok(tokens.0.windows(n).collect())
}
