use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::TopicModelError;
use crate::textproc::{StopwordPolicy, TokenList};

/// Dense term index with per-term document frequency. Indices follow
/// lexicographic term order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Vocabulary {
    terms: Vec<String>,
    #[serde(skip)]
    index: HashMap<String, usize>,
    doc_freq: Vec<u32>,
    n_docs: usize,
}

impl Vocabulary {
    fn from_parts(terms: Vec<String>, doc_freq: Vec<u32>, n_docs: usize) -> Self {
        let index = terms.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Vocabulary {
            terms,
            index,
            doc_freq,
            n_docs,
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn term(&self, i: usize) -> &str {
        &self.terms[i]
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn doc_freq(&self, i: usize) -> u32 {
        self.doc_freq[i]
    }

    /// Number of documents the vocabulary was built from.
    pub fn n_docs(&self) -> usize {
        self.n_docs
    }
}

/// Keeps terms that are not stopwords, appear in at least `min_df` documents
/// and in at most `max_df_fraction` of them.
pub fn build_vocabulary(
    docs: &[TokenList],
    policy: &StopwordPolicy,
    min_df: u32,
    max_df_fraction: f64,
) -> Result<Vocabulary, TopicModelError> {
    if min_df == 0 {
        return Err(TopicModelError::InvalidParameter("min_df must be at least 1".into()));
    }
    if !(max_df_fraction > 0.0 && max_df_fraction <= 1.0) {
        return Err(TopicModelError::InvalidParameter("max_df must be in (0, 1]".into()));
    }
    let mut df: BTreeMap<&str, u32> = BTreeMap::new();
    for doc in docs {
        let unique: HashSet<&str> = doc.iter().map(String::as_str).collect();
        for t in unique {
            if !policy.is_stopword(t) {
                *df.entry(t).or_default() += 1;
            }
        }
    }
    let max_df = max_df_fraction * docs.len() as f64;
    let (terms, freqs): (Vec<String>, Vec<u32>) = df
        .into_iter()
        .filter(|&(_, n)| n >= min_df && n as f64 <= max_df)
        .map(|(t, n)| (t.to_string(), n))
        .unzip();
    if terms.is_empty() {
        return Err(TopicModelError::EmptyVocabulary);
    }
    Ok(Vocabulary::from_parts(terms, freqs, docs.len()))
}

/// Sparse bag-of-words counts, one row per document in corpus order. Rows are
/// sorted by term index; documents with no in-vocabulary terms are empty rows.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DocTermMatrix {
    pub rows: Vec<Vec<(usize, u32)>>,
}

impl DocTermMatrix {
    pub fn from_tokens(docs: &[TokenList], vocab: &Vocabulary) -> Self {
        let rows = docs
            .iter()
            .map(|doc| {
                let mut counts: BTreeMap<usize, u32> = BTreeMap::new();
                for t in doc {
                    if let Some(i) = vocab.index_of(t) {
                        *counts.entry(i).or_default() += 1;
                    }
                }
                counts.into_iter().collect()
            })
            .collect();
        DocTermMatrix { rows }
    }

    pub fn n_docs(&self) -> usize {
        self.rows.len()
    }

    pub fn total_tokens(&self) -> u64 {
        self.rows.iter().flatten().map(|&(_, c)| c as u64).sum()
    }

    pub fn doc_length(&self, d: usize) -> u64 {
        self.rows[d].iter().map(|&(_, c)| c as u64).sum()
    }

    /// Corpus count per term, length `n_terms`.
    pub fn term_totals(&self, n_terms: usize) -> Vec<u64> {
        let mut totals = vec![0u64; n_terms];
        for &(t, c) in self.rows.iter().flatten() {
            totals[t] += c as u64;
        }
        totals
    }
}

/// Inverse document frequency formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IdfVariant {
    /// `ln((1 + D) / (1 + df)) + 1`, never zero.
    #[default]
    Smooth,
    /// `ln(D / df)`, zero for terms in every document.
    Plain,
}

impl IdfVariant {
    pub fn idf(&self, n_docs: usize, df: u32) -> f64 {
        let (d, df) = (n_docs as f64, df as f64);
        match self {
            IdfVariant::Smooth => ((1.0 + d) / (1.0 + df)).ln() + 1.0,
            IdfVariant::Plain => (d / df).ln(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TfIdfMatrix {
    pub rows: Vec<Vec<(usize, f64)>>,
}

/// `tf(d, t) * idf(t)` with document frequencies taken from the matrix itself.
pub fn tfidf(dtm: &DocTermMatrix, vocab: &Vocabulary, variant: IdfVariant) -> TfIdfMatrix {
    let mut df = vec![0u32; vocab.len()];
    for &(t, _) in dtm.rows.iter().flatten() {
        df[t] += 1;
    }
    let n_docs = dtm.n_docs();
    let rows = dtm
        .rows
        .iter()
        .map(|row| {
            row.iter()
                .map(|&(t, c)| (t, c as f64 * variant.idf(n_docs, df[t])))
                .collect()
        })
        .collect();
    TfIdfMatrix { rows }
}
