use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::lda::LdaModel;
use super::TopicModelError;

pub const DEFAULT_LAMBDA: f64 = 0.6;
pub const DEFAULT_TOP_TERMS: usize = 30;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct RelevantTerm {
    pub term: String,
    pub relevance: f64,
    /// Within-topic probability `p(w | t)`.
    pub probability: f64,
    /// `p(w | t) / p(w)`.
    pub lift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct RelevanceRanking {
    pub topic: usize,
    pub lambda: f64,
    pub terms: Vec<RelevantTerm>,
}

/// Ranks a topic's terms by
/// `lambda * ln p(w|t) + (1 - lambda) * ln(p(w|t) / p(w))`,
/// descending, ties by term. Returns at most `n` terms.
pub fn relevant_terms(model: &LdaModel, topic: usize, lambda: f64, n: usize) -> Result<RelevanceRanking, TopicModelError> {
    if topic >= model.k {
        return Err(TopicModelError::InvalidTopic { topic, k: model.k });
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(TopicModelError::InvalidParameter("lambda must be in [0, 1]".into()));
    }
    if n == 0 {
        return Err(TopicModelError::InvalidParameter("n must be at least 1".into()));
    }
    let marginal = model.term_marginal();
    let mut terms: Vec<RelevantTerm> = model.phi[topic]
        .iter()
        .zip(&marginal)
        .zip(&model.terms)
        .filter(|((_, &pw), _)| pw > 0.0)
        .map(|((&p, &pw), term)| {
            let lift = p / pw;
            RelevantTerm {
                term: term.clone(),
                relevance: lambda * p.ln() + (1.0 - lambda) * lift.ln(),
                probability: p,
                lift,
            }
        })
        .collect();
    terms.sort_by(|a, b| {
        b.relevance
            .total_cmp(&a.relevance)
            .then_with(|| a.term.cmp(&b.term))
    });
    terms.truncate(n);
    Ok(RelevanceRanking { topic, lambda, terms })
}
