//! LDA topic modeling: vocabulary and TF-IDF construction, a seeded
//! collapsed Gibbs sampler, LDAvis-style relevance ranking, and the
//! intertopic-map export.

mod lda;
mod relevance;
mod vis;
mod vocab;

pub use lda::{lda_fit, Checkpoint, GibbsSampler, LdaModel, LdaParams, DEFAULT_BETA, DEFAULT_ITERATIONS, DEFAULT_TOPICS};
pub use relevance::{relevant_terms, RelevanceRanking, RelevantTerm, DEFAULT_LAMBDA, DEFAULT_TOP_TERMS};
pub use vis::{classical_mds, export_topicvis, js_divergence, js_matrix, TopicPoint, TopicVisPayload, TOPICVIS_SCHEMA_VERSION};
pub use vocab::{build_vocabulary, tfidf, DocTermMatrix, IdfVariant, TfIdfMatrix, Vocabulary};

use crate::corpus::TweetRecord;
use crate::textproc::{tokenize, StopwordPolicy, TokenList};

#[derive(Debug, thiserror::Error)]
pub enum TopicModelError {
    #[error("no terms survive vocabulary pruning")]
    EmptyVocabulary,
    #[error("topic count {k} must be between 1 and the corpus token count {tokens}")]
    InvalidTopicCount { k: usize, tokens: u64 },
    #[error("topic {topic} out of range for a {k}-topic model")]
    InvalidTopic { topic: usize, k: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct VocabParams {
    pub min_df: u32,
    pub max_df_fraction: f64,
}

impl Default for VocabParams {
    fn default() -> Self {
        VocabParams {
            min_df: 2,
            max_df_fraction: 0.5,
        }
    }
}

/// Fitted model together with the vocabulary and matrix it was trained on.
#[derive(Debug, Clone)]
pub struct FittedCorpus {
    pub vocabulary: Vocabulary,
    pub dtm: DocTermMatrix,
    pub model: LdaModel,
}

/// Tokenizes each tweet, builds the vocabulary and fits LDA on its counts.
pub fn fit_records(
    records: &[TweetRecord],
    policy: &StopwordPolicy,
    vocab: &VocabParams,
    params: &LdaParams,
) -> Result<FittedCorpus, TopicModelError> {
    let docs: Vec<TokenList> = records.iter().map(|r| tokenize(&r.text)).collect();
    let vocabulary = build_vocabulary(&docs, policy, vocab.min_df, vocab.max_df_fraction)?;
    let dtm = DocTermMatrix::from_tokens(&docs, &vocabulary);
    let model = lda_fit(&dtm, &vocabulary, params)?;
    Ok(FittedCorpus { vocabulary, dtm, model })
}
