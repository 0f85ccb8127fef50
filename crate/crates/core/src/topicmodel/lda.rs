use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use super::vocab::{DocTermMatrix, Vocabulary};
use super::TopicModelError;

pub const DEFAULT_TOPICS: usize = 25;
pub const DEFAULT_BETA: f64 = 0.01;
pub const DEFAULT_ITERATIONS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LdaParams {
    pub k: usize,
    pub alpha: f64,
    pub beta: f64,
    pub iterations: usize,
    pub seed: u64,
    /// Log-likelihood is recorded every `checkpoint_every` sweeps and after
    /// the final sweep. Zero records only the final value.
    pub checkpoint_every: usize,
}

impl LdaParams {
    /// Defaults for `k` topics with `alpha = 50 / k`.
    pub fn with_topics(k: usize) -> Self {
        LdaParams {
            k,
            alpha: 50.0 / k.max(1) as f64,
            beta: DEFAULT_BETA,
            iterations: DEFAULT_ITERATIONS,
            seed: 0,
            checkpoint_every: 10,
        }
    }
}

impl Default for LdaParams {
    fn default() -> Self {
        LdaParams::with_topics(DEFAULT_TOPICS)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub iteration: usize,
    pub log_likelihood: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdaModel {
    pub k: usize,
    pub alpha: f64,
    pub beta: f64,
    pub seed: u64,
    pub iterations: usize,
    pub terms: Vec<String>,
    /// Corpus count of each term, the basis for the marginal `p(w)`.
    pub term_counts: Vec<u64>,
    pub doc_lengths: Vec<u64>,
    /// `k` rows of length `terms.len()`.
    pub phi: Vec<Vec<f64>>,
    /// One row of length `k` per document.
    pub theta: Vec<Vec<f64>>,
    pub checkpoints: Vec<Checkpoint>,
}

impl LdaModel {
    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn n_docs(&self) -> usize {
        self.theta.len()
    }

    /// Corpus marginal term distribution.
    pub fn term_marginal(&self) -> Vec<f64> {
        let total: u64 = self.term_counts.iter().sum();
        self.term_counts.iter().map(|&c| c as f64 / total as f64).collect()
    }

    /// Share of corpus tokens attributed to each topic, weighting document
    /// topic mixtures by document length.
    pub fn topic_prevalence(&self) -> Vec<f64> {
        let mut prevalence = vec![0.0; self.k];
        let total: u64 = self.doc_lengths.iter().sum();
        for (row, &len) in self.theta.iter().zip(&self.doc_lengths) {
            for (p, &t) in prevalence.iter_mut().zip(row) {
                *p += t * len as f64;
            }
        }
        prevalence.iter_mut().for_each(|p| *p /= total as f64);
        prevalence
    }
}

/// Collapsed Gibbs sampler state. Each token carries a topic assignment;
/// the count tables are kept in sync with the assignments after every step.
pub struct GibbsSampler {
    k: usize,
    n_terms: usize,
    alpha: f64,
    beta: f64,
    rng: ChaCha8Rng,
    doc_tokens: Vec<Vec<usize>>,
    assignments: Vec<Vec<usize>>,
    /// `n_dk[d * k + t]`
    n_dk: Vec<u32>,
    /// `n_wk[w * k + t]`
    n_wk: Vec<u32>,
    n_k: Vec<u32>,
    weights: Vec<f64>,
    sweeps: usize,
}

impl GibbsSampler {
    pub fn new(dtm: &DocTermMatrix, n_terms: usize, params: &LdaParams) -> Result<Self, TopicModelError> {
        let total = dtm.total_tokens();
        if params.k == 0 || params.k as u64 > total {
            return Err(TopicModelError::InvalidTopicCount { k: params.k, tokens: total });
        }
        if !(params.alpha > 0.0 && params.beta > 0.0) {
            return Err(TopicModelError::InvalidParameter("alpha and beta must be positive".into()));
        }
        let k = params.k;
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let doc_tokens: Vec<Vec<usize>> = dtm
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .flat_map(|&(w, c)| std::iter::repeat_n(w, c as usize))
                    .collect()
            })
            .collect();
        let mut n_dk = vec![0u32; dtm.n_docs() * k];
        let mut n_wk = vec![0u32; n_terms * k];
        let mut n_k = vec![0u32; k];
        let assignments = doc_tokens
            .iter()
            .enumerate()
            .map(|(d, tokens)| {
                tokens
                    .iter()
                    .map(|&w| {
                        let t = rng.random_range(0..k);
                        n_dk[d * k + t] += 1;
                        n_wk[w * k + t] += 1;
                        n_k[t] += 1;
                        t
                    })
                    .collect()
            })
            .collect();
        Ok(GibbsSampler {
            k,
            n_terms,
            alpha: params.alpha,
            beta: params.beta,
            rng,
            doc_tokens,
            assignments,
            n_dk,
            n_wk,
            n_k,
            weights: vec![0.0; k],
            sweeps: 0,
        })
    }

    /// Resamples every token's topic once, in corpus order.
    pub fn sweep(&mut self) {
        let k = self.k;
        let v_beta = self.n_terms as f64 * self.beta;
        for d in 0..self.doc_tokens.len() {
            for i in 0..self.doc_tokens[d].len() {
                let w = self.doc_tokens[d][i];
                let old = self.assignments[d][i];
                self.n_dk[d * k + old] -= 1;
                self.n_wk[w * k + old] -= 1;
                self.n_k[old] -= 1;

                let doc = &self.n_dk[d * k..(d + 1) * k];
                let word = &self.n_wk[w * k..(w + 1) * k];
                let mut total = 0.0;
                for t in 0..k {
                    total += (doc[t] as f64 + self.alpha) * (word[t] as f64 + self.beta)
                        / (self.n_k[t] as f64 + v_beta);
                    self.weights[t] = total;
                }
                let u = self.rng.random::<f64>() * total;
                let new = self.weights.iter().position(|&c| u < c).unwrap_or(k - 1);

                self.assignments[d][i] = new;
                self.n_dk[d * k + new] += 1;
                self.n_wk[w * k + new] += 1;
                self.n_k[new] += 1;
            }
        }
        self.sweeps += 1;
    }

    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    /// Number of token-topic assignments held in the topic totals.
    pub fn assignment_total(&self) -> u64 {
        self.n_k.iter().map(|&c| c as u64).sum()
    }

    /// Joint log-likelihood `log p(w, z)` with `phi` and `theta` integrated out.
    pub fn log_likelihood(&self) -> f64 {
        let (k, v) = (self.k as f64, self.n_terms as f64);
        let (alpha, beta) = (self.alpha, self.beta);
        let mut ll = k * (ln_gamma(v * beta) - v * ln_gamma(beta));
        for t in 0..self.k {
            let words: f64 = (0..self.n_terms)
                .map(|w| ln_gamma(self.n_wk[w * self.k + t] as f64 + beta))
                .sum();
            ll += words - ln_gamma(self.n_k[t] as f64 + v * beta);
        }
        let n_docs = self.doc_tokens.len() as f64;
        ll += n_docs * (ln_gamma(k * alpha) - k * ln_gamma(alpha));
        for (d, tokens) in self.doc_tokens.iter().enumerate() {
            let topics: f64 = self.n_dk[d * self.k..(d + 1) * self.k]
                .iter()
                .map(|&c| ln_gamma(c as f64 + alpha))
                .sum();
            ll += topics - ln_gamma(tokens.len() as f64 + k * alpha);
        }
        ll
    }

    fn phi(&self) -> Vec<Vec<f64>> {
        let v_beta = self.n_terms as f64 * self.beta;
        (0..self.k)
            .map(|t| {
                let denom = self.n_k[t] as f64 + v_beta;
                (0..self.n_terms)
                    .map(|w| (self.n_wk[w * self.k + t] as f64 + self.beta) / denom)
                    .collect()
            })
            .collect()
    }

    fn theta(&self) -> Vec<Vec<f64>> {
        let k_alpha = self.k as f64 * self.alpha;
        self.doc_tokens
            .iter()
            .enumerate()
            .map(|(d, tokens)| {
                let denom = tokens.len() as f64 + k_alpha;
                self.n_dk[d * self.k..(d + 1) * self.k]
                    .iter()
                    .map(|&c| (c as f64 + self.alpha) / denom)
                    .collect()
            })
            .collect()
    }
}

/// Fits LDA by collapsed Gibbs sampling. Topic-term and document-topic
/// distributions are the smoothed estimates from the final assignment counts.
pub fn lda_fit(dtm: &DocTermMatrix, vocab: &Vocabulary, params: &LdaParams) -> Result<LdaModel, TopicModelError> {
    if params.iterations == 0 {
        return Err(TopicModelError::InvalidParameter("iterations must be at least 1".into()));
    }
    let mut sampler = GibbsSampler::new(dtm, vocab.len(), params)?;
    let mut checkpoints = Vec::new();
    for it in 1..=params.iterations {
        sampler.sweep();
        let due = params.checkpoint_every > 0 && it % params.checkpoint_every == 0;
        if due || it == params.iterations {
            checkpoints.push(Checkpoint {
                iteration: it,
                log_likelihood: sampler.log_likelihood(),
            });
        }
    }
    Ok(LdaModel {
        k: params.k,
        alpha: params.alpha,
        beta: params.beta,
        seed: params.seed,
        iterations: params.iterations,
        terms: vocab.terms().to_vec(),
        term_counts: dtm.term_totals(vocab.len()),
        doc_lengths: (0..dtm.n_docs()).map(|d| dtm.doc_length(d)).collect(),
        phi: sampler.phi(),
        theta: sampler.theta(),
        checkpoints,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textproc::{StopwordPolicy, TokenList};
    use crate::topicmodel::build_vocabulary;

    fn corpus() -> (DocTermMatrix, Vocabulary) {
        let docs: Vec<TokenList> = [
            "mask mask vaccine hospital",
            "vaccine trial hospital",
            "beach park travel",
            "travel flight park park",
            "",
        ]
        .iter()
        .map(|s| s.split_whitespace().collect())
        .collect();
        let vocab = build_vocabulary(&docs, &StopwordPolicy::empty(), 1, 1.0).unwrap();
        (DocTermMatrix::from_tokens(&docs, &vocab), vocab)
    }

    fn params(k: usize) -> LdaParams {
        LdaParams {
            iterations: 30,
            seed: 7,
            ..LdaParams::with_topics(k)
        }
    }

    #[test]
    fn rows_are_stochastic() {
        let (dtm, vocab) = corpus();
        let m = lda_fit(&dtm, &vocab, &params(3)).unwrap();
        for row in m.phi.iter().chain(&m.theta) {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            assert!(row.iter().all(|&p| p > 0.0));
        }
        assert!(m.theta[4].iter().all(|&p| (p - 1.0 / 3.0).abs() < 1e-15));
    }

    #[test]
    fn single_topic_degenerates() {
        let (dtm, vocab) = corpus();
        let m = lda_fit(&dtm, &vocab, &params(1)).unwrap();
        assert!(m.theta.iter().all(|r| r == &vec![1.0]));
        let total = dtm.total_tokens() as f64;
        let v = vocab.len() as f64;
        for (w, &p) in m.phi[0].iter().enumerate() {
            let expected = (m.term_counts[w] as f64 + m.beta) / (total + v * m.beta);
            assert!((p - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn sweeps_conserve_assignments() {
        let (dtm, vocab) = corpus();
        let mut s = GibbsSampler::new(&dtm, vocab.len(), &params(2)).unwrap();
        for _ in 0..20 {
            s.sweep();
            assert_eq!(s.assignment_total(), dtm.total_tokens());
        }
    }

    #[test]
    fn invalid_parameters() {
        let (dtm, vocab) = corpus();
        let tokens = dtm.total_tokens() as usize;
        assert!(matches!(
            lda_fit(&dtm, &vocab, &params(tokens + 1)),
            Err(TopicModelError::InvalidTopicCount { .. })
        ));
        assert!(lda_fit(&dtm, &vocab, &params(0)).is_err());
        let mut p = params(2);
        p.iterations = 0;
        assert!(lda_fit(&dtm, &vocab, &p).is_err());
        p = params(2);
        p.beta = 0.0;
        assert!(lda_fit(&dtm, &vocab, &p).is_err());
    }
}
