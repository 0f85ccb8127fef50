use nalgebra::{DMatrix, SymmetricEigen};
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::lda::LdaModel;
use super::relevance::RelevanceRanking;

pub const TOPICVIS_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct TopicPoint {
    pub topic: usize,
    pub prevalence: f64,
    pub x: f64,
    pub y: f64,
}

/// Intertopic map and ranked terms, written as `lda.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct TopicVisPayload {
    pub schema_version: u32,
    pub k: usize,
    pub n_terms: usize,
    pub n_docs: usize,
    pub seed: u64,
    pub topics: Vec<TopicPoint>,
    pub rankings: Vec<RelevanceRanking>,
}

fn kl_to_mixture(p: &[f64], m: &[f64]) -> f64 {
    p.iter()
        .zip(m)
        .filter(|(&pi, _)| pi > 0.0)
        .map(|(&pi, &mi)| pi * (pi / mi).ln())
        .sum()
}

/// Jensen-Shannon divergence in nats, bounded by `ln 2`.
pub fn js_divergence(p: &[f64], q: &[f64]) -> f64 {
    let m: Vec<f64> = p.iter().zip(q).map(|(a, b)| 0.5 * (a + b)).collect();
    let d = 0.5 * kl_to_mixture(p, &m) + 0.5 * kl_to_mixture(q, &m);
    d.clamp(0.0, std::f64::consts::LN_2)
}

/// Symmetric pairwise divergence matrix with a zero diagonal.
pub fn js_matrix(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = rows.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let d = js_divergence(&rows[i], &rows[j]);
            out[i][j] = d;
            out[j][i] = d;
        }
    }
    out
}

/// Classical (Torgerson) scaling of a distance matrix into two dimensions.
/// Each axis is oriented so its largest-magnitude coordinate is positive.
pub fn classical_mds(dist: &[Vec<f64>]) -> Vec<(f64, f64)> {
    let n = dist.len();
    if n < 2 {
        return vec![(0.0, 0.0); n];
    }
    let d2 = DMatrix::from_fn(n, n, |i, j| dist[i][j] * dist[i][j]);
    let row_means: Vec<f64> = (0..n).map(|i| d2.row(i).sum() / n as f64).collect();
    let grand = row_means.iter().sum::<f64>() / n as f64;
    let b = DMatrix::from_fn(n, n, |i, j| -0.5 * (d2[(i, j)] - row_means[i] - row_means[j] + grand));
    let eig = SymmetricEigen::new(b);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let axis = |rank: usize| -> Vec<f64> {
        let Some(&col) = order.get(rank) else {
            return vec![0.0; n];
        };
        let scale = eig.eigenvalues[col].max(0.0).sqrt();
        let mut v: Vec<f64> = eig.eigenvectors.column(col).iter().map(|&c| c * scale).collect();
        let pivot = v.iter().copied().fold(0.0f64, |acc, c| if c.abs() > acc.abs() { c } else { acc });
        if pivot < 0.0 {
            v.iter_mut().for_each(|c| *c = -*c);
        }
        v
    };
    let (xs, ys) = (axis(0), axis(1));
    xs.into_iter().zip(ys).collect()
}

pub fn export_topicvis(model: &LdaModel, rankings: &[RelevanceRanking]) -> TopicVisPayload {
    let coords = classical_mds(&js_matrix(&model.phi));
    let prevalence = model.topic_prevalence();
    let topics = coords
        .into_iter()
        .zip(prevalence)
        .enumerate()
        .map(|(topic, ((x, y), prevalence))| TopicPoint { topic, prevalence, x, y })
        .collect();
    TopicVisPayload {
        schema_version: TOPICVIS_SCHEMA_VERSION,
        k: model.k,
        n_terms: model.n_terms(),
        n_docs: model.n_docs(),
        seed: model.seed,
        topics,
        rankings: rankings.to_vec(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divergence_bounds() {
        assert_eq!(js_divergence(&[0.5, 0.5], &[0.5, 0.5]), 0.0);
        let d = js_divergence(&[1.0, 0.0], &[0.0, 1.0]);
        assert!((d - std::f64::consts::LN_2).abs() < 1e-15);
        let m = js_matrix(&[vec![0.2, 0.8], vec![0.6, 0.4], vec![0.9, 0.1]]);
        for i in 0..3 {
            assert_eq!(m[i][i], 0.0);
            for j in 0..3 {
                assert_eq!(m[i][j], m[j][i]);
            }
        }
    }

    #[test]
    fn two_points_mirror() {
        let pts = classical_mds(&[vec![0.0, 0.4], vec![0.4, 0.0]]);
        assert!((pts[0].0 + pts[1].0).abs() < 1e-12);
        assert!((pts[0].1 + pts[1].1).abs() < 1e-12);
        assert!(((pts[0].0 - pts[1].0).abs() - 0.4).abs() < 1e-12);
    }

    #[test]
    fn identical_topics_coincide() {
        let d = js_matrix(&[vec![0.3, 0.7], vec![0.3, 0.7], vec![0.3, 0.7]]);
        for (x, y) in classical_mds(&d) {
            assert!(x.abs() < 1e-12 && y.abs() < 1e-12);
        }
    }

    #[test]
    fn recovers_planar_configuration() {
        let pts: [(f64, f64); 4] = [(0.0, 0.0), (3.0, 0.0), (0.0, 4.0), (1.0, 1.0)];
        let dist: Vec<Vec<f64>> = pts
            .iter()
            .map(|a| pts.iter().map(|b| ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()).collect())
            .collect();
        let out = classical_mds(&dist);
        for i in 0..4 {
            for j in 0..4 {
                let d = ((out[i].0 - out[j].0).powi(2) + (out[i].1 - out[j].1).powi(2)).sqrt();
                assert!((d - dist[i][j]).abs() < 1e-9);
            }
        }
    }
}
