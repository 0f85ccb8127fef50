//! Frequency tables and deterministic top-k ranking.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::hash::Hash;

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct WordCount {
    pub word: String,
    pub count: u64,
}

/// Descending count, then ascending key.
pub fn rank_order<K: Ord>(a: &(K, u64), b: &(K, u64)) -> Ordering {
    b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0))
}

/// The `k` most frequent keys, ties broken by ascending key. `k` larger than
/// the table returns every entry.
pub fn top_k<K: Ord + Hash + Eq>(counts: HashMap<K, u64>, k: usize) -> Vec<(K, u64)> {
    let mut entries: Vec<(K, u64)> = counts.into_iter().collect();
    if k < entries.len() {
        entries.select_nth_unstable_by(k, rank_order);
        entries.truncate(k);
    }
    entries.sort_unstable_by(rank_order);
    entries
}

pub fn top_words(counts: HashMap<String, u64>, k: usize) -> Vec<WordCount> {
    top_k(counts, k)
        .into_iter()
        .map(|(word, count)| WordCount { word, count })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ties_break_lexicographically() {
        let counts: HashMap<&str, u64> = [("b", 2), ("a", 2), ("c", 5), ("d", 1)].into_iter().collect();
        assert_eq!(top_k(counts.clone(), 3), vec![("c", 5), ("a", 2), ("b", 2)]);
        assert_eq!(top_k(counts.clone(), 10).len(), 4);
        assert!(top_k(counts, 0).is_empty());
    }
}
