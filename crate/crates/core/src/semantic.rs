//! Word × property TF-IDF weights and harmonic-mean classification of
//! candidate subgraphs.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::graph::{KeyMode, NodeKey};
use crate::io::{load_artifact, save_artifact};
use crate::supervision::{LabeledPattern, OTHER};
use crate::syntactic::{CandidateMatch, IndexError, Provenance};

const SEMANTIC_KIND: &str = "relpat-semantic-index";
const SEMANTIC_VERSION: u32 = 1;

/// Raw word counts per property, `counts[p][w]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyMatrix {
    pub key_mode: KeyMode,
    pub properties: Vec<String>,
    pub words: Vec<NodeKey>,
    pub counts: Vec<Vec<u64>>,
}

impl FrequencyMatrix {
    pub fn count(&self, property: &str, word: &NodeKey) -> u64 {
        match (
            self.properties
                .binary_search_by(|p| p.as_str().cmp(property)),
            self.words.binary_search(word),
        ) {
            (Ok(p), Ok(w)) => self.counts[p][w],
            _ => 0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.counts.iter().flatten().all(|&c| c == 0)
    }
}

/// Counts the node keys of every pattern under each of its labels. Each
/// pattern is one document; `Other` is not a property and is skipped.
pub fn build_frequency_matrix(patterns: &[LabeledPattern], key_mode: KeyMode) -> FrequencyMatrix {
    let mut table: BTreeMap<&str, BTreeMap<NodeKey, u64>> = BTreeMap::new();
    let mut words = BTreeSet::new();
    for p in patterns {
        let keys = p.pattern.graph.keys(key_mode);
        for label in p.labels.iter().filter(|l| l.as_str() != OTHER) {
            let row = table.entry(label).or_default();
            for k in &keys {
                *row.entry(k.clone()).or_default() += 1;
                words.insert(k.clone());
            }
        }
    }
    let words: Vec<NodeKey> = words.into_iter().collect();
    let counts = table
        .values()
        .map(|row| {
            words
                .iter()
                .map(|w| row.get(w).copied().unwrap_or(0))
                .collect()
        })
        .collect();
    FrequencyMatrix {
        key_mode,
        properties: table.keys().map(|p| p.to_string()).collect(),
        words,
        counts,
    }
}

/// Sparse property weights of one candidate, keyed by property id.
pub type ScoreVector = BTreeMap<String, f64>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemanticIndex {
    pub key_mode: KeyMode,
    pub words: Vec<NodeKey>,
    pub properties: Vec<String>,
    /// `weights[w][p]`.
    pub weights: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: String,
    /// Best score in the vector, reported even when it fell below threshold.
    pub score: Option<f64>,
}

impl Prediction {
    pub fn is_other(&self) -> bool {
        self.label == OTHER
    }
}

/// Applies TF-IDF per property row, transposes, and scales each nonzero word
/// row to unit Euclidean norm.
///
/// tf is the raw count and idf is `ln((1 + P) / (1 + df)) + 1`, where df is
/// the number of properties under which the word occurs.
pub fn build_semantic_index(counts: &FrequencyMatrix) -> Result<SemanticIndex, IndexError> {
    if counts.is_zero() {
        return Err(IndexError::EmptyMatrix);
    }
    let n_props = counts.properties.len();
    let weights = (0..counts.words.len())
        .map(|w| {
            let df = counts.counts.iter().filter(|row| row[w] > 0).count();
            let idf = ((1.0 + n_props as f64) / (1.0 + df as f64)).ln() + 1.0;
            let row: Vec<f64> = counts.counts.iter().map(|r| r[w] as f64 * idf).collect();
            normalize(row)
        })
        .collect();
    Ok(SemanticIndex {
        key_mode: counts.key_mode,
        words: counts.words.clone(),
        properties: counts.properties.clone(),
        weights,
        provenance: None,
    })
}

fn normalize(row: Vec<f64>) -> Vec<f64> {
    let max = row.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return row;
    }
    let scaled: Vec<f64> = row.iter().map(|x| x / max).collect();
    let norm = scaled.iter().map(|x| x * x).sum::<f64>().sqrt();
    scaled.into_iter().map(|x| x / norm).collect()
}

/// Harmonic mean, zero as soon as any value is zero.
pub fn harmonic_mean(values: &[f64]) -> f64 {
    if values.is_empty() || values.iter().any(|&v| v <= 0.0) {
        return 0.0;
    }
    values.len() as f64 / values.iter().map(|v| 1.0 / v).sum::<f64>()
}

/// Picks the best-scoring property, returned only if its score is strictly
/// above `threshold`. Ties go to the lexicographically smallest property.
pub fn decide(scores: &ScoreVector, threshold: f64) -> Prediction {
    let mut best: Option<(&String, f64)> = None;
    for (p, &s) in scores {
        if best.is_none_or(|(_, b)| s > b) {
            best = Some((p, s));
        }
    }
    match best {
        Some((p, s)) if s > threshold => Prediction {
            label: p.clone(),
            score: Some(s),
        },
        other => Prediction {
            label: OTHER.to_string(),
            score: other.map(|(_, s)| s),
        },
    }
}

impl SemanticIndex {
    /// An index with externally supplied weights. Rows must have one value
    /// per property and all values must be finite and non-negative.
    pub fn from_weights(
        key_mode: KeyMode,
        rows: Vec<(NodeKey, Vec<f64>)>,
        properties: Vec<String>,
    ) -> Option<Self> {
        let mut rows = rows;
        rows.sort_by(|a, b| a.0.cmp(&b.0));
        let mut props: Vec<(String, usize)> = properties
            .into_iter()
            .enumerate()
            .map(|(i, p)| (p, i))
            .collect();
        props.sort();
        let ok = rows
            .iter()
            .all(|(_, r)| r.len() == props.len() && r.iter().all(|x| x.is_finite() && *x >= 0.0))
            && rows.windows(2).all(|w| w[0].0 != w[1].0)
            && props.windows(2).all(|w| w[0].0 != w[1].0);
        if !ok {
            return None;
        }
        Some(SemanticIndex {
            key_mode,
            words: rows.iter().map(|(w, _)| w.clone()).collect(),
            weights: rows
                .iter()
                .map(|(_, r)| props.iter().map(|&(_, i)| r[i]).collect())
                .collect(),
            properties: props.into_iter().map(|(p, _)| p).collect(),
            provenance: None,
        })
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = Some(provenance);
        self
    }

    pub fn weight(&self, word: &NodeKey, property: &str) -> f64 {
        match (
            self.words.binary_search(word),
            self.properties
                .binary_search_by(|p| p.as_str().cmp(property)),
        ) {
            (Ok(w), Ok(p)) => self.weights[w][p],
            _ => 0.0,
        }
    }

    pub fn contains_word(&self, word: &NodeKey) -> bool {
        self.words.binary_search(word).is_ok()
    }

    /// Harmonic mean over the candidate's indexed words, for each of its
    /// possible labels. Empty when none of its words are indexed.
    pub fn score_candidate(&self, candidate: &CandidateMatch) -> ScoreVector {
        let words: BTreeSet<NodeKey> = candidate
            .subgraph
            .graph
            .keys(self.key_mode)
            .into_iter()
            .filter(|k| self.contains_word(k))
            .collect();
        if words.is_empty() {
            return ScoreVector::new();
        }
        candidate
            .possible_labels
            .iter()
            .filter(|p| p.as_str() != OTHER)
            .map(|p| {
                let ws: Vec<f64> = words.iter().map(|w| self.weight(w, p)).collect();
                (p.clone(), harmonic_mean(&ws))
            })
            .collect()
    }

    pub fn classify(&self, candidate: &CandidateMatch, threshold: f64) -> Prediction {
        decide(&self.score_candidate(candidate), threshold)
    }

    pub fn check_key_mode(&self, configured: KeyMode) -> Result<(), IndexError> {
        if self.key_mode == configured {
            Ok(())
        } else {
            Err(IndexError::KeyMode {
                index: self.key_mode,
                configured,
            })
        }
    }

    pub fn save(&self, path: &Path) -> Result<(), IndexError> {
        Ok(save_artifact(path, SEMANTIC_KIND, SEMANTIC_VERSION, self)?)
    }

    pub fn load(path: &Path) -> Result<Self, IndexError> {
        Ok(load_artifact(path, SEMANTIC_KIND, SEMANTIC_VERSION)?)
    }

    pub fn load_checked(path: &Path, configured: KeyMode) -> Result<Self, IndexError> {
        let index = Self::load(path)?;
        index.check_key_mode(configured)?;
        Ok(index)
    }
}
