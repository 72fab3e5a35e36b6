//! Precision, recall and F1 over predictions, threshold sweeps from cached
//! scores, and the per-stage error breakdown.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{DependencyGraph, NodeId};
use crate::semantic::{decide, Prediction, ScoreVector, SemanticIndex};
use crate::supervision::OTHER;
use crate::syntactic::{filter_longest, SyntacticIndex};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("cannot evaluate an empty record list")]
    NoRecords,
    #[error("thresholds must be sorted ascending")]
    UnsortedThresholds,
    #[error("record {id}: {message}")]
    Accounting { id: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureStage {
    /// No node of the sample has an entry in the syntactic index.
    AnchorMissing,
    /// Entries exist but none of their patterns embed.
    NoPattern,
    /// A candidate was scored but the label is wrong or under threshold.
    Misclassified,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Averaging {
    #[default]
    Micro,
    Macro,
}

impl fmt::Display for Averaging {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Averaging::Micro => "micro",
            Averaging::Macro => "macro",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub id: String,
    pub gold: String,
    pub predicted: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure_stage: Option<FailureStage>,
}

impl EvalRecord {
    pub fn is_error(&self) -> bool {
        self.gold != self.predicted
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub averaging: Averaging,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn f1(p: f64, r: f64) -> f64 {
    if p + r > 0.0 {
        2.0 * p * r / (p + r)
    } else {
        0.0
    }
}

/// Scores predictions with `Other` as the negative class.
///
/// Micro averaging pools counts over all relation labels. Macro averaging
/// takes the mean per-label precision and recall over labels that have gold
/// instances, and F1 from those means. Ratios with a zero denominator are 0.
pub fn evaluate(records: &[EvalRecord], averaging: Averaging) -> Result<Metrics, EvalError> {
    if records.is_empty() {
        return Err(EvalError::NoRecords);
    }
    let (precision, recall) = match averaging {
        Averaging::Micro => {
            let tp = records
                .iter()
                .filter(|r| r.predicted != OTHER && r.predicted == r.gold)
                .count();
            let retrieved = records.iter().filter(|r| r.predicted != OTHER).count();
            let relevant = records.iter().filter(|r| r.gold != OTHER).count();
            (ratio(tp, retrieved), ratio(tp, relevant))
        }
        Averaging::Macro => {
            let labels: BTreeSet<&str> = records
                .iter()
                .map(|r| r.gold.as_str())
                .filter(|g| *g != OTHER)
                .collect();
            if labels.is_empty() {
                (0.0, 0.0)
            } else {
                let (mut p_sum, mut r_sum) = (0.0, 0.0);
                for l in &labels {
                    let tp = records
                        .iter()
                        .filter(|r| r.predicted == *l && r.gold == *l)
                        .count();
                    let retrieved = records.iter().filter(|r| r.predicted == *l).count();
                    let relevant = records.iter().filter(|r| r.gold == *l).count();
                    p_sum += ratio(tp, retrieved);
                    r_sum += ratio(tp, relevant);
                }
                let n = labels.len() as f64;
                (p_sum / n, r_sum / n)
            }
        }
    };
    Ok(Metrics {
        precision,
        recall,
        f1: f1(precision, recall),
        averaging,
    })
}

/// What the extraction stage produced for one sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", content = "scores", rename_all = "snake_case")]
pub enum SampleOutcome {
    AnchorMissing,
    NoPattern,
    /// One score vector per retained candidate.
    Scored(Vec<ScoreVector>),
}

/// A sample with its gold label and threshold-independent scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredSample {
    pub id: String,
    pub gold: String,
    #[serde(flatten)]
    pub outcome: SampleOutcome,
}

/// Runs extraction and scoring over a sample graph.
///
/// With `arguments`, only candidates covering both argument nodes count.
pub fn score_sample(
    syntactic: &SyntacticIndex,
    semantic: &SemanticIndex,
    graph: &DependencyGraph,
    arguments: Option<(NodeId, NodeId)>,
) -> SampleOutcome {
    if !syntactic.has_anchor_in(graph) {
        return SampleOutcome::AnchorMissing;
    }
    let candidates: Vec<_> = filter_longest(syntactic.match_patterns(graph))
        .into_iter()
        .filter(|c| match arguments {
            Some((s, t)) => c.node_set.contains(&s) && c.node_set.contains(&t),
            None => true,
        })
        .collect();
    if candidates.is_empty() {
        return SampleOutcome::NoPattern;
    }
    SampleOutcome::Scored(
        candidates
            .iter()
            .map(|c| semantic.score_candidate(c))
            .collect(),
    )
}

/// The best label over all candidates of a sample: the highest score, ties
/// to the smallest property id, kept only if strictly above `threshold`.
pub fn predict(outcome: &SampleOutcome, threshold: f64) -> Prediction {
    match outcome {
        SampleOutcome::Scored(vectors) => {
            let mut merged = ScoreVector::new();
            for v in vectors {
                for (p, &s) in v {
                    let e = merged.entry(p.clone()).or_insert(s);
                    if s > *e {
                        *e = s;
                    }
                }
            }
            decide(&merged, threshold)
        }
        _ => Prediction {
            label: OTHER.to_string(),
            score: None,
        },
    }
}

pub fn record_at(sample: &ScoredSample, threshold: f64) -> EvalRecord {
    let predicted = predict(&sample.outcome, threshold).label;
    let failure_stage = (predicted != sample.gold).then_some(match sample.outcome {
        SampleOutcome::AnchorMissing => FailureStage::AnchorMissing,
        SampleOutcome::NoPattern => FailureStage::NoPattern,
        SampleOutcome::Scored(_) => FailureStage::Misclassified,
    });
    EvalRecord {
        id: sample.id.clone(),
        gold: sample.gold.clone(),
        predicted,
        failure_stage,
    }
}

pub fn records_at(samples: &[ScoredSample], threshold: f64) -> Vec<EvalRecord> {
    samples.iter().map(|s| record_at(s, threshold)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub dataset: String,
    pub threshold: f64,
    #[serde(flatten)]
    pub metrics: Metrics,
}

/// One row per threshold, re-deciding cached scores at each.
pub fn threshold_sweep(
    dataset: &str,
    samples: &[ScoredSample],
    thresholds: &[f64],
    averaging: Averaging,
) -> Result<Vec<MetricsRow>, EvalError> {
    if thresholds.windows(2).any(|w| w[0] > w[1]) {
        return Err(EvalError::UnsortedThresholds);
    }
    thresholds
        .iter()
        .map(|&t| {
            Ok(MetricsRow {
                dataset: dataset.to_string(),
                threshold: t,
                metrics: evaluate(&records_at(samples, t), averaging)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Taxonomy {
    pub anchor_missing: usize,
    pub no_pattern: usize,
    pub misclassified: usize,
    pub total_errors: usize,
}

/// Counts erroneous records by failure stage, checking that each error has
/// exactly one consistent stage.
pub fn error_taxonomy(records: &[EvalRecord]) -> Result<Taxonomy, EvalError> {
    let mut t = Taxonomy::default();
    for r in records {
        let fail = |message: &str| EvalError::Accounting {
            id: r.id.clone(),
            message: message.to_string(),
        };
        match (r.is_error(), r.failure_stage) {
            (false, None) => continue,
            (false, Some(_)) => return Err(fail("correct prediction carries a failure stage")),
            (true, None) => return Err(fail("wrong prediction has no failure stage")),
            (true, Some(FailureStage::Misclassified)) => t.misclassified += 1,
            (true, Some(stage)) => {
                if r.predicted != OTHER {
                    return Err(fail("extraction failed but a relation was predicted"));
                }
                match stage {
                    FailureStage::AnchorMissing => t.anchor_missing += 1,
                    _ => t.no_pattern += 1,
                }
            }
        }
        t.total_errors += 1;
    }
    Ok(t)
}

/// Tab-separated sweep table: one line per threshold, one P/R/F1 column
/// triple per dataset, in first-seen dataset order.
pub fn metrics_tsv(rows: &[MetricsRow]) -> String {
    let mut datasets: Vec<&str> = Vec::new();
    let mut thresholds: Vec<f64> = Vec::new();
    for r in rows {
        if !datasets.contains(&r.dataset.as_str()) {
            datasets.push(&r.dataset);
        }
        if !thresholds.contains(&r.threshold) {
            thresholds.push(r.threshold);
        }
    }
    let averaging = rows
        .first()
        .map_or(Averaging::Micro, |r| r.metrics.averaging);
    let mut out = format!("# averaging={averaging}\nthreshold");
    for d in &datasets {
        let _ = write!(out, "\t{d}_P\t{d}_R\t{d}_F1");
    }
    out.push('\n');
    for t in thresholds {
        let _ = write!(out, "{t:.1}");
        for d in &datasets {
            match rows.iter().find(|r| r.dataset == *d && r.threshold == t) {
                Some(r) => {
                    let m = r.metrics;
                    let _ = write!(out, "\t{:.3}\t{:.3}\t{:.3}", m.precision, m.recall, m.f1);
                }
                None => out.push_str("\t-\t-\t-"),
            }
        }
        out.push('\n');
    }
    out
}
