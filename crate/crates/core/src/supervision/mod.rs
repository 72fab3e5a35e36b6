//! Distant supervision: weak sentence labels from statement triples, and the
//! labelled shortest-dependency-path patterns derived from them.

mod fuzzy;
mod split;

pub use fuzzy::{
    fuzzy_contains, match_node_group, match_node_group_scored, similarity, SpanMatch, LENGTH_SLACK,
};
pub use split::{split_dataset, DatasetSplit, SplitError, SplitRatios};

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::graph::{anchor_of, shortest_dependency_path, DependencyGraph, GraphError, SdpSubgraph};
use crate::ingest::{SentenceRecord, StatementTriple};

/// Label of sentences and samples expressing none of the targeted relations.
pub const OTHER: &str = "Other";

pub const DEFAULT_FUZZY_THRESHOLD: f64 = 0.9;

/// Which designation matched where.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignationMatch {
    pub designation: String,
    #[serde(flatten)]
    pub span: SpanMatch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatementMatch {
    pub statement: StatementTriple,
    pub source: DesignationMatch,
    pub target: DesignationMatch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeaklyLabeledSentence {
    pub sentence: SentenceRecord,
    pub matches: Vec<StatementMatch>,
    pub labels: BTreeSet<String>,
}

impl WeaklyLabeledSentence {
    pub fn is_other(&self) -> bool {
        self.matches.is_empty()
    }
}

fn best_matches(sentence: &str, designations: &[String], threshold: f64) -> Vec<DesignationMatch> {
    designations
        .iter()
        .filter_map(|d| {
            fuzzy_contains(sentence, d, threshold).map(|span| DesignationMatch {
                designation: d.clone(),
                span,
            })
        })
        .collect()
}

/// Matches one statement against one sentence: the best non-overlapping
/// (source, target) pair by summed score, earliest designations first on ties.
pub fn match_statement(
    sentence: &str,
    statement: &StatementTriple,
    threshold: f64,
) -> Option<StatementMatch> {
    let sources = best_matches(sentence, &statement.source, threshold);
    if sources.is_empty() {
        return None;
    }
    let targets = best_matches(sentence, &statement.target, threshold);
    let mut best: Option<(f64, &DesignationMatch, &DesignationMatch)> = None;
    for s in &sources {
        for t in &targets {
            if s.span.overlaps(&t.span) {
                continue;
            }
            let total = s.span.score + t.span.score;
            if best.is_none_or(|(b, _, _)| total > b) {
                best = Some((total, s, t));
            }
        }
    }
    best.map(|(_, s, t)| StatementMatch {
        statement: statement.clone(),
        source: s.clone(),
        target: t.clone(),
    })
}

/// Labels every sentence with the properties of the statements it matches,
/// or with [`OTHER`]. Output order follows input order.
pub fn label_sentences(
    sentences: &[SentenceRecord],
    statements: &[StatementTriple],
    threshold: f64,
) -> Vec<WeaklyLabeledSentence> {
    sentences
        .par_iter()
        .map(|sentence| {
            let matches: Vec<StatementMatch> = statements
                .iter()
                .filter_map(|st| match_statement(&sentence.text, st, threshold))
                .collect();
            let labels = if matches.is_empty() {
                BTreeSet::from([OTHER.to_string()])
            } else {
                matches
                    .iter()
                    .map(|m| m.statement.property.clone())
                    .collect()
            };
            WeaklyLabeledSentence {
                sentence: sentence.clone(),
                matches,
                labels,
            }
        })
        .collect()
}

/// An SDP subgraph with the labels it was observed with.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledPattern {
    /// `<page>#<position>#<match index>`.
    pub instance: String,
    pub pattern: SdpSubgraph,
    pub labels: BTreeSet<String>,
    pub ambiguous: bool,
    /// Edge count.
    pub size: usize,
}

impl LabeledPattern {
    pub fn new(
        instance: impl Into<String>,
        pattern: SdpSubgraph,
        labels: BTreeSet<String>,
    ) -> Self {
        let size = pattern.size();
        LabeledPattern {
            instance: instance.into(),
            ambiguous: labels.len() > 1,
            pattern,
            labels,
            size,
        }
    }

    pub fn add_labels<'a>(&mut self, labels: impl IntoIterator<Item = &'a String>) {
        self.labels.extend(labels.into_iter().cloned());
        self.ambiguous = self.labels.len() > 1;
    }

    pub fn is_other(&self) -> bool {
        self.labels.len() == 1 && self.labels.contains(OTHER)
    }

    /// Labels joined with `|`, used to stratify splits.
    pub fn label_key(&self) -> String {
        self.labels.iter().cloned().collect::<Vec<_>>().join("|")
    }
}

pub fn instance_id(sentence: &SentenceRecord, index: usize) -> String {
    format!("{}#{}#{}", sentence.page, sentence.position, index)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscardReason {
    MissingParse,
    SourceNotFound,
    TargetNotFound,
    SameNode,
    NoPath,
    AnchorNotUnique,
}

impl fmt::Display for DiscardReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DiscardReason::MissingParse => "missing_parse",
            DiscardReason::SourceNotFound => "source_not_found",
            DiscardReason::TargetNotFound => "target_not_found",
            DiscardReason::SameNode => "same_node",
            DiscardReason::NoPath => "no_path",
            DiscardReason::AnchorNotUnique => "anchor_not_unique",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscardEntry {
    pub instance: String,
    pub label: String,
    pub reason: DiscardReason,
}

/// Reason-coded account of instances that produced no pattern.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscardLog {
    pub attempted: usize,
    pub emitted: usize,
    pub counts: BTreeMap<DiscardReason, usize>,
    pub entries: Vec<DiscardEntry>,
}

impl DiscardLog {
    pub fn discarded(&self) -> usize {
        self.entries.len()
    }

    fn push(&mut self, entry: DiscardEntry) {
        *self.counts.entry(entry.reason).or_default() += 1;
        self.entries.push(entry);
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SdpDataset {
    pub patterns: Vec<LabeledPattern>,
    pub discards: DiscardLog,
}

fn locate(
    graph: &DependencyGraph,
    preferred: &str,
    all: &[String],
    threshold: f64,
) -> Option<crate::graph::NodeId> {
    std::iter::once(preferred)
        .chain(all.iter().map(String::as_str).filter(|d| *d != preferred))
        .find_map(|d| match_node_group(graph, d, threshold))
}

fn graph_error_reason(err: &GraphError) -> DiscardReason {
    match err {
        GraphError::NoPath(..) => DiscardReason::NoPath,
        _ => DiscardReason::AnchorNotUnique,
    }
}

type Outcome = Result<LabeledPattern, DiscardEntry>;

fn sentence_instances(
    ws: &WeaklyLabeledSentence,
    graph: Option<&DependencyGraph>,
    threshold: f64,
) -> Vec<Outcome> {
    let discard = |index: usize, label: &str, reason| DiscardEntry {
        instance: instance_id(&ws.sentence, index),
        label: label.to_string(),
        reason,
    };
    if ws.is_other() {
        let Some(graph) = graph else {
            return vec![Err(discard(0, OTHER, DiscardReason::MissingParse))];
        };
        return vec![anchor_of(graph)
            .and_then(|root| SdpSubgraph::new(graph.clone(), root, root))
            .map(|sdp| {
                LabeledPattern::new(
                    instance_id(&ws.sentence, 0),
                    sdp,
                    BTreeSet::from([OTHER.to_string()]),
                )
            })
            .map_err(|e| discard(0, OTHER, graph_error_reason(&e)))];
    }
    ws.matches
        .iter()
        .enumerate()
        .map(|(k, m)| {
            let label = &m.statement.property;
            let graph = graph.ok_or_else(|| discard(k, label, DiscardReason::MissingParse))?;
            let source = locate(graph, &m.source.designation, &m.statement.source, threshold)
                .ok_or_else(|| discard(k, label, DiscardReason::SourceNotFound))?;
            let target = locate(graph, &m.target.designation, &m.statement.target, threshold)
                .ok_or_else(|| discard(k, label, DiscardReason::TargetNotFound))?;
            if source == target {
                return Err(discard(k, label, DiscardReason::SameNode));
            }
            let sdp = shortest_dependency_path(graph, source, target)
                .map_err(|e| discard(k, label, graph_error_reason(&e)))?;
            Ok(LabeledPattern::new(
                instance_id(&ws.sentence, k),
                sdp,
                BTreeSet::from([label.clone()]),
            ))
        })
        .collect()
}

/// Extracts one pattern per (sentence, matched statement).
///
/// Sentences labelled [`OTHER`] keep their whole parse as a single pattern
/// rooted at the sentence root. `graphs` maps sentence text to its parse.
pub fn build_sdp_dataset(
    labeled: &[WeaklyLabeledSentence],
    graphs: &HashMap<String, DependencyGraph>,
    threshold: f64,
) -> SdpDataset {
    let outcomes: Vec<Vec<Outcome>> = labeled
        .par_iter()
        .map(|ws| sentence_instances(ws, graphs.get(&ws.sentence.text), threshold))
        .collect();
    let mut out = SdpDataset::default();
    for outcome in outcomes.into_iter().flatten() {
        out.discards.attempted += 1;
        match outcome {
            Ok(p) => {
                out.discards.emitted += 1;
                out.patterns.push(p);
            }
            Err(d) => out.discards.push(d),
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Keep,
    Drop,
}

/// One line of a ground-truth curation file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReviewEntry {
    pub instance: String,
    pub labels: BTreeSet<String>,
    pub sentence: String,
    pub verdict: Option<Verdict>,
}

/// Review template with no verdicts filled in.
pub fn review_template(patterns: &[LabeledPattern]) -> Vec<ReviewEntry> {
    patterns
        .iter()
        .map(|p| ReviewEntry {
            instance: p.instance.clone(),
            labels: p.labels.clone(),
            sentence: p.pattern.graph.sentence_text().to_string(),
            verdict: None,
        })
        .collect()
}

/// Keeps the patterns a reviewer marked `keep`; anything else is dropped.
pub fn apply_review(patterns: Vec<LabeledPattern>, review: &[ReviewEntry]) -> Vec<LabeledPattern> {
    let keep: BTreeSet<&str> = review
        .iter()
        .filter(|r| r.verdict == Some(Verdict::Keep))
        .map(|r| r.instance.as_str())
        .collect();
    patterns
        .into_iter()
        .filter(|p| keep.contains(p.instance.as_str()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::jeanne;

    fn sentence(text: &str, position: usize) -> SentenceRecord {
        SentenceRecord {
            text: text.to_string(),
            page: "Jeanne d'Arc".to_string(),
            position,
        }
    }

    fn triple(source: &[&str], p: &str, target: &[&str]) -> StatementTriple {
        StatementTriple::new(
            source.iter().map(|s| s.to_string()).collect(),
            p,
            target.iter().map(|s| s.to_string()).collect(),
        )
    }

    #[test]
    fn labels_matching_statement() {
        let sents = [sentence(
            "George Washington mourut d'une epiglottitis en 1799.",
            0,
        )];
        let sts = [triple(
            &["George Washington", "Father of the United States"],
            "P509",
            &["epiglottitis", "acute laryngitis"],
        )];
        let out = label_sentences(&sents, &sts, 0.9);
        assert_eq!(out[0].labels, BTreeSet::from(["P509".to_string()]));
        assert_eq!(out[0].matches[0].source.designation, "George Washington");
    }

    #[test]
    fn multi_label_and_other() {
        let sents = [
            sentence("Jeanne d'Arc est née le 6 janvier 1412 à Domrémy.", 0),
            sentence("Elle entend des voix.", 1),
        ];
        let sts = [
            triple(&["Jeanne d'Arc"], "P19", &["Domrémy"]),
            triple(&["Jeanne d'Arc"], "P569", &["6 janvier 1412"]),
        ];
        let out = label_sentences(&sents, &sts, 0.9);
        assert_eq!(
            out[0].labels,
            BTreeSet::from(["P19".to_string(), "P569".to_string()])
        );
        assert_eq!(out[1].labels, BTreeSet::from([OTHER.to_string()]));
        assert!(out[1].is_other());
    }

    #[test]
    fn overlapping_spans_do_not_match() {
        let sents = [sentence("Paris est une ville.", 0)];
        let sts = [triple(&["Paris"], "P19", &["Paris"])];
        assert!(label_sentences(&sents, &sts, 0.9)[0].is_other());
    }

    #[test]
    fn figure_pattern() {
        let text = "Jeanne d'Arc est née à Domrémy.";
        let sts = [triple(&["Jeanne d'Arc", "la Pucelle"], "P19", &["Domrémy"])];
        let labeled = label_sentences(&[sentence(text, 0)], &sts, 0.9);
        let graphs = HashMap::from([(text.to_string(), jeanne())]);
        let ds = build_sdp_dataset(&labeled, &graphs, 0.9);
        assert_eq!(ds.patterns.len(), 1);
        let p = &ds.patterns[0];
        assert_eq!(p.pattern.anchor, 5);
        assert_eq!(p.pattern.source, 1);
        assert_eq!(p.pattern.target, 7);
        assert_eq!(p.labels, BTreeSet::from(["P19".to_string()]));
        assert!(!p.ambiguous);
        assert_eq!(p.size, 2);
        assert_eq!(p.instance, "Jeanne d'Arc#0#0");
    }

    #[test]
    fn unmatched_target_node_is_discarded() {
        let text = "Jeanne d'Arc est née à Domrémy.";
        // the sentence-level match succeeds on the raw text, but the parse
        // given for it does not contain the target token
        let mut labeled = label_sentences(
            &[sentence(text, 0)],
            &[triple(&["Jeanne d'Arc"], "P19", &["Domrémy"])],
            0.9,
        );
        labeled[0].matches[0].statement.target = vec!["Vaucouleurs".into()];
        labeled[0].matches[0].target.designation = "Vaucouleurs".into();
        let graphs = HashMap::from([(text.to_string(), jeanne())]);
        let ds = build_sdp_dataset(&labeled, &graphs, 0.9);
        assert!(ds.patterns.is_empty());
        assert_eq!(ds.discards.attempted, 1);
        assert_eq!(ds.discards.counts[&DiscardReason::TargetNotFound], 1);
    }

    #[test]
    fn other_sentences_keep_whole_graph() {
        let text = "Jeanne d'Arc est née à Domrémy.";
        let labeled = label_sentences(&[sentence(text, 3)], &[], 0.9);
        let graphs = HashMap::from([(text.to_string(), jeanne())]);
        let ds = build_sdp_dataset(&labeled, &graphs, 0.9);
        assert_eq!(ds.patterns.len(), 1);
        assert!(ds.patterns[0].is_other());
        assert_eq!(ds.patterns[0].pattern.graph.len(), 8);

        let ds = build_sdp_dataset(&labeled, &HashMap::new(), 0.9);
        assert_eq!(ds.discards.counts[&DiscardReason::MissingParse], 1);
        assert_eq!(
            ds.discards.attempted,
            ds.discards.emitted + ds.discards.discarded()
        );
    }

    #[test]
    fn review_filter() {
        let text = "Jeanne d'Arc est née à Domrémy.";
        let labeled = label_sentences(
            &[sentence(text, 0), sentence(text, 1)],
            &[triple(&["Jeanne d'Arc"], "P19", &["Domrémy"])],
            0.9,
        );
        let graphs = HashMap::from([(text.to_string(), jeanne())]);
        let ds = build_sdp_dataset(&labeled, &graphs, 0.9);
        let mut review = review_template(&ds.patterns);
        assert!(review.iter().all(|r| r.verdict.is_none()));
        review[1].verdict = Some(Verdict::Keep);
        let kept = apply_review(ds.patterns, &review);
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].instance, "Jeanne d'Arc#1#0");
    }
}
