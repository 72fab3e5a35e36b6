//! Normalized Levenshtein similarity and windowed fuzzy search.

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use crate::graph::{DependencyGraph, NodeId};

/// Candidate windows may be this much shorter or longer than the designation.
pub const LENGTH_SLACK: f64 = 0.2;

fn fold(s: &str) -> String {
    s.nfc().collect::<String>().to_lowercase()
}

/// `1 - levenshtein / max length` over case-folded NFC text, in `[0, 1]`.
pub fn similarity(a: &str, b: &str) -> f64 {
    similarity_folded(&fold(a), &fold(b))
}

fn similarity_folded(a: &str, b: &str) -> f64 {
    let longest = a.chars().count().max(b.chars().count());
    if longest == 0 {
        return 1.0;
    }
    1.0 - strsim::levenshtein(a, b) as f64 / longest as f64
}

/// A matched byte range of a sentence and its similarity score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpanMatch {
    pub start: usize,
    pub end: usize,
    pub score: f64,
}

impl SpanMatch {
    pub fn overlaps(&self, other: &SpanMatch) -> bool {
        self.start < other.end && other.start < self.end
    }
}

fn length_ok(len: usize, target: usize) -> (bool, bool) {
    let len = len as f64;
    let target = target as f64;
    (
        len >= target * (1.0 - LENGTH_SLACK) - 1e-9,
        len <= target * (1.0 + LENGTH_SLACK) + 1e-9,
    )
}

/// Byte ranges of maximal alphanumeric runs.
fn word_spans(s: &str) -> Vec<(usize, usize)> {
    let mut spans = Vec::new();
    let mut start = None;
    for (i, c) in s.char_indices() {
        match (c.is_alphanumeric(), start) {
            (true, None) => start = Some(i),
            (false, Some(st)) => {
                spans.push((st, i));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(st) = start {
        spans.push((st, s.len()));
    }
    spans
}

/// Best window of `sentence` matching `designation` at `threshold` or above.
///
/// Windows start and end on word boundaries and their length stays within
/// [`LENGTH_SLACK`] of the designation's. Ties go to the leftmost, then the
/// shortest, window.
pub fn fuzzy_contains(sentence: &str, designation: &str, threshold: f64) -> Option<SpanMatch> {
    let wanted = fold(designation);
    let target_len = wanted.chars().count();
    if target_len == 0 {
        return None;
    }
    let words = word_spans(sentence);
    let mut best: Option<SpanMatch> = None;
    for (i, &(start, _)) in words.iter().enumerate() {
        for &(_, end) in &words[i..] {
            let window = fold(&sentence[start..end]);
            let (long_enough, short_enough) = length_ok(window.chars().count(), target_len);
            if !short_enough {
                break;
            }
            if !long_enough {
                continue;
            }
            let score = similarity_folded(&window, &wanted);
            if best.as_ref().is_none_or(|b| score > b.score) {
                best = Some(SpanMatch { start, end, score });
            }
        }
    }
    best.filter(|b| b.score >= threshold)
}

/// Node heading the contiguous token group that best matches `designation`.
pub fn match_node_group(
    graph: &DependencyGraph,
    designation: &str,
    threshold: f64,
) -> Option<NodeId> {
    match_node_group_scored(graph, designation, threshold).map(|(id, _)| id)
}

/// Like [`match_node_group`], also returning the group's similarity.
///
/// The group's root is the member whose head lies outside the group. If
/// several members qualify the shallowest one wins, then the leftmost.
pub fn match_node_group_scored(
    graph: &DependencyGraph,
    designation: &str,
    threshold: f64,
) -> Option<(NodeId, f64)> {
    let wanted = fold(designation);
    let target_len = wanted.chars().count();
    if target_len == 0 {
        return None;
    }
    let nodes = graph.nodes();
    let mut best: Option<(usize, usize, f64)> = None;
    for i in 0..nodes.len() {
        let mut text = String::new();
        for j in i..nodes.len() {
            if j > i && nodes[j - 1].space_after {
                text.push(' ');
            }
            text.push_str(&nodes[j].text);
            let folded = fold(&text);
            let (long_enough, short_enough) = length_ok(folded.chars().count(), target_len);
            if !short_enough {
                break;
            }
            if !long_enough {
                continue;
            }
            let score = similarity_folded(&folded, &wanted);
            if best.is_none_or(|(_, _, s)| score > s) {
                best = Some((i, j, score));
            }
        }
    }
    let (i, j, score) = best.filter(|&(_, _, s)| s >= threshold)?;
    let members: Vec<NodeId> = nodes[i..=j].iter().map(|n| n.id).collect();
    let root = members
        .iter()
        .copied()
        .filter(|&id| match graph.head_of(id) {
            Some(e) => !members.contains(&e.head),
            None => true,
        })
        .min_by_key(|&id| (graph.depth(id), id))?;
    Some((root, score))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::jeanne;

    #[test]
    fn similarity_values() {
        assert_eq!(similarity("Domrémy", "Domrémy"), 1.0);
        assert!((similarity("Washington", "Washingtons") - 10.0 / 11.0).abs() < 1e-12);
        assert_eq!(similarity("abc", "xyz"), 0.0);
        assert_eq!(similarity("", ""), 1.0);
        assert_eq!(similarity("PARIS", "paris"), 1.0);
        // NFD input folds to the NFC form
        assert_eq!(similarity("Domre\u{301}my", "Domrémy"), 1.0);
    }

    #[test]
    fn exact_containment() {
        let s = "Jeanne d'Arc est née à Domrémy";
        let m = fuzzy_contains(s, "Domrémy", 0.9).unwrap();
        assert_eq!(&s[m.start..m.end], "Domrémy");
        assert_eq!(m.score, 1.0);
    }

    #[test]
    fn near_match() {
        let s = "Il épousa Marthe Custis en 1759";
        let m = fuzzy_contains(s, "Martha Custis", 0.9).unwrap();
        assert_eq!(&s[m.start..m.end], "Marthe Custis");
        assert!((m.score - 12.0 / 13.0).abs() < 1e-12);
    }

    #[test]
    fn no_match() {
        assert_eq!(fuzzy_contains("Il dort", "Domrémy", 0.9), None);
        assert_eq!(fuzzy_contains("Il dort", "", 0.9), None);
    }

    #[test]
    fn leftmost_tie() {
        let s = "Paris puis Paris";
        let m = fuzzy_contains(s, "Paris", 0.9).unwrap();
        assert_eq!((m.start, m.end), (0, 5));
    }

    #[test]
    fn multi_word_with_punctuation() {
        let s = "Il entre à l'École polytechnique en 1820.";
        let m = fuzzy_contains(s, "École polytechnique", 0.9).unwrap();
        assert_eq!(&s[m.start..m.end], "École polytechnique");
    }

    #[test]
    fn node_groups() {
        let g = jeanne();
        assert_eq!(match_node_group(&g, "Jeanne d'Arc", 0.9), Some(1));
        assert_eq!(match_node_group(&g, "Domrémy", 0.9), Some(7));
        assert_eq!(match_node_group(&g, "Orléans", 0.9), None);
    }
}
