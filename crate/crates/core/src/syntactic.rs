//! Anchor-keyed store of deduplicated extraction patterns and the anchored
//! embedding search that applies them to new sentences.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{are_isomorphic, DependencyGraph, Edge, KeyMode, NodeId, NodeKey, SdpSubgraph};
use crate::io::{load_artifact, save_artifact, IoError};
use crate::supervision::LabeledPattern;

pub type PatternId = u32;

const SYNTACTIC_KIND: &str = "relpat-syntactic-index";
const SYNTACTIC_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IndexError {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("index was built with key mode {index}, but the configuration uses {configured}")]
    KeyMode { index: KeyMode, configured: KeyMode },
    #[error("cannot build a semantic index from an all-zero count matrix")]
    EmptyMatrix,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexedPattern {
    pub id: PatternId,
    pub pattern: SdpSubgraph,
    pub labels: BTreeSet<String>,
    pub ambiguous: bool,
    /// Number of training patterns merged into this one.
    pub support: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexStats {
    pub unique_anchors: usize,
    pub unique_patterns: usize,
    pub ambiguous_patterns: usize,
    pub mean_patterns_per_anchor: f64,
}

/// Where an index came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub dataset_sha256: String,
    pub snapshot: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntacticIndex {
    pub key_mode: KeyMode,
    pub entries: BTreeMap<NodeKey, Vec<IndexedPattern>>,
    pub stats: IndexStats,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

/// A pattern instantiated over the nodes of a sentence graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateMatch {
    pub subgraph: SdpSubgraph,
    pub pattern_id: PatternId,
    pub possible_labels: BTreeSet<String>,
    pub node_set: BTreeSet<NodeId>,
}

/// Isomorphism-invariant text used to order patterns inside an entry.
fn canonical_signature(p: &SdpSubgraph, mode: KeyMode) -> String {
    let keys = p.graph.key_map(mode);
    let mut nodes: Vec<&str> = keys.values().map(NodeKey::as_str).collect();
    nodes.sort_unstable();
    let mut edges: Vec<String> = p
        .graph
        .edges()
        .iter()
        .map(|e| {
            format!(
                "{}>{}>{}",
                keys[&e.head].as_str(),
                e.deprel,
                keys[&e.dependent].as_str()
            )
        })
        .collect();
    edges.sort_unstable();
    format!("{:04}|{}|{}", p.size(), nodes.join(" "), edges.join(" "))
}

fn dedup_entry(patterns: Vec<&LabeledPattern>, mode: KeyMode) -> Vec<IndexedPattern> {
    let mut kept: Vec<IndexedPattern> = Vec::new();
    for p in patterns {
        match kept
            .iter_mut()
            .find(|k| are_isomorphic(&k.pattern, &p.pattern, mode))
        {
            Some(k) => {
                k.labels.extend(p.labels.iter().cloned());
                k.ambiguous = k.labels.len() > 1;
                k.support += 1;
            }
            None => kept.push(IndexedPattern {
                id: 0,
                pattern: p.pattern.clone(),
                labels: p.labels.clone(),
                ambiguous: p.labels.len() > 1,
                support: 1,
            }),
        }
    }
    let mut keyed: Vec<(String, IndexedPattern)> = kept
        .into_iter()
        .map(|k| (canonical_signature(&k.pattern, mode), k))
        .collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    keyed.into_iter().map(|(_, k)| k).collect()
}

fn compute_stats(entries: &BTreeMap<NodeKey, Vec<IndexedPattern>>) -> IndexStats {
    let unique_anchors = entries.len();
    let unique_patterns: usize = entries.values().map(Vec::len).sum();
    let ambiguous_patterns = entries.values().flatten().filter(|p| p.ambiguous).count();
    IndexStats {
        unique_anchors,
        unique_patterns,
        ambiguous_patterns,
        mean_patterns_per_anchor: if unique_anchors == 0 {
            0.0
        } else {
            unique_patterns as f64 / unique_anchors as f64
        },
    }
}

/// Groups patterns by anchor key and merges isomorphic duplicates, uniting
/// their labels. Patterns labelled only `Other` are not indexed.
pub fn build_syntactic_index(patterns: &[LabeledPattern], key_mode: KeyMode) -> SyntacticIndex {
    let mut groups: BTreeMap<NodeKey, Vec<&LabeledPattern>> = BTreeMap::new();
    for p in patterns
        .iter()
        .filter(|p| !p.is_other() && !p.labels.is_empty())
    {
        groups
            .entry(p.pattern.anchor_key(key_mode))
            .or_default()
            .push(p);
    }
    let deduped: Vec<(NodeKey, Vec<IndexedPattern>)> = groups
        .into_par_iter()
        .map(|(key, group)| (key, dedup_entry(group, key_mode)))
        .collect();
    let mut entries = BTreeMap::new();
    let mut next: PatternId = 0;
    for (key, mut group) in deduped {
        for p in &mut group {
            p.id = next;
            next += 1;
        }
        entries.insert(key, group);
    }
    SyntacticIndex {
        key_mode,
        stats: compute_stats(&entries),
        entries,
        provenance: None,
    }
}

impl SyntacticIndex {
    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = Some(provenance);
        self
    }

    pub fn patterns(&self) -> impl Iterator<Item = &IndexedPattern> {
        self.entries.values().flatten()
    }

    pub fn pattern(&self, id: PatternId) -> Option<&IndexedPattern> {
        self.patterns().find(|p| p.id == id)
    }

    pub fn entry(&self, key: &NodeKey) -> Option<&[IndexedPattern]> {
        self.entries.get(key).map(Vec::as_slice)
    }

    /// Drops an anchor entry, returning it. Stats are recomputed.
    pub fn remove_entry(&mut self, key: &NodeKey) -> Option<Vec<IndexedPattern>> {
        let removed = self.entries.remove(key);
        self.stats = compute_stats(&self.entries);
        removed
    }

    /// Drops one pattern, returning it. Entries left empty are removed.
    pub fn remove_pattern(&mut self, id: PatternId) -> Option<IndexedPattern> {
        let key = self
            .entries
            .iter()
            .find(|(_, ps)| ps.iter().any(|p| p.id == id))
            .map(|(k, _)| k.clone())?;
        let entry = self.entries.get_mut(&key)?;
        let pos = entry.iter().position(|p| p.id == id)?;
        let removed = entry.remove(pos);
        if entry.is_empty() {
            self.entries.remove(&key);
        }
        self.stats = compute_stats(&self.entries);
        Some(removed)
    }

    /// True when some node of `g` has an entry.
    pub fn has_anchor_in(&self, g: &DependencyGraph) -> bool {
        g.nodes()
            .iter()
            .any(|n| self.entries.contains_key(&n.key(self.key_mode)))
    }

    /// Every anchored embedding of every pattern whose anchor key occurs in
    /// `g`, in node order then pattern order.
    pub fn match_patterns(&self, g: &DependencyGraph) -> Vec<CandidateMatch> {
        let keys = g.key_map(self.key_mode);
        let mut out = Vec::new();
        for node in g.nodes() {
            let Some(entry) = self.entries.get(&keys[&node.id]) else {
                continue;
            };
            for p in entry {
                for mapping in embeddings(&p.pattern, g, node.id, self.key_mode, &keys) {
                    if let Some(c) = instantiate(p, g, &mapping) {
                        out.push(c);
                    }
                }
            }
        }
        out
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
        Ok(save_artifact(
            path,
            SYNTACTIC_KIND,
            SYNTACTIC_VERSION,
            self,
        )?)
    }

    pub fn load(path: &Path) -> Result<Self, IndexError> {
        Ok(load_artifact(path, SYNTACTIC_KIND, SYNTACTIC_VERSION)?)
    }

    /// Loads an index and refuses it if it was built under another key mode.
    pub fn load_checked(path: &Path, configured: KeyMode) -> Result<Self, IndexError> {
        let index = Self::load(path)?;
        index.check_key_mode(configured)?;
        Ok(index)
    }
}

/// Pattern nodes in breadth-first order from the anchor, each paired with
/// the edge that reaches it.
fn traversal(p: &DependencyGraph, anchor: NodeId) -> Option<Vec<(NodeId, Option<&Edge>)>> {
    let mut order = vec![(anchor, None)];
    let mut seen = BTreeSet::from([anchor]);
    let mut i = 0;
    while i < order.len() {
        let (u, _) = order[i];
        for e in p.out_edges(u) {
            if seen.insert(e.dependent) {
                order.push((e.dependent, Some(e)));
            }
        }
        i += 1;
    }
    (order.len() == p.len()).then_some(order)
}

fn embeddings(
    pattern: &SdpSubgraph,
    g: &DependencyGraph,
    at: NodeId,
    mode: KeyMode,
    g_keys: &BTreeMap<NodeId, NodeKey>,
) -> Vec<HashMap<NodeId, NodeId>> {
    let p_keys = pattern.graph.key_map(mode);
    let Some(order) = traversal(&pattern.graph, pattern.anchor) else {
        return Vec::new();
    };
    let mut found = Vec::new();
    let mut mapping = HashMap::from([(pattern.anchor, at)]);
    let mut used = BTreeSet::from([at]);
    extend(
        &order,
        1,
        &p_keys,
        g,
        g_keys,
        &mut mapping,
        &mut used,
        &mut |m| {
            let all_edges = pattern.graph.edges().iter().all(|e| {
                g.out_edges(m[&e.head])
                    .any(|ge| ge.dependent == m[&e.dependent] && ge.deprel == e.deprel)
            });
            if all_edges {
                found.push(m.clone());
            }
        },
    );
    found
}

#[allow(clippy::too_many_arguments)]
fn extend(
    order: &[(NodeId, Option<&Edge>)],
    i: usize,
    p_keys: &BTreeMap<NodeId, NodeKey>,
    g: &DependencyGraph,
    g_keys: &BTreeMap<NodeId, NodeKey>,
    mapping: &mut HashMap<NodeId, NodeId>,
    used: &mut BTreeSet<NodeId>,
    emit: &mut dyn FnMut(&HashMap<NodeId, NodeId>),
) {
    let Some(&(u, edge)) = order.get(i) else {
        emit(mapping);
        return;
    };
    let edge = edge.expect("non-anchor nodes are reached through an edge");
    let parent = mapping[&edge.head];
    let candidates: Vec<NodeId> = g
        .out_edges(parent)
        .filter(|ge| ge.deprel == edge.deprel && g_keys[&ge.dependent] == p_keys[&u])
        .map(|ge| ge.dependent)
        .filter(|v| !used.contains(v))
        .collect();
    for v in candidates {
        mapping.insert(u, v);
        used.insert(v);
        extend(order, i + 1, p_keys, g, g_keys, mapping, used, emit);
        mapping.remove(&u);
        used.remove(&v);
    }
}

fn instantiate(
    p: &IndexedPattern,
    g: &DependencyGraph,
    mapping: &HashMap<NodeId, NodeId>,
) -> Option<CandidateMatch> {
    let node_set: BTreeSet<NodeId> = mapping.values().copied().collect();
    let nodes = g
        .nodes()
        .iter()
        .filter(|n| node_set.contains(&n.id))
        .cloned()
        .collect();
    let edges = p
        .pattern
        .graph
        .edges()
        .iter()
        .map(|e| Edge::new(mapping[&e.head], mapping[&e.dependent], &e.deprel))
        .collect();
    let graph = DependencyGraph::new(nodes, edges, g.sentence_text()).ok()?;
    let subgraph = SdpSubgraph::new(
        graph,
        mapping[&p.pattern.source],
        mapping[&p.pattern.target],
    )
    .ok()?;
    Some(CandidateMatch {
        subgraph,
        pattern_id: p.id,
        possible_labels: p.labels.clone(),
        node_set,
    })
}

/// Keeps candidates whose node set is maximal under inclusion. Among equal
/// node sets the lowest pattern id survives. Input order is preserved.
pub fn filter_longest(candidates: Vec<CandidateMatch>) -> Vec<CandidateMatch> {
    let keep: Vec<bool> = candidates
        .iter()
        .enumerate()
        .map(|(i, c)| {
            !candidates.iter().enumerate().any(|(j, d)| {
                if i == j {
                    return false;
                }
                if c.node_set == d.node_set {
                    (d.pattern_id, j) < (c.pattern_id, i)
                } else {
                    c.node_set.is_subset(&d.node_set)
                }
            })
        })
        .collect();
    candidates
        .into_iter()
        .zip(keep)
        .filter_map(|(c, k)| k.then_some(c))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::jeanne;
    use crate::graph::{shortest_dependency_path, TokenNode};

    fn labeled(sdp: SdpSubgraph, labels: &[&str], i: usize) -> LabeledPattern {
        LabeledPattern::new(
            format!("t#{i}#0"),
            sdp,
            labels.iter().map(|s| s.to_string()).collect(),
        )
    }

    fn birth_place() -> SdpSubgraph {
        shortest_dependency_path(&jeanne(), 1, 7).unwrap()
    }

    /// "Selon la tradition, Jeanne naquit à Domrémy."
    fn naquit() -> DependencyGraph {
        DependencyGraph::new(
            vec![
                TokenNode::new(1, "Selon", "selon", "ADP"),
                TokenNode::new(2, "la", "le", "DET"),
                TokenNode::new(3, "tradition", "tradition", "NOUN"),
                TokenNode::new(4, ",", ",", "PUNCT"),
                TokenNode::new(5, "Jeanne", "Jeanne", "PROPN"),
                TokenNode::new(6, "naquit", "naître", "VERB"),
                TokenNode::new(7, "à", "à", "ADP"),
                TokenNode::new(8, "Domrémy", "Domrémy", "PROPN"),
                TokenNode::new(9, ".", ".", "PUNCT"),
            ],
            vec![
                Edge::new(3, 1, "case"),
                Edge::new(3, 2, "det"),
                Edge::new(6, 3, "obl:mod"),
                Edge::new(6, 4, "punct"),
                Edge::new(6, 5, "nsubj"),
                Edge::new(8, 7, "case"),
                Edge::new(6, 8, "obl:arg"),
                Edge::new(6, 9, "punct"),
            ],
            "Selon la tradition, Jeanne naquit à Domrémy.",
        )
        .unwrap()
    }

    #[test]
    fn merge_labels_of_isomorphic_patterns() {
        let a = labeled(birth_place(), &["P19"], 0);
        let b = labeled(birth_place(), &["P569"], 1);
        let idx = build_syntactic_index(&[a, b], KeyMode::Lemma);
        assert_eq!(idx.stats.unique_anchors, 1);
        assert_eq!(idx.stats.unique_patterns, 1);
        assert_eq!(idx.stats.ambiguous_patterns, 1);
        let p = idx.patterns().next().unwrap();
        assert_eq!(p.labels.len(), 2);
        assert!(p.ambiguous);
        assert_eq!(p.support, 2);
        assert_eq!(p.pattern.anchor_key(KeyMode::Lemma).as_str(), "naître_VERB");
    }

    #[test]
    fn other_patterns_are_not_indexed() {
        let g = jeanne();
        let other = labeled(SdpSubgraph::new(g, 5, 5).unwrap(), &["Other"], 0);
        let idx = build_syntactic_index(&[other], KeyMode::Lemma);
        assert_eq!(idx.stats.unique_patterns, 0);
        assert_eq!(idx.stats.mean_patterns_per_anchor, 0.0);
    }

    #[test]
    fn match_in_new_sentence() {
        let idx = build_syntactic_index(&[labeled(birth_place(), &["P19"], 0)], KeyMode::Lemma);
        let found = idx.match_patterns(&naquit());
        assert_eq!(found.len(), 1);
        let c = &found[0];
        assert_eq!(c.node_set, BTreeSet::from([5, 6, 8]));
        assert_eq!((c.subgraph.source, c.subgraph.target), (5, 8));
        assert_eq!(c.subgraph.anchor, 6);
        assert_eq!(c.possible_labels, BTreeSet::from(["P19".to_string()]));
        let p = idx.pattern(c.pattern_id).unwrap();
        assert!(are_isomorphic(&c.subgraph, &p.pattern, KeyMode::Lemma));

        // surface keys differ between naquit and née
        let surface =
            build_syntactic_index(&[labeled(birth_place(), &["P19"], 0)], KeyMode::Surface);
        assert!(surface.match_patterns(&naquit()).is_empty());
    }

    #[test]
    fn no_anchor_no_match() {
        let idx = build_syntactic_index(&[labeled(birth_place(), &["P19"], 0)], KeyMode::Lemma);
        let g = DependencyGraph::new(
            vec![TokenNode::new(1, "Bonjour", "bonjour", "INTJ")],
            vec![],
            "Bonjour",
        )
        .unwrap();
        assert!(idx.match_patterns(&g).is_empty());
        assert!(!idx.has_anchor_in(&g));
    }

    #[test]
    fn nested_patterns_and_filter() {
        // naître -nsubj-> Jeanne nested in naître -nsubj-> Jeanne, -obl:arg-> Domrémy
        let short = shortest_dependency_path(&jeanne(), 1, 5).unwrap();
        let idx = build_syntactic_index(
            &[
                labeled(birth_place(), &["P19"], 0),
                labeled(short, &["P106"], 1),
            ],
            KeyMode::Lemma,
        );
        let found = idx.match_patterns(&naquit());
        assert_eq!(found.len(), 2);
        let kept = filter_longest(found);
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].node_set.len(), 3);
    }

    fn cand(nodes: &[NodeId], id: PatternId) -> CandidateMatch {
        let g = naquit();
        let set: BTreeSet<NodeId> = nodes.iter().copied().collect();
        let mut sub = g.induced(&set);
        if sub.edge_count() + 1 != sub.len() {
            sub = g.induced(&BTreeSet::from([nodes[0]]));
        }
        let anchor = crate::graph::anchor_of(&sub).unwrap();
        CandidateMatch {
            subgraph: SdpSubgraph::new(sub, anchor, anchor).unwrap(),
            pattern_id: id,
            possible_labels: BTreeSet::from(["P19".into()]),
            node_set: set,
        }
    }

    #[test]
    fn longest_rules() {
        let ids = |v: Vec<CandidateMatch>| v.iter().map(|c| c.pattern_id).collect::<Vec<_>>();
        assert_eq!(
            ids(filter_longest(vec![cand(&[6, 5], 0), cand(&[6, 5, 8], 1)])),
            [1]
        );
        assert_eq!(
            ids(filter_longest(vec![cand(&[5], 0), cand(&[8], 1)])),
            [0, 1]
        );
        assert_eq!(
            ids(filter_longest(vec![
                cand(&[6, 5], 0),
                cand(&[6, 8], 1),
                cand(&[6, 5, 8], 2)
            ])),
            [2]
        );
        assert_eq!(
            ids(filter_longest(vec![cand(&[6, 5], 4), cand(&[6, 5], 2)])),
            [2]
        );
        assert!(filter_longest(vec![]).is_empty());
    }

    #[test]
    fn save_load_and_guards() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("syn.json");
        let idx = build_syntactic_index(&[labeled(birth_place(), &["P19"], 0)], KeyMode::Lemma)
            .with_provenance(Provenance {
                dataset_sha256: "abc".into(),
                snapshot: "test".into(),
            });
        idx.save(&path).unwrap();
        assert_eq!(SyntacticIndex::load(&path).unwrap(), idx);
        assert!(matches!(
            SyntacticIndex::load_checked(&path, KeyMode::Surface),
            Err(IndexError::KeyMode { .. })
        ));
        let text = std::fs::read_to_string(&path)
            .unwrap()
            .replace("\"version\": 1", "\"version\": 9");
        std::fs::write(&path, text).unwrap();
        assert!(matches!(
            SyntacticIndex::load(&path),
            Err(IndexError::Io(IoError::Version { found: 9, .. }))
        ));
    }

    #[test]
    fn ablation() {
        let short = shortest_dependency_path(&jeanne(), 1, 5).unwrap();
        let mut idx = build_syntactic_index(
            &[
                labeled(birth_place(), &["P19"], 0),
                labeled(short, &["P106"], 1),
            ],
            KeyMode::Lemma,
        );
        let id = idx.patterns().next().unwrap().id;
        assert!(idx.remove_pattern(id).is_some());
        assert_eq!(idx.stats.unique_patterns, 1);
        let key = NodeKey::from("naître_VERB");
        assert!(idx.remove_entry(&key).is_some());
        assert_eq!(idx.stats.unique_anchors, 0);
    }
}
