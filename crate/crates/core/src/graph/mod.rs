//! Dependency graphs over tokenized sentences.
//!
//! A [`DependencyGraph`] is a directed graph whose nodes are tokens and whose
//! edges point from a syntactic head to its dependent. Graphs parsed from
//! CoNLL-U are trees; subgraphs cut out of them by
//! [`shortest_dependency_path`] are paths rooted at their anchor node.

mod conllu;
mod iso;
mod sdp;

pub use conllu::{parse_conllu, write_conllu, ConlluError};
pub use iso::are_isomorphic;
pub use sdp::shortest_dependency_path;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Position of a token in its sentence, 1-based as in CoNLL-U.
pub type NodeId = u32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph has no nodes")]
    Empty,
    #[error("expected exactly one node with in-degree 0, found {0:?}")]
    AnchorNotUnique(Vec<NodeId>),
    #[error("node {0} is not in the graph")]
    UnknownNode(NodeId),
    #[error("no path between nodes {0} and {1}")]
    NoPath(NodeId, NodeId),
    #[error("duplicate node id {0}")]
    DuplicateNode(NodeId),
    #[error("edge {head} -> {dependent} references a missing node")]
    DanglingEdge { head: NodeId, dependent: NodeId },
    #[error("node {0} has an empty text, lemma or UPOS field")]
    EmptyField(NodeId),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TokenNode {
    pub id: NodeId,
    pub text: String,
    pub lemma: String,
    pub upos: String,
    /// `false` when the CoNLL-U MISC column carries `SpaceAfter=No`.
    #[serde(default = "default_true", skip_serializing_if = "is_true")]
    pub space_after: bool,
}

fn default_true() -> bool {
    true
}

fn is_true(b: &bool) -> bool {
    *b
}

impl TokenNode {
    pub fn new(id: NodeId, text: &str, lemma: &str, upos: &str) -> Self {
        TokenNode {
            id,
            text: text.to_string(),
            lemma: lemma.to_string(),
            upos: upos.to_string(),
            space_after: true,
        }
    }

    pub fn key(&self, mode: KeyMode) -> NodeKey {
        node_key(self, mode)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub head: NodeId,
    #[serde(rename = "dep")]
    pub dependent: NodeId,
    pub deprel: String,
}

impl Edge {
    pub fn new(head: NodeId, dependent: NodeId, deprel: &str) -> Self {
        Edge {
            head,
            dependent,
            deprel: deprel.to_string(),
        }
    }
}

/// Which token form a [`NodeKey`] is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KeyMode {
    Surface,
    #[default]
    Lemma,
}

impl fmt::Display for KeyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KeyMode::Surface => f.write_str("surface"),
            KeyMode::Lemma => f.write_str("lemma"),
        }
    }
}

/// `<form>_<UPOS>` label of a token, used both as an index key and as the
/// node label compared by isomorphism and pattern matching.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeKey(String);

impl NodeKey {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for NodeKey {
    fn from(s: &str) -> Self {
        NodeKey(s.to_string())
    }
}

/// Builds the key of a node. Underscores inside the form are replaced by `-`
/// so the key keeps a single separator.
pub fn node_key(node: &TokenNode, mode: KeyMode) -> NodeKey {
    let form = match mode {
        KeyMode::Surface => &node.text,
        KeyMode::Lemma => &node.lemma,
    };
    NodeKey(format!(
        "{}_{}",
        form.replace('_', "-"),
        node.upos.to_uppercase()
    ))
}

/// A sentence's dependency graph. Nodes are kept sorted by id and edges by
/// `(head, dependent)`, so structurally equal graphs compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DependencyGraph {
    nodes: Vec<TokenNode>,
    edges: Vec<Edge>,
    #[serde(rename = "sentence")]
    sentence_text: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    comments: Vec<String>,
}

impl DependencyGraph {
    pub fn new(
        mut nodes: Vec<TokenNode>,
        mut edges: Vec<Edge>,
        sentence_text: impl Into<String>,
    ) -> Result<Self, GraphError> {
        nodes.sort_by_key(|n| n.id);
        for pair in nodes.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(GraphError::DuplicateNode(pair[0].id));
            }
        }
        for n in &nodes {
            if n.text.is_empty() || n.lemma.is_empty() || n.upos.is_empty() {
                return Err(GraphError::EmptyField(n.id));
            }
        }
        let ids: BTreeSet<NodeId> = nodes.iter().map(|n| n.id).collect();
        for e in &edges {
            if !ids.contains(&e.head) || !ids.contains(&e.dependent) {
                return Err(GraphError::DanglingEdge {
                    head: e.head,
                    dependent: e.dependent,
                });
            }
        }
        edges.sort();
        edges.dedup();
        Ok(DependencyGraph {
            nodes,
            edges,
            sentence_text: sentence_text.into(),
            comments: Vec::new(),
        })
    }

    pub fn with_comments(mut self, comments: Vec<String>) -> Self {
        self.comments = comments;
        self
    }

    pub fn nodes(&self) -> &[TokenNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn sentence_text(&self) -> &str {
        &self.sentence_text
    }

    /// Comment lines (without the leading `#`) carried over from CoNLL-U.
    pub fn comments(&self) -> &[String] {
        &self.comments
    }

    /// Value of a `# key = value` comment, e.g. `sent_id`.
    pub fn comment_value(&self, key: &str) -> Option<&str> {
        self.comments.iter().find_map(|c| {
            let (k, v) = c.split_once('=')?;
            (k.trim() == key).then(|| v.trim())
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn node(&self, id: NodeId) -> Option<&TokenNode> {
        self.nodes
            .binary_search_by_key(&id, |n| n.id)
            .ok()
            .map(|i| &self.nodes[i])
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.node(id).is_some()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.iter().map(|n| n.id)
    }

    pub fn out_edges(&self, id: NodeId) -> impl Iterator<Item = &Edge> + '_ {
        self.edges.iter().filter(move |e| e.head == id)
    }

    pub fn in_edges(&self, id: NodeId) -> impl Iterator<Item = &Edge> + '_ {
        self.edges.iter().filter(move |e| e.dependent == id)
    }

    /// The governing edge of a node in a tree, if it has one.
    pub fn head_of(&self, id: NodeId) -> Option<&Edge> {
        self.in_edges(id).next()
    }

    pub fn in_degree(&self, id: NodeId) -> usize {
        self.in_edges(id).count()
    }

    /// Nodes adjacent to `id` ignoring edge direction, ascending and deduplicated.
    pub fn neighbors(&self, id: NodeId) -> Vec<NodeId> {
        let set: BTreeSet<NodeId> = self
            .edges
            .iter()
            .filter_map(|e| {
                if e.head == id {
                    Some(e.dependent)
                } else if e.dependent == id {
                    Some(e.head)
                } else {
                    None
                }
            })
            .collect();
        set.into_iter().collect()
    }

    pub fn key_of(&self, id: NodeId, mode: KeyMode) -> Option<NodeKey> {
        self.node(id).map(|n| node_key(n, mode))
    }

    /// Depth of a node below the in-degree-0 node it descends from.
    pub fn depth(&self, id: NodeId) -> usize {
        let mut depth = 0;
        let mut cur = id;
        let mut seen = BTreeSet::new();
        while let Some(e) = self.head_of(cur) {
            if !seen.insert(cur) {
                break;
            }
            depth += 1;
            cur = e.head;
        }
        depth
    }

    /// Restricts the graph to `keep`, retaining only edges with both ends kept.
    pub fn induced(&self, keep: &BTreeSet<NodeId>) -> DependencyGraph {
        DependencyGraph {
            nodes: self
                .nodes
                .iter()
                .filter(|n| keep.contains(&n.id))
                .cloned()
                .collect(),
            edges: self
                .edges
                .iter()
                .filter(|e| keep.contains(&e.head) && keep.contains(&e.dependent))
                .cloned()
                .collect(),
            sentence_text: self.sentence_text.clone(),
            comments: Vec::new(),
        }
    }

    /// Keys of all nodes, in node order.
    pub fn keys(&self, mode: KeyMode) -> Vec<NodeKey> {
        self.nodes.iter().map(|n| node_key(n, mode)).collect()
    }

    pub(crate) fn key_map(&self, mode: KeyMode) -> BTreeMap<NodeId, NodeKey> {
        self.nodes
            .iter()
            .map(|n| (n.id, node_key(n, mode)))
            .collect()
    }
}

/// Returns the unique node with in-degree 0.
pub fn anchor_of(graph: &DependencyGraph) -> Result<NodeId, GraphError> {
    if graph.is_empty() {
        return Err(GraphError::Empty);
    }
    let with_head: BTreeSet<NodeId> = graph.edges.iter().map(|e| e.dependent).collect();
    let roots: Vec<NodeId> = graph
        .node_ids()
        .filter(|id| !with_head.contains(id))
        .collect();
    match roots.as_slice() {
        [only] => Ok(*only),
        _ => Err(GraphError::AnchorNotUnique(roots)),
    }
}

/// A path cut out of a sentence graph, with its argument endpoints and the
/// anchor (the path node with in-degree 0).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SdpSubgraph {
    pub graph: DependencyGraph,
    pub anchor: NodeId,
    pub source: NodeId,
    pub target: NodeId,
}

impl SdpSubgraph {
    /// Wraps a graph, computing its anchor. `source` and `target` must be nodes
    /// of the graph.
    pub fn new(graph: DependencyGraph, source: NodeId, target: NodeId) -> Result<Self, GraphError> {
        for id in [source, target] {
            if !graph.contains(id) {
                return Err(GraphError::UnknownNode(id));
            }
        }
        let anchor = anchor_of(&graph)?;
        Ok(SdpSubgraph {
            graph,
            anchor,
            source,
            target,
        })
    }

    pub fn size(&self) -> usize {
        self.graph.edge_count()
    }

    pub fn anchor_key(&self, mode: KeyMode) -> NodeKey {
        self.graph
            .key_of(self.anchor, mode)
            .expect("anchor is a node of its graph")
    }

    pub fn node_set(&self) -> BTreeSet<NodeId> {
        self.graph.node_ids().collect()
    }
}
