//! Label-preserving isomorphism between small directed graphs.
//!
//! Graphs are first compared by a signature (sizes, sorted node labels and
//! sorted labelled edge triples). Only when signatures agree is a backtracking
//! search for a bijection run.

use std::collections::{BTreeMap, BTreeSet};

use super::{DependencyGraph, KeyMode, NodeId, NodeKey, SdpSubgraph};

type Signature<'a> = (
    usize,
    usize,
    Vec<&'a NodeKey>,
    Vec<(&'a NodeKey, &'a str, &'a NodeKey)>,
);

fn signature<'a>(g: &'a DependencyGraph, keys: &'a BTreeMap<NodeId, NodeKey>) -> Signature<'a> {
    let mut nodes: Vec<&NodeKey> = keys.values().collect();
    nodes.sort();
    let mut edges: Vec<_> = g
        .edges()
        .iter()
        .map(|e| (&keys[&e.head], e.deprel.as_str(), &keys[&e.dependent]))
        .collect();
    edges.sort();
    (g.len(), g.edge_count(), nodes, edges)
}

/// True when a bijection between the node sets preserves node keys, edge
/// direction and edge labels.
pub fn are_isomorphic(a: &SdpSubgraph, b: &SdpSubgraph, mode: KeyMode) -> bool {
    graphs_isomorphic(&a.graph, &b.graph, mode)
}

pub(crate) fn graphs_isomorphic(a: &DependencyGraph, b: &DependencyGraph, mode: KeyMode) -> bool {
    let ka = a.key_map(mode);
    let kb = b.key_map(mode);
    if signature(a, &ka) != signature(b, &kb) {
        return false;
    }
    let la = Labelled::new(a, &ka);
    let lb = Labelled::new(b, &kb);
    let order: Vec<NodeId> = a.node_ids().collect();
    let mut mapping = BTreeMap::new();
    let mut used = BTreeSet::new();
    extend(&la, &lb, &order, &mut mapping, &mut used)
}

struct Labelled<'a> {
    keys: &'a BTreeMap<NodeId, NodeKey>,
    // (head, dependent) -> sorted deprels
    arcs: BTreeMap<(NodeId, NodeId), Vec<&'a str>>,
    degree: BTreeMap<NodeId, (usize, usize)>,
}

impl<'a> Labelled<'a> {
    fn new(g: &'a DependencyGraph, keys: &'a BTreeMap<NodeId, NodeKey>) -> Self {
        let mut arcs: BTreeMap<(NodeId, NodeId), Vec<&str>> = BTreeMap::new();
        let mut degree: BTreeMap<NodeId, (usize, usize)> =
            g.node_ids().map(|id| (id, (0, 0))).collect();
        for e in g.edges() {
            arcs.entry((e.head, e.dependent))
                .or_default()
                .push(e.deprel.as_str());
            degree.get_mut(&e.head).unwrap().1 += 1;
            degree.get_mut(&e.dependent).unwrap().0 += 1;
        }
        for v in arcs.values_mut() {
            v.sort();
        }
        Labelled { keys, arcs, degree }
    }

    fn arc(&self, from: NodeId, to: NodeId) -> Option<&Vec<&'a str>> {
        self.arcs.get(&(from, to))
    }
}

fn extend(
    a: &Labelled,
    b: &Labelled,
    order: &[NodeId],
    mapping: &mut BTreeMap<NodeId, NodeId>,
    used: &mut BTreeSet<NodeId>,
) -> bool {
    let Some(&u) = order.get(mapping.len()) else {
        return true;
    };
    for (&v, key) in b.keys.iter() {
        if used.contains(&v) || key != &a.keys[&u] || a.degree[&u] != b.degree[&v] {
            continue;
        }
        let consistent = mapping
            .iter()
            .all(|(&pu, &pv)| a.arc(u, pu) == b.arc(v, pv) && a.arc(pu, u) == b.arc(pv, v))
            && a.arc(u, u) == b.arc(v, v);
        if !consistent {
            continue;
        }
        mapping.insert(u, v);
        used.insert(v);
        if extend(a, b, order, mapping, used) {
            return true;
        }
        mapping.remove(&u);
        used.remove(&v);
    }
    false
}
