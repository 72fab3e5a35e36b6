use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::{DependencyGraph, GraphError, NodeId, SdpSubgraph};

/// Shortest dependency path between two tokens.
///
/// The path is searched on the undirected view of the graph; the returned
/// subgraph keeps the original edge directions and labels, so its anchor is
/// the highest node of the path (the lowest common ancestor in a tree).
pub fn shortest_dependency_path(
    graph: &DependencyGraph,
    source: NodeId,
    target: NodeId,
) -> Result<SdpSubgraph, GraphError> {
    for id in [source, target] {
        if !graph.contains(id) {
            return Err(GraphError::UnknownNode(id));
        }
    }
    let mut previous: BTreeMap<NodeId, NodeId> = BTreeMap::new();
    let mut seen = BTreeSet::from([source]);
    let mut queue = VecDeque::from([source]);
    while let Some(cur) = queue.pop_front() {
        if cur == target {
            break;
        }
        for next in graph.neighbors(cur) {
            if seen.insert(next) {
                previous.insert(next, cur);
                queue.push_back(next);
            }
        }
    }
    if !seen.contains(&target) {
        return Err(GraphError::NoPath(source, target));
    }
    let mut path = BTreeSet::from([target]);
    let mut steps = BTreeSet::new();
    let mut cur = target;
    while cur != source {
        let prev = previous[&cur];
        steps.insert((prev.min(cur), prev.max(cur)));
        path.insert(prev);
        cur = prev;
    }
    let nodes = graph
        .nodes()
        .iter()
        .filter(|n| path.contains(&n.id))
        .cloned()
        .collect();
    let edges = graph
        .edges()
        .iter()
        .filter(|e| steps.contains(&(e.head.min(e.dependent), e.head.max(e.dependent))))
        .cloned()
        .collect();
    let sub = DependencyGraph::new(nodes, edges, graph.sentence_text())?;
    SdpSubgraph::new(sub, source, target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::jeanne;
    use crate::graph::{Edge, TokenNode};

    #[test]
    fn figure_sentence_path() {
        let sdp = shortest_dependency_path(&jeanne(), 1, 7).unwrap();
        assert_eq!(sdp.anchor, 5);
        assert_eq!(sdp.source, 1);
        assert_eq!(sdp.target, 7);
        assert_eq!(sdp.node_set(), BTreeSet::from([1, 5, 7]));
        assert_eq!(
            sdp.graph.edges(),
            &[Edge::new(5, 1, "nsubj"), Edge::new(5, 7, "obl:arg")]
        );
        assert_eq!(sdp.size(), 2);
    }

    #[test]
    fn zero_length_path() {
        let sdp = shortest_dependency_path(&jeanne(), 3, 3).unwrap();
        assert_eq!(sdp.node_set(), BTreeSet::from([3]));
        assert_eq!(sdp.anchor, 3);
        assert_eq!(sdp.size(), 0);
    }

    #[test]
    fn downward_path_anchor_is_upper_end() {
        let sdp = shortest_dependency_path(&jeanne(), 2, 5).unwrap();
        assert_eq!(sdp.node_set(), BTreeSet::from([1, 2, 3, 5]));
        assert_eq!(sdp.anchor, 5);
    }

    #[test]
    fn disconnected_nodes() {
        let g = DependencyGraph::new(
            vec![
                TokenNode::new(1, "a", "a", "X"),
                TokenNode::new(2, "b", "b", "X"),
            ],
            vec![],
            "a b",
        )
        .unwrap();
        assert_eq!(
            shortest_dependency_path(&g, 1, 2).unwrap_err(),
            GraphError::NoPath(1, 2)
        );
        assert_eq!(
            shortest_dependency_path(&g, 1, 5).unwrap_err(),
            GraphError::UnknownNode(5)
        );
    }
}
