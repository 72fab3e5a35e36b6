//! Harmonic-mean scoring and thresholded decisions over word weights.

use std::collections::BTreeSet;

use relpat::graph::{DependencyGraph, Edge, KeyMode, NodeKey, SdpSubgraph, TokenNode};
use relpat::semantic::SemanticIndex;
use relpat::syntactic::CandidateMatch;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let props = vec!["dateOfBirth".to_string(), "dateOfDeath".to_string()];
    let index = SemanticIndex::from_weights(
        KeyMode::Surface,
        vec![
            (NodeKey::from("né_VERB"), vec![0.731, 0.599]),
            (NodeKey::from("27_NUM"), vec![0.575, 0.818]),
            (NodeKey::from("mort_VERB"), vec![0.0, 1.0]),
        ],
        props.clone(),
    )
    .ok_or("invalid weights")?;

    let graph = DependencyGraph::new(
        vec![
            TokenNode::new(1, "né", "naître", "VERB"),
            TokenNode::new(2, "27", "27", "NUM"),
        ],
        vec![Edge::new(1, 2, "obl:mod")],
        "né le 27",
    )?;
    let candidate = CandidateMatch {
        subgraph: SdpSubgraph::new(graph, 1, 2)?,
        pattern_id: 0,
        possible_labels: props.into_iter().collect::<BTreeSet<_>>(),
        node_set: BTreeSet::from([1, 2]),
    };
    println!("scores {:?}", index.score_candidate(&candidate));
    for t in [0.0, 0.5, 0.69, 0.7] {
        let p = index.classify(&candidate, t);
        println!("threshold {t:.2}: {} {:?}", p.label, p.score);
    }
    Ok(())
}
