use std::collections::{BTreeSet, HashMap};

use proptest::collection::{btree_set, vec};
use proptest::prelude::*;
use proptest::sample::subsequence;
use relpat::graph::{DependencyGraph, Edge, KeyMode, NodeId, NodeKey, SdpSubgraph, TokenNode};
use relpat::ingest::{clean_sentence, SentenceRecord, StatementTriple};
use relpat::semantic::{decide, harmonic_mean, ScoreVector, SemanticIndex};
use relpat::supervision::{
    build_sdp_dataset, fuzzy_contains, label_sentences, similarity, split_dataset, LabeledPattern,
    SplitRatios, OTHER,
};
use relpat::syntactic::{filter_longest, CandidateMatch};

const WORDS: [&str; 12] = [
    "Jean", "Marie", "Paris", "Lyon", "naquit", "mourut", "peintre", "épouse", "Rouen", "avocat",
    "Pierre", "école",
];

/// A tree over `heads.len() + 1` nodes: node `i + 2` hangs under `heads[i] % (i + 1) + 1`.
fn tree(words: &[&str], heads: &[usize]) -> DependencyGraph {
    let nodes = words
        .iter()
        .enumerate()
        .map(|(i, w)| TokenNode::new(i as NodeId + 1, w, &w.to_lowercase(), "X"))
        .collect();
    let edges = heads
        .iter()
        .enumerate()
        .take(words.len() - 1)
        .map(|(i, h)| Edge::new((h % (i + 1)) as NodeId + 1, i as NodeId + 2, "dep"))
        .collect();
    DependencyGraph::new(nodes, edges, words.join(" ")).unwrap()
}

fn candidate(id: u32, nodes: &BTreeSet<NodeId>) -> CandidateMatch {
    let ids: Vec<NodeId> = nodes.iter().copied().collect();
    let words: Vec<&str> = ids
        .iter()
        .map(|&i| WORDS[i as usize % WORDS.len()])
        .collect();
    let g = tree(&words, &vec![0; ids.len()]);
    CandidateMatch {
        subgraph: SdpSubgraph::new(g, 1, 1).unwrap(),
        pattern_id: id,
        possible_labels: BTreeSet::from(["P19".to_string()]),
        node_set: nodes.clone(),
    }
}

proptest! {
    #[test]
    fn similarity_is_symmetric_and_bounded(a in "\\PC{0,12}", b in "\\PC{0,12}") {
        let s = similarity(&a, &b);
        prop_assert!((0.0..=1.0).contains(&s));
        prop_assert_eq!(s, similarity(&b, &a));
        prop_assert_eq!(similarity(&a, &a), 1.0);
    }

    #[test]
    fn cleaning_is_idempotent(s in "[A-Za-zé ,.()\\[\\]0-9«»]{0,60}") {
        if let Some(once) = clean_sentence(&s) {
            prop_assert_eq!(clean_sentence(&once), Some(once.clone()));
        }
    }

    #[test]
    fn fuzzy_matching_is_monotone_in_the_threshold(
        words in subsequence(WORDS.to_vec(), 1..8),
        pick in 0usize..8,
        typo in 0usize..6,
        low in 0.5f64..1.0,
        high in 0.5f64..1.0,
    ) {
        let (low, high) = if low <= high { (low, high) } else { (high, low) };
        let sentence = format!("{}.", words.join(" "));
        let mut designation: Vec<char> = words[pick % words.len()].chars().collect();
        let at = typo % designation.len();
        designation[at] = 'x';
        let designation: String = designation.into_iter().collect();
        if let Some(strict) = fuzzy_contains(&sentence, &designation, high) {
            let lax = fuzzy_contains(&sentence, &designation, low);
            prop_assert!(lax.is_some());
            prop_assert!(lax.unwrap().score >= strict.score);
        }
    }

    #[test]
    fn every_attempted_instance_is_emitted_or_discarded(
        sentences in vec((subsequence(WORDS.to_vec(), 2..8), vec(0usize..8, 8), any::<bool>()), 1..6),
        statements in vec((0usize..12, 0usize..12), 0..6),
    ) {
        let mut records = Vec::new();
        let mut graphs = HashMap::new();
        for (i, (words, heads, parsed)) in sentences.iter().enumerate() {
            let g = tree(words, heads);
            records.push(SentenceRecord { text: g.sentence_text().to_string(), page: "p".into(), position: i });
            if *parsed {
                graphs.insert(g.sentence_text().to_string(), g);
            }
        }
        let triples: Vec<StatementTriple> = statements
            .iter()
            .map(|&(s, t)| StatementTriple::new(vec![WORDS[s].into()], "P19", vec![WORDS[t].into()]))
            .collect();
        let labeled = label_sentences(&records, &triples, 0.9);
        let expected: usize = labeled.iter().map(|l| l.matches.len().max(1)).sum();
        let data = build_sdp_dataset(&labeled, &graphs, 0.9);
        let log = &data.discards;
        prop_assert_eq!(log.attempted, expected);
        prop_assert_eq!(log.attempted, log.emitted + log.discarded());
        prop_assert_eq!(log.emitted, data.patterns.len());
        prop_assert_eq!(log.counts.values().sum::<usize>(), log.entries.len());
    }

    #[test]
    fn longest_filter_leaves_a_covering_antichain(
        sets in vec(btree_set(1u32..9, 1..6), 1..10),
    ) {
        let input: Vec<CandidateMatch> = sets
            .iter()
            .enumerate()
            .map(|(i, s)| candidate((i * 7 % 5) as u32, s))
            .collect();
        let kept = filter_longest(input.clone());
        for (i, a) in kept.iter().enumerate() {
            for (j, b) in kept.iter().enumerate() {
                if i != j {
                    prop_assert!(!a.node_set.is_subset(&b.node_set));
                }
            }
        }
        for c in &input {
            prop_assert!(kept.iter().any(|k| c.node_set.is_subset(&k.node_set)));
        }
    }

    #[test]
    fn scores_ignore_node_order(
        words in subsequence(WORDS.to_vec(), 1..6),
        heads in vec(0usize..6, 6),
        weights in vec((0.0f64..1.0, 0.0f64..1.0), 12),
        reversed in any::<bool>(),
    ) {
        let rows = WORDS
            .iter()
            .zip(&weights)
            .map(|(w, &(a, b))| (NodeKey::from(format!("{}_X", w.to_lowercase()).as_str()), vec![a, b]))
            .collect();
        let index = SemanticIndex::from_weights(KeyMode::Lemma, rows, vec!["P19".into(), "P569".into()]).unwrap();
        let mut order = words.clone();
        if reversed {
            order.reverse();
        } else {
            order.rotate_left(1);
        }
        let make = |ws: &[&str]| CandidateMatch {
            subgraph: SdpSubgraph::new(tree(ws, &heads), 1, 1).unwrap(),
            pattern_id: 0,
            possible_labels: BTreeSet::from(["P19".into(), "P569".into(), OTHER.into()]),
            node_set: BTreeSet::new(),
        };
        prop_assert_eq!(index.score_candidate(&make(&words)), index.score_candidate(&make(&order)));
    }

    #[test]
    fn argmax_survives_positive_scaling(
        scores in vec(0.01f64..1.0, 1..6),
        factor in 0.1f64..10.0,
    ) {
        let props = ["P106", "P19", "P26", "P569", "P570", "P69"];
        let base: ScoreVector = props.iter().zip(&scores).map(|(p, &s)| (p.to_string(), s)).collect();
        let scaled: ScoreVector = base.iter().map(|(p, &s)| (p.clone(), s * factor)).collect();
        prop_assert_eq!(decide(&base, 0.0).label, decide(&scaled, 0.0).label);
    }

    #[test]
    fn harmonic_mean_lies_between_extremes(values in vec(0.001f64..1.0, 1..8)) {
        let h = harmonic_mean(&values);
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(0.0, f64::max);
        prop_assert!(h >= min - 1e-12 && h <= max + 1e-12);
    }

    #[test]
    fn splits_partition_the_dataset(
        labels in vec(0usize..4, 0..40),
        seed in any::<u64>(),
    ) {
        let names = ["P19", "P569", "P106", OTHER];
        let patterns: Vec<LabeledPattern> = labels
            .iter()
            .enumerate()
            .map(|(i, &l)| {
                let g = tree(&["Jean", "naquit"], &[0]);
                LabeledPattern::new(format!("s#{i}#0"), SdpSubgraph::new(g, 1, 2).unwrap(), BTreeSet::from([names[l].to_string()]))
            })
            .collect();
        let split = split_dataset(patterns.clone(), SplitRatios::default(), seed).unwrap();
        let again = split_dataset(patterns.clone(), SplitRatios::default(), seed).unwrap();
        prop_assert_eq!(&split.train, &again.train);
        prop_assert!(split.train.iter().all(|p| !p.is_other()));
        let mut all: Vec<String> = split.train.iter().chain(&split.dev).chain(&split.test).map(|p| p.instance.clone()).collect();
        all.sort();
        let mut input: Vec<String> = patterns.iter().map(|p| p.instance.clone()).collect();
        input.sort();
        prop_assert_eq!(all, input);
    }
}
