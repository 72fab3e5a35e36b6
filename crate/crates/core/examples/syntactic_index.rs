//! Builds a pattern index from labelled paths and applies it to a new sentence.

use std::collections::BTreeSet;

use relpat::graph::{parse_conllu, shortest_dependency_path, KeyMode};
use relpat::supervision::LabeledPattern;
use relpat::syntactic::{build_syntactic_index, filter_longest};

const TRAIN: &str = "# text = Jean Morel est né à Lyon.
1\tJean\tJean\tPROPN\t_\t_\t4\tnsubj\t_\t_
2\tMorel\tMorel\tPROPN\t_\t_\t1\tflat:name\t_\t_
3\test\têtre\tAUX\t_\t_\t4\taux:tense\t_\t_
4\tné\tnaître\tVERB\t_\t_\t0\troot\t_\t_
5\tà\tà\tADP\t_\t_\t6\tcase\t_\t_
6\tLyon\tLyon\tPROPN\t_\t_\t4\tobl:arg\t_\tSpaceAfter=No
7\t.\t.\tPUNCT\t_\t_\t4\tpunct\t_\t_

# text = Jean Laval est né le 3 mai 1851.
1\tJean\tJean\tPROPN\t_\t_\t4\tnsubj\t_\t_
2\tLaval\tLaval\tPROPN\t_\t_\t1\tflat:name\t_\t_
3\test\têtre\tAUX\t_\t_\t4\taux:tense\t_\t_
4\tné\tnaître\tVERB\t_\t_\t0\troot\t_\t_
5\tle\tle\tDET\t_\t_\t6\tdet\t_\t_
6\t3\t3\tNUM\t_\t_\t4\tobl:mod\t_\t_
7\tmai\tmai\tNOUN\t_\t_\t6\tnmod\t_\t_
8\t1851\t1851\tNUM\t_\t_\t7\tnmod\t_\tSpaceAfter=No
9\t.\t.\tPUNCT\t_\t_\t4\tpunct\t_\t_
";

const NEW: &str = "# text = Jean Petit naquit le 3 mars 1860 à Lyon.
1\tJean\tJean\tPROPN\t_\t_\t3\tnsubj\t_\t_
2\tPetit\tPetit\tPROPN\t_\t_\t1\tflat:name\t_\t_
3\tnaquit\tnaître\tVERB\t_\t_\t0\troot\t_\t_
4\tle\tle\tDET\t_\t_\t5\tdet\t_\t_
5\t3\t3\tNUM\t_\t_\t3\tobl:mod\t_\t_
6\tmars\tmars\tNOUN\t_\t_\t5\tnmod\t_\t_
7\t1860\t1860\tNUM\t_\t_\t6\tnmod\t_\t_
8\tà\tà\tADP\t_\t_\t9\tcase\t_\t_
9\tLyon\tLyon\tPROPN\t_\t_\t3\tobl:arg\t_\tSpaceAfter=No
10\t.\t.\tPUNCT\t_\t_\t3\tpunct\t_\t_
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let train = parse_conllu(TRAIN.as_bytes())?;
    let patterns = vec![
        LabeledPattern::new(
            "a#0#0",
            shortest_dependency_path(&train[0], 1, 6)?,
            BTreeSet::from(["P19".to_string()]),
        ),
        LabeledPattern::new(
            "b#0#0",
            shortest_dependency_path(&train[1], 1, 6)?,
            BTreeSet::from(["P569".to_string()]),
        ),
    ];
    let index = build_syntactic_index(&patterns, KeyMode::Lemma);
    println!("{:?}", index.stats);
    for p in index.patterns() {
        println!(
            "pattern {} under {}: {:?}",
            p.id,
            p.pattern.anchor_key(KeyMode::Lemma),
            p.labels
        );
    }

    let sentence = parse_conllu(NEW.as_bytes())?.remove(0);
    let found = index.match_patterns(&sentence);
    println!(
        "{} embeddings, {} after keeping the longest",
        found.len(),
        filter_longest(found.clone()).len()
    );
    for c in filter_longest(found) {
        println!(
            "pattern {} over nodes {:?} -> {:?}",
            c.pattern_id, c.node_set, c.possible_labels
        );
    }
    Ok(())
}
