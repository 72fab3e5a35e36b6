//! Cuts the shortest dependency path between two entity tokens and shows its anchor.

use relpat::graph::{parse_conllu, shortest_dependency_path, KeyMode};

const BLOCK: &str = "# text = Pierre Garnier est né le 12 juin 1852 à Paris.
1\tPierre\tPierre\tPROPN\t_\t_\t4\tnsubj\t_\t_
2\tGarnier\tGarnier\tPROPN\t_\t_\t1\tflat:name\t_\t_
3\test\têtre\tAUX\t_\t_\t4\taux:tense\t_\t_
4\tné\tnaître\tVERB\t_\t_\t0\troot\t_\t_
5\tle\tle\tDET\t_\t_\t6\tdet\t_\t_
6\t12\t12\tNUM\t_\t_\t4\tobl:mod\t_\t_
7\tjuin\tjuin\tNOUN\t_\t_\t6\tnmod\t_\t_
8\t1852\t1852\tNUM\t_\t_\t7\tnmod\t_\t_
9\tà\tà\tADP\t_\t_\t10\tcase\t_\t_
10\tParis\tParis\tPROPN\t_\t_\t4\tobl:mod\t_\tSpaceAfter=No
11\t.\t.\tPUNCT\t_\t_\t4\tpunct\t_\t_
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = parse_conllu(BLOCK.as_bytes())?.remove(0);
    for (source, target) in [(1, 10), (1, 6), (8, 10)] {
        let sdp = shortest_dependency_path(&g, source, target)?;
        let arcs: Vec<String> = sdp
            .graph
            .edges()
            .iter()
            .map(|e| format!("{} -{}-> {}", e.head, e.deprel, e.dependent))
            .collect();
        println!(
            "{source} .. {target}: anchor {} ({}), size {}, [{}]",
            sdp.anchor,
            sdp.anchor_key(KeyMode::Lemma),
            sdp.size(),
            arcs.join(", ")
        );
    }
    Ok(())
}
