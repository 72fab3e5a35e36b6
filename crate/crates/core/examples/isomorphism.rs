//! Label-preserving isomorphism between two paths, under lemma and surface keys.

use relpat::graph::{are_isomorphic, parse_conllu, shortest_dependency_path, KeyMode};

const BLOCKS: &str = "# text = Jean Morel est né à Lyon.
1\tJean\tJean\tPROPN\t_\t_\t4\tnsubj\t_\t_
2\tMorel\tMorel\tPROPN\t_\t_\t1\tflat:name\t_\t_
3\test\têtre\tAUX\t_\t_\t4\taux:tense\t_\t_
4\tné\tnaître\tVERB\t_\t_\t0\troot\t_\t_
5\tà\tà\tADP\t_\t_\t6\tcase\t_\t_
6\tLyon\tLyon\tPROPN\t_\t_\t4\tobl:arg\t_\tSpaceAfter=No
7\t.\t.\tPUNCT\t_\t_\t4\tpunct\t_\t_

# text = Selon la tradition, Jean naquit à Lyon.
1\tSelon\tselon\tADP\t_\t_\t3\tcase\t_\t_
2\tla\tle\tDET\t_\t_\t3\tdet\t_\t_
3\ttradition\ttradition\tNOUN\t_\t_\t6\tobl:mod\t_\tSpaceAfter=No
4\t,\t,\tPUNCT\t_\t_\t6\tpunct\t_\t_
5\tJean\tJean\tPROPN\t_\t_\t6\tnsubj\t_\t_
6\tnaquit\tnaître\tVERB\t_\t_\t0\troot\t_\t_
7\tà\tà\tADP\t_\t_\t8\tcase\t_\t_
8\tLyon\tLyon\tPROPN\t_\t_\t6\tobl:arg\t_\tSpaceAfter=No
9\t.\t.\tPUNCT\t_\t_\t6\tpunct\t_\t_
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let graphs = parse_conllu(BLOCKS.as_bytes())?;
    let a = shortest_dependency_path(&graphs[0], 1, 6)?;
    let b = shortest_dependency_path(&graphs[1], 5, 8)?;
    let c = shortest_dependency_path(&graphs[1], 3, 8)?;
    for mode in [KeyMode::Lemma, KeyMode::Surface] {
        println!(
            "{mode:>7}: né/naquit {}, subject/adjunct {}",
            are_isomorphic(&a, &b, mode),
            are_isomorphic(&a, &c, mode)
        );
    }
    Ok(())
}
