//! Reads a CoNLL-U block, prints node keys in both key modes and writes it back.

use relpat::graph::{parse_conllu, write_conllu, KeyMode};

const BLOCK: &str = "# sent_id = 1
# text = Jeanne d'Arc est née à Domrémy.
1\tJeanne\tJeanne\tPROPN\t_\t_\t5\tnsubj\t_\t_
2\td'\tde\tADP\t_\t_\t3\tcase\t_\tSpaceAfter=No
3\tArc\tArc\tPROPN\t_\t_\t1\tnmod\t_\t_
4\test\têtre\tAUX\t_\t_\t5\taux:tense\t_\t_
5\tnée\tnaître\tVERB\t_\t_\t0\troot\t_\t_
6\tà\tà\tADP\t_\t_\t7\tcase\t_\t_
7\tDomrémy\tDomrémy\tPROPN\t_\t_\t5\tobl:arg\t_\tSpaceAfter=No
8\t.\t.\tPUNCT\t_\t_\t5\tpunct\t_\t_
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let graphs = parse_conllu(BLOCK.as_bytes())?;
    let g = &graphs[0];
    println!(
        "{} ({} tokens, {} arcs)",
        g.sentence_text(),
        g.len(),
        g.edge_count()
    );
    for n in g.nodes() {
        let head = g
            .head_of(n.id)
            .map(|e| format!("{} <-{}-", e.head, e.deprel));
        println!(
            "{:>2} {:<24} {:<14} {}",
            n.id,
            g.key_of(n.id, KeyMode::Lemma).unwrap(),
            g.key_of(n.id, KeyMode::Surface).unwrap(),
            head.unwrap_or_else(|| "root".into())
        );
    }
    let mut out = Vec::new();
    write_conllu(&mut out, &graphs)?;
    assert_eq!(parse_conllu(out.as_slice())?, graphs);
    print!("{}", String::from_utf8(out)?);
    Ok(())
}
