//! Weak labels from statements: windowed fuzzy matching of designations.

use relpat::ingest::{SentenceRecord, StatementTriple};
use relpat::supervision::{fuzzy_contains, label_sentences, similarity, DEFAULT_FUZZY_THRESHOLD};

fn main() {
    let statements = vec![
        StatementTriple::new(
            vec!["Jean Morel".into()],
            "P26",
            vec!["Louise Garnyer".into()],
        ),
        StatementTriple::new(vec!["Jean Morel".into()], "P19", vec!["Lyon".into()]),
        StatementTriple::new(
            vec!["Marie Curval".into()],
            "P69",
            vec!["Université de Paris".into(), "Paris".into()],
        ),
        StatementTriple::new(vec!["Marie Curval".into()], "P19", vec!["Paris".into()]),
    ];
    let sentences: Vec<SentenceRecord> = [
        "Jean Morel épouse Louise Garnier en 1881.",
        "Jean Morel est né à Lyon.",
        "Marie Curval est née à Paris.",
        "Il peint surtout des paysages.",
    ]
    .iter()
    .enumerate()
    .map(|(i, t)| SentenceRecord {
        text: t.to_string(),
        page: "exemple".into(),
        position: i,
    })
    .collect();

    println!(
        "similarity(Garnyer, Garnier) = {:.3}",
        similarity("Louise Garnyer", "Louise Garnier")
    );
    if let Some(m) = fuzzy_contains(
        &sentences[0].text,
        "Louise Garnyer",
        DEFAULT_FUZZY_THRESHOLD,
    ) {
        println!("window {}..{} scores {:.3}", m.start, m.end, m.score);
    }
    for ws in label_sentences(&sentences, &statements, DEFAULT_FUZZY_THRESHOLD) {
        println!("{:<45} {:?}", ws.sentence.text, ws.labels);
        for m in &ws.matches {
            println!(
                "    {} {} / {} ({:.2}, {:.2})",
                m.statement.property,
                m.source.designation,
                m.target.designation,
                m.source.span.score,
                m.target.span.score
            );
        }
    }
}
