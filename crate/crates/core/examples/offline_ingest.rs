//! Reads items and pages from a warm cache and assembles localized statements.

use std::collections::BTreeSet;
use std::path::Path;

use relpat::ingest::{assemble_statements, ClientConfig, ItemSource, KnowledgeBaseClient};
use relpat::pipeline::page_sentences;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cache = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/corpus/cache");
    let client = KnowledgeBaseClient::offline(ClientConfig {
        cache_dir: cache,
        snapshot: "fixture".into(),
        ..ClientConfig::default()
    });
    let item = client.fetch_item("Q9000100", "fr")?;
    println!(
        "{} ({}), aliases {:?}",
        item.label, item.description, item.aliases
    );

    let filter: BTreeSet<String> = ["P19", "P569", "P570"]
        .iter()
        .map(|p| p.to_string())
        .collect();
    for st in assemble_statements(&item, &filter, "fr", &client)? {
        println!("{:?} {} {:?}", st.source, st.property, st.target);
    }
    if let Some(title) = &item.sitelink {
        let html = client.fetch_page_html(title, "fr")?;
        for s in page_sentences(&html, title) {
            println!("{:>2} {}", s.position, s.text);
        }
    }
    match client.fetch_item("Q9000999", "fr") {
        Ok(_) => println!("unexpected cache hit"),
        Err(e) => println!("uncached item: {e}"),
    }
    Ok(())
}
