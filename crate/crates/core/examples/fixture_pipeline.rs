//! Runs every stage on the bundled fixture corpus from its offline cache.
//!
//! Usage: `cargo run --example fixture_pipeline [work_dir]`

use std::path::{Path, PathBuf};

use relpat::ingest::KnowledgeBaseClient;
use relpat::pipeline::{self, PipelineConfig, Workspace};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/corpus");
    let mut cfg = PipelineConfig::load(&corpus.join("relpat.toml"))?;
    cfg.work_dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("relpat-fixture"));
    let client = KnowledgeBaseClient::offline(cfg.client_config());

    let ingest = pipeline::ingest(&cfg, &client)?;
    println!(
        "{} sentences, {} statements",
        ingest.sentences, ingest.statements
    );
    let labels = pipeline::annotate(&cfg)?;
    println!("{} labelled, {} Other", labels.labeled, labels.other);
    let data = pipeline::build_dataset(&cfg)?;
    println!("{} of {} instances kept", data.emitted, data.attempted);
    for s in pipeline::build_indices(&cfg)? {
        println!("{}: {:?}", s.variant, s.stats);
    }
    pipeline::extract(&cfg, None, None)?;
    println!("{} relations", pipeline::classify(&cfg, None, None, None)?);
    let eval = pipeline::evaluate(&cfg)?;
    pipeline::stats(&cfg)?;

    let ws = Workspace::new(&cfg.work_dir);
    print!("{}", std::fs::read_to_string(ws.metrics())?);
    println!("{:?}", eval.taxonomy);
    println!("outputs in {}", cfg.work_dir.display());
    Ok(())
}
