#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

use relpat::ingest::KnowledgeBaseClient;
use relpat::pipeline::{self, PipelineConfig};

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

/// The fixture corpus config with its work directory moved to `work`.
pub fn fixture_config(work: &Path) -> PipelineConfig {
    let mut cfg = PipelineConfig::load(&fixtures().join("corpus/relpat.toml")).unwrap();
    cfg.work_dir = work.to_path_buf();
    cfg
}

/// Offline ingestion followed by every later stage.
pub fn run_fixture(work: &Path) -> PipelineConfig {
    let cfg = fixture_config(work);
    let client = KnowledgeBaseClient::offline(cfg.client_config());
    pipeline::run_all(&cfg, &client).unwrap();
    cfg
}

/// Relative path and contents of every file below `root`, sorted by path.
pub fn tree(root: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(root).unwrap().to_path_buf();
                out.push((rel, fs::read(&path).unwrap()));
            }
        }
    }
    out.sort();
    out
}
