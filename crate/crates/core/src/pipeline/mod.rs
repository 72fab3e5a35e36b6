//! File-based pipeline stages, each re-runnable from its input files.
//!
//! Every stage reads from and writes to the work directory named in the
//! [`PipelineConfig`]:
//!
//! | stage | writes |
//! |---|---|
//! | [`ingest`] | `sentences.jsonl`, `statements.jsonl` |
//! | [`annotate`] | `labeled.jsonl` |
//! | [`build_dataset`] | `patterns.jsonl`, `discards.json`, `review.jsonl`, `<variant>/{train,dev,test}.jsonl` |
//! | [`build_indices`] | `<variant>/syntactic_index.json`, `<variant>/semantic_index.json` |
//! | [`extract`] | `candidates.jsonl` |
//! | [`classify`] | `predictions.jsonl` |
//! | [`evaluate`] | `metrics.tsv`, `metrics_end_to_end.tsv`, `taxonomy.json`, `eval/` |
//! | [`stats`] | `stats/*.tsv` |
//!
//! `<variant>` is `weak`, plus `reviewed` when a review file is configured.

mod config;

pub use config::PipelineConfig;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eval::{
    error_taxonomy, metrics_tsv, records_at, score_sample, threshold_sweep, EvalError, MetricsRow,
    ScoredSample, Taxonomy,
};
use crate::graph::{parse_conllu, ConlluError, DependencyGraph, NodeId};
use crate::ingest::{
    assemble_statements, clean_sentence, extract_page_paragraphs, property_name, split_sentences,
    IngestError, ItemSource, KnowledgeBaseClient, SentenceRecord, StatementTriple,
};
use crate::io::{
    content_hash, read_json, read_jsonl, write_json, write_jsonl, write_text, IoError,
};
use crate::semantic::{build_frequency_matrix, build_semantic_index, SemanticIndex};
use crate::supervision::{
    apply_review, build_sdp_dataset, label_sentences, review_template, split_dataset, DiscardLog,
    LabeledPattern, ReviewEntry, SplitError, WeaklyLabeledSentence, OTHER,
};
use crate::syntactic::{
    build_syntactic_index, filter_longest, CandidateMatch, IndexError, PatternId, Provenance,
    SyntacticIndex,
};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("missing input {}; {hint}", path.display())]
    MissingInput { path: PathBuf, hint: String },
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("{}: {source}", path.display())]
    Conllu {
        path: PathBuf,
        #[source]
        source: ConlluError,
    },
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error(transparent)]
    Split(#[from] SplitError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("{0}")]
    Data(String),
}

impl PipelineError {
    /// 1 for user errors, 2 for data errors, 3 for internal accounting failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_)
            | PipelineError::MissingInput { .. }
            | PipelineError::Split(_)
            | PipelineError::Index(IndexError::KeyMode { .. }) => 1,
            PipelineError::Eval(EvalError::Accounting { .. }) => 3,
            _ => 2,
        }
    }
}

pub type Result<T, E = PipelineError> = std::result::Result<T, E>;

/// Dataset variants: distantly supervised, and reviewed when configured.
pub const WEAK: &str = "weak";
pub const REVIEWED: &str = "reviewed";
pub const SPLITS: [&str; 3] = ["train", "dev", "test"];

/// Locations of every stage file under a work directory.
#[derive(Debug, Clone)]
pub struct Workspace {
    pub root: PathBuf,
}

impl Workspace {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Workspace { root: root.into() }
    }

    pub fn sentences(&self) -> PathBuf {
        self.root.join("sentences.jsonl")
    }
    pub fn statements(&self) -> PathBuf {
        self.root.join("statements.jsonl")
    }
    pub fn labeled(&self) -> PathBuf {
        self.root.join("labeled.jsonl")
    }
    pub fn patterns(&self) -> PathBuf {
        self.root.join("patterns.jsonl")
    }
    pub fn discards(&self) -> PathBuf {
        self.root.join("discards.json")
    }
    pub fn review_template(&self) -> PathBuf {
        self.root.join("review.jsonl")
    }
    pub fn split(&self, variant: &str, split: &str) -> PathBuf {
        self.root.join(variant).join(format!("{split}.jsonl"))
    }
    pub fn syntactic_index(&self, variant: &str) -> PathBuf {
        self.root.join(variant).join("syntactic_index.json")
    }
    pub fn semantic_index(&self, variant: &str) -> PathBuf {
        self.root.join(variant).join("semantic_index.json")
    }
    pub fn candidates(&self) -> PathBuf {
        self.root.join("candidates.jsonl")
    }
    pub fn predictions(&self) -> PathBuf {
        self.root.join("predictions.jsonl")
    }
    pub fn metrics(&self) -> PathBuf {
        self.root.join("metrics.tsv")
    }
    pub fn metrics_end_to_end(&self) -> PathBuf {
        self.root.join("metrics_end_to_end.tsv")
    }
    pub fn taxonomy(&self) -> PathBuf {
        self.root.join("taxonomy.json")
    }
    pub fn samples(&self, mode: &str, dataset: &str) -> PathBuf {
        self.root
            .join("eval")
            .join(format!("samples_{mode}_{dataset}.jsonl"))
    }
    pub fn records(&self, index: &str, dataset: &str) -> PathBuf {
        self.root
            .join("eval")
            .join(format!("records_{index}_{dataset}.jsonl"))
    }
    pub fn stats(&self, name: &str) -> PathBuf {
        self.root.join("stats").join(format!("{name}.tsv"))
    }
}

fn require(path: &Path, producer: &'static str) -> Result<()> {
    if path.exists() {
        Ok(())
    } else {
        Err(PipelineError::MissingInput {
            path: path.to_path_buf(),
            hint: format!("run `relpat {producer}` first"),
        })
    }
}

fn read_input<T: serde::de::DeserializeOwned>(
    path: &Path,
    producer: &'static str,
) -> Result<Vec<T>> {
    require(path, producer)?;
    Ok(read_jsonl(path)?)
}

pub fn read_parses(path: &Path) -> Result<Vec<DependencyGraph>> {
    let file = File::open(path).map_err(|_| PipelineError::MissingInput {
        path: path.to_path_buf(),
        hint: "parse sentences.jsonl with a dependency parser into CoNLL-U first".into(),
    })?;
    parse_conllu(BufReader::new(file)).map_err(|source| PipelineError::Conllu {
        path: path.to_path_buf(),
        source,
    })
}

fn variants(cfg: &PipelineConfig) -> Vec<&'static str> {
    if cfg.review.is_some() {
        vec![WEAK, REVIEWED]
    } else {
        vec![WEAK]
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestSummary {
    pub items: usize,
    pub pages: usize,
    pub sentences: usize,
    pub statements: usize,
}

pub fn read_item_ids(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path).map_err(|_| PipelineError::MissingInput {
        path: path.to_path_buf(),
        hint: "list one item id per line".into(),
    })?;
    Ok(text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect())
}

/// Sentences of one encyclopedia page, cleaned, with their positions.
pub fn page_sentences(html: &str, page: &str) -> Vec<SentenceRecord> {
    extract_page_paragraphs(html)
        .iter()
        .flat_map(|p| split_sentences(p))
        .filter_map(|s| clean_sentence(&s))
        .enumerate()
        .map(|(position, text)| SentenceRecord {
            text,
            page: page.to_string(),
            position,
        })
        .collect()
}

/// Fetches items and their pages, writing the sentences and statements files.
pub fn ingest(cfg: &PipelineConfig, client: &KnowledgeBaseClient) -> Result<IngestSummary> {
    let ws = Workspace::new(&cfg.work_dir);
    let ids = read_item_ids(&cfg.items)?;
    let filter: BTreeSet<String> = cfg.properties.iter().cloned().collect();
    let mut summary = IngestSummary::default();
    let mut sentences = Vec::new();
    let mut statements = Vec::new();
    let mut seen_pages = BTreeSet::new();
    for id in &ids {
        let item = match client.fetch_item(id, &cfg.language) {
            Ok(item) => item,
            Err(IngestError::NotFound(_)) => {
                log::warn!("item {id} not found, skipped");
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        summary.items += 1;
        statements.extend(assemble_statements(&item, &filter, &cfg.language, client)?);
        let Some(title) = item.sitelink.as_deref() else {
            log::warn!("item {id} has no {} page", cfg.language);
            continue;
        };
        if !seen_pages.insert(title.to_string()) {
            continue;
        }
        let html = client.fetch_page_html(title, &cfg.language)?;
        summary.pages += 1;
        sentences.extend(page_sentences(&html, title));
    }
    summary.sentences = sentences.len();
    summary.statements = statements.len();
    write_jsonl(&ws.sentences(), &sentences)?;
    write_jsonl(&ws.statements(), &statements)?;
    Ok(summary)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AnnotateSummary {
    pub sentences: usize,
    pub labeled: usize,
    pub other: usize,
}

pub fn annotate(cfg: &PipelineConfig) -> Result<AnnotateSummary> {
    let ws = Workspace::new(&cfg.work_dir);
    let sentences: Vec<SentenceRecord> = read_input(&ws.sentences(), "ingest")?;
    let statements: Vec<StatementTriple> = read_input(&ws.statements(), "ingest")?;
    let labeled = label_sentences(&sentences, &statements, cfg.fuzzy_threshold);
    write_jsonl(&ws.labeled(), &labeled)?;
    let other = labeled.iter().filter(|l| l.is_other()).count();
    Ok(AnnotateSummary {
        sentences: labeled.len(),
        labeled: labeled.len() - other,
        other,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DatasetSummary {
    pub attempted: usize,
    pub emitted: usize,
    pub split_sizes: BTreeMap<String, [usize; 3]>,
    pub warnings: Vec<String>,
}

/// Maps sentence text to its parse; the first parse of a text wins.
pub fn graphs_by_text(graphs: Vec<DependencyGraph>) -> HashMap<String, DependencyGraph> {
    let mut map = HashMap::new();
    for g in graphs {
        map.entry(g.sentence_text().to_string()).or_insert(g);
    }
    map
}

pub fn build_dataset(cfg: &PipelineConfig) -> Result<DatasetSummary> {
    let ws = Workspace::new(&cfg.work_dir);
    let labeled: Vec<WeaklyLabeledSentence> = read_input(&ws.labeled(), "annotate")?;
    let graphs = graphs_by_text(read_parses(&cfg.parses)?);
    let dataset = build_sdp_dataset(&labeled, &graphs, cfg.fuzzy_threshold);
    write_jsonl(&ws.patterns(), &dataset.patterns)?;
    write_json(&ws.discards(), &dataset.discards)?;
    write_jsonl(&ws.review_template(), &review_template(&dataset.patterns))?;

    let ratios = cfg.ratios()?;
    let mut summary = DatasetSummary {
        attempted: dataset.discards.attempted,
        emitted: dataset.discards.emitted,
        ..DatasetSummary::default()
    };
    let weak = split_dataset(dataset.patterns, ratios, cfg.seed)?;
    for w in &weak.warnings {
        log::warn!("{w}");
    }
    summary.warnings = weak.warnings.clone();
    let mut parts = vec![(WEAK, [weak.train, weak.dev, weak.test])];
    if let Some(review_path) = &cfg.review {
        require(review_path, "build-dataset` to get a review.jsonl template, fill in verdicts, then `relpat build-dataset")?;
        let review: Vec<ReviewEntry> = read_jsonl(review_path)?;
        let reviewed = parts[0].1.clone().map(|s| apply_review(s, &review));
        parts.push((REVIEWED, reviewed));
    }
    for (variant, sets) in parts {
        for (name, set) in SPLITS.iter().zip(&sets) {
            write_jsonl(&ws.split(variant, name), set)?;
        }
        summary.split_sizes.insert(
            variant.to_string(),
            [sets[0].len(), sets[1].len(), sets[2].len()],
        );
    }
    Ok(summary)
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndicesSummary {
    pub variant: String,
    pub stats: crate::syntactic::IndexStats,
    pub words: usize,
}

/// Builds both indices from a training split.
pub fn build_indices_from(
    train: &[LabeledPattern],
    cfg: &PipelineConfig,
) -> Result<(SyntacticIndex, SemanticIndex)> {
    let provenance = Provenance {
        dataset_sha256: content_hash(&train),
        snapshot: cfg.snapshot.clone(),
    };
    let syntactic = build_syntactic_index(train, cfg.key_mode).with_provenance(provenance.clone());
    let counts = build_frequency_matrix(train, cfg.key_mode);
    let semantic = build_semantic_index(&counts)?.with_provenance(provenance);
    Ok((syntactic, semantic))
}

pub fn build_indices(cfg: &PipelineConfig) -> Result<Vec<IndicesSummary>> {
    let ws = Workspace::new(&cfg.work_dir);
    let mut out = Vec::new();
    for variant in variants(cfg) {
        let train: Vec<LabeledPattern> = read_input(&ws.split(variant, "train"), "build-dataset")?;
        let (syntactic, semantic) = build_indices_from(&train, cfg)?;
        syntactic.save(&ws.syntactic_index(variant))?;
        semantic.save(&ws.semantic_index(variant))?;
        out.push(IndicesSummary {
            variant: variant.to_string(),
            stats: syntactic.stats.clone(),
            words: semantic.words.len(),
        });
    }
    Ok(out)
}

fn load_indices(cfg: &PipelineConfig, variant: &str) -> Result<(SyntacticIndex, SemanticIndex)> {
    let ws = Workspace::new(&cfg.work_dir);
    let syn_path = ws.syntactic_index(variant);
    let sem_path = ws.semantic_index(variant);
    require(&syn_path, "build-indices")?;
    require(&sem_path, "build-indices")?;
    Ok((
        SyntacticIndex::load_checked(&syn_path, cfg.key_mode)?,
        SemanticIndex::load_checked(&sem_path, cfg.key_mode)?,
    ))
}

/// Candidates extracted from one sentence of the input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceCandidates {
    pub sentence: usize,
    pub text: String,
    pub candidates: Vec<CandidateMatch>,
}

/// Applies the syntactic index to every sentence of a CoNLL-U file.
pub fn extract_candidates(
    index: &SyntacticIndex,
    graphs: &[DependencyGraph],
) -> Vec<SentenceCandidates> {
    graphs
        .par_iter()
        .enumerate()
        .map(|(i, g)| SentenceCandidates {
            sentence: i,
            text: g.sentence_text().to_string(),
            candidates: filter_longest(index.match_patterns(g)),
        })
        .collect()
}

/// Runs extraction with the weak index. `input` defaults to the configured
/// parses and `output` to `candidates.jsonl`.
pub fn extract(cfg: &PipelineConfig, input: Option<&Path>, output: Option<&Path>) -> Result<usize> {
    let ws = Workspace::new(&cfg.work_dir);
    let syn_path = ws.syntactic_index(WEAK);
    require(&syn_path, "build-indices")?;
    let index = SyntacticIndex::load_checked(&syn_path, cfg.key_mode)?;
    let graphs = read_parses(input.unwrap_or(&cfg.parses))?;
    let found = extract_candidates(&index, &graphs);
    write_jsonl(output.unwrap_or(&ws.candidates()), &found)?;
    Ok(found.iter().map(|s| s.candidates.len()).sum())
}

/// One classified candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub sentence: usize,
    pub pattern_id: PatternId,
    pub source: NodeId,
    pub target: NodeId,
    pub source_text: String,
    pub target_text: String,
    pub label: String,
    pub score: Option<f64>,
}

pub fn classify_candidates(
    index: &SemanticIndex,
    sentences: &[SentenceCandidates],
    threshold: f64,
) -> Vec<PredictionRecord> {
    let text = |c: &CandidateMatch, id: NodeId| {
        c.subgraph
            .graph
            .node(id)
            .map(|n| n.text.clone())
            .unwrap_or_default()
    };
    sentences
        .iter()
        .flat_map(|s| {
            s.candidates.iter().map(move |c| {
                let p = index.classify(c, threshold);
                PredictionRecord {
                    sentence: s.sentence,
                    pattern_id: c.pattern_id,
                    source: c.subgraph.source,
                    target: c.subgraph.target,
                    source_text: text(c, c.subgraph.source),
                    target_text: text(c, c.subgraph.target),
                    label: p.label,
                    score: p.score,
                }
            })
        })
        .collect()
}

/// Classifies extracted candidates with the weak index. `threshold`
/// defaults to the configured semantic threshold.
pub fn classify(
    cfg: &PipelineConfig,
    threshold: Option<f64>,
    input: Option<&Path>,
    output: Option<&Path>,
) -> Result<usize> {
    let ws = Workspace::new(&cfg.work_dir);
    let threshold = threshold.unwrap_or(cfg.semantic_threshold);
    if !(0.0..=1.0).contains(&threshold) {
        return Err(PipelineError::Config(format!(
            "threshold must lie in [0, 1], got {threshold}"
        )));
    }
    let sem_path = ws.semantic_index(WEAK);
    require(&sem_path, "build-indices")?;
    let index = SemanticIndex::load_checked(&sem_path, cfg.key_mode)?;
    let sentences: Vec<SentenceCandidates> =
        read_input(input.unwrap_or(&ws.candidates()), "extract")?;
    let predictions = classify_candidates(&index, &sentences, threshold);
    write_jsonl(output.unwrap_or(&ws.predictions()), &predictions)?;
    Ok(predictions.iter().filter(|p| p.label != OTHER).count())
}

/// Gold label of an evaluation sample.
pub fn gold_label(p: &LabeledPattern) -> String {
    p.labels.iter().cloned().collect::<Vec<_>>().join("|")
}

/// Scores samples as the index would see their gold subgraphs.
pub fn simulated_samples(
    syntactic: &SyntacticIndex,
    semantic: &SemanticIndex,
    patterns: &[LabeledPattern],
) -> Vec<ScoredSample> {
    patterns
        .par_iter()
        .map(|p| ScoredSample {
            id: p.instance.clone(),
            gold: gold_label(p),
            outcome: score_sample(syntactic, semantic, &p.pattern.graph, None),
        })
        .collect()
}

/// Scores samples over their full sentence parse, keeping only candidates
/// that cover both arguments of relation samples.
pub fn end_to_end_samples(
    syntactic: &SyntacticIndex,
    semantic: &SemanticIndex,
    patterns: &[LabeledPattern],
    sentence_graphs: &HashMap<String, DependencyGraph>,
) -> Vec<ScoredSample> {
    patterns
        .par_iter()
        .map(|p| {
            let text = p.pattern.graph.sentence_text();
            let graph = sentence_graphs.get(text).unwrap_or(&p.pattern.graph);
            let args = (!p.is_other()).then_some((p.pattern.source, p.pattern.target));
            ScoredSample {
                id: p.instance.clone(),
                gold: gold_label(p),
                outcome: score_sample(syntactic, semantic, graph, args),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluateSummary {
    pub rows: Vec<(String, MetricsRow)>,
    pub taxonomy: BTreeMap<String, BTreeMap<String, Taxonomy>>,
}

/// Sweeps thresholds over dev and test for every index/dataset variant pair,
/// in simulated and end-to-end modes, and counts errors at the configured
/// threshold.
pub fn evaluate(cfg: &PipelineConfig) -> Result<EvaluateSummary> {
    let ws = Workspace::new(&cfg.work_dir);
    let variants = variants(cfg);
    let sentence_graphs = graphs_by_text(read_parses(&cfg.parses)?);
    let mut datasets: Vec<(String, Vec<LabeledPattern>)> = Vec::new();
    for split in ["dev", "test"] {
        for v in &variants {
            let set = read_input(&ws.split(v, split), "build-dataset")?;
            datasets.push((format!("{v}_{split}"), set));
        }
    }

    let mut simulated_rows = Vec::new();
    let mut e2e_rows = Vec::new();
    let mut taxonomy: BTreeMap<String, BTreeMap<String, Taxonomy>> = BTreeMap::new();
    let mut labelled_rows = Vec::new();
    for index_variant in &variants {
        let (syntactic, semantic) = load_indices(cfg, index_variant)?;
        for (dataset, patterns) in &datasets {
            let column = format!("{index_variant}-index/{dataset}");
            let sim = simulated_samples(&syntactic, &semantic, patterns);
            let e2e = end_to_end_samples(&syntactic, &semantic, patterns, &sentence_graphs);
            write_jsonl(
                &ws.samples(&format!("{index_variant}_simulated"), dataset),
                &sim,
            )?;
            write_jsonl(
                &ws.samples(&format!("{index_variant}_end_to_end"), dataset),
                &e2e,
            )?;
            if sim.is_empty() {
                log::warn!("{dataset} is empty; skipped");
                continue;
            }
            let rows = threshold_sweep(&column, &sim, &cfg.thresholds, cfg.averaging)?;
            labelled_rows.extend(rows.iter().cloned().map(|r| (column.clone(), r)));
            simulated_rows.extend(rows);
            e2e_rows.extend(threshold_sweep(
                &column,
                &e2e,
                &cfg.thresholds,
                cfg.averaging,
            )?);

            let records = records_at(&sim, cfg.semantic_threshold);
            write_jsonl(&ws.records(index_variant, dataset), &records)?;
            taxonomy
                .entry(format!("{index_variant}-index"))
                .or_default()
                .insert(dataset.clone(), error_taxonomy(&records)?);
        }
    }
    write_text(&ws.metrics(), &metrics_tsv(&simulated_rows))?;
    write_text(&ws.metrics_end_to_end(), &metrics_tsv(&e2e_rows))?;
    write_json(&ws.taxonomy(), &taxonomy)?;
    Ok(EvaluateSummary {
        rows: labelled_rows,
        taxonomy,
    })
}

fn label_display(label: &str) -> String {
    label
        .split('|')
        .map(|l| property_name(l).unwrap_or(l))
        .collect::<Vec<_>>()
        .join("|")
}

/// Label distribution per split, one column per (variant, split).
pub fn label_table(columns: &[(String, Vec<LabeledPattern>)]) -> String {
    let mut counts: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, (_, set)) in columns.iter().enumerate() {
        for p in set {
            counts
                .entry(gold_label(p))
                .or_insert_with(|| vec![0; columns.len()])[i] += 1;
        }
    }
    let mut rows: Vec<(String, Vec<usize>)> = counts.into_iter().collect();
    // Other last, like a negative class
    rows.sort_by_key(|(l, _)| (l == OTHER, l.clone()));
    let mut out = String::from("label");
    for (name, _) in columns {
        let _ = write!(out, "\t{name}");
    }
    out.push('\n');
    for (label, c) in &rows {
        out.push_str(&label_display(label));
        for n in c {
            let _ = write!(out, "\t{n}");
        }
        out.push('\n');
    }
    out.push_str("Total");
    for (_, set) in columns {
        let _ = write!(out, "\t{}", set.len());
    }
    out.push('\n');
    out
}

pub fn syntactic_table(indices: &[(String, SyntacticIndex)]) -> String {
    let mut out = String::from("statistic");
    for (name, _) in indices {
        let _ = write!(out, "\t{name}");
    }
    out.push('\n');
    type Getter = fn(&SyntacticIndex) -> String;
    let rows: [(&str, Getter); 4] = [
        ("unique_anchors", |i| i.stats.unique_anchors.to_string()),
        ("unique_patterns", |i| i.stats.unique_patterns.to_string()),
        ("ambiguous_patterns", |i| {
            i.stats.ambiguous_patterns.to_string()
        }),
        ("mean_patterns_per_anchor", |i| {
            format!("{:.2}", i.stats.mean_patterns_per_anchor)
        }),
    ];
    for (name, get) in rows {
        out.push_str(name);
        for (_, idx) in indices {
            let _ = write!(out, "\t{}", get(idx));
        }
        out.push('\n');
    }
    out
}

pub fn semantic_table(indices: &[(String, SemanticIndex)]) -> String {
    let mut out = String::from("statistic");
    for (name, _) in indices {
        let _ = write!(out, "\t{name}");
    }
    out.push_str("\nunique_words");
    for (_, idx) in indices {
        let _ = write!(out, "\t{}", idx.words.len());
    }
    out.push('\n');
    out
}

/// Word rows of a semantic index, properties as columns.
pub fn semantic_weights_table(index: &SemanticIndex) -> String {
    let mut out = String::from("word");
    for p in &index.properties {
        let _ = write!(out, "\t{}", label_display(p));
    }
    out.push('\n');
    for (w, row) in index.words.iter().zip(&index.weights) {
        out.push_str(w.as_str());
        for x in row {
            let _ = write!(out, "\t{x:.3}");
        }
        out.push('\n');
    }
    out
}

pub fn discard_table(log: &DiscardLog) -> String {
    let mut out = format!(
        "reason\tcount\nattempted\t{}\nemitted\t{}\n",
        log.attempted, log.emitted
    );
    for (reason, n) in &log.counts {
        let _ = writeln!(out, "{reason}\t{n}");
    }
    out
}

/// Writes the dataset and index summaries; returns the written paths.
pub fn stats(cfg: &PipelineConfig) -> Result<Vec<PathBuf>> {
    let ws = Workspace::new(&cfg.work_dir);
    let mut written = Vec::new();
    let mut columns = Vec::new();
    for v in variants(cfg) {
        for split in SPLITS {
            let set: Vec<LabeledPattern> = read_input(&ws.split(v, split), "build-dataset")?;
            columns.push((format!("{v}_{split}"), set));
        }
    }
    let path = ws.stats("labels");
    write_text(&path, &label_table(&columns))?;
    written.push(path);

    require(&ws.discards(), "build-dataset")?;
    let log: DiscardLog = read_json(&ws.discards())?;
    let path = ws.stats("discards");
    write_text(&path, &discard_table(&log))?;
    written.push(path);

    if ws.syntactic_index(WEAK).exists() {
        let mut syn = Vec::new();
        let mut sem = Vec::new();
        for v in variants(cfg) {
            let (s, m) = load_indices(cfg, v)?;
            syn.push((v.to_string(), s));
            sem.push((v.to_string(), m));
        }
        for (name, text) in [
            ("syntactic_index", syntactic_table(&syn)),
            ("semantic_index", semantic_table(&sem)),
        ] {
            let path = ws.stats(name);
            write_text(&path, &text)?;
            written.push(path);
        }
        for (v, m) in &sem {
            let path = ws.stats(&format!("semantic_weights_{v}"));
            write_text(&path, &semantic_weights_table(m))?;
            written.push(path);
        }
    }
    Ok(written)
}

/// Every stage after ingestion, in order.
pub fn run_offline_stages(cfg: &PipelineConfig) -> Result<()> {
    annotate(cfg)?;
    build_dataset(cfg)?;
    build_indices(cfg)?;
    extract(cfg, None, None)?;
    classify(cfg, None, None, None)?;
    evaluate(cfg)?;
    stats(cfg)?;
    Ok(())
}

/// The whole pipeline from the item list.
pub fn run_all(cfg: &PipelineConfig, client: &KnowledgeBaseClient) -> Result<()> {
    ingest(cfg, client)?;
    run_offline_stages(cfg)
}
