mod common;

use std::collections::BTreeSet;
use std::fs;

use relpat::graph::{parse_conllu, write_conllu, KeyMode};
use relpat::ingest::{SentenceRecord, StatementTriple};
use relpat::io::{read_json, read_jsonl, write_jsonl};
use relpat::pipeline::{self, PipelineError, PredictionRecord, Workspace, REVIEWED, SPLITS, WEAK};
use relpat::supervision::{DiscardLog, LabeledPattern, ReviewEntry, Verdict, OTHER};
use relpat::syntactic::IndexError;
use tempfile::TempDir;

#[test]
fn stages_account_for_every_instance() {
    let dir = TempDir::new().unwrap();
    let cfg = common::run_fixture(dir.path());
    let ws = Workspace::new(&cfg.work_dir);

    let sentences: Vec<SentenceRecord> = read_jsonl(&ws.sentences()).unwrap();
    assert_eq!(sentences.len(), 90);
    assert_eq!(sentences[0].text, "Jean Dupont est un peintre français.");
    assert!(sentences.iter().all(|s| !s.text.contains('(')));

    let statements: Vec<StatementTriple> = read_jsonl(&ws.statements()).unwrap();
    assert!(statements
        .iter()
        .all(|s| cfg.properties.contains(&s.property)));
    let morel_death = statements
        .iter()
        .any(|s| s.source == ["Jean Morel"] && s.property == "P570");
    assert!(!morel_death, "unknown values yield no statement");

    let log: DiscardLog = read_json(&ws.discards()).unwrap();
    let patterns: Vec<LabeledPattern> = read_jsonl(&ws.patterns()).unwrap();
    assert_eq!(log.attempted, log.emitted + log.discarded());
    assert_eq!(log.emitted, patterns.len());
    assert_eq!(log.entries.len(), 1);
    assert_eq!(log.entries[0].instance, "Marie Dubois#3#0");

    let mut total = 0;
    for split in SPLITS {
        let part: Vec<LabeledPattern> = read_jsonl(&ws.split(WEAK, split)).unwrap();
        if split == "train" {
            assert!(part.iter().all(|p| !p.is_other()));
        }
        total += part.len();
    }
    assert_eq!(total, patterns.len());

    let alias = patterns
        .iter()
        .filter(|p| p.instance.starts_with("Marie Curval#1#"))
        .map(|p| p.labels.iter().cloned().collect::<Vec<_>>())
        .collect::<Vec<_>>();
    assert_eq!(alias, [["P19"], ["P69"]]);

    for name in ["labels", "discards", "syntactic_index", "semantic_index"] {
        assert!(ws.stats(name).exists(), "{name}");
    }
    let labels = fs::read_to_string(ws.stats("labels")).unwrap();
    assert!(labels.starts_with("label\tweak_train\tweak_dev\tweak_test\n"));
}

#[test]
fn missing_inputs_name_the_producing_stage() {
    let dir = TempDir::new().unwrap();
    let cfg = common::fixture_config(dir.path());

    let err = pipeline::build_indices(&cfg).unwrap_err();
    assert!(matches!(err, PipelineError::MissingInput { .. }));
    assert!(
        err.to_string().contains("run `relpat build-dataset` first"),
        "{err}"
    );
    assert_eq!(err.exit_code(), 1);

    let err = pipeline::annotate(&cfg).unwrap_err();
    assert!(
        err.to_string().contains("run `relpat ingest` first"),
        "{err}"
    );

    let mut no_parses = cfg.clone();
    no_parses.parses = dir.path().join("absent.conllu");
    let err = pipeline::extract(&no_parses, None, None).unwrap_err();
    assert!(err.to_string().contains("build-indices"), "{err}");
}

#[test]
fn indices_built_under_another_key_mode_are_refused() {
    let dir = TempDir::new().unwrap();
    let mut cfg = common::run_fixture(dir.path());
    cfg.key_mode = KeyMode::Surface;
    for err in [
        pipeline::evaluate(&cfg).map(|_| ()).unwrap_err(),
        pipeline::extract(&cfg, None, None).map(|_| ()).unwrap_err(),
        pipeline::classify(&cfg, None, None, None)
            .map(|_| ())
            .unwrap_err(),
    ] {
        assert!(
            matches!(err, PipelineError::Index(IndexError::KeyMode { .. })),
            "{err}"
        );
        assert_eq!(err.exit_code(), 1);
    }
}

#[test]
fn reviewed_variant_drops_rejected_instances() {
    let dir = TempDir::new().unwrap();
    let mut cfg = common::run_fixture(dir.path());
    let ws = Workspace::new(&cfg.work_dir);

    // the birth place co-occurs with the death date in this sentence
    let noisy = "Jean Rivière#4#0";
    let mut review: Vec<ReviewEntry> = read_jsonl(&ws.review_template()).unwrap();
    let entry = review.iter().find(|r| r.instance == noisy).unwrap();
    assert_eq!(entry.labels.iter().collect::<Vec<_>>(), ["P19"]);
    for r in &mut review {
        r.verdict = Some(if r.instance == noisy {
            Verdict::Drop
        } else {
            Verdict::Keep
        });
    }
    let review_path = dir.path().join("verdicts.jsonl");
    write_jsonl(&review_path, &review).unwrap();
    cfg.review = Some(review_path);

    let summary = pipeline::build_dataset(&cfg).unwrap();
    let variants: BTreeSet<&str> = summary.split_sizes.keys().map(|v| v.as_str()).collect();
    assert_eq!(variants, BTreeSet::from([WEAK, REVIEWED]));
    let count = |variant: &str| -> usize {
        SPLITS
            .iter()
            .map(|s| {
                read_jsonl::<LabeledPattern>(&ws.split(variant, s))
                    .unwrap()
                    .len()
            })
            .sum()
    };
    assert_eq!(count(REVIEWED) + 1, count(WEAK));
    for split in SPLITS {
        let part: Vec<LabeledPattern> = read_jsonl(&ws.split(REVIEWED, split)).unwrap();
        assert!(part.iter().all(|p| p.instance != noisy));
    }

    pipeline::build_indices(&cfg).unwrap();
    let eval = pipeline::evaluate(&cfg).unwrap();
    let columns: BTreeSet<&str> = eval.rows.iter().map(|(c, _)| c.as_str()).collect();
    assert_eq!(columns.len(), 8);
    assert!(columns.contains("reviewed-index/weak_test"));
    assert!(columns.contains("weak-index/reviewed_dev"));
    assert!(eval.taxonomy.contains_key("reviewed-index"));
}

#[test]
fn parses_round_trip_and_cover_the_sentences() {
    let dir = TempDir::new().unwrap();
    let cfg = common::run_fixture(dir.path());
    let ws = Workspace::new(&cfg.work_dir);
    let graphs = pipeline::read_parses(&cfg.parses).unwrap();

    let mut buf = Vec::new();
    write_conllu(&mut buf, &graphs).unwrap();
    assert_eq!(parse_conllu(buf.as_slice()).unwrap(), graphs);

    let sentences: Vec<SentenceRecord> = read_jsonl(&ws.sentences()).unwrap();
    let texts: Vec<&str> = sentences.iter().map(|s| s.text.as_str()).collect();
    let parsed: Vec<&str> = graphs.iter().map(|g| g.sentence_text()).collect();
    let mut expected = texts.clone();
    expected.retain(|t| *t != "Marie Dubois est morte le 12 juin 1950.");
    assert_eq!(parsed, expected, "one block per sentence, in order");
}

#[test]
fn extraction_applies_to_unseen_sentences() {
    let dir = TempDir::new().unwrap();
    let cfg = common::run_fixture(dir.path());
    let input = dir.path().join("new.conllu");
    fs::write(
        &input,
        "# text = Jean Petit est né à Lyon.\n\
         1\tJean\tJean\tPROPN\t_\t_\t4\tnsubj\t_\t_\n\
         2\tPetit\tPetit\tPROPN\t_\t_\t1\tflat:name\t_\t_\n\
         3\test\têtre\tAUX\t_\t_\t4\taux:tense\t_\t_\n\
         4\tné\tnaître\tVERB\t_\t_\t0\troot\t_\t_\n\
         5\tà\tà\tADP\t_\t_\t6\tcase\t_\t_\n\
         6\tLyon\tLyon\tPROPN\t_\t_\t4\tobl:arg\t_\tSpaceAfter=No\n\
         7\t.\t.\tPUNCT\t_\t_\t4\tpunct\t_\t_\n\n\
         # text = Il pleut.\n\
         1\tIl\til\tPRON\t_\t_\t2\texpl\t_\t_\n\
         2\tpleut\tpleuvoir\tVERB\t_\t_\t0\troot\t_\tSpaceAfter=No\n\
         3\t.\t.\tPUNCT\t_\t_\t2\tpunct\t_\t_\n",
    )
    .unwrap();
    let candidates = dir.path().join("new_candidates.jsonl");
    let predictions = dir.path().join("new_predictions.jsonl");
    assert_eq!(
        pipeline::extract(&cfg, Some(&input), Some(&candidates)).unwrap(),
        1
    );
    assert_eq!(
        pipeline::classify(&cfg, Some(0.0), Some(&candidates), Some(&predictions)).unwrap(),
        1
    );
    let out: Vec<PredictionRecord> = read_jsonl(&predictions).unwrap();
    assert_eq!(out.len(), 1);
    assert_eq!(
        (
            out[0].source_text.as_str(),
            out[0].target_text.as_str(),
            out[0].label.as_str()
        ),
        ("Jean", "Lyon", "P19")
    );
    pipeline::classify(&cfg, Some(1.0), Some(&candidates), Some(&predictions)).unwrap();
    let out: Vec<PredictionRecord> = read_jsonl(&predictions).unwrap();
    assert_eq!(out[0].label, OTHER);
}
