//! Frozen-output regression tests.
//!
//! Each golden file under `tests/golden/` was produced once, checked by hand
//! (the LaTeX text against the fixture, the vocabulary against an
//! independent shell count, the trend signs against the planted drift
//! directions), and committed. A divergence means observable output changed.
//! After an intentional change, rerun with `UPDATE_GOLDENS=1` and review the
//! diff before committing the new files.

use std::fs;
use std::path::{Path, PathBuf};

use semcoord::coordinates::triples_csv;
use semcoord::corpus::{build_vocabulary, strip_latex, tokenize};
use semcoord::pipeline::{run_pipeline, AlignmentMode, RunConfig};
use semcoord::synth::{demo_corpus, write_corpus};
use semcoord::trainer::{Architecture, TrainingConfig};

fn golden_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

fn check_golden(name: &str, actual: &[u8]) {
    let path = golden_path(name);
    if std::env::var_os("UPDATE_GOLDENS").is_some() {
        fs::write(&path, actual).expect("write golden");
        return;
    }
    let expected = fs::read(&path).unwrap_or_else(|e| {
        panic!("missing golden {name} ({e}); create it with UPDATE_GOLDENS=1")
    });
    assert!(
        expected == actual,
        "{name} diverged from the frozen golden; if the change is intentional, \
         regenerate with UPDATE_GOLDENS=1 and review the diff"
    );
}

#[test]
fn latex_sample_strips_to_frozen_text() {
    let raw = fs::read_to_string(golden_path("latex_sample.tex")).expect("fixture");
    check_golden("latex_sample.txt", strip_latex(&raw).as_bytes());
}

#[test]
fn demo_corpus_vocabulary_is_frozen() {
    let (documents, _) = demo_corpus(1);
    let tokens: Vec<String> = documents.iter().flat_map(|d| tokenize(&d.body)).collect();
    let vocab = build_vocabulary(tokens.iter().map(String::as_str), 3);
    let mut listing = String::new();
    for id in 0..vocab.len() as u32 {
        listing.push_str(&format!("{} {}\n", vocab.word(id), vocab.count(id)));
    }
    check_golden("demo_vocabulary.txt", listing.as_bytes());
}

/// One single-worker, single-seed run of the bundled demo corpus; the trend
/// report and one trajectory plot must reproduce the frozen bytes. Every
/// configuration field is spelled out so a changed default cannot silently
/// alter what this compares.
#[test]
fn demo_run_reports_are_frozen() {
    let dir = tempfile::tempdir().expect("tempdir");
    let (documents, triples) = demo_corpus(1);
    let manifest = write_corpus(dir.path(), &documents).expect("write corpus");
    let triples_path = dir.path().join("triples.csv");
    fs::write(&triples_path, triples_csv(&triples)).expect("write triples");

    let config = RunConfig {
        manifest,
        start_year: None,
        end_year: None,
        scheme: "1-year".into(),
        training: TrainingConfig {
            dimension: 16,
            min_count: 3,
            window: 3,
            negatives: 2,
            epochs: 1,
            learning_rate: 0.025,
            min_learning_rate: 1e-4,
            subsample: 1e-3,
            architecture: Architecture::SkipGram,
            seed: 0,
        },
        seeds: vec![0],
        v_anchor: 30,
        epsilon: 1e-6,
        alignment: AlignmentMode::Relaxed,
        triples: triples_path.display().to_string(),
        k_values: vec![3, 5],
        output_dir: dir.path().join("out"),
        workers: 1,
    };

    let outcome = run_pipeline(&config).expect("demo run");
    assert_eq!(outcome.usable.len(), 3, "all demo triples measurable");

    let trends = fs::read(config.output_dir.join("reports/trends.csv")).expect("trend report");
    check_golden("demo_trends.csv", &trends);

    let plot = fs::read(config.output_dir.join("plots/trajectory-novel-new-good.svg"))
        .expect("trajectory plot");
    check_golden("demo_trajectory.svg", &plot);
}
