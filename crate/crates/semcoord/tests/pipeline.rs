//! End-to-end runs over the bundled demo corpus: report completeness,
//! artifact reuse, byte-level reproducibility, and both ablations.

use std::fs;
use std::path::Path;

use semcoord::coordinates::{triples_csv, Category, TargetCoordinate};
use semcoord::pipeline::{ablate_acceptance, ablate_slicing, run_pipeline, RunConfig};
use semcoord::synth::{demo_corpus, drift_corpus, write_corpus, DriftCorpusConfig};
use semcoord::trainer::TrainingConfig;

/// A deliberately light training setup: enough signal for the fixture's
/// heavily planted drifts, small enough that a full run takes seconds.
fn light_training() -> TrainingConfig {
    TrainingConfig {
        dimension: 16,
        window: 3,
        negatives: 2,
        epochs: 1,
        min_count: 3,
        ..TrainingConfig::default()
    }
}

/// Demo corpus on disk plus a run config over a triples file listing
/// exactly the corpus's planted triples.
fn demo_setup(dir: &Path) -> (RunConfig, Vec<TargetCoordinate>) {
    let (documents, triples) = demo_corpus(1);
    let manifest = write_corpus(&dir.join("corpus"), &documents).unwrap();
    let triples_path = dir.join("triples.csv");
    fs::write(&triples_path, triples_csv(&triples)).unwrap();
    let config = RunConfig {
        manifest,
        training: light_training(),
        seeds: vec![0, 7],
        v_anchor: 30,
        triples: triples_path.to_string_lossy().into_owned(),
        k_values: vec![3, 5],
        output_dir: dir.join("out"),
        ..RunConfig::default()
    };
    (config, triples)
}

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn demo_run_produces_complete_reports() {
    let dir = tempfile::tempdir().unwrap();
    let (config, triples) = demo_setup(dir.path());
    let outcome = run_pipeline(&config).unwrap();

    assert_eq!(outcome.usable.len(), 3);
    assert!(outcome.unusable.is_empty(), "{:?}", outcome.unusable);
    assert_eq!(outcome.scheme.describe(), "2007,2008,2009,2010");

    // One trend row per triple, each tracing to exactly one triple.
    let trends = read(&outcome.report_paths[0]);
    let rows: Vec<&str> = trends.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    for triple in &triples {
        let prefix = format!("{},{},{},", triple.target, triple.c1, triple.c2);
        assert_eq!(
            rows.iter().filter(|r| r.starts_with(&prefix)).count(),
            1,
            "exactly one row for {prefix}"
        );
    }
    for record in &outcome.records {
        assert_eq!(record.fit.seed_slopes.len(), 2);
    }

    // Trajectories: triples x seeds x slices data rows.
    let trajectories = read(&outcome.report_paths[1]);
    assert_eq!(trajectories.lines().count(), 1 + 3 * 2 * 4);
    assert!(trajectories.starts_with("target,c1,c2,seed,slice,d_rel"));

    // Stability comparison ran and kept the populations disjoint.
    let stability = outcome.stability.as_ref().expect("stability report");
    assert_eq!(stability.summaries.len(), 2);
    let csv = read(&outcome.report_paths[2]);
    assert!(csv.contains("novel,target,3,"));
    assert!(csv.contains("# 3,"));

    // Plots: one deterministic SVG per usable triple.
    assert_eq!(outcome.plot_paths.len(), 3);
    for path in &outcome.plot_paths {
        let svg = read(path);
        assert!(svg.starts_with("<svg "), "{}", path.display());
        assert!(svg.contains("2007"));
    }

    let summary = read(&outcome.summary_path);
    assert!(summary.contains(&outcome.config_hash[..16]));
    assert!(summary.contains("usable=3 unusable=0"));
    assert!(summary.contains("scheme: 2007,2008,2009,2010 (4 slices)"));

    // PCA plot for an analyzed triple: 4 slice points + 2 coordinates.
    let svg = outcome.pca_svg(&triples[0]).unwrap();
    assert_eq!(svg.matches("<circle").count(), 6);

    // Unknown triple is a validation-class error.
    let stranger = TargetCoordinate::new("alpha", "beta", "gamma", Category::Unclassified).unwrap();
    assert!(outcome.pca_svg(&stranger).is_err());
}

#[test]
fn rerun_reuses_artifacts_and_reproduces_reports_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let (config, _) = demo_setup(dir.path());

    let first = run_pipeline(&config).unwrap();
    assert_eq!(first.artifacts_reused, 0);
    assert_eq!(first.artifacts_trained, 2 * (4 + 1));
    let mut snapshots = Vec::new();
    for path in first.report_paths.iter().chain(&first.plot_paths).chain([&first.summary_path]) {
        snapshots.push((path.clone(), read(path)));
    }

    let second = run_pipeline(&config).unwrap();
    assert_eq!(second.artifacts_trained, 0, "nothing retrains on rerun");
    assert_eq!(second.artifacts_reused, 2 * (4 + 1));
    assert_eq!(second.config_hash, first.config_hash);
    for (path, before) in &snapshots {
        assert_eq!(&read(path), before, "{} changed across reruns", path.display());
    }
}

#[test]
fn stale_artifacts_are_replaced_and_results_unchanged() {
    let dir = tempfile::tempdir().unwrap();
    let (config, _) = demo_setup(dir.path());
    let first = run_pipeline(&config).unwrap();
    let trends_before = read(&first.report_paths[0]);

    // Corrupt one cached embedding; the loader must reject and retrain it.
    let artifacts = config.output_dir.join("artifacts");
    let victim = fs::read_dir(&artifacts)
        .unwrap()
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .find(|p| p.file_name().unwrap().to_string_lossy().starts_with("emb-"))
        .expect("an embedding artifact exists");
    fs::write(&victim, "3 broken\n").unwrap();

    let second = run_pipeline(&config).unwrap();
    assert_eq!(second.artifacts_trained, 1);
    assert_eq!(second.artifacts_reused, 2 * (4 + 1) - 1);
    assert_eq!(read(&second.report_paths[0]), trends_before);
}

#[test]
fn unusable_triples_are_excluded_and_listed() {
    let dir = tempfile::tempdir().unwrap();
    let (mut config, mut triples) = demo_setup(dir.path());
    triples.push(
        TargetCoordinate::new("zzremarkable", "good", "new", Category::Unclassified).unwrap(),
    );
    let triples_path = dir.path().join("triples-extra.csv");
    fs::write(&triples_path, triples_csv(&triples)).unwrap();
    config.triples = triples_path.to_string_lossy().into_owned();

    let outcome = run_pipeline(&config).unwrap();
    assert_eq!(outcome.usable.len(), 3);
    assert_eq!(outcome.unusable.len(), 1);
    let (triple, reason) = &outcome.unusable[0];
    assert_eq!(triple.target, "zzremarkable");
    assert!(reason.contains("zzremarkable"), "{reason}");

    let trends = read(&outcome.report_paths[0]);
    assert!(!trends.contains("zzremarkable"));
    assert_eq!(trends.lines().count(), 4);
    let summary = read(&outcome.summary_path);
    assert!(summary.contains("usable=3 unusable=1"));
    assert!(summary.contains("zzremarkable"));
}

#[test]
fn slicing_ablation_against_itself_preserves_every_sign() {
    let dir = tempfile::tempdir().unwrap();
    let (config, _) = demo_setup(dir.path());
    let ablation = ablate_slicing(&config, &["1-year".into(), "2-year".into()]).unwrap();

    assert_eq!(ablation.base_scheme, "2007,2008,2009,2010");
    assert_eq!(ablation.comparisons.len(), 2);

    let same = &ablation.comparisons[0].preservation;
    assert_eq!(same.compared, 3);
    assert_eq!(same.rate, 1.0, "a scheme always agrees with itself");
    if same.stable_compared > 0 {
        assert_eq!(same.rate_excluding_unstable, Some(1.0));
    }

    let coarser = &ablation.comparisons[1];
    assert_eq!(coarser.scheme, "2007-2008,2009-2010");
    assert_eq!(coarser.preservation.compared, 3);

    let csv = read(&ablation.report_path);
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.starts_with("scheme,compared,agreeing,rate"));
    assert!(csv.contains("\n2007,2008,2009,2010,3,3,1.00000000e0,"));
}

#[test]
fn acceptance_ablation_pairs_every_triple_and_reports_three_tests() {
    let dir = tempfile::tempdir().unwrap();
    let (config, _) = demo_setup(dir.path());
    let ablation = ablate_acceptance(&config).unwrap();

    assert_eq!(ablation.accepted_documents, 24);
    assert_eq!(ablation.rejected_documents, 24);
    assert_eq!(ablation.triples_used, 3);
    assert_eq!(ablation.triples_skipped, 0);
    for test in [&ablation.cos_c1, &ablation.cos_c2, &ablation.log_ratio] {
        assert!(test.p_value > 0.0 && test.p_value <= 1.0);
    }

    let csv = read(&ablation.report_paths[0]);
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.contains("cos-c1,3,"));
    assert!(csv.contains("log-ratio,3,"));
    let pairs = read(&ablation.report_paths[1]);
    assert_eq!(pairs.lines().count(), 4);
    assert!(pairs.contains("novel,"));

    // Rerunning reuses the cached sub-corpus embeddings and reproduces the
    // report bytes.
    let again = ablate_acceptance(&config).unwrap();
    assert_eq!(again.log_ratio, ablation.log_ratio);
    assert_eq!(read(&again.report_paths[0]), csv);
}

#[test]
fn acceptance_ablation_requires_flags_on_every_document() {
    let dir = tempfile::tempdir().unwrap();
    let (documents, _) = drift_corpus(&DriftCorpusConfig {
        n_slices: 2,
        tokens_per_slice: 2_000,
        docs_per_slice: 4,
        acceptance_flags: false,
        ..DriftCorpusConfig::default()
    });
    let manifest = write_corpus(&dir.path().join("corpus"), &documents).unwrap();
    let config = RunConfig {
        manifest,
        training: light_training(),
        seeds: vec![0],
        v_anchor: 20,
        output_dir: dir.path().join("out"),
        ..RunConfig::default()
    };
    let err = ablate_acceptance(&config).unwrap_err();
    assert!(err.is_validation(), "{err}");
    assert!(err.to_string().contains("acceptance flag"), "{err}");
}

#[test]
fn year_range_restricts_the_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let (mut config, _) = demo_setup(dir.path());
    config.start_year = Some(2008);
    config.end_year = Some(2010);
    config.output_dir = dir.path().join("out-restricted");

    let outcome = run_pipeline(&config).unwrap();
    assert_eq!(outcome.scheme.describe(), "2008,2009,2010");
    let summary = read(&outcome.summary_path);
    assert!(summary.contains("documents: 36 in 2008-2010 (12 outside range dropped)"));
    let trajectories = read(&outcome.report_paths[1]);
    assert!(!trajectories.contains(",2007,"));
}
