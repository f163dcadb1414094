//! `semcoord` — corpus-to-report pipeline for measuring semantic shift
//! along coordinate-word axes.
//!
//! Every analysis subcommand accepts the same configuration surface: an
//! optional TOML config file (keys mirror the field names) plus flags that
//! override individual fields. Exit codes: 0 success, 2 invalid
//! configuration or input, 3 failure while processing.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use semcoord::coordinates::{triples_csv, TargetCoordinate};
use semcoord::discovery::changing_neighbor_candidates;
use semcoord::pipeline::{
    ablate_acceptance, ablate_slicing, align_only, ingest_only, run_pipeline, train_only,
    AlignmentMode, RunConfig, RunOutcome,
};
use semcoord::synth::{demo_corpus, drift_corpus, write_corpus, DriftCorpusConfig};
use semcoord::trainer::Architecture;
use semcoord::{Error, Result};

#[derive(Parser)]
#[command(
    name = "semcoord",
    version,
    about = "Track how words drift along semantic coordinate axes over time",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Read, slice, and persist the corpus; print per-slice statistics.
    Ingest(ConfigArgs),
    /// Train all (slice, seed) and base embeddings into the artifact cache.
    Train(ConfigArgs),
    /// Train plus fit all slice-to-base projections; print residuals.
    Align(ConfigArgs),
    /// Full run, then print the trend table.
    Analyze(ConfigArgs),
    /// List frequent words whose neighborhoods change across slices.
    Discover {
        #[command(flatten)]
        config: ConfigArgs,
        /// Candidate pool: this many most-frequent base words.
        #[arg(long, default_value_t = 1000)]
        pool: usize,
        /// Neighborhood size for the change test.
        #[arg(long, default_value_t = 10)]
        k: usize,
    },
    /// Compare neighbor-stability of target words vs coordinate words.
    Stability(ConfigArgs),
    /// Re-run trends under alternative slicing schemes and report how many
    /// shift directions survive.
    AblateSlicing {
        #[command(flatten)]
        config: ConfigArgs,
        /// Alternative scheme (repeatable), e.g. --alt-scheme 2-year.
        #[arg(long = "alt-scheme", default_values_t = [String::from("2-year"), String::from("3-year")])]
        alt_schemes: Vec<String>,
    },
    /// Split the corpus by acceptance flag and run paired tests on the
    /// coordinate measurements of the two halves.
    AblateAcceptance(ConfigArgs),
    /// Regenerate plots; add 2-D projection plots for chosen triples.
    Plot {
        #[command(flatten)]
        config: ConfigArgs,
        /// Triple to project, as target,c1,c2 (repeatable).
        #[arg(long = "pca")]
        pca: Vec<String>,
    },
    /// Full pipeline: ingest, train, align, trends, stability, reports,
    /// plots.
    Run(ConfigArgs),
    /// Generate a synthetic corpus with planted drift for testing and demos.
    Synth(SynthArgs),
}

/// Configuration flags shared by every analysis subcommand. Each flag
/// overrides the matching field of the TOML config file (or the default).
#[derive(Args, Clone)]
struct ConfigArgs {
    /// TOML config file; keys mirror these flag names.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Corpus manifest: id,year,accepted,path rows.
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// First year to analyze (default: earliest in the manifest).
    #[arg(long)]
    start_year: Option<i32>,
    /// Last year to analyze (default: latest in the manifest).
    #[arg(long)]
    end_year: Option<i32>,
    /// Slicing scheme: "1-year", "2-year", ... or explicit ranges like
    /// "2007-2010,2011-2013,2014-2016".
    #[arg(long)]
    scheme: Option<String>,
    /// Training seeds, comma-separated (e.g. 0,7,13,73).
    #[arg(long)]
    seeds: Option<String>,
    /// Anchor count for projection fitting.
    #[arg(long)]
    v_anchor: Option<usize>,
    /// Cosine clamp floor for the log-ratio measure.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Projection flavor: relaxed or orthogonal.
    #[arg(long)]
    alignment: Option<String>,
    /// Triples source: preset:bundled, preset:curated, preset:manual, or a
    /// CSV file path.
    #[arg(long)]
    triples: Option<String>,
    /// Stability neighborhood sizes, comma-separated (e.g. 5,10,20).
    #[arg(long)]
    k_values: Option<String>,
    /// Output directory for artifacts, reports, and plots.
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Concurrent training jobs (1 = fully sequential).
    #[arg(long)]
    workers: Option<usize>,
    /// Embedding dimension.
    #[arg(long)]
    dimension: Option<usize>,
    /// Context window half-width.
    #[arg(long)]
    window: Option<u32>,
    /// Negative samples per context pair.
    #[arg(long)]
    negatives: Option<u32>,
    /// Training epochs.
    #[arg(long)]
    epochs: Option<u32>,
    /// Minimum corpus frequency for a word to enter the vocabulary.
    #[arg(long)]
    min_count: Option<u32>,
    /// Initial learning rate.
    #[arg(long)]
    learning_rate: Option<f32>,
    /// Frequent-word subsampling threshold.
    #[arg(long)]
    subsample: Option<f32>,
    /// Architecture: skip-gram or cbow.
    #[arg(long)]
    architecture: Option<String>,
}

fn parse_list<T: FromStr>(text: &str, what: &str) -> Result<Vec<T>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| Error::Config(format!("bad {what} entry {s:?}")))
        })
        .collect()
}

impl ConfigArgs {
    fn build(&self) -> Result<RunConfig> {
        let mut config = match &self.config {
            Some(path) => RunConfig::from_toml_file(path)?,
            None => RunConfig::default(),
        };
        if let Some(v) = &self.manifest {
            config.manifest = v.clone();
        }
        if let Some(v) = self.start_year {
            config.start_year = Some(v);
        }
        if let Some(v) = self.end_year {
            config.end_year = Some(v);
        }
        if let Some(v) = &self.scheme {
            config.scheme = v.clone();
        }
        if let Some(v) = &self.seeds {
            config.seeds = parse_list(v, "seed")?;
        }
        if let Some(v) = self.v_anchor {
            config.v_anchor = v;
        }
        if let Some(v) = self.epsilon {
            config.epsilon = v;
        }
        if let Some(v) = &self.alignment {
            config.alignment = AlignmentMode::from_str(v)?;
        }
        if let Some(v) = &self.triples {
            config.triples = v.clone();
        }
        if let Some(v) = &self.k_values {
            config.k_values = parse_list(v, "K")?;
        }
        if let Some(v) = &self.output_dir {
            config.output_dir = v.clone();
        }
        if let Some(v) = self.workers {
            config.workers = v;
        }
        if let Some(v) = self.dimension {
            config.training.dimension = v;
        }
        if let Some(v) = self.window {
            config.training.window = v;
        }
        if let Some(v) = self.negatives {
            config.training.negatives = v;
        }
        if let Some(v) = self.epochs {
            config.training.epochs = v;
        }
        if let Some(v) = self.min_count {
            config.training.min_count = v;
        }
        if let Some(v) = self.learning_rate {
            config.training.learning_rate = v;
        }
        if let Some(v) = self.subsample {
            config.training.subsample = v;
        }
        if let Some(v) = &self.architecture {
            config.training.architecture = Architecture::from_str(v)?;
        }
        Ok(config)
    }
}

#[derive(Args)]
struct SynthArgs {
    /// Corpus flavor: "demo" (bundled preset words, fixed shape) or "drift"
    /// (configurable planted-drift corpus).
    #[arg(long, default_value = "demo")]
    kind: String,
    /// Generator seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory to write docs/, manifest.csv, and triples.csv into.
    #[arg(long)]
    out: PathBuf,
    /// First corpus year (drift kind).
    #[arg(long, default_value_t = 2007)]
    start_year: i32,
    /// Number of one-year slices (drift kind).
    #[arg(long, default_value_t = 10)]
    slices: usize,
    /// Planted drifting words (drift kind).
    #[arg(long, default_value_t = 1)]
    drift: usize,
    /// Planted stationary words (drift kind).
    #[arg(long, default_value_t = 0)]
    stationary: usize,
    /// Words per context community (drift kind).
    #[arg(long, default_value_t = 10)]
    community_size: usize,
    /// Approximate tokens per slice (drift kind).
    #[arg(long, default_value_t = 200_000)]
    tokens_per_slice: usize,
    /// Documents per slice (drift kind).
    #[arg(long, default_value_t = 20)]
    docs_per_slice: usize,
    /// Omit acceptance flags from the manifest (drift kind).
    #[arg(long)]
    no_acceptance_flags: bool,
}

fn synth(args: &SynthArgs) -> Result<()> {
    let (documents, triples) = match args.kind.as_str() {
        "demo" => demo_corpus(args.seed),
        "drift" => {
            let config = DriftCorpusConfig {
                seed: args.seed,
                start_year: args.start_year,
                n_slices: args.slices,
                n_drift: args.drift,
                n_stationary: args.stationary,
                community_size: args.community_size,
                tokens_per_slice: args.tokens_per_slice,
                docs_per_slice: args.docs_per_slice,
                acceptance_flags: !args.no_acceptance_flags,
                ..DriftCorpusConfig::default()
            };
            let (documents, planted) = drift_corpus(&config);
            (documents, planted.triples())
        }
        other => {
            return Err(Error::Config(format!(
                "unknown corpus kind {other:?} (expected demo or drift)"
            )))
        }
    };
    let manifest = write_corpus(&args.out, &documents)?;
    let triples_path = args.out.join("triples.csv");
    std::fs::write(&triples_path, triples_csv(&triples))
        .map_err(|e| Error::io(&triples_path, e))?;
    let tokens: usize = documents
        .iter()
        .map(|d| d.body.split_whitespace().count())
        .sum();
    println!("documents: {} ({tokens} tokens)", documents.len());
    println!("manifest: {}", manifest.display());
    println!("triples: {} ({} planted)", triples_path.display(), triples.len());
    Ok(())
}

fn print_run(outcome: &RunOutcome) {
    println!("config hash: {}", &outcome.config_hash[..16]);
    println!(
        "embeddings: {} trained, {} reused",
        outcome.artifacts_trained, outcome.artifacts_reused
    );
    println!(
        "triples: {} usable, {} unusable",
        outcome.usable.len(),
        outcome.unusable.len()
    );
    for (triple, reason) in &outcome.unusable {
        println!("  skipped {}: {reason}", triple.describe());
    }
    for path in &outcome.report_paths {
        println!("report: {}", path.display());
    }
    println!("summary: {}", outcome.summary_path.display());
    println!("plots: {} files", outcome.plot_paths.len());
}

/// Parse a "target,c1,c2" flag value against the run's usable triples.
fn find_triple(outcome: &RunOutcome, spec: &str) -> Result<TargetCoordinate> {
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(Error::Config(format!(
            "bad triple {spec:?} (expected target,c1,c2)"
        )));
    }
    outcome
        .usable
        .iter()
        .find(|t| t.target == parts[0] && t.c1 == parts[1] && t.c2 == parts[2])
        .cloned()
        .ok_or_else(|| {
            Error::Config(format!("triple {spec:?} was not analyzed in this run"))
        })
}

fn real_main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Ingest(args) => {
            let report = ingest_only(&args.build()?)?;
            println!("corpus digest: {}", &report.corpus_digest[..16]);
            println!(
                "documents: {} ({} outside range dropped)",
                report.documents, report.dropped
            );
            println!("scheme: {} ({} slices)", report.scheme.describe(), report.slices.len());
            for (label, docs, tokens) in &report.slices {
                println!("  {label}: {docs} documents, {tokens} tokens");
            }
            println!("slices: {}", report.slices_dir.display());
        }
        Command::Train(args) => {
            let report = train_only(&args.build()?)?;
            println!(
                "embeddings: {} trained, {} reused",
                report.trained, report.reused
            );
            println!("artifacts: {}", report.artifacts_dir.display());
        }
        Command::Align(args) => {
            let report = align_only(&args.build()?)?;
            println!(
                "embeddings: {} trained, {} reused; projections: {}",
                report.trained, report.reused, report.projections
            );
            for (label, residual) in &report.first_seed_residuals {
                println!("  residual {label}: {residual:.8e}");
            }
            println!("artifacts: {}", report.artifacts_dir.display());
        }
        Command::Analyze(args) => {
            let outcome = run_pipeline(&args.build()?)?;
            println!("target,c1,c2,category,slope_mean,slope_std,direction,stable,clamps");
            for record in &outcome.records {
                let fit = &record.fit;
                println!(
                    "{},{:.6},{:.6},{},{},{}",
                    record.triple, fit.slope_mean, fit.slope_std, fit.direction, fit.stable,
                    record.clamp_count
                );
            }
            for (triple, reason) in &outcome.unusable {
                println!("# skipped {}: {reason}", triple.describe());
            }
        }
        Command::Discover { config, pool, k } => {
            let outcome = run_pipeline(&config.build()?)?;
            let candidates =
                changing_neighbor_candidates(outcome.raw_slices(), outcome.base_embedding(), pool, k)?;
            let path = outcome
                .summary_path
                .parent()
                .unwrap()
                .join("candidates.csv");
            let mut csv = String::from("word\n");
            for word in &candidates {
                csv.push_str(word);
                csv.push('\n');
            }
            std::fs::write(&path, csv).map_err(|e| Error::io(&path, e))?;
            println!(
                "candidates: {} of {pool} pool words change top-{k} neighbors",
                candidates.len()
            );
            println!("report: {}", path.display());
        }
        Command::Stability(args) => {
            let outcome = run_pipeline(&args.build()?)?;
            match &outcome.stability {
                Some(report) => {
                    println!("K,target_mean,coordinate_mean,p_value,method");
                    for s in &report.summaries {
                        println!(
                            "{},{:.4},{:.4},{:.6},{}",
                            s.k, s.target_mean, s.coordinate_mean, s.test.p_value, s.test.method
                        );
                    }
                }
                None => println!("stability comparison skipped (see summary)"),
            }
            println!("summary: {}", outcome.summary_path.display());
        }
        Command::AblateSlicing {
            config,
            alt_schemes,
        } => {
            let ablation = ablate_slicing(&config.build()?, &alt_schemes)?;
            println!("base scheme: {}", ablation.base_scheme);
            for c in &ablation.comparisons {
                let stable = match c.preservation.rate_excluding_unstable {
                    Some(rate) => format!("{rate:.4}"),
                    None => "n/a".into(),
                };
                println!(
                    "{}: preserved {}/{} ({:.4}); stable-only {}/{} ({stable}); excluded {}",
                    c.scheme,
                    c.preservation.agreeing,
                    c.preservation.compared,
                    c.preservation.rate,
                    c.preservation.stable_agreeing,
                    c.preservation.stable_compared,
                    c.excluded
                );
            }
            println!("report: {}", ablation.report_path.display());
        }
        Command::AblateAcceptance(args) => {
            let ablation = ablate_acceptance(&args.build()?)?;
            println!(
                "documents: {} accepted, {} not accepted; triples: {} used, {} skipped",
                ablation.accepted_documents,
                ablation.rejected_documents,
                ablation.triples_used,
                ablation.triples_skipped
            );
            for (name, test) in [
                ("cos(w,c1)", &ablation.cos_c1),
                ("cos(w,c2)", &ablation.cos_c2),
                ("log-ratio", &ablation.log_ratio),
            ] {
                println!(
                    "{name}: statistic {:.4}, p = {:.4} ({})",
                    test.statistic, test.p_value, test.method
                );
            }
            for path in &ablation.report_paths {
                println!("report: {}", path.display());
            }
        }
        Command::Plot { config, pca } => {
            let config = config.build()?;
            let outcome = run_pipeline(&config)?;
            println!("trajectory plots: {} files", outcome.plot_paths.len());
            for spec in &pca {
                let triple = find_triple(&outcome, spec)?;
                let svg = outcome.pca_svg(&triple)?;
                let path = config.output_dir.join("plots").join(format!(
                    "pca-{}-{}-{}.svg",
                    triple.target, triple.c1, triple.c2
                ));
                std::fs::write(&path, svg).map_err(|e| Error::io(&path, e))?;
                println!("pca plot: {}", path.display());
            }
        }
        Command::Run(args) => {
            let outcome = run_pipeline(&args.build()?)?;
            print_run(&outcome);
        }
        Command::Synth(args) => synth(&args)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    match real_main() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                ExitCode::from(2)
            } else {
                ExitCode::from(3)
            }
        }
    }
}
