//! End-to-end orchestration: manifest in, reports and plots out.
//!
//! A run walks the stage graph ingest → per-seed training (slices + base) →
//! alignment → trajectories → trends → seed aggregation → stability
//! comparison → reports → plots. Every trained embedding and fitted
//! projection persists under a content-addressed file name derived from the
//! corpus digest and the exact configuration, so reruns reuse artifacts
//! instead of retraining and a changed config can never pick up stale files.
//! Reports contain no timestamps and use fixed number formatting: the same
//! config on the same corpus produces byte-identical output.

mod config;

pub use config::{AlignmentMode, RunConfig};

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use sha2::{Digest, Sha256};

use crate::alignment::{
    apply_projection, fit_projection, fit_projection_orthogonal, select_anchors, ProjectionMap,
};
use crate::coordinates::{
    aggregate_seeds, coordinate_position, fit_trend, log_cosine_ratio, sign_preservation_rate,
    trend_report, SignPreservation, TargetCoordinate, TrajectoryPoint, TrajectorySeries,
    TrendFit, TrendRecord,
};
use crate::corpus::{
    build_slices, read_manifest, write_slice_files, DocumentRecord, SlicingScheme,
    TimeSlicedCorpus,
};
use crate::discovery::{compare_stability, StabilityReport};
use crate::numerics::{wilcoxon_signed_rank, TestResult};
use crate::plot::trajectory_svg;
use crate::trainer::{train_embedding, EmbeddingMatrix, Provenance, TrainingConfig};
use crate::{Error, Result};

/// Short hex prefix used in artifact file names; 48 bits is plenty for the
/// handful of artifacts a workstation accumulates.
const KEY_LEN: usize = 12;

fn short_hash(canonical: &str) -> String {
    let digest = Sha256::digest(canonical.as_bytes());
    crate::trainer::hex_string(&digest)[..KEY_LEN].to_string()
}

/// File-name-safe rendering of a scheme or word.
fn sanitize(text: &str) -> String {
    text.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' })
        .collect()
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

// ---------------------------------------------------------------------------
// Ingest
// ---------------------------------------------------------------------------

struct Ingested {
    corpus: TimeSlicedCorpus,
    scheme: SlicingScheme,
    /// Hash over the (year, id)-ordered document contents inside the year
    /// range; the identity of the corpus as this run sees it.
    corpus_digest: String,
    documents: usize,
    dropped: usize,
    year_range: (i32, i32),
}

fn digest_records(records: &[DocumentRecord]) -> String {
    let mut hasher = Sha256::new();
    for r in records {
        hasher.update(r.id.as_bytes());
        hasher.update([0u8]);
        hasher.update(r.year.to_le_bytes());
        hasher.update([match r.accepted {
            None => 2u8,
            Some(false) => 0,
            Some(true) => 1,
        }]);
        hasher.update((r.body.len() as u64).to_le_bytes());
        hasher.update(r.body.as_bytes());
    }
    crate::trainer::hex_string(&hasher.finalize())
}

fn ingest(config: &RunConfig) -> Result<Ingested> {
    let records = read_manifest(&config.manifest)?;
    if records.is_empty() {
        return Err(Error::Config(format!(
            "manifest {} lists no documents",
            config.manifest.display()
        )));
    }
    let min_year = records.iter().map(|r| r.year).min().unwrap();
    let max_year = records.iter().map(|r| r.year).max().unwrap();
    let start = config.start_year.unwrap_or(min_year);
    let end = config.end_year.unwrap_or(max_year);
    if start > end {
        return Err(Error::Config(format!(
            "year range {start}-{end} has start after end"
        )));
    }
    let total = records.len();
    let mut kept: Vec<DocumentRecord> = records
        .into_iter()
        .filter(|r| r.year >= start && r.year <= end)
        .collect();
    if kept.is_empty() {
        return Err(Error::Config(format!(
            "no documents fall inside the year range {start}-{end}"
        )));
    }
    kept.sort_by(|a, b| (a.year, &a.id).cmp(&(b.year, &b.id)));
    let corpus_digest = digest_records(&kept);

    let scheme = SlicingScheme::parse(&config.scheme, start, end)?;
    if scheme.len() < 2 {
        return Err(Error::Config(format!(
            "scheme {:?} produces a single slice; trends need at least two",
            config.scheme
        )));
    }
    let corpus = build_slices(&kept, &scheme)?;
    for slice in &corpus.slices {
        if slice.token_count() == 0 {
            return Err(Error::EmptySlice {
                slice: slice.label.clone(),
            });
        }
    }
    Ok(Ingested {
        documents: corpus.slices.iter().map(|s| s.documents.len()).sum(),
        dropped: total - kept.len(),
        corpus,
        scheme,
        corpus_digest,
        year_range: (start, end),
    })
}

// ---------------------------------------------------------------------------
// Artifact store and training
// ---------------------------------------------------------------------------

/// Content-addressed artifact directory: file names embed a hash of every
/// input that shaped the file, so a cache hit is always safe to reuse and a
/// config change simply misses.
struct ArtifactStore {
    dir: PathBuf,
}

impl ArtifactStore {
    fn open(output_dir: &Path) -> Result<ArtifactStore> {
        let dir = output_dir.join("artifacts");
        std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        Ok(ArtifactStore { dir })
    }

    fn embedding_path(&self, label: &str, key: &str) -> PathBuf {
        self.dir.join(format!("emb-{}-{key}.txt", sanitize(label)))
    }

    fn projection_path(&self, label: &str, key: &str) -> PathBuf {
        self.dir.join(format!("proj-{}-{key}.txt", sanitize(label)))
    }

    /// Load a cached embedding when present and shaped right; otherwise
    /// train and persist it. A stale or unreadable file is replaced.
    fn load_or_train(
        &self,
        path: &Path,
        docs: &[&[String]],
        training: &TrainingConfig,
        label: &str,
    ) -> Result<(EmbeddingMatrix, bool)> {
        if path.is_file() {
            if let Ok(emb) = EmbeddingMatrix::load_text(path) {
                if emb.dimension() == training.dimension {
                    let emb = emb.with_provenance(Provenance {
                        label: label.to_string(),
                        seed: training.seed,
                        config_hash: training.content_hash(),
                    });
                    return Ok((emb, true));
                }
            }
        }
        let emb = train_embedding(docs, training, label)?;
        emb.save_text(path)?;
        Ok((emb, false))
    }
}

struct TrainJob<'a> {
    seed: u64,
    /// None trains the base (all slices jointly).
    slice: Option<usize>,
    label: String,
    docs: Vec<&'a [String]>,
    path: PathBuf,
    training: TrainingConfig,
}

struct Trained {
    bases: BTreeMap<u64, EmbeddingMatrix>,
    slices: BTreeMap<u64, Vec<EmbeddingMatrix>>,
    trained: usize,
    reused: usize,
}

/// Run training jobs, inline for one worker or on a scoped thread pool
/// otherwise. Jobs are independent and internally seeded, so scheduling
/// cannot change any result; outputs are collected back in job order.
fn run_jobs(
    store: &ArtifactStore,
    jobs: &[TrainJob<'_>],
    workers: usize,
) -> Result<Vec<(EmbeddingMatrix, bool)>> {
    let execute = |job: &TrainJob<'_>| -> Result<(EmbeddingMatrix, bool)> {
        store.load_or_train(&job.path, &job.docs, &job.training, &job.label)
    };
    if workers <= 1 || jobs.len() <= 1 {
        return jobs.iter().map(execute).collect();
    }
    let results: Mutex<Vec<Option<Result<(EmbeddingMatrix, bool)>>>> =
        Mutex::new((0..jobs.len()).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..workers.min(jobs.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= jobs.len() {
                    break;
                }
                let outcome = execute(&jobs[i]);
                results.lock().unwrap()[i] = Some(outcome);
            });
        }
    });
    results
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every job ran"))
        .collect()
}

fn train_stage(
    config: &RunConfig,
    ingested: &Ingested,
    store: &ArtifactStore,
) -> Result<Trained> {
    let base_docs: Vec<&[String]> = ingested
        .corpus
        .documents_by_year_id()
        .into_iter()
        .map(|d| d.tokens.as_slice())
        .collect();
    let scheme_text = ingested.scheme.describe();

    let mut jobs = Vec::new();
    for &seed in &config.seeds {
        let training = config.training_for_seed(seed);
        let base_key = short_hash(&format!(
            "emb;corpus={};slice=base;training={}",
            ingested.corpus_digest,
            training.content_hash()
        ));
        let label = format!("base-s{seed}");
        jobs.push(TrainJob {
            seed,
            slice: None,
            path: store.embedding_path(&label, &base_key),
            label,
            docs: base_docs.clone(),
            training: training.clone(),
        });
        for (i, slice) in ingested.corpus.slices.iter().enumerate() {
            let key = short_hash(&format!(
                "emb;corpus={};scheme={};slice={};training={}",
                ingested.corpus_digest,
                scheme_text,
                slice.label,
                training.content_hash()
            ));
            let label = format!("{}-s{seed}", slice.label);
            jobs.push(TrainJob {
                seed,
                slice: Some(i),
                path: store.embedding_path(&label, &key),
                label: slice.label.clone(),
                docs: slice.token_streams(),
                training: training.clone(),
            });
        }
    }

    let results = run_jobs(store, &jobs, config.workers)?;
    let mut trained = Trained {
        bases: BTreeMap::new(),
        slices: BTreeMap::new(),
        trained: 0,
        reused: 0,
    };
    for (job, (emb, reused)) in jobs.iter().zip(results) {
        if reused {
            trained.reused += 1;
        } else {
            trained.trained += 1;
        }
        match job.slice {
            None => {
                trained.bases.insert(job.seed, emb);
            }
            Some(_) => trained.slices.entry(job.seed).or_default().push(emb),
        }
    }
    Ok(trained)
}

// ---------------------------------------------------------------------------
// Alignment
// ---------------------------------------------------------------------------

struct Aligned {
    per_seed: BTreeMap<u64, Vec<EmbeddingMatrix>>,
    /// (slice label, residual) for the first configured seed, for the
    /// summary. Residuals print at 9 significant digits, which is also the
    /// on-disk precision, so cached and fresh fits render identically.
    first_seed_residuals: Vec<(String, f64)>,
    projections: usize,
}

fn fit_or_load_projection(
    store: &ArtifactStore,
    slice: &EmbeddingMatrix,
    base: &EmbeddingMatrix,
    config: &RunConfig,
) -> Result<ProjectionMap> {
    let key = short_hash(&format!(
        "proj;slice={};base={};v_anchor={};mode={}",
        slice.provenance.config_hash.clone() + &slice.provenance.label,
        base.provenance.config_hash.clone() + &base.provenance.label,
        config.v_anchor,
        config.alignment,
    ));
    let label = format!("{}-s{}-{}", slice.provenance.label, slice.provenance.seed, config.alignment);
    let path = store.projection_path(&label, &key);
    if path.is_file() {
        if let Ok(map) = ProjectionMap::load_text(&path) {
            if map.dimension() == slice.dimension() {
                return Ok(map);
            }
        }
    }
    let anchors = select_anchors(slice, base, config.v_anchor)?;
    let map = match config.alignment {
        AlignmentMode::Relaxed => fit_projection(slice, base, &anchors)?,
        AlignmentMode::Orthogonal => fit_projection_orthogonal(slice, base, &anchors)?,
    };
    map.save_text(&path)?;
    Ok(map)
}

fn align_stage(config: &RunConfig, trained: &Trained, store: &ArtifactStore) -> Result<Aligned> {
    let first_seed = config.seeds[0];
    let mut aligned = Aligned {
        per_seed: BTreeMap::new(),
        first_seed_residuals: Vec::new(),
        projections: 0,
    };
    for &seed in &config.seeds {
        let base = &trained.bases[&seed];
        let mut projected = Vec::new();
        for slice in &trained.slices[&seed] {
            let map = fit_or_load_projection(store, slice, base, config)?;
            if seed == first_seed {
                aligned
                    .first_seed_residuals
                    .push((slice.provenance.label.clone(), map.residual));
            }
            aligned.projections += 1;
            projected.push(apply_projection(slice, &map)?);
        }
        aligned.per_seed.insert(seed, projected);
    }
    Ok(aligned)
}

// ---------------------------------------------------------------------------
// Trajectories, trends, stability
// ---------------------------------------------------------------------------

struct Trends {
    usable: Vec<TargetCoordinate>,
    unusable: Vec<(TargetCoordinate, String)>,
    duplicates_dropped: usize,
    /// Per seed, one series per usable triple (parallel to `usable`).
    series: BTreeMap<u64, Vec<TrajectorySeries>>,
    records: Vec<TrendRecord>,
}

fn trend_stage(
    config: &RunConfig,
    aligned: &Aligned,
    triples: &[TargetCoordinate],
) -> Result<Trends> {
    let mut seen = BTreeSet::new();
    let mut unique = Vec::new();
    for triple in triples {
        if seen.insert((triple.target.clone(), triple.c1.clone(), triple.c2.clone())) {
            unique.push(triple.clone());
        }
    }
    let duplicates_dropped = triples.len() - unique.len();

    let mut trends = Trends {
        usable: Vec::new(),
        unusable: Vec::new(),
        duplicates_dropped,
        series: config.seeds.iter().map(|&s| (s, Vec::new())).collect(),
        records: Vec::new(),
    };
    'triples: for triple in unique {
        let mut per_seed = Vec::with_capacity(config.seeds.len());
        for &seed in &config.seeds {
            match coordinate_position(&aligned.per_seed[&seed], &triple, config.epsilon) {
                Ok(series) => per_seed.push(series),
                Err(Error::MissingInSlice { word, slice }) => {
                    trends.unusable.push((
                        triple,
                        format!("word {word:?} not in the slice {slice:?} vocabulary"),
                    ));
                    continue 'triples;
                }
                Err(other) => return Err(other),
            }
        }
        let fits = per_seed
            .iter()
            .map(fit_trend)
            .collect::<Result<Vec<TrendFit>>>()?;
        let aggregate = aggregate_seeds(&fits)?;
        let clamp_count = per_seed.iter().map(|s| s.clamp_count()).sum();
        trends.records.push(TrendRecord {
            triple: triple.clone(),
            fit: aggregate,
            clamp_count,
        });
        for (&seed, series) in config.seeds.iter().zip(per_seed) {
            trends.series.get_mut(&seed).unwrap().push(series);
        }
        trends.usable.push(triple);
    }
    Ok(trends)
}

struct StabilityOutcome {
    report: Option<StabilityReport>,
    targets: usize,
    coordinates: usize,
    skipped_words: usize,
    note: Option<String>,
}

/// Compare neighbor-stability between the usable triples' target words and
/// their coordinate words (a word serving as both counts as a target). Runs
/// on the first seed's raw slice embeddings: neighbor sets live within each
/// slice, so no alignment is involved.
fn stability_stage(
    config: &RunConfig,
    trained: &Trained,
    usable: &[TargetCoordinate],
) -> Result<StabilityOutcome> {
    let slices = &trained.slices[&config.seeds[0]];
    let mut targets: BTreeSet<&str> = BTreeSet::new();
    let mut coordinates: BTreeSet<&str> = BTreeSet::new();
    for triple in usable {
        targets.insert(&triple.target);
        coordinates.insert(&triple.c1);
        coordinates.insert(&triple.c2);
    }
    let everywhere =
        |word: &str| -> bool { slices.iter().all(|emb| emb.vector(word).is_some()) };
    let total = targets.len() + coordinates.len();
    let targets: Vec<String> = targets
        .iter()
        .filter(|w| everywhere(w))
        .map(|w| w.to_string())
        .collect();
    let coordinates: Vec<String> = coordinates
        .iter()
        .filter(|w| !targets.iter().any(|t| t == **w))
        .filter(|w| everywhere(w))
        .map(|w| w.to_string())
        .collect();
    let skipped_words = total - targets.len() - coordinates.len();
    let mut outcome = StabilityOutcome {
        report: None,
        targets: targets.len(),
        coordinates: coordinates.len(),
        skipped_words,
        note: None,
    };
    if targets.is_empty() || coordinates.is_empty() {
        outcome.note = Some(
            "stability comparison skipped: a population is empty after filtering".to_string(),
        );
        return Ok(outcome);
    }
    outcome.report = Some(compare_stability(
        &targets,
        &coordinates,
        &config.k_values,
        slices,
    )?);
    Ok(outcome)
}

// ---------------------------------------------------------------------------
// Reports and plots
// ---------------------------------------------------------------------------

const TRAJECTORIES_HEADER: &str = "target,c1,c2,seed,slice,d_rel,clamped_c1,clamped_c2";

fn trajectories_csv(config: &RunConfig, trends: &Trends) -> String {
    let mut out = String::from(TRAJECTORIES_HEADER);
    out.push('\n');
    for (i, triple) in trends.usable.iter().enumerate() {
        for &seed in &config.seeds {
            for point in &trends.series[&seed][i].points {
                out.push_str(&format!(
                    "{},{},{},{seed},{},{:.8e},{},{}\n",
                    triple.target,
                    triple.c1,
                    triple.c2,
                    point.slice_label,
                    point.d_rel,
                    point.clamped_c1,
                    point.clamped_c2
                ));
            }
        }
    }
    out
}

/// Average the per-seed trajectories of one triple into a single series for
/// plotting; a point is marked clamped if any seed clamped it.
fn mean_series(config: &RunConfig, trends: &Trends, index: usize) -> TrajectorySeries {
    let first = &trends.series[&config.seeds[0]][index];
    let n = config.seeds.len() as f64;
    let points = (0..first.points.len())
        .map(|p| {
            let mut sum = 0.0;
            let mut clamped_c1 = false;
            let mut clamped_c2 = false;
            for &seed in &config.seeds {
                let point = &trends.series[&seed][index].points[p];
                sum += point.d_rel;
                clamped_c1 |= point.clamped_c1;
                clamped_c2 |= point.clamped_c2;
            }
            TrajectoryPoint {
                slice_label: first.points[p].slice_label.clone(),
                d_rel: sum / n,
                clamped_c1,
                clamped_c2,
            }
        })
        .collect();
    TrajectorySeries {
        triple: first.triple.clone(),
        points,
        epsilon: first.epsilon,
    }
}

fn summary_text(
    config: &RunConfig,
    config_hash: &str,
    ingested: &Ingested,
    triples_label: &str,
    listed: usize,
    trends: &Trends,
    aligned: &Aligned,
    stability: &StabilityOutcome,
    store: &ArtifactStore,
    report_paths: &[PathBuf],
    plot_count: usize,
) -> String {
    let mut out = String::new();
    out.push_str("semantic coordinates run\n");
    out.push_str("========================\n");
    out.push_str(&format!("config_hash: {}\n", &config_hash[..16]));
    out.push_str(&format!("corpus_digest: {}\n", &ingested.corpus_digest[..16]));
    out.push_str(&format!("manifest: {}\n", config.manifest.display()));
    out.push_str(&format!(
        "documents: {} in {}-{} ({} outside range dropped)\n",
        ingested.documents, ingested.year_range.0, ingested.year_range.1, ingested.dropped
    ));
    out.push_str(&format!(
        "scheme: {} ({} slices)\n",
        ingested.scheme.describe(),
        ingested.scheme.len()
    ));
    let tokens: Vec<String> = ingested
        .corpus
        .slices
        .iter()
        .map(|s| format!("{}={}", s.label, s.token_count()))
        .collect();
    out.push_str(&format!("slice_tokens: {}\n", tokens.join(" ")));
    let seeds: Vec<String> = config.seeds.iter().map(|s| s.to_string()).collect();
    out.push_str(&format!("seeds: {}\n", seeds.join(",")));
    let t = &config.training;
    out.push_str(&format!(
        "training: {} d={} window={} negatives={} epochs={} min_count={} subsample={:?} lr={:?}\n",
        t.architecture, t.dimension, t.window, t.negatives, t.epochs, t.min_count, t.subsample,
        t.learning_rate
    ));
    out.push_str(&format!(
        "alignment: {} v_anchor={} epsilon={:?}\n",
        config.alignment, config.v_anchor, config.epsilon
    ));
    let residuals: Vec<String> = aligned
        .first_seed_residuals
        .iter()
        .map(|(label, r)| format!("{label}={r:.8e}"))
        .collect();
    out.push_str(&format!(
        "residuals_seed{}: {}\n",
        config.seeds[0],
        residuals.join(" ")
    ));
    out.push_str(&format!(
        "triples: {triples_label} listed={listed} usable={} unusable={} duplicates_dropped={}\n",
        trends.usable.len(),
        trends.unusable.len(),
        trends.duplicates_dropped
    ));
    if !trends.unusable.is_empty() {
        out.push_str("unusable_triples:\n");
        for (triple, reason) in &trends.unusable {
            out.push_str(&format!("  {}: {reason}\n", triple.describe()));
        }
    }
    out.push_str(&format!(
        "stability_populations: targets={} coordinates={} skipped_words={}\n",
        stability.targets, stability.coordinates, stability.skipped_words
    ));
    if let Some(note) = &stability.note {
        out.push_str(&format!("note: {note}\n"));
    }
    let embeddings = config.seeds.len() * (ingested.scheme.len() + 1);
    out.push_str(&format!(
        "artifacts: {} ({} embeddings, {} projections)\n",
        store.dir.display(),
        embeddings,
        aligned.projections
    ));
    out.push_str("reports:\n");
    for path in report_paths {
        out.push_str(&format!("  {}\n", path.display()));
    }
    out.push_str(&format!("plots: {plot_count} files\n"));
    out
}

// ---------------------------------------------------------------------------
// The run itself
// ---------------------------------------------------------------------------

/// Everything a completed run produced, with enough state retained to emit
/// further plots or feed ablations without retraining.
#[derive(Debug)]
pub struct RunOutcome {
    pub config: RunConfig,
    pub config_hash: String,
    pub corpus_digest: String,
    pub scheme: SlicingScheme,
    /// Triples measured in every slice under every seed.
    pub usable: Vec<TargetCoordinate>,
    /// Triples excluded because a word fell below the frequency threshold
    /// somewhere, with the offending word and slice.
    pub unusable: Vec<(TargetCoordinate, String)>,
    /// Aggregated trend per usable triple (parallel to `usable`).
    pub records: Vec<TrendRecord>,
    /// Per-seed trajectory series (each inner vector parallel to `usable`).
    pub series: BTreeMap<u64, Vec<TrajectorySeries>>,
    pub stability: Option<StabilityReport>,
    pub report_paths: Vec<PathBuf>,
    pub plot_paths: Vec<PathBuf>,
    pub summary_path: PathBuf,
    /// Embeddings trained this run vs loaded from the artifact cache.
    pub artifacts_trained: usize,
    pub artifacts_reused: usize,
    raw_first_seed: Vec<EmbeddingMatrix>,
    aligned_first_seed: Vec<EmbeddingMatrix>,
    base_first_seed: EmbeddingMatrix,
}

impl RunOutcome {
    /// The seed whose embeddings back single-seed analyses (discovery,
    /// stability, PCA plots): the first in the configured list.
    pub fn first_seed(&self) -> u64 {
        self.config.seeds[0]
    }

    /// First seed's base embedding.
    pub fn base_embedding(&self) -> &EmbeddingMatrix {
        &self.base_first_seed
    }

    /// First seed's raw per-slice embeddings, in slice order.
    pub fn raw_slices(&self) -> &[EmbeddingMatrix] {
        &self.raw_first_seed
    }

    /// First seed's aligned per-slice embeddings, in slice order.
    pub fn aligned_slices(&self) -> &[EmbeddingMatrix] {
        &self.aligned_first_seed
    }

    /// (triple, aggregated fit) pairs for sign-preservation comparisons.
    pub fn fits(&self) -> Vec<(TargetCoordinate, TrendFit)> {
        self.usable
            .iter()
            .cloned()
            .zip(self.records.iter().map(|r| r.fit.clone()))
            .collect()
    }

    /// Render the 2-D projection plot for one analyzed triple: the target's
    /// per-slice aligned vectors plus both coordinate words' base vectors,
    /// projected onto their joint principal plane.
    pub fn pca_svg(&self, triple: &TargetCoordinate) -> Result<String> {
        if !self.usable.contains(triple) {
            return Err(Error::Config(format!(
                "triple {} was not analyzed in this run",
                triple.describe()
            )));
        }
        pca_plot(&self.aligned_first_seed, &self.base_first_seed, triple)
    }
}

/// Project the target's per-slice aligned vectors and the coordinate words'
/// base vectors onto their first two principal components and render the
/// labeled scatter. With T slices the plot carries T + 2 points.
pub fn pca_plot(
    aligned: &[EmbeddingMatrix],
    base: &EmbeddingMatrix,
    triple: &TargetCoordinate,
) -> Result<String> {
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(aligned.len() + 2);
    let mut points: Vec<crate::plot::LabeledPoint> = Vec::with_capacity(aligned.len() + 2);
    for (i, emb) in aligned.iter().enumerate() {
        let label = if emb.provenance.label.is_empty() {
            (i + 1).to_string()
        } else {
            emb.provenance.label.clone()
        };
        let v = emb.vector(&triple.target).ok_or_else(|| Error::MissingInSlice {
            word: triple.target.clone(),
            slice: label.clone(),
        })?;
        vectors.push(v.to_vec());
        points.push(crate::plot::LabeledPoint {
            label,
            x: 0.0,
            y: 0.0,
            highlight: false,
        });
    }
    for word in [&triple.c1, &triple.c2] {
        let v = base.vector(word).ok_or_else(|| Error::MissingInSlice {
            word: word.clone(),
            slice: "base".into(),
        })?;
        vectors.push(v.to_vec());
        points.push(crate::plot::LabeledPoint {
            label: word.clone(),
            x: 0.0,
            y: 0.0,
            highlight: true,
        });
    }
    let pca = crate::numerics::pca_2d(&vectors)?;
    for (point, xy) in points.iter_mut().zip(&pca.points) {
        point.x = xy[0];
        point.y = xy[1];
    }
    Ok(crate::plot::scatter_svg(
        &triple.describe(),
        &format!("PC1 ({:.1}%)", pca.explained[0] * 100.0),
        &format!("PC2 ({:.1}%)", pca.explained[1] * 100.0),
        &points,
    ))
}

/// What the ingest stage alone produces: the sliced corpus persisted under
/// the artifact directory, plus its vital statistics.
#[derive(Debug)]
pub struct IngestReport {
    pub corpus_digest: String,
    pub scheme: SlicingScheme,
    pub documents: usize,
    pub dropped: usize,
    /// Per slice: (label, documents, tokens).
    pub slices: Vec<(String, usize, usize)>,
    pub slices_dir: PathBuf,
}

/// Validate, read, slice, and persist the corpus without training anything.
pub fn ingest_only(config: &RunConfig) -> Result<IngestReport> {
    let stage = |name: &'static str| move |e: Error| e.in_stage(name);
    config.validate().map_err(stage("validate"))?;
    let ingested = ingest(config).map_err(stage("ingest"))?;
    let store = ArtifactStore::open(&config.output_dir).map_err(stage("ingest"))?;
    let slices_dir = store.dir.join(format!(
        "slices-{}-{}",
        &ingested.corpus_digest[..KEY_LEN],
        sanitize(&ingested.scheme.describe())
    ));
    write_slice_files(&ingested.corpus, &slices_dir).map_err(stage("ingest"))?;
    Ok(IngestReport {
        corpus_digest: ingested.corpus_digest,
        documents: ingested.documents,
        dropped: ingested.dropped,
        slices: ingested
            .corpus
            .slices
            .iter()
            .map(|s| (s.label.clone(), s.documents.len(), s.token_count()))
            .collect(),
        scheme: ingested.scheme,
        slices_dir,
    })
}

/// What the training stage alone produces.
#[derive(Debug)]
pub struct TrainReport {
    pub trained: usize,
    pub reused: usize,
    pub artifacts_dir: PathBuf,
}

/// Validate, ingest, and train every (slice, seed) and base embedding into
/// the artifact cache, without aligning or analyzing.
pub fn train_only(config: &RunConfig) -> Result<TrainReport> {
    let stage = |name: &'static str| move |e: Error| e.in_stage(name);
    config.validate().map_err(stage("validate"))?;
    let ingested = ingest(config).map_err(stage("ingest"))?;
    let store = ArtifactStore::open(&config.output_dir).map_err(stage("ingest"))?;
    let trained = train_stage(config, &ingested, &store).map_err(stage("train"))?;
    Ok(TrainReport {
        trained: trained.trained,
        reused: trained.reused,
        artifacts_dir: store.dir,
    })
}

/// What the alignment stage adds: one fitted projection per (slice, seed).
#[derive(Debug)]
pub struct AlignReport {
    pub trained: usize,
    pub reused: usize,
    /// (slice label, residual) for the first configured seed.
    pub first_seed_residuals: Vec<(String, f64)>,
    pub projections: usize,
    pub artifacts_dir: PathBuf,
}

/// Validate, ingest, train, and fit all projections into the artifact
/// cache, reporting the residuals of the first seed's fits.
pub fn align_only(config: &RunConfig) -> Result<AlignReport> {
    let stage = |name: &'static str| move |e: Error| e.in_stage(name);
    config.validate().map_err(stage("validate"))?;
    let ingested = ingest(config).map_err(stage("ingest"))?;
    let store = ArtifactStore::open(&config.output_dir).map_err(stage("ingest"))?;
    let trained = train_stage(config, &ingested, &store).map_err(stage("train"))?;
    let aligned = align_stage(config, &trained, &store).map_err(stage("align"))?;
    Ok(AlignReport {
        trained: trained.trained,
        reused: trained.reused,
        first_seed_residuals: aligned.first_seed_residuals,
        projections: aligned.projections,
        artifacts_dir: store.dir,
    })
}

/// Run the full analysis. Reports land in `<output_dir>/reports`, plots in
/// `<output_dir>/plots`, cached artifacts in `<output_dir>/artifacts`.
pub fn run_pipeline(config: &RunConfig) -> Result<RunOutcome> {
    run_pipeline_with(config, None)
}

/// As [`run_pipeline`], but reports land in `<output_dir>/reports/<tag>`
/// so ablation reruns cannot clobber the primary run's reports.
fn run_pipeline_with(config: &RunConfig, report_tag: Option<&str>) -> Result<RunOutcome> {
    let stage = |name: &'static str| move |e: Error| e.in_stage(name);

    config.validate().map_err(stage("validate"))?;
    let (triples, triples_label) = config.resolve_triples().map_err(stage("validate"))?;
    let listed = triples.len();

    let ingested = ingest(config).map_err(stage("ingest"))?;
    let store = ArtifactStore::open(&config.output_dir).map_err(stage("ingest"))?;
    let slices_dir = store.dir.join(format!(
        "slices-{}-{}",
        &ingested.corpus_digest[..KEY_LEN],
        sanitize(&ingested.scheme.describe())
    ));
    if !slices_dir.is_dir() {
        write_slice_files(&ingested.corpus, &slices_dir).map_err(stage("ingest"))?;
    }
    let config_hash = config.content_hash(
        &ingested.corpus_digest,
        &ingested.scheme.describe(),
        &triples_label,
    );

    let trained = train_stage(config, &ingested, &store).map_err(stage("train"))?;
    let aligned = align_stage(config, &trained, &store).map_err(stage("align"))?;
    let trends = trend_stage(config, &aligned, &triples).map_err(stage("trajectories"))?;
    let stability = stability_stage(config, &trained, &trends.usable).map_err(stage("stability"))?;

    // Reports, single-threaded, fixed order and formatting.
    let report_dir = match report_tag {
        None => config.output_dir.join("reports"),
        Some(tag) => config.output_dir.join("reports").join(tag),
    };
    let mut report_paths = Vec::new();
    let trends_path = report_dir.join("trends.csv");
    write_file(&trends_path, &trend_report(&trends.records)).map_err(stage("report"))?;
    report_paths.push(trends_path);
    let trajectories_path = report_dir.join("trajectories.csv");
    write_file(&trajectories_path, &trajectories_csv(config, &trends)).map_err(stage("report"))?;
    report_paths.push(trajectories_path);
    if let Some(report) = &stability.report {
        let stability_path = report_dir.join("stability.csv");
        write_file(&stability_path, &report.to_csv()).map_err(stage("report"))?;
        report_paths.push(stability_path);
    }

    // Trajectory plots: seed-averaged series with the aggregate fitted line.
    let plot_dir = match report_tag {
        None => config.output_dir.join("plots"),
        Some(tag) => config.output_dir.join("plots").join(tag),
    };
    let mut plot_paths = Vec::new();
    for (i, triple) in trends.usable.iter().enumerate() {
        let series = mean_series(config, &trends, i);
        let svg = trajectory_svg(&series, &trends.records[i].fit);
        let path = plot_dir.join(format!(
            "trajectory-{}-{}-{}.svg",
            sanitize(&triple.target),
            sanitize(&triple.c1),
            sanitize(&triple.c2)
        ));
        write_file(&path, &svg).map_err(stage("plot"))?;
        plot_paths.push(path);
    }

    let summary = summary_text(
        config,
        &config_hash,
        &ingested,
        &triples_label,
        listed,
        &trends,
        &aligned,
        &stability,
        &store,
        &report_paths,
        plot_paths.len(),
    );
    let summary_path = report_dir.join("summary.txt");
    write_file(&summary_path, &summary).map_err(stage("report"))?;

    let first_seed = config.seeds[0];
    let mut trained = trained;
    let mut aligned = aligned;
    Ok(RunOutcome {
        config: config.clone(),
        config_hash,
        corpus_digest: ingested.corpus_digest,
        scheme: ingested.scheme,
        usable: trends.usable,
        unusable: trends.unusable,
        records: trends.records,
        series: trends.series,
        stability: stability.report,
        report_paths,
        plot_paths,
        summary_path,
        artifacts_trained: trained.trained,
        artifacts_reused: trained.reused,
        raw_first_seed: trained.slices.remove(&first_seed).unwrap(),
        aligned_first_seed: aligned.per_seed.remove(&first_seed).unwrap(),
        base_first_seed: trained.bases.remove(&first_seed).unwrap(),
    })
}

// ---------------------------------------------------------------------------
// Ablations
// ---------------------------------------------------------------------------

/// Sign-preservation outcome for one alternative slicing scheme.
#[derive(Debug, Clone)]
pub struct SchemeComparison {
    /// Canonical text of the alternative scheme.
    pub scheme: String,
    pub preservation: SignPreservation,
    /// Triples usable under only one of the two schemes (excluded from the
    /// comparison).
    pub excluded: usize,
}

/// Result of re-running trends under alternative slicing schemes.
#[derive(Debug, Clone)]
pub struct SlicingAblation {
    pub base_scheme: String,
    pub comparisons: Vec<SchemeComparison>,
    pub report_path: PathBuf,
}

const SLICING_ABLATION_HEADER: &str =
    "scheme,compared,agreeing,rate,stable_both,stable_agreeing,rate_excluding_unstable";

/// Rerun trajectories and trends under each alternative scheme and measure
/// how often the aggregated slope sign survives, overall and restricted to
/// triples stable under both schemes. Slice embeddings retrain per scheme
/// (cached), base embeddings are shared.
pub fn ablate_slicing(config: &RunConfig, alt_schemes: &[String]) -> Result<SlicingAblation> {
    if alt_schemes.is_empty() {
        return Err(Error::Config("no alternative schemes given".into()).in_stage("ablate-slicing"));
    }
    let base = run_pipeline(config)?;
    let base_fits = base.fits();
    let mut comparisons = Vec::new();
    let mut csv = String::from(SLICING_ABLATION_HEADER);
    csv.push('\n');
    for scheme_text in alt_schemes {
        let mut alt_config = config.clone();
        alt_config.scheme = scheme_text.clone();
        let alt = run_pipeline_with(&alt_config, Some(&format!("slicing-{}", sanitize(scheme_text))))?;
        let alt_fits = alt.fits();

        let in_alt: std::collections::HashSet<&TargetCoordinate> = alt.usable.iter().collect();
        let in_base: std::collections::HashSet<&TargetCoordinate> = base.usable.iter().collect();
        let a: Vec<(TargetCoordinate, TrendFit)> = base_fits
            .iter()
            .filter(|(t, _)| in_alt.contains(t))
            .cloned()
            .collect();
        let b: Vec<(TargetCoordinate, TrendFit)> = alt_fits
            .iter()
            .filter(|(t, _)| in_base.contains(t))
            .cloned()
            .collect();
        let excluded = (base_fits.len() - a.len()) + (alt_fits.len() - b.len());
        let preservation =
            sign_preservation_rate(&a, &b).map_err(|e| e.in_stage("ablate-slicing"))?;
        let excl = match preservation.rate_excluding_unstable {
            Some(rate) => format!("{rate:.8e}"),
            None => String::new(),
        };
        csv.push_str(&format!(
            "{},{},{},{:.8e},{},{},{excl}\n",
            alt.scheme.describe(),
            preservation.compared,
            preservation.agreeing,
            preservation.rate,
            preservation.stable_compared,
            preservation.stable_agreeing,
        ));
        comparisons.push(SchemeComparison {
            scheme: alt.scheme.describe(),
            preservation,
            excluded,
        });
    }
    let report_path = config.output_dir.join("reports").join("ablation-slicing.csv");
    write_file(&report_path, &csv).map_err(|e| e.in_stage("ablate-slicing"))?;
    Ok(SlicingAblation {
        base_scheme: base.scheme.describe(),
        comparisons,
        report_path,
    })
}

/// Paired-test outcome of the accepted / not-accepted split.
#[derive(Debug, Clone)]
pub struct AcceptanceAblation {
    pub accepted_documents: usize,
    pub rejected_documents: usize,
    /// Triples with every word present in both sub-corpus vocabularies.
    pub triples_used: usize,
    pub triples_skipped: usize,
    /// Wilcoxon signed-rank over paired cos(w, c1) values.
    pub cos_c1: TestResult,
    /// Wilcoxon signed-rank over paired cos(w, c2) values.
    pub cos_c2: TestResult,
    /// Wilcoxon signed-rank over paired log cosine ratios.
    pub log_ratio: TestResult,
    pub report_paths: Vec<PathBuf>,
}

const ACCEPTANCE_HEADER: &str = "list,pairs,statistic,p_value,method";
const ACCEPTANCE_PAIRS_HEADER: &str =
    "target,c1,c2,ac_cos_c1,nac_cos_c1,ac_cos_c2,nac_cos_c2,ac_log_ratio,nac_log_ratio";

/// Split the corpus into accepted and not-accepted documents, train one
/// embedding per side (first configured seed), and test whether the
/// coordinate measurements differ between the sides. Every document must
/// carry an acceptance flag.
pub fn ablate_acceptance(config: &RunConfig) -> Result<AcceptanceAblation> {
    let stage = |name: &'static str| move |e: Error| e.in_stage(name);
    config.validate().map_err(stage("validate"))?;
    let (triples, _) = config.resolve_triples().map_err(stage("validate"))?;
    let ingested = ingest(config).map_err(stage("ingest"))?;

    let docs = ingested.corpus.documents_by_year_id();
    for doc in &docs {
        if doc.accepted.is_none() {
            return Err(Error::Config(format!(
                "document {:?} has no acceptance flag; the accepted/not-accepted \
                 ablation needs one on every document",
                doc.id
            ))
            .in_stage("split"));
        }
    }
    let ac_docs: Vec<&[String]> = docs
        .iter()
        .filter(|d| d.accepted == Some(true))
        .map(|d| d.tokens.as_slice())
        .collect();
    let nac_docs: Vec<&[String]> = docs
        .iter()
        .filter(|d| d.accepted == Some(false))
        .map(|d| d.tokens.as_slice())
        .collect();
    if ac_docs.is_empty() || nac_docs.is_empty() {
        return Err(Error::Config(
            "the accepted/not-accepted split needs documents on both sides".into(),
        )
        .in_stage("split"));
    }

    let store = ArtifactStore::open(&config.output_dir).map_err(stage("train"))?;
    let training = config.training_for_seed(config.seeds[0]);
    let mut halves = Vec::new();
    for (tag, docs) in [("ac", &ac_docs), ("nac", &nac_docs)] {
        let key = short_hash(&format!(
            "emb;corpus={};subset={tag};training={}",
            ingested.corpus_digest,
            training.content_hash()
        ));
        let label = format!("{tag}-s{}", training.seed);
        let path = store.embedding_path(&label, &key);
        let (emb, _) = store
            .load_or_train(&path, docs, &training, tag)
            .map_err(stage("train"))?;
        halves.push(emb);
    }
    let (ac, nac) = (&halves[0], &halves[1]);

    let mut diff_c1 = Vec::new();
    let mut diff_c2 = Vec::new();
    let mut diff_ratio = Vec::new();
    let mut pairs_csv = String::from(ACCEPTANCE_PAIRS_HEADER);
    pairs_csv.push('\n');
    let mut skipped = 0usize;
    let mut seen = BTreeSet::new();
    for triple in &triples {
        if !seen.insert((triple.target.clone(), triple.c1.clone(), triple.c2.clone())) {
            continue;
        }
        let present = |emb: &EmbeddingMatrix| {
            emb.vector(&triple.target).is_some()
                && emb.vector(&triple.c1).is_some()
                && emb.vector(&triple.c2).is_some()
        };
        if !present(ac) || !present(nac) {
            skipped += 1;
            continue;
        }
        let ac_c1 = ac.cosine_words(&triple.target, &triple.c1).map_err(stage("measure"))?;
        let ac_c2 = ac.cosine_words(&triple.target, &triple.c2).map_err(stage("measure"))?;
        let nac_c1 = nac.cosine_words(&triple.target, &triple.c1).map_err(stage("measure"))?;
        let nac_c2 = nac.cosine_words(&triple.target, &triple.c2).map_err(stage("measure"))?;
        let ac_ratio = log_cosine_ratio(ac_c1, ac_c2, config.epsilon);
        let nac_ratio = log_cosine_ratio(nac_c1, nac_c2, config.epsilon);
        diff_c1.push(ac_c1 - nac_c1);
        diff_c2.push(ac_c2 - nac_c2);
        diff_ratio.push(ac_ratio - nac_ratio);
        pairs_csv.push_str(&format!(
            "{},{},{},{ac_c1:.8e},{nac_c1:.8e},{ac_c2:.8e},{nac_c2:.8e},{ac_ratio:.8e},{nac_ratio:.8e}\n",
            triple.target, triple.c1, triple.c2
        ));
    }
    if diff_c1.is_empty() {
        return Err(Error::EmptySample(
            "no triple has all three words in both sub-corpora".into(),
        )
        .in_stage("measure"));
    }
    let cos_c1 = wilcoxon_signed_rank(&diff_c1).map_err(stage("test"))?;
    let cos_c2 = wilcoxon_signed_rank(&diff_c2).map_err(stage("test"))?;
    let log_ratio = wilcoxon_signed_rank(&diff_ratio).map_err(stage("test"))?;

    let mut csv = String::from(ACCEPTANCE_HEADER);
    csv.push('\n');
    for (name, test) in [
        ("cos-c1", &cos_c1),
        ("cos-c2", &cos_c2),
        ("log-ratio", &log_ratio),
    ] {
        csv.push_str(&format!(
            "{name},{},{:.8e},{:.8e},{}\n",
            diff_c1.len(),
            test.statistic,
            test.p_value,
            test.method
        ));
    }
    let report_dir = config.output_dir.join("reports");
    let summary_path = report_dir.join("ablation-acceptance.csv");
    write_file(&summary_path, &csv).map_err(stage("report"))?;
    let pairs_path = report_dir.join("ablation-acceptance-pairs.csv");
    write_file(&pairs_path, &pairs_csv).map_err(stage("report"))?;

    Ok(AcceptanceAblation {
        accepted_documents: ac_docs.len(),
        rejected_documents: nac_docs.len(),
        triples_used: diff_c1.len(),
        triples_skipped: skipped,
        cos_c1,
        cos_c2,
        log_ratio,
        report_paths: vec![summary_path, pairs_path],
    })
}
