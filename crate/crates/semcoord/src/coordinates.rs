//! Semantic-coordinate trajectories and shift trends.
//!
//! A target-coordinate triple pins a target word `w` between two coordinate
//! words `c1` and `c2`. Within each time slice the target's position is
//!
//! ```text
//! d_rel = ln(max(ε, cos(v_w, v_c1))) − ln(max(ε, cos(v_w, v_c2)))
//! ```
//!
//! so positive values mean `w` sits closer to `c1`. A least-squares line over
//! the slice ordinals turns the trajectory into a shift trend, trends from
//! independently seeded trainings are averaged, and a triple counts as stable
//! only when every configuration agrees on the slope sign.
//!
//! Cosines are clamped at `ε` before the logarithm because the ratio is
//! undefined for non-positive similarities; every clamp is recorded on the
//! trajectory point so affected values are visibly suspect downstream.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::trainer::{cosine, EmbeddingMatrix};

/// Default clamping floor for cosine similarities.
pub const DEFAULT_EPSILON: f64 = 1e-6;

/// Thematic grouping of a triple, used only for reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Category {
    ResearchInterest,
    LanguageUsage,
    AcademicActivity,
    Unclassified,
}

impl Category {
    pub const ALL: [Category; 4] = [
        Category::ResearchInterest,
        Category::LanguageUsage,
        Category::AcademicActivity,
        Category::Unclassified,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::ResearchInterest => "research-interest",
            Category::LanguageUsage => "language-usage",
            Category::AcademicActivity => "academic-activity",
            Category::Unclassified => "unclassified",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = Error;

    fn from_str(s: &str) -> Result<Category> {
        match s {
            "research-interest" => Ok(Category::ResearchInterest),
            "language-usage" => Ok(Category::LanguageUsage),
            "academic-activity" => Ok(Category::AcademicActivity),
            "unclassified" => Ok(Category::Unclassified),
            other => Err(Error::Config(format!(
                "unknown triple category {other:?}; expected one of \
                 research-interest, language-usage, academic-activity, unclassified"
            ))),
        }
    }
}

/// A target word and the two coordinate words it is measured against.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TargetCoordinate {
    pub target: String,
    pub c1: String,
    pub c2: String,
    pub category: Category,
}

impl TargetCoordinate {
    /// Build a triple, rejecting repeated words: a coordinate axis from a
    /// word to itself carries no direction.
    pub fn new(target: &str, c1: &str, c2: &str, category: Category) -> Result<TargetCoordinate> {
        if target == c1 || target == c2 || c1 == c2 {
            return Err(Error::DegenerateTriple {
                target: target.into(),
                c1: c1.into(),
                c2: c2.into(),
            });
        }
        Ok(TargetCoordinate {
            target: target.into(),
            c1: c1.into(),
            c2: c2.into(),
            category,
        })
    }

    /// `target (c1, c2)` — the shape used in log and error messages.
    pub fn describe(&self) -> String {
        format!("{} ({}, {})", self.target, self.c1, self.c2)
    }
}

impl fmt::Display for TargetCoordinate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.target, self.c1, self.c2, self.category)
    }
}

/// One evaluated slice of a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryPoint {
    pub slice_label: String,
    pub d_rel: f64,
    /// The `c1`-side cosine fell below ε and was clamped.
    pub clamped_c1: bool,
    /// The `c2`-side cosine fell below ε and was clamped.
    pub clamped_c2: bool,
}

/// The positions of one triple across all time slices.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySeries {
    pub triple: TargetCoordinate,
    pub points: Vec<TrajectoryPoint>,
    pub epsilon: f64,
}

impl TrajectorySeries {
    /// The d_rel values in slice order.
    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.d_rel).collect()
    }

    /// Total number of clamp events; both sides of a point count separately.
    pub fn clamp_count(&self) -> usize {
        self.points
            .iter()
            .map(|p| usize::from(p.clamped_c1) + usize::from(p.clamped_c2))
            .sum()
    }
}

/// Which coordinate word the target is shifting toward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    TowardC1,
    TowardC2,
}

impl Direction {
    fn from_slope(mean: f64) -> Direction {
        if mean > 0.0 {
            Direction::TowardC1
        } else {
            Direction::TowardC2
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::TowardC1 => "toward-c1",
            Direction::TowardC2 => "toward-c2",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A fitted shift trend. A single fit and an aggregate over seeds share this
/// shape: for a single fit the slope list has one entry and the spread is 0.
#[derive(Debug, Clone, PartialEq)]
pub struct TrendFit {
    /// Signed slope; for aggregates, the mean of the per-seed slopes.
    pub slope: f64,
    /// Intercept; for aggregates, the mean of the per-seed intercepts.
    pub intercept: f64,
    /// The individual slopes that entered this fit.
    pub seed_slopes: Vec<f64>,
    /// Mean of `seed_slopes`; equals `slope`.
    pub slope_mean: f64,
    /// Sample standard deviation of `seed_slopes` (divisor n−1, 0 when n=1).
    pub slope_std: f64,
    pub direction: Direction,
    /// All contributing slopes agree in sign.
    pub stable: bool,
}

impl TrendFit {
    fn single(slope: f64, intercept: f64) -> TrendFit {
        TrendFit {
            slope,
            intercept,
            seed_slopes: vec![slope],
            slope_mean: slope,
            slope_std: 0.0,
            direction: Direction::from_slope(slope),
            stable: true,
        }
    }

    /// Reported shift magnitude: the absolute value of the mean slope.
    pub fn magnitude(&self) -> f64 {
        self.slope_mean.abs()
    }
}

fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

fn signs_agree(slopes: &[f64]) -> bool {
    let mut signs = slopes.iter().map(|&s| sign(s));
    match signs.next() {
        Some(first) => signs.all(|s| s == first),
        None => true,
    }
}

/// The position measure itself: ln(max(cos1, ε)) − ln(max(cos2, ε)).
/// Positive values mean the word sits closer to c1 than to c2.
pub fn log_cosine_ratio(cos1: f64, cos2: f64, epsilon: f64) -> f64 {
    cos1.max(epsilon).ln() - cos2.max(epsilon).ln()
}

/// Evaluate one triple against a sequence of aligned slice embeddings.
///
/// Slices are labelled from their provenance; an embedding without a label
/// falls back to its 1-based position. Cosines below `epsilon` are clamped
/// and flagged. A vocabulary miss reports the word and the slice, signalling
/// that the triple is unusable under the current frequency threshold.
pub fn coordinate_position(
    slices: &[EmbeddingMatrix],
    triple: &TargetCoordinate,
    epsilon: f64,
) -> Result<TrajectorySeries> {
    if !(epsilon > 0.0) {
        return Err(Error::Config(format!(
            "cosine clamp epsilon must be positive, got {epsilon}"
        )));
    }
    let mut points = Vec::with_capacity(slices.len());
    for (t, emb) in slices.iter().enumerate() {
        let label = if emb.provenance.label.is_empty() {
            (t + 1).to_string()
        } else {
            emb.provenance.label.clone()
        };
        let lookup = |word: &str| -> Result<&[f64]> {
            emb.vector(word).ok_or_else(|| Error::MissingInSlice {
                word: word.into(),
                slice: label.clone(),
            })
        };
        let v_w = lookup(&triple.target)?;
        let v_c1 = lookup(&triple.c1)?;
        let v_c2 = lookup(&triple.c2)?;
        let cos1 = cosine(v_w, v_c1)?;
        let cos2 = cosine(v_w, v_c2)?;
        let clamped_c1 = cos1 < epsilon;
        let clamped_c2 = cos2 < epsilon;
        let d_rel = log_cosine_ratio(cos1, cos2, epsilon);
        points.push(TrajectoryPoint {
            slice_label: label,
            d_rel,
            clamped_c1,
            clamped_c2,
        });
    }
    Ok(TrajectorySeries {
        triple: triple.clone(),
        points,
        epsilon,
    })
}

/// Least-squares line through the trajectory, with time as the slice
/// ordinal 1..T. Using ordinals rather than calendar years keeps slopes
/// comparable across slicing schemes.
pub fn fit_trend(series: &TrajectorySeries) -> Result<TrendFit> {
    let xs: Vec<f64> = (1..=series.points.len()).map(|t| t as f64).collect();
    let ys = series.values();
    let (slope, intercept) = crate::numerics::least_squares_line(&xs, &ys)?;
    Ok(TrendFit::single(slope, intercept))
}

/// Combine per-seed fits of one triple into an aggregate trend.
///
/// The direction comes from the mean of the signed slopes; the reported
/// magnitude is the absolute value of that mean, with the sample standard
/// deviation of the individual slopes as its spread. The aggregate is stable
/// when every contributing slope has the same sign.
pub fn aggregate_seeds(fits: &[TrendFit]) -> Result<TrendFit> {
    if fits.is_empty() {
        return Err(Error::EmptySample("no trend fits to aggregate".into()));
    }
    let slopes: Vec<f64> = fits.iter().map(|f| f.slope).collect();
    let n = slopes.len() as f64;
    let mean = slopes.iter().sum::<f64>() / n;
    let slope_std = if slopes.len() < 2 {
        0.0
    } else {
        (slopes.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    let intercept = fits.iter().map(|f| f.intercept).sum::<f64>() / n;
    let stable = signs_agree(&slopes);
    Ok(TrendFit {
        slope: mean,
        intercept,
        seed_slopes: slopes,
        slope_mean: mean,
        slope_std,
        direction: Direction::from_slope(mean),
        stable,
    })
}

/// Decide whether a triple's shift direction is trustworthy across
/// configurations (seeds × slicing schemes × alignment modes): stable iff
/// every configuration's slope sign equals the sign of the mean slope.
pub fn classify_stability(fits: &[TrendFit]) -> Result<bool> {
    if fits.len() < 2 {
        return Err(Error::Config(format!(
            "stability classification needs at least 2 configurations, got {}",
            fits.len()
        )));
    }
    let mean = fits.iter().map(|f| f.slope).sum::<f64>() / fits.len() as f64;
    let aggregate = sign(mean);
    Ok(fits.iter().all(|f| sign(f.slope) == aggregate))
}

/// Outcome of comparing trend signs between two configurations.
#[derive(Debug, Clone, PartialEq)]
pub struct SignPreservation {
    /// Triples compared.
    pub compared: usize,
    /// Triples whose slope sign agreed.
    pub agreeing: usize,
    /// `agreeing / compared`.
    pub rate: f64,
    /// Triples stable under both configurations.
    pub stable_compared: usize,
    /// Stable triples whose slope sign agreed.
    pub stable_agreeing: usize,
    /// Agreement rate over stable triples; `None` when no triple is stable
    /// under both configurations.
    pub rate_excluding_unstable: Option<f64>,
}

/// Fraction of triples whose slope sign survives a change of configuration,
/// reported both overall and restricted to triples stable on both sides.
///
/// The two fit lists must cover exactly the same triples (and contain no
/// duplicates); anything else is a mismatch error.
pub fn sign_preservation_rate(
    fits_a: &[(TargetCoordinate, TrendFit)],
    fits_b: &[(TargetCoordinate, TrendFit)],
) -> Result<SignPreservation> {
    if fits_a.is_empty() && fits_b.is_empty() {
        return Err(Error::EmptySample(
            "sign preservation needs at least one triple".into(),
        ));
    }
    if fits_a.len() != fits_b.len() {
        return Err(Error::MismatchedTriples);
    }
    let mut by_triple: HashMap<&TargetCoordinate, &TrendFit> = HashMap::new();
    for (triple, fit) in fits_b {
        if by_triple.insert(triple, fit).is_some() {
            return Err(Error::MismatchedTriples);
        }
    }
    let mut seen = 0usize;
    let mut agreeing = 0usize;
    let mut stable_compared = 0usize;
    let mut stable_agreeing = 0usize;
    for (triple, fit_a) in fits_a {
        let fit_b = by_triple.get(triple).ok_or(Error::MismatchedTriples)?;
        seen += 1;
        let agree = sign(fit_a.slope_mean) == sign(fit_b.slope_mean);
        if agree {
            agreeing += 1;
        }
        if fit_a.stable && fit_b.stable {
            stable_compared += 1;
            if agree {
                stable_agreeing += 1;
            }
        }
    }
    if seen != fits_a.len() {
        return Err(Error::MismatchedTriples);
    }
    Ok(SignPreservation {
        compared: seen,
        agreeing,
        rate: agreeing as f64 / seen as f64,
        stable_compared,
        stable_agreeing,
        rate_excluding_unstable: if stable_compared == 0 {
            None
        } else {
            Some(stable_agreeing as f64 / stable_compared as f64)
        },
    })
}

/// One row of a trend report.
#[derive(Debug, Clone, PartialEq)]
pub struct TrendRecord {
    pub triple: TargetCoordinate,
    pub fit: TrendFit,
    /// Clamp events summed over the seeds' trajectory series.
    pub clamp_count: usize,
}

pub const TREND_REPORT_HEADER: &str =
    "target,c1,c2,category,slope_mean,slope_std,direction,stable,clamp_count";

/// Render trend records as a comma-separated report. The format is fixed so
/// that reruns with the same inputs produce byte-identical files.
pub fn trend_report(records: &[TrendRecord]) -> String {
    let mut out = String::new();
    out.push_str(TREND_REPORT_HEADER);
    out.push('\n');
    for record in records {
        let fit = &record.fit;
        out.push_str(&format!(
            "{},{:.8e},{:.8e},{},{},{}\n",
            record.triple, fit.slope_mean, fit.slope_std, fit.direction, fit.stable, record.clamp_count
        ));
    }
    out
}

pub const TRIPLES_HEADER: &str = "target,c1,c2,category";

/// Render triples in the `target,c1,c2,category` file format.
pub fn triples_csv(triples: &[TargetCoordinate]) -> String {
    let mut out = String::new();
    out.push_str(TRIPLES_HEADER);
    out.push('\n');
    for triple in triples {
        out.push_str(&triple.to_string());
        out.push('\n');
    }
    out
}

/// Parse a triples file: comma-separated `target,c1,c2,category` lines, an
/// optional leading header, blank lines ignored.
pub fn parse_triples(text: &str, origin: &Path) -> Result<Vec<TargetCoordinate>> {
    let bad = |line: usize, msg: String| Error::FileFormat {
        path: origin.to_path_buf(),
        msg: format!("line {line}: {msg}"),
    };
    let mut triples = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || (i == 0 && line == TRIPLES_HEADER) {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(bad(
                i + 1,
                format!("expected 4 comma-separated fields, got {}", fields.len()),
            ));
        }
        let category = Category::from_str(fields[3]).map_err(|e| bad(i + 1, e.to_string()))?;
        let triple = TargetCoordinate::new(fields[0], fields[1], fields[2], category)
            .map_err(|e| bad(i + 1, e.to_string()))?;
        triples.push(triple);
    }
    Ok(triples)
}

/// Read a triples file from disk.
pub fn read_triples(path: &Path) -> Result<Vec<TargetCoordinate>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_triples(&text, path)
}

/// Categorized triples curated for corpora of machine-learning conference
/// abstracts. Each row reads "the target drifted toward c1, away from c2";
/// the `unclassified` rows showed no consistent direction on that corpus and
/// are kept as known-unstable probes.
const CURATED_TRIPLES: &[(&str, &str, &str, Category)] = &[
    ("deep", "neural", "rigorous", Category::ResearchInterest),
    ("indicators", "metrics", "features", Category::ResearchInterest),
    ("style", "semantic", "ontology", Category::ResearchInterest),
    ("mnist", "benchmark", "baseline", Category::ResearchInterest),
    ("mnist", "test", "train", Category::ResearchInterest),
    ("learn", "predict", "know", Category::ResearchInterest),
    ("learn", "generate", "receive", Category::ResearchInterest),
    ("novel", "new", "good", Category::LanguageUsage),
    ("first", "new", "good", Category::LanguageUsage),
    ("early", "new", "good", Category::LanguageUsage),
    ("acceptable", "reasonable", "honest", Category::LanguageUsage),
    ("neutral", "positive", "negative", Category::LanguageUsage),
    ("extensive", "experiment", "lot", Category::LanguageUsage),
    ("complementary", "different", "equivalent", Category::LanguageUsage),
    ("implied", "justified", "indicated", Category::LanguageUsage),
    ("implied", "imposed", "influenced", Category::LanguageUsage),
    ("basically", "actually", "essential", Category::LanguageUsage),
    ("basically", "qualitative", "quantitative", Category::LanguageUsage),
    ("totally", "completely", "naturally", Category::LanguageUsage),
    ("consider", "certain", "guess", Category::AcademicActivity),
    ("improve", "good", "superior", Category::AcademicActivity),
    ("simple", "obvious", "method", Category::AcademicActivity),
    ("limitation", "drawback", "future", Category::AcademicActivity),
    ("supplementary", "detailed", "about", Category::AcademicActivity),
    ("innovation", "evolution", "utilization", Category::AcademicActivity),
    ("advice", "answer", "followers", Category::AcademicActivity),
    ("advice", "query", "proposal", Category::AcademicActivity),
    ("promise", "possibility", "concrete", Category::AcademicActivity),
    ("proposal", "candidate", "benchmark", Category::AcademicActivity),
    ("proposal", "methodology", "motivation", Category::AcademicActivity),
    ("proposal", "pipeline", "prototype", Category::AcademicActivity),
    ("review", "comprehensive", "comment", Category::AcademicActivity),
    ("reporting", "measuring", "answering", Category::AcademicActivity),
    ("assessment", "prediction", "validation", Category::AcademicActivity),
    ("quantified", "determined", "constrained", Category::AcademicActivity),
    ("collaboration", "communication", "competition", Category::AcademicActivity),
    ("better", "good", "superior", Category::Unclassified),
    ("likewise", "then", "thus", Category::Unclassified),
    ("proposal", "finding", "descriptor", Category::Unclassified),
    ("fewer", "no", "few", Category::Unclassified),
];

/// Hand-picked descriptor triples probing whether evaluative vocabulary
/// drifts toward its more salient sense (e.g. does "novel" come to mean
/// "good" more than "new").
const MANUAL_TRIPLES: &[(&str, &str, &str)] = &[
    ("consider", "certain", "guess"),
    ("novel", "new", "good"),
    ("better", "good", "superior"),
    ("improve", "good", "superior"),
    ("first", "new", "good"),
    ("early", "new", "good"),
    ("extensive", "lot", "experiments"),
    ("limitation", "drawback", "future"),
    ("simple", "obvious", "method"),
    ("fewer", "few", "no"),
];

/// The curated categorized triples.
pub fn curated_triples() -> Vec<TargetCoordinate> {
    CURATED_TRIPLES
        .iter()
        .map(|&(w, c1, c2, cat)| TargetCoordinate::new(w, c1, c2, cat).expect("curated preset"))
        .collect()
}

/// The hand-picked descriptor triples, shipped uncategorized.
pub fn manual_triples() -> Vec<TargetCoordinate> {
    MANUAL_TRIPLES
        .iter()
        .map(|&(w, c1, c2)| {
            TargetCoordinate::new(w, c1, c2, Category::Unclassified).expect("manual preset")
        })
        .collect()
}

/// Everything the crate ships: the curated list plus any manual triples not
/// already present. Word triples appearing in both keep their category label.
pub fn bundled_triples() -> Vec<TargetCoordinate> {
    let mut all = curated_triples();
    let mut seen: Vec<(String, String, String)> = all
        .iter()
        .map(|t| (t.target.clone(), t.c1.clone(), t.c2.clone()))
        .collect();
    for triple in manual_triples() {
        let key = (triple.target.clone(), triple.c1.clone(), triple.c2.clone());
        if !seen.contains(&key) {
            seen.push(key);
            all.push(triple);
        }
    }
    all
}
