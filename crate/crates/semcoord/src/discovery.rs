//! Candidate discovery through changing neighborhoods, and neighborhood
//! stability scoring.
//!
//! Both tools look at a word's top-K nearest neighbors in every time slice.
//! A word whose neighbor set is not the same in all slices is a candidate
//! for semantic shift. The stability score S^(K) condenses the same signal
//! into a number: over the multiset union of all per-slice neighbor sets,
//! take the K largest occurrence counts f_1..f_K (each at most T) and
//! average f_k/T. A word whose neighborhood never changes scores 1; a word
//! with fully disjoint neighborhoods scores 1/T.
//!
//! Neighbors are computed in the aligned (projected) spaces — cross-slice
//! comparison in unaligned spaces would be meaningless under a non-orthogonal
//! projection.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::numerics::{mann_whitney_u, TestResult};
use crate::trainer::EmbeddingMatrix;

/// Default size of the most-frequent-words candidate pool.
pub const DEFAULT_POOL: usize = 1000;

/// One slice's neighborhood in a [`NeighborTimeline`].
#[derive(Debug, Clone, PartialEq)]
pub struct TimelineEntry {
    pub slice_label: String,
    /// Top-K neighbors, nearest first; never contains the word itself.
    pub neighbors: Vec<String>,
    /// The slice vocabulary was too small to supply K neighbors.
    pub deficient: bool,
}

/// A word's top-K neighbor sets across all time slices.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborTimeline {
    pub word: String,
    pub k: usize,
    pub entries: Vec<TimelineEntry>,
}

impl NeighborTimeline {
    /// Whether the neighbor sets differ between any two slices.
    pub fn changes(&self) -> bool {
        let sets: Vec<BTreeSet<&str>> = self
            .entries
            .iter()
            .map(|e| e.neighbors.iter().map(String::as_str).collect())
            .collect();
        // Any two slices differing is equivalent to some slice differing
        // from the first.
        sets.first().is_some_and(|first| sets.iter().any(|s| s != first))
    }
}

fn slice_label(emb: &EmbeddingMatrix, position: usize) -> String {
    if emb.provenance.label.is_empty() {
        (position + 1).to_string()
    } else {
        emb.provenance.label.clone()
    }
}

/// Collect a word's top-K neighbors in every slice. Errors if the word is
/// missing from any slice vocabulary.
pub fn neighbor_timeline(
    slices: &[EmbeddingMatrix],
    word: &str,
    k: usize,
) -> Result<NeighborTimeline> {
    if k == 0 {
        return Err(Error::Config("neighbor count K must be at least 1".into()));
    }
    let mut entries = Vec::with_capacity(slices.len());
    for (t, emb) in slices.iter().enumerate() {
        let label = slice_label(emb, t);
        if emb.vocab().id(word).is_none() {
            return Err(Error::MissingInSlice {
                word: word.into(),
                slice: label,
            });
        }
        let neighbors: Vec<String> = emb
            .nearest_neighbors(word, k)?
            .into_iter()
            .map(|(w, _)| w)
            .collect();
        let deficient = neighbors.len() < k;
        entries.push(TimelineEntry {
            slice_label: label,
            neighbors,
            deficient,
        });
    }
    Ok(NeighborTimeline {
        word: word.into(),
        k,
        entries,
    })
}

/// From the `n_pool` most frequent base-corpus words, return those whose
/// top-K neighbor sets are not identical across all slices.
///
/// Pool words missing from any slice are skipped: their neighborhoods cannot
/// be compared, and they could not serve as trajectory targets anyway. The
/// result preserves base-frequency order.
pub fn changing_neighbor_candidates(
    slices: &[EmbeddingMatrix],
    base: &EmbeddingMatrix,
    n_pool: usize,
    k: usize,
) -> Result<Vec<String>> {
    if n_pool == 0 {
        return Err(Error::Config("candidate pool size must be at least 1".into()));
    }
    if k == 0 {
        return Err(Error::Config("neighbor count K must be at least 1".into()));
    }
    let pool: Vec<&str> = base
        .vocab()
        .words()
        .iter()
        .take(n_pool)
        .map(String::as_str)
        .collect();
    let mut candidates = Vec::new();
    for word in pool {
        if slices.iter().any(|emb| emb.vocab().id(word).is_none()) {
            continue;
        }
        let timeline = neighbor_timeline(slices, word, k)?;
        if timeline.changes() {
            candidates.push(word.to_string());
        }
    }
    Ok(candidates)
}

/// Neighborhood persistence S^(K) of one word, in (0, 1].
///
/// Counts how often each neighbor recurs across the T slices, keeps the K
/// largest counts, and averages them as fractions of T.
pub fn stability_score(slices: &[EmbeddingMatrix], word: &str, k: usize) -> Result<f64> {
    if slices.is_empty() {
        return Err(Error::EmptySample("stability score needs at least one slice".into()));
    }
    let timeline = neighbor_timeline(slices, word, k)?;
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for entry in &timeline.entries {
        for neighbor in &entry.neighbors {
            *counts.entry(neighbor.as_str()).or_insert(0) += 1;
        }
    }
    if counts.is_empty() {
        return Err(Error::Config(format!(
            "no neighbors available for {word:?}; vocabulary too small"
        )));
    }
    let mut frequencies: Vec<usize> = counts.into_values().collect();
    frequencies.sort_unstable_by(|a, b| b.cmp(a));
    let top: usize = frequencies.iter().take(k).sum();
    Ok(top as f64 / (k * slices.len()) as f64)
}

/// Which side of the stability comparison a word belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Population {
    Target,
    Coordinate,
}

impl Population {
    pub fn as_str(self) -> &'static str {
        match self {
            Population::Target => "target",
            Population::Coordinate => "coordinate",
        }
    }
}

impl fmt::Display for Population {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One word's score at one K.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRow {
    pub word: String,
    pub population: Population,
    pub k: usize,
    pub score: f64,
}

/// Per-K comparison of the two populations.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilitySummary {
    pub k: usize,
    pub target_mean: f64,
    pub coordinate_mean: f64,
    pub test: TestResult,
}

/// Stability scores for two word populations plus the per-K rank test.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub rows: Vec<ScoreRow>,
    pub summaries: Vec<StabilitySummary>,
}

impl StabilityReport {
    /// Comma-separated rows (`word,population,K,score`) followed by a
    /// commented summary block with the group means and test results per K.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("word,population,K,score\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{:.8e}\n",
                row.word, row.population, row.k, row.score
            ));
        }
        out.push_str("# K,target_mean,coordinate_mean,u_statistic,p_value,method\n");
        for s in &self.summaries {
            out.push_str(&format!(
                "# {},{:.8e},{:.8e},{:.8e},{:.8e},{}\n",
                s.k, s.target_mean, s.coordinate_mean, s.test.statistic, s.test.p_value, s.test.method
            ));
        }
        out
    }
}

/// Score two disjoint word populations at each K and compare them with the
/// two-sided Mann–Whitney rank test.
pub fn compare_stability(
    targets: &[String],
    coordinates: &[String],
    ks: &[usize],
    slices: &[EmbeddingMatrix],
) -> Result<StabilityReport> {
    if targets.is_empty() || coordinates.is_empty() {
        return Err(Error::EmptySample(
            "stability comparison needs both populations non-empty".into(),
        ));
    }
    if ks.is_empty() {
        return Err(Error::Config("no K values requested".into()));
    }
    let mut seen: BTreeSet<&str> = BTreeSet::new();
    for word in targets.iter().chain(coordinates) {
        if !seen.insert(word) {
            return Err(Error::Config(format!(
                "word {word:?} appears twice across the stability populations"
            )));
        }
    }
    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    for &k in ks {
        let mut target_scores = Vec::with_capacity(targets.len());
        for word in targets {
            let score = stability_score(slices, word, k)?;
            target_scores.push(score);
            rows.push(ScoreRow {
                word: word.clone(),
                population: Population::Target,
                k,
                score,
            });
        }
        let mut coordinate_scores = Vec::with_capacity(coordinates.len());
        for word in coordinates {
            let score = stability_score(slices, word, k)?;
            coordinate_scores.push(score);
            rows.push(ScoreRow {
                word: word.clone(),
                population: Population::Coordinate,
                k,
                score,
            });
        }
        let test = mann_whitney_u(&target_scores, &coordinate_scores)?;
        summaries.push(StabilitySummary {
            k,
            target_mean: target_scores.iter().sum::<f64>() / target_scores.len() as f64,
            coordinate_mean: coordinate_scores.iter().sum::<f64>()
                / coordinate_scores.len() as f64,
            test,
        });
    }
    Ok(StabilityReport { rows, summaries })
}
