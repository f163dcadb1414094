//! Run configuration: the one structure that fixes every input of a full
//! analysis run. It deserializes from a TOML file whose keys equal the field
//! names, so a config file and a flag set express exactly the same thing.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::coordinates::{
    bundled_triples, curated_triples, manual_triples, TargetCoordinate, DEFAULT_EPSILON,
};
use crate::trainer::TrainingConfig;
use crate::{Error, Result};

/// How slice embeddings are mapped into base space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlignmentMode {
    /// Unconstrained least-squares projection.
    Relaxed,
    /// Orthogonal Procrustes projection (QᵀQ = I).
    Orthogonal,
}

impl fmt::Display for AlignmentMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AlignmentMode::Relaxed => "relaxed",
            AlignmentMode::Orthogonal => "orthogonal",
        })
    }
}

impl FromStr for AlignmentMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "relaxed" => Ok(AlignmentMode::Relaxed),
            "orthogonal" => Ok(AlignmentMode::Orthogonal),
            other => Err(Error::Config(format!(
                "unknown alignment mode {other:?} (expected relaxed or orthogonal)"
            ))),
        }
    }
}

/// Everything a run needs. A TOML config file mirrors these field names
/// exactly (`training` is a table of [`TrainingConfig`] fields); omitted
/// fields take the defaults below. `workers` and `output_dir` are plumbing
/// and do not enter the config hash.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Corpus manifest (`id,year,accepted,path` rows).
    pub manifest: PathBuf,
    /// First year to analyze; derived from the manifest when omitted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub start_year: Option<i32>,
    /// Last year to analyze; derived from the manifest when omitted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub end_year: Option<i32>,
    /// Slicing scheme: a width form like "1-year", or explicit ranges like
    /// "2007-2010,2011-2013,2014-2016".
    pub scheme: String,
    /// Embedding hyperparameters. The `seed` field is ignored here; the
    /// `seeds` list below drives per-seed training.
    pub training: TrainingConfig,
    /// Seeds to train and aggregate over; must be non-empty.
    pub seeds: Vec<u64>,
    /// Number of most-frequent base words anchoring each projection fit.
    pub v_anchor: usize,
    /// Cosine clamp floor for the log-ratio position measure.
    pub epsilon: f64,
    /// Projection flavor.
    pub alignment: AlignmentMode,
    /// Triples to analyze: `preset:bundled`, `preset:curated`,
    /// `preset:manual`, or a path to a `target,c1,c2,category` CSV file.
    pub triples: String,
    /// Neighborhood sizes for the stability comparison.
    pub k_values: Vec<usize>,
    /// Where artifacts, reports, and plots land.
    pub output_dir: PathBuf,
    /// Concurrent training jobs; 1 runs everything inline.
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            manifest: PathBuf::new(),
            start_year: None,
            end_year: None,
            scheme: "1-year".into(),
            training: TrainingConfig::default(),
            seeds: vec![0, 7, 13, 73],
            v_anchor: 1000,
            epsilon: DEFAULT_EPSILON,
            alignment: AlignmentMode::Relaxed,
            triples: "preset:bundled".into(),
            k_values: vec![5, 10, 20],
            output_dir: PathBuf::from("semcoord-out"),
            workers: 1,
        }
    }
}

impl RunConfig {
    /// Parse a TOML config file. Keys mirror the field names; unknown keys
    /// are rejected so typos fail loudly.
    pub fn from_toml_file(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("config file {}: {e}", path.display())))
    }

    /// Serialize back to TOML (the inverse of [`RunConfig::from_toml_file`]).
    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("RunConfig serializes")
    }

    /// Check invariants that do not require reading the corpus: referenced
    /// paths exist, the seed list is sane, numeric knobs are in range.
    /// Everything reported here is a validation error (CLI exit code 2).
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.manifest.as_os_str().is_empty() {
            return fail("no corpus manifest given".into());
        }
        if !self.manifest.is_file() {
            return fail(format!(
                "manifest {} does not exist",
                self.manifest.display()
            ));
        }
        if let Some(name) = self.triples.strip_prefix("preset:") {
            if !matches!(name, "bundled" | "curated" | "manual") {
                return fail(format!(
                    "unknown triples preset {name:?} (expected bundled, curated, or manual)"
                ));
            }
        } else if !Path::new(&self.triples).is_file() {
            return fail(format!("triples file {} does not exist", self.triples));
        }
        if self.seeds.is_empty() {
            return fail("seed list is empty".into());
        }
        let mut sorted = self.seeds.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.seeds.len() {
            return fail("seed list contains duplicates".into());
        }
        if let (Some(start), Some(end)) = (self.start_year, self.end_year) {
            if start > end {
                return fail(format!("year range {start}-{end} has start after end"));
            }
        }
        if self.scheme.trim().is_empty() {
            return fail("slicing scheme is empty".into());
        }
        if self.v_anchor == 0 {
            return fail("v_anchor must be at least 1".into());
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return fail(format!("epsilon must be positive and finite, got {}", self.epsilon));
        }
        if self.k_values.is_empty() {
            return fail("k_values is empty".into());
        }
        if self.k_values.contains(&0) {
            return fail("k_values must all be at least 1".into());
        }
        let mut ks = self.k_values.clone();
        ks.sort_unstable();
        ks.dedup();
        if ks.len() != self.k_values.len() {
            return fail("k_values contains duplicates".into());
        }
        if self.workers == 0 {
            return fail("workers must be at least 1".into());
        }
        self.training.validate()?;
        Ok(())
    }

    /// Load the triples this run analyzes, plus a stable source label that
    /// feeds the config hash (file-backed lists hash their content, so
    /// editing the file changes the run identity).
    pub fn resolve_triples(&self) -> Result<(Vec<TargetCoordinate>, String)> {
        if let Some(name) = self.triples.strip_prefix("preset:") {
            let triples = match name {
                "bundled" => bundled_triples(),
                "curated" => curated_triples(),
                "manual" => manual_triples(),
                other => {
                    return Err(Error::Config(format!("unknown triples preset {other:?}")))
                }
            };
            return Ok((triples, format!("preset:{name}")));
        }
        let path = Path::new(&self.triples);
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let triples = crate::coordinates::parse_triples(&text, path)?;
        let digest = Sha256::digest(text.as_bytes());
        Ok((triples, format!("file:{}", crate::trainer::hex_string(&digest[..8]))))
    }

    /// Training config for one seed of this run.
    pub fn training_for_seed(&self, seed: u64) -> TrainingConfig {
        let mut t = self.training.clone();
        t.seed = seed;
        t
    }

    /// Hash over every input that affects the numbers: corpus content,
    /// resolved scheme, training hyperparameters, seeds, alignment knobs,
    /// triples, and K values. Output location and worker count are excluded —
    /// they must never change results.
    pub fn content_hash(&self, corpus_digest: &str, scheme: &str, triples_label: &str) -> String {
        let canonical = format!(
            "corpus={corpus_digest};scheme={scheme};training={};seeds={:?};v_anchor={};\
             epsilon={:?};alignment={};triples={triples_label};k_values={:?}",
            self.training_for_seed(0).content_hash(),
            self.seeds,
            self.v_anchor,
            self.epsilon,
            self.alignment,
            self.k_values,
        );
        let digest = Sha256::digest(canonical.as_bytes());
        crate::trainer::hex_string(&digest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    #[test]
    fn toml_round_trip_preserves_every_field() {
        let mut config = RunConfig {
            manifest: PathBuf::from("corpus/manifest.csv"),
            start_year: Some(2007),
            end_year: Some(2016),
            scheme: "2-year".into(),
            seeds: vec![0, 7],
            v_anchor: 500,
            epsilon: 1e-5,
            alignment: AlignmentMode::Orthogonal,
            triples: "preset:manual".into(),
            k_values: vec![5, 10],
            output_dir: PathBuf::from("out"),
            workers: 4,
            ..RunConfig::default()
        };
        config.training.dimension = 64;
        let text = config.to_toml();
        let parsed: RunConfig = toml::from_str(&text).unwrap();
        assert_eq!(parsed, config);
    }

    #[test]
    fn partial_toml_fills_defaults() {
        let parsed: RunConfig = toml::from_str("manifest = \"m.csv\"\n").unwrap();
        assert_eq!(parsed.manifest, PathBuf::from("m.csv"));
        assert_eq!(parsed.seeds, vec![0, 7, 13, 73]);
        assert_eq!(parsed.scheme, "1-year");
        assert_eq!(parsed.v_anchor, 1000);
        assert_eq!(parsed.epsilon, DEFAULT_EPSILON);
        assert_eq!(parsed.alignment, AlignmentMode::Relaxed);
        assert_eq!(parsed.k_values, vec![5, 10, 20]);
        assert_eq!(parsed.workers, 1);
        assert_eq!(parsed.training, TrainingConfig::default());
    }

    #[test]
    fn nested_training_table_overrides_defaults() {
        let parsed: RunConfig = toml::from_str(
            "manifest = \"m.csv\"\n[training]\ndimension = 32\nepochs = 2\n",
        )
        .unwrap();
        assert_eq!(parsed.training.dimension, 32);
        assert_eq!(parsed.training.epochs, 2);
        assert_eq!(parsed.training.window, TrainingConfig::default().window);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = toml::from_str::<RunConfig>("manifest = \"m.csv\"\nsceme = \"1-year\"\n");
        assert!(err.is_err());
    }

    #[test]
    fn validation_rejects_missing_manifest() {
        let config = RunConfig {
            manifest: PathBuf::from("/nonexistent/manifest.csv"),
            ..RunConfig::default()
        };
        let err = config.validate().unwrap_err();
        assert!(err.is_validation(), "{err}");
        assert!(err.to_string().contains("does not exist"));
    }

    fn config_with_real_manifest(dir: &Path) -> RunConfig {
        let manifest = dir.join("manifest.csv");
        fs::write(&manifest, "id,year,accepted,path\n").unwrap();
        RunConfig {
            manifest,
            ..RunConfig::default()
        }
    }

    #[test]
    fn validation_rejects_bad_knobs() {
        let dir = tempfile::tempdir().unwrap();
        let base = config_with_real_manifest(dir.path());
        let cases: Vec<(&str, RunConfig)> = vec![
            ("seed list is empty", RunConfig { seeds: vec![], ..base.clone() }),
            ("duplicates", RunConfig { seeds: vec![0, 0], ..base.clone() }),
            ("v_anchor", RunConfig { v_anchor: 0, ..base.clone() }),
            ("epsilon", RunConfig { epsilon: 0.0, ..base.clone() }),
            ("k_values is empty", RunConfig { k_values: vec![], ..base.clone() }),
            ("at least 1", RunConfig { k_values: vec![0], ..base.clone() }),
            ("workers", RunConfig { workers: 0, ..base.clone() }),
            ("preset", RunConfig { triples: "preset:everything".into(), ..base.clone() }),
            ("start after end", RunConfig { start_year: Some(2010), end_year: Some(2007), ..base.clone() }),
        ];
        for (needle, config) in cases {
            let err = config.validate().unwrap_err();
            assert!(err.is_validation(), "{needle}: {err}");
            assert!(err.to_string().contains(needle), "{needle} vs {err}");
        }
        assert!(base.validate().is_ok());
    }

    #[test]
    fn preset_triples_resolve_without_touching_disk() {
        let config = RunConfig::default();
        let (triples, label) = config.resolve_triples().unwrap();
        assert_eq!(triples.len(), 42);
        assert_eq!(label, "preset:bundled");
    }

    #[test]
    fn file_triples_label_tracks_content() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("triples.csv");
        fs::write(&path, "target,c1,c2,category\nnovel,good,new,language-usage\n").unwrap();
        let config = RunConfig {
            triples: path.to_string_lossy().into_owned(),
            ..RunConfig::default()
        };
        let (triples, label_a) = config.resolve_triples().unwrap();
        assert_eq!(triples.len(), 1);
        fs::write(&path, "target,c1,c2,category\ndeep,rigorous,neural,research-interest\n")
            .unwrap();
        let (_, label_b) = config.resolve_triples().unwrap();
        assert_ne!(label_a, label_b);
        assert!(label_a.starts_with("file:"));
    }

    #[test]
    fn config_hash_ignores_plumbing_but_tracks_numerics() {
        let config = RunConfig::default();
        let base = config.content_hash("digest", "2007,2008", "preset:bundled");
        let mut moved = config.clone();
        moved.output_dir = PathBuf::from("elsewhere");
        moved.workers = 8;
        assert_eq!(moved.content_hash("digest", "2007,2008", "preset:bundled"), base);

        let mut swapped = config.clone();
        swapped.epsilon = 1e-5;
        assert_ne!(swapped.content_hash("digest", "2007,2008", "preset:bundled"), base);
        let mut retrained = config.clone();
        retrained.training.window = 7;
        assert_ne!(retrained.content_hash("digest", "2007,2008", "preset:bundled"), base);
        assert_ne!(config.content_hash("other", "2007,2008", "preset:bundled"), base);
    }
}
