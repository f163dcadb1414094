//! Semantic-coordinates analysis over diachronic word embeddings.
//!
//! The crate ingests timestamped documents, trains one word embedding per
//! time slice plus a base embedding over the whole corpus, aligns every
//! slice into the base space with a least-squares (or orthogonal Procrustes)
//! projection, and measures how a target word moves along an axis defined by
//! a pair of coordinate words. Shift direction and speed come from a linear
//! fit of the per-slice log cosine ratio; multi-seed aggregation, neighbor
//! stability scoring, and the nonparametric tests used in the ablations live
//! here as well.
//!
//! Modules follow the pipeline order:
//!
//! - [`corpus`]: LaTeX stripping, tokenization, time slicing, vocabularies.
//! - [`trainer`]: negative-sampling embedding training, cosine queries.
//! - [`alignment`]: projection fitting and application.
//! - [`coordinates`]: coordinate positions, trend fits, seed aggregation.
//! - [`discovery`]: changing-neighbor candidates and stability scores.
//! - [`numerics`]: Mann-Whitney U, Wilcoxon signed-rank, OLS, 2-D PCA.
//! - [`plot`]: deterministic SVG charts.
//! - [`pipeline`]: run orchestration, artifact cache, reports, ablations.
//! - [`synth`]: seeded generator for planted-drift fixture corpora.

pub mod alignment;
pub mod coordinates;
pub mod corpus;
pub mod discovery;
mod error;
pub mod numerics;
pub mod pipeline;
pub mod plot;
pub mod synth;
pub mod trainer;

pub use error::{Error, Result};
