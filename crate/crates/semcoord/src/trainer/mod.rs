//! Word embedding training with negative sampling, plus similarity queries
//! and the canonical text serialization.
//!
//! Training follows the classic word2vec reference behavior: linear
//! congruential randomness, dynamic window shrinking, frequent-word
//! subsampling, a unigram^0.75 negative-sampling distribution, and a
//! precomputed sigmoid table. Runs are bit-reproducible for a fixed
//! (input, config) pair in single-worker mode.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::{build_vocabulary, Vocabulary};
use crate::{Error, Result};

/// Sigmoid lookup resolution (word2vec's EXP_TABLE_SIZE / MAX_EXP).
const SIGMOID_TABLE_SIZE: usize = 1000;
const MAX_EXP: f32 = 6.0;
/// Documents are chunked into sentences of at most this many tokens.
const MAX_SENTENCE_LENGTH: usize = 1000;
/// Exponent of the unigram distribution used for negative sampling.
const NEGATIVE_POWER: f64 = 0.75;
/// Number of (center, context) pairs sampled for the probe loss.
const PROBE_PAIRS: usize = 512;
const PROBE_NEGATIVES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Architecture {
    SkipGram,
    Cbow,
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Architecture::SkipGram => write!(f, "skip-gram"),
            Architecture::Cbow => write!(f, "cbow"),
        }
    }
}

impl FromStr for Architecture {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "skip-gram" | "skipgram" | "sg" => Ok(Architecture::SkipGram),
            "cbow" => Ok(Architecture::Cbow),
            other => Err(Error::InvalidTrainingConfig(format!(
                "unknown architecture {other:?} (expected skip-gram or cbow)"
            ))),
        }
    }
}

/// Hyperparameters for one training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainingConfig {
    pub dimension: usize,
    pub min_count: u32,
    pub window: u32,
    pub negatives: u32,
    pub epochs: u32,
    pub learning_rate: f32,
    pub min_learning_rate: f32,
    pub subsample: f32,
    pub architecture: Architecture,
    pub seed: u64,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        TrainingConfig {
            dimension: 100,
            min_count: 3,
            window: 5,
            negatives: 5,
            epochs: 5,
            learning_rate: 0.025,
            min_learning_rate: 1e-4,
            subsample: 1e-3,
            architecture: Architecture::SkipGram,
            seed: 0,
        }
    }
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::InvalidTrainingConfig(msg.into()));
        if self.dimension == 0 {
            return fail("dimension must be at least 1");
        }
        if self.min_count == 0 {
            return fail("min_count must be at least 1");
        }
        if self.window == 0 {
            return fail("window must be at least 1");
        }
        if self.negatives == 0 {
            return fail("negatives must be at least 1");
        }
        if self.epochs == 0 {
            return fail("epochs must be at least 1");
        }
        if !(self.learning_rate > 0.0) {
            return fail("learning rate must be positive");
        }
        if !(self.min_learning_rate >= 0.0 && self.min_learning_rate <= self.learning_rate) {
            return fail("min learning rate must be in [0, learning_rate]");
        }
        if !(self.subsample >= 0.0) {
            return fail("subsample threshold must be non-negative");
        }
        Ok(())
    }

    /// Stable hash over every field that affects the numbers produced.
    pub fn content_hash(&self) -> String {
        let canonical = format!(
            "dimension={};min_count={};window={};negatives={};epochs={};\
             learning_rate={:?};min_learning_rate={:?};subsample={:?};\
             architecture={};seed={}",
            self.dimension,
            self.min_count,
            self.window,
            self.negatives,
            self.epochs,
            self.learning_rate,
            self.min_learning_rate,
            self.subsample,
            self.architecture,
            self.seed
        );
        let digest = Sha256::digest(canonical.as_bytes());
        hex_string(&digest)
    }
}

pub(crate) fn hex_string(bytes: &[u8]) -> String {
    let mut out = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// Where an embedding came from.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Provenance {
    pub label: String,
    pub seed: u64,
    pub config_hash: String,
}

/// Round `x` to 9 significant decimal digits, the precision carried by the
/// text serialization. Applying it at construction makes in-memory values
/// identical to what a save/load round trip yields.
pub fn quantize9(x: f64) -> f64 {
    format!("{x:.8e}").parse().unwrap()
}

/// A vocabulary plus one vector per word, stored row-major and quantized to
/// 9 significant digits.
#[derive(Debug, Clone)]
pub struct EmbeddingMatrix {
    vocab: Vocabulary,
    dimension: usize,
    data: Vec<f64>,
    pub provenance: Provenance,
}

impl EmbeddingMatrix {
    /// Wrap raw vectors; `data` is row-major with one row per vocabulary
    /// word, quantized here.
    pub fn new(
        vocab: Vocabulary,
        dimension: usize,
        data: Vec<f64>,
        provenance: Provenance,
    ) -> Result<Self> {
        if data.len() != vocab.len() * dimension {
            return Err(Error::DimensionMismatch {
                left: data.len(),
                right: vocab.len() * dimension,
            });
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::Config("embedding contains a non-finite value".into()));
        }
        let data = data.into_iter().map(quantize9).collect();
        Ok(EmbeddingMatrix {
            vocab,
            dimension,
            data,
            provenance,
        })
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.vocab.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vocab.is_empty()
    }

    pub fn row(&self, id: u32) -> &[f64] {
        let i = id as usize * self.dimension;
        &self.data[i..i + self.dimension]
    }

    pub fn vector(&self, word: &str) -> Option<&[f64]> {
        self.vocab.id(word).map(|id| self.row(id))
    }

    /// Cosine similarity between two vocabulary words.
    pub fn cosine_words(&self, a: &str, b: &str) -> Result<f64> {
        let va = self
            .vector(a)
            .ok_or_else(|| Error::OutOfVocabulary { word: a.into() })?;
        let vb = self
            .vector(b)
            .ok_or_else(|| Error::OutOfVocabulary { word: b.into() })?;
        cosine(va, vb)
    }

    /// Top-`k` words by cosine similarity to `word`, the query itself
    /// excluded, ties broken lexicographically. Returns fewer than `k`
    /// entries when the vocabulary is small.
    pub fn nearest_neighbors(&self, word: &str, k: usize) -> Result<Vec<(String, f64)>> {
        let query_id = self
            .vocab
            .id(word)
            .ok_or_else(|| Error::OutOfVocabulary { word: word.into() })?;
        let query = self.row(query_id);
        let qn = norm(query);
        if qn == 0.0 {
            return Err(Error::ZeroVector);
        }
        let mut sims: Vec<(u32, f64)> = Vec::with_capacity(self.len().saturating_sub(1));
        for id in 0..self.len() as u32 {
            if id == query_id {
                continue;
            }
            let row = self.row(id);
            let n = norm(row);
            if n == 0.0 {
                continue; // unrankable; cannot occur for trained matrices
            }
            let sim = (dot(query, row) / (qn * n)).clamp(-1.0, 1.0);
            sims.push((id, sim));
        }
        sims.sort_by(|a, b| {
            b.1.total_cmp(&a.1)
                .then_with(|| self.vocab.word(a.0).cmp(self.vocab.word(b.0)))
        });
        sims.truncate(k);
        Ok(sims
            .into_iter()
            .map(|(id, s)| (self.vocab.word(id).to_string(), s))
            .collect())
    }

    /// Write the canonical text form: "V D" header, then one `word v1..vD`
    /// line per word, reals at 9 significant digits.
    pub fn save_text(&self, path: &Path) -> Result<()> {
        let mut out = String::with_capacity(self.len() * (self.dimension * 18 + 16));
        out.push_str(&format!("{} {}\n", self.len(), self.dimension));
        for id in 0..self.len() as u32 {
            out.push_str(self.vocab.word(id));
            for x in self.row(id) {
                out.push(' ');
                out.push_str(&format!("{x:.8e}"));
            }
            out.push('\n');
        }
        std::fs::write(path, out).map_err(|e| Error::io(path, e))
    }

    /// Read the text form back. The word order in the file encodes the
    /// frequency ranking; absolute counts are not stored, so the resulting
    /// vocabulary reports zero counts.
    pub fn load_text(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let bad = |msg: String| Error::FileFormat {
            path: path.to_path_buf(),
            msg,
        };
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| bad("empty file".into()))?;
        let mut parts = header.split_whitespace();
        let v: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("bad header".into()))?;
        let d: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("bad header".into()))?;

        let mut words = Vec::with_capacity(v);
        let mut seen = std::collections::HashSet::new();
        let mut data = Vec::with_capacity(v * d);
        for (i, line) in lines.enumerate() {
            if i >= v {
                return Err(bad(format!("more than {v} rows")));
            }
            let mut fields = line.split_whitespace();
            let word = fields
                .next()
                .ok_or_else(|| bad(format!("row {i}: empty line")))?;
            if !seen.insert(word.to_string()) {
                return Err(bad(format!("duplicate word {word:?}")));
            }
            words.push(word.to_string());
            let mut n = 0;
            for f in fields {
                let x: f64 = f
                    .parse()
                    .map_err(|_| bad(format!("row {i}: bad real {f:?}")))?;
                data.push(x);
                n += 1;
            }
            if n != d {
                return Err(bad(format!("row {i}: expected {d} reals, got {n}")));
            }
        }
        if words.len() != v {
            return Err(bad(format!("expected {v} rows, got {}", words.len())));
        }
        let vocab = Vocabulary::from_ordered_words(words);
        EmbeddingMatrix::new(vocab, d, data, Provenance::default())
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }
}

/// Cosine similarity of two equal-length nonzero vectors, clamped into
/// [-1, 1] against rounding spill.
pub fn cosine(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok((dot(a, b) / (na * nb)).clamp(-1.0, 1.0))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Per-epoch probe losses recorded during training.
#[derive(Debug, Clone)]
pub struct TrainingStats {
    /// Negative-sampling objective on a fixed probe batch, measured after
    /// each epoch (lower is better).
    pub epoch_losses: Vec<f64>,
}

/// word2vec's linear congruential generator.
#[derive(Clone)]
struct Lcg(u64);

impl Lcg {
    fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_mul(25214903917).wrapping_add(11);
        self.0
    }

    /// Uniform in [0, 1) from the low 16 bits, as the reference does for
    /// subsampling decisions.
    fn next_f32_16(&mut self) -> f32 {
        (self.next_u64() & 0xFFFF) as f32 / 65536.0
    }

    /// Uniform f64 in [0, 1) with 53 random bits.
    fn next_unit_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
}

/// Train on `docs` (one token stream per document) and return the input-side
/// vectors.
pub fn train_embedding(
    docs: &[&[String]],
    config: &TrainingConfig,
    label: &str,
) -> Result<EmbeddingMatrix> {
    train_embedding_with_stats(docs, config, label).map(|(emb, _)| emb)
}

/// As [`train_embedding`], also reporting per-epoch probe losses.
pub fn train_embedding_with_stats(
    docs: &[&[String]],
    config: &TrainingConfig,
    label: &str,
) -> Result<(EmbeddingMatrix, TrainingStats)> {
    config.validate()?;
    let vocab = build_vocabulary(
        docs.iter().flat_map(|d| d.iter().map(String::as_str)),
        config.min_count,
    );
    if vocab.is_empty() {
        return Err(Error::EmptySlice {
            slice: label.to_string(),
        });
    }

    // Documents as id streams (below-threshold tokens dropped), chunked into
    // bounded sentences.
    let mut sentences: Vec<Vec<u32>> = Vec::new();
    for doc in docs {
        let ids: Vec<u32> = doc.iter().filter_map(|t| vocab.id(t)).collect();
        for chunk in ids.chunks(MAX_SENTENCE_LENGTH) {
            if !chunk.is_empty() {
                sentences.push(chunk.to_vec());
            }
        }
    }

    let v = vocab.len();
    let d = config.dimension;
    let train_tokens: u64 = vocab.retained_tokens();

    let mut rng = Lcg(config.seed);
    let mut syn0: Vec<f32> = (0..v * d)
        .map(|_| ((rng.next_u64() & 0xFFFF) as f32 / 65536.0 - 0.5) / d as f32)
        .collect();
    let mut syn1neg = vec![0f32; v * d];

    let sigmoid = build_sigmoid_table();
    let cumulative = build_negative_cumulative(&vocab);
    let keep_prob = build_keep_probabilities(&vocab, config.subsample, train_tokens);
    let probe = build_probe_batch(&sentences, &cumulative, config.seed);

    let mut alpha = config.learning_rate;
    let mut processed: u64 = 0;
    let total_schedule = config.epochs as u64 * train_tokens + 1;
    let window = config.window as usize;
    let negatives = config.negatives as usize;
    let mut neu1e = vec![0f32; d];
    let mut neu1 = vec![0f32; d];
    let mut losses = Vec::with_capacity(config.epochs as usize);

    for _epoch in 0..config.epochs {
        for sentence in &sentences {
            // Subsample frequent words while counting schedule progress.
            let mut sen: Vec<u32> = Vec::with_capacity(sentence.len());
            for &w in sentence {
                processed += 1;
                if processed % 10_000 == 0 {
                    let frac = processed as f32 / total_schedule as f32;
                    alpha = (config.learning_rate * (1.0 - frac))
                        .max(config.min_learning_rate);
                }
                if config.subsample > 0.0 {
                    let keep = keep_prob[w as usize];
                    let draw = rng.next_f32_16();
                    if keep < draw {
                        continue;
                    }
                }
                sen.push(w);
            }

            match config.architecture {
                Architecture::SkipGram => train_sentence_skipgram(
                    &sen, window, negatives, alpha, d, &mut syn0, &mut syn1neg, &sigmoid,
                    &cumulative, &mut rng, &mut neu1e,
                ),
                Architecture::Cbow => train_sentence_cbow(
                    &sen, window, negatives, alpha, d, &mut syn0, &mut syn1neg, &sigmoid,
                    &cumulative, &mut rng, &mut neu1e, &mut neu1,
                ),
            }
        }
        losses.push(probe_loss(&probe, &syn0, &syn1neg, d));
    }

    let data: Vec<f64> = syn0.into_iter().map(|x| x as f64).collect();
    let provenance = Provenance {
        label: label.to_string(),
        seed: config.seed,
        config_hash: config.content_hash(),
    };
    let emb = EmbeddingMatrix::new(vocab, d, data, provenance)?;
    Ok((
        emb,
        TrainingStats {
            epoch_losses: losses,
        },
    ))
}

#[allow(clippy::too_many_arguments)]
fn train_sentence_skipgram(
    sen: &[u32],
    window: usize,
    negatives: usize,
    alpha: f32,
    d: usize,
    syn0: &mut [f32],
    syn1neg: &mut [f32],
    sigmoid: &[f32],
    cumulative: &[f64],
    rng: &mut Lcg,
    neu1e: &mut [f32],
) {
    for pos in 0..sen.len() {
        let word = sen[pos] as usize;
        let b = (rng.next_u64() % window as u64) as usize;
        for a in b..(2 * window + 1 - b) {
            if a == window {
                continue;
            }
            let c = pos as i64 - window as i64 + a as i64;
            if c < 0 || c >= sen.len() as i64 {
                continue;
            }
            let last = sen[c as usize] as usize;
            let l1 = last * d;
            neu1e.fill(0.0);
            for k in 0..=negatives {
                let (target, tag) = if k == 0 {
                    (word, 1.0f32)
                } else {
                    let t = sample_negative(cumulative, rng);
                    if t == word {
                        continue;
                    }
                    (t, 0.0f32)
                };
                let l2 = target * d;
                let f: f32 = (0..d).map(|j| syn0[l1 + j] * syn1neg[l2 + j]).sum();
                let g = gradient(sigmoid, f, tag) * alpha;
                for j in 0..d {
                    neu1e[j] += g * syn1neg[l2 + j];
                }
                for j in 0..d {
                    syn1neg[l2 + j] += g * syn0[l1 + j];
                }
            }
            for j in 0..d {
                syn0[l1 + j] += neu1e[j];
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn train_sentence_cbow(
    sen: &[u32],
    window: usize,
    negatives: usize,
    alpha: f32,
    d: usize,
    syn0: &mut [f32],
    syn1neg: &mut [f32],
    sigmoid: &[f32],
    cumulative: &[f64],
    rng: &mut Lcg,
    neu1e: &mut [f32],
    neu1: &mut [f32],
) {
    for pos in 0..sen.len() {
        let word = sen[pos] as usize;
        let b = (rng.next_u64() % window as u64) as usize;
        neu1.fill(0.0);
        neu1e.fill(0.0);
        let mut cw = 0;
        for a in b..(2 * window + 1 - b) {
            if a == window {
                continue;
            }
            let c = pos as i64 - window as i64 + a as i64;
            if c < 0 || c >= sen.len() as i64 {
                continue;
            }
            let l = sen[c as usize] as usize * d;
            for j in 0..d {
                neu1[j] += syn0[l + j];
            }
            cw += 1;
        }
        if cw == 0 {
            continue;
        }
        for j in 0..d {
            neu1[j] /= cw as f32;
        }
        for k in 0..=negatives {
            let (target, tag) = if k == 0 {
                (word, 1.0f32)
            } else {
                let t = sample_negative(cumulative, rng);
                if t == word {
                    continue;
                }
                (t, 0.0f32)
            };
            let l2 = target * d;
            let f: f32 = (0..d).map(|j| neu1[j] * syn1neg[l2 + j]).sum();
            let g = gradient(sigmoid, f, tag) * alpha;
            for j in 0..d {
                neu1e[j] += g * syn1neg[l2 + j];
            }
            for j in 0..d {
                syn1neg[l2 + j] += g * neu1[j];
            }
        }
        for a in b..(2 * window + 1 - b) {
            if a == window {
                continue;
            }
            let c = pos as i64 - window as i64 + a as i64;
            if c < 0 || c >= sen.len() as i64 {
                continue;
            }
            let l = sen[c as usize] as usize * d;
            for j in 0..d {
                syn0[l + j] += neu1e[j];
            }
        }
    }
}

fn build_sigmoid_table() -> Vec<f32> {
    (0..SIGMOID_TABLE_SIZE)
        .map(|i| {
            let x = (i as f32 / SIGMOID_TABLE_SIZE as f32 * 2.0 - 1.0) * MAX_EXP;
            let e = x.exp();
            e / (e + 1.0)
        })
        .collect()
}

/// sigmoid(f) via table lookup, returning the gradient factor (tag - sig).
fn gradient(sigmoid: &[f32], f: f32, tag: f32) -> f32 {
    if f > MAX_EXP {
        tag - 1.0
    } else if f < -MAX_EXP {
        tag
    } else {
        let idx = ((f + MAX_EXP) * (SIGMOID_TABLE_SIZE as f32 / MAX_EXP / 2.0)) as usize;
        tag - sigmoid[idx.min(SIGMOID_TABLE_SIZE - 1)]
    }
}

/// Normalized cumulative mass of count^0.75 per word, for negative draws.
fn build_negative_cumulative(vocab: &Vocabulary) -> Vec<f64> {
    let mut cumulative = Vec::with_capacity(vocab.len());
    let mut acc = 0.0;
    for id in 0..vocab.len() as u32 {
        acc += (vocab.count(id) as f64).powf(NEGATIVE_POWER);
        cumulative.push(acc);
    }
    let total = acc;
    for c in &mut cumulative {
        *c /= total;
    }
    cumulative
}

fn sample_negative(cumulative: &[f64], rng: &mut Lcg) -> usize {
    let u = rng.next_unit_f64();
    cumulative
        .partition_point(|&c| c <= u)
        .min(cumulative.len() - 1)
}

/// Per-word keep probability for subsampling: (sqrt(f/thr) + 1) * thr / f,
/// where thr = subsample * total tokens. Values above 1 mean "always keep".
fn build_keep_probabilities(vocab: &Vocabulary, subsample: f32, train_tokens: u64) -> Vec<f32> {
    if subsample <= 0.0 {
        return vec![1.0; vocab.len()];
    }
    let threshold = subsample as f64 * train_tokens as f64;
    (0..vocab.len() as u32)
        .map(|id| {
            let f = vocab.count(id) as f64;
            ((((f / threshold).sqrt() + 1.0) * (threshold / f)).min(1.0)) as f32
        })
        .collect()
}

struct ProbeBatch {
    /// (context word, center word) pairs.
    pairs: Vec<(u32, u32)>,
    /// Fixed negatives, PROBE_NEGATIVES per pair, flattened.
    negatives: Vec<u32>,
}

/// A fixed batch of adjacent-token pairs with pre-drawn negatives, used to
/// track the objective across epochs without touching the training RNG.
fn build_probe_batch(sentences: &[Vec<u32>], cumulative: &[f64], seed: u64) -> ProbeBatch {
    let total_adjacent: usize = sentences
        .iter()
        .map(|s| s.len().saturating_sub(1))
        .sum();
    let stride = (total_adjacent / PROBE_PAIRS).max(1);
    let mut pairs = Vec::new();
    let mut counter = 0usize;
    for sentence in sentences {
        for w in sentence.windows(2) {
            if counter % stride == 0 && pairs.len() < PROBE_PAIRS {
                pairs.push((w[0], w[1]));
            }
            counter += 1;
        }
    }
    let mut rng = Lcg(seed ^ 0xa5a5_a5a5_a5a5_a5a5);
    let negatives = (0..pairs.len() * PROBE_NEGATIVES)
        .map(|_| sample_negative(cumulative, &mut rng) as u32)
        .collect();
    ProbeBatch { pairs, negatives }
}

/// Mean negative-sampling loss over the probe batch, in f64 for stability.
fn probe_loss(probe: &ProbeBatch, syn0: &[f32], syn1neg: &[f32], d: usize) -> f64 {
    if probe.pairs.is_empty() {
        return 0.0;
    }
    let mut loss = 0.0;
    for (i, &(ctx, center)) in probe.pairs.iter().enumerate() {
        let l1 = ctx as usize * d;
        let pos: f64 = (0..d)
            .map(|j| syn0[l1 + j] as f64 * syn1neg[center as usize * d + j] as f64)
            .sum();
        // -log sigmoid(x) = ln(1 + e^(-x))
        loss += (-pos).exp().ln_1p();
        for k in 0..PROBE_NEGATIVES {
            let neg = probe.negatives[i * PROBE_NEGATIVES + k] as usize;
            if neg == center as usize {
                continue;
            }
            let f: f64 = (0..d)
                .map(|j| syn0[l1 + j] as f64 * syn1neg[neg * d + j] as f64)
                .sum();
            loss += f.exp().ln_1p();
        }
    }
    loss / probe.pairs.len() as f64
}
