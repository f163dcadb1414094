//! Synthetic corpora with planted semantic drift.
//!
//! The generator builds timestamped documents in which selected target words
//! migrate between two word communities: in the first slice a drift word's
//! contexts come entirely from its source community, in the last slice
//! entirely from its destination community, interpolating linearly in
//! between. Community members also co-occur among themselves so that every
//! community forms a coherent neighborhood. Stationary words keep a single
//! community throughout and serve as the control population.
//!
//! Because the construction is known, the expected analysis outcome is too:
//! a triple (drift word, source member, destination member) must fit a
//! negative slope (shift toward c2), drift words must score lower
//! neighborhood stability than stationary words, and the planted sign must
//! survive changes of slicing scheme. The generators are deterministic in
//! their seed, so fixtures and golden files stay reproducible.

use std::path::{Path, PathBuf};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::coordinates::{Category, TargetCoordinate};
use crate::corpus::DocumentRecord;
use crate::error::{Error, Result};

/// Shape of a planted-drift corpus.
#[derive(Debug, Clone)]
pub struct DriftCorpusConfig {
    pub seed: u64,
    pub start_year: i32,
    /// One slice per year.
    pub n_slices: usize,
    /// Number of drifting target words, each with its own source and
    /// destination community.
    pub n_drift: usize,
    /// Number of stationary control words, each with one fixed community.
    pub n_stationary: usize,
    /// Words per community.
    pub community_size: usize,
    /// Approximate token budget per slice.
    pub tokens_per_slice: usize,
    /// Portion of each slice's budget spent on 5-token target occurrences;
    /// the rest becomes 6-token community-interior sentences. Keeping this
    /// below ~0.3 leaves the targets less frequent than community members,
    /// so frequency-ranked anchor selection picks only stationary words.
    pub target_token_share: f64,
    pub docs_per_slice: usize,
    /// Emit alternating accepted/rejected flags on documents. When false the
    /// acceptance column is left empty.
    pub acceptance_flags: bool,
    /// Extra pull toward the source community for accepted documents only:
    /// their interpolation parameter is scaled by (1 − boost). 0 plants no
    /// acceptance effect.
    pub ac_c1_boost: f64,
}

impl Default for DriftCorpusConfig {
    fn default() -> Self {
        DriftCorpusConfig {
            seed: 0,
            start_year: 2007,
            n_slices: 10,
            n_drift: 1,
            n_stationary: 0,
            community_size: 10,
            tokens_per_slice: 200_000,
            target_token_share: 0.2,
            docs_per_slice: 20,
            acceptance_flags: true,
            ac_c1_boost: 0.0,
        }
    }
}

/// One planted drift: the word and representative members of its two
/// communities, packaged as the triple the analysis should flag.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedDrift {
    pub word: String,
    /// First member of the source community (the c1 side).
    pub source: String,
    /// First member of the destination community (the c2 side).
    pub destination: String,
}

impl PlantedDrift {
    /// The triple whose fitted slope must come out negative (toward c2).
    pub fn triple(&self) -> TargetCoordinate {
        TargetCoordinate::new(&self.word, &self.source, &self.destination, Category::Unclassified)
            .expect("planted words are distinct")
    }
}

/// What the generator planted, for use as test oracles.
#[derive(Debug, Clone)]
pub struct PlantedWords {
    pub drift: Vec<PlantedDrift>,
    pub stationary: Vec<String>,
}

impl PlantedWords {
    pub fn drift_words(&self) -> Vec<String> {
        self.drift.iter().map(|d| d.word.clone()).collect()
    }

    pub fn triples(&self) -> Vec<TargetCoordinate> {
        self.drift.iter().map(PlantedDrift::triple).collect()
    }
}

/// Lowercase base-26 tag: 0 → "a", 25 → "z", 26 → "ab".
fn code(mut n: usize) -> String {
    let mut out = String::new();
    loop {
        out.push((b'a' + (n % 26) as u8) as char);
        n /= 26;
        if n == 0 {
            break;
        }
    }
    out
}

fn community(prefix: &str, index: usize, size: usize) -> Vec<String> {
    (0..size)
        .map(|m| format!("{prefix}{}{}", code(index), code(m)))
        .collect()
}

struct SentencePools {
    accepted: Vec<Vec<String>>,
    rejected: Vec<Vec<String>>,
}

fn sample<'a>(rng: &mut ChaCha8Rng, words: &'a [String]) -> &'a str {
    &words[rng.random_range(0..words.len())]
}

/// A target occurrence: two context words, the target, two context words.
fn target_sentence(rng: &mut ChaCha8Rng, word: &str, context: &[String]) -> Vec<String> {
    vec![
        sample(rng, context).to_string(),
        sample(rng, context).to_string(),
        word.to_string(),
        sample(rng, context).to_string(),
        sample(rng, context).to_string(),
    ]
}

/// Generate a planted-drift corpus. Returns the documents (ordered by year)
/// and the planted structure.
pub fn drift_corpus(config: &DriftCorpusConfig) -> (Vec<DocumentRecord>, PlantedWords) {
    assert!(config.n_slices >= 1, "need at least one slice");
    assert!(config.community_size >= 1, "communities cannot be empty");
    assert!(config.docs_per_slice >= 1, "need at least one document per slice");

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let drift_words: Vec<String> = (0..config.n_drift).map(|i| format!("drift{}", code(i))).collect();
    let sources: Vec<Vec<String>> = (0..config.n_drift)
        .map(|i| community("src", i, config.community_size))
        .collect();
    let destinations: Vec<Vec<String>> = (0..config.n_drift)
        .map(|i| community("dst", i, config.community_size))
        .collect();
    let stationary_words: Vec<String> = (0..config.n_stationary)
        .map(|j| format!("still{}", code(j)))
        .collect();
    let anchors: Vec<Vec<String>> = (0..config.n_stationary)
        .map(|j| community("anchor", j, config.community_size))
        .collect();

    let all_communities: Vec<&Vec<String>> = sources
        .iter()
        .chain(destinations.iter())
        .chain(anchors.iter())
        .collect();

    let n_targets = config.n_drift + config.n_stationary;
    let target_budget = (config.tokens_per_slice as f64 * config.target_token_share) as usize;
    let occurrences_per_target = (target_budget / 5 / n_targets.max(1)).max(1);
    let community_budget = config.tokens_per_slice.saturating_sub(target_budget);
    let community_sentences = (community_budget / 6).max(all_communities.len());

    let mut documents = Vec::new();
    for t in 0..config.n_slices {
        let year = config.start_year + t as i32;
        let phi = if config.n_slices == 1 {
            0.0
        } else {
            t as f64 / (config.n_slices - 1) as f64
        };

        let mut pools = SentencePools {
            accepted: Vec::new(),
            rejected: Vec::new(),
        };
        let push = |pools: &mut SentencePools, index: usize, sentence: Vec<String>| {
            if index % 2 == 0 {
                pools.accepted.push(sentence);
            } else {
                pools.rejected.push(sentence);
            }
        };

        let mut counter = 0usize;
        for (i, word) in drift_words.iter().enumerate() {
            for _ in 0..occurrences_per_target {
                let accepted_side = counter % 2 == 0;
                let effective_phi = if accepted_side {
                    phi * (1.0 - config.ac_c1_boost)
                } else {
                    phi
                };
                let context = if rng.random::<f64>() < effective_phi {
                    &destinations[i]
                } else {
                    &sources[i]
                };
                let sentence = target_sentence(&mut rng, word, context);
                push(&mut pools, counter, sentence);
                counter += 1;
            }
        }
        for (j, word) in stationary_words.iter().enumerate() {
            for _ in 0..occurrences_per_target {
                let sentence = target_sentence(&mut rng, word, &anchors[j]);
                push(&mut pools, counter, sentence);
                counter += 1;
            }
        }
        for s in 0..community_sentences {
            let members = all_communities[s % all_communities.len()];
            let sentence: Vec<String> = (0..6).map(|_| sample(&mut rng, members).to_string()).collect();
            push(&mut pools, counter, sentence);
            counter += 1;
        }

        pools.accepted.shuffle(&mut rng);
        pools.rejected.shuffle(&mut rng);

        let mut doc_index = 0usize;
        for (sentences, accepted) in [(pools.accepted, true), (pools.rejected, false)] {
            let docs_here = (config.docs_per_slice / 2).max(1);
            let per_doc = sentences.len().div_ceil(docs_here);
            for chunk in sentences.chunks(per_doc.max(1)) {
                let body = chunk
                    .iter()
                    .map(|s| s.join(" "))
                    .collect::<Vec<_>>()
                    .join(" ");
                documents.push(DocumentRecord {
                    id: format!("{year}-{doc_index:04}"),
                    year,
                    accepted: config.acceptance_flags.then_some(accepted),
                    body,
                });
                doc_index += 1;
            }
        }
    }

    let planted = PlantedWords {
        drift: (0..config.n_drift)
            .map(|i| PlantedDrift {
                word: drift_words[i].clone(),
                source: sources[i][0].clone(),
                destination: destinations[i][0].clone(),
            })
            .collect(),
        stationary: stationary_words,
    };
    (documents, planted)
}

/// Community vocabulary for the bundled demo corpus: three drifting targets
/// taken from the shipped triple presets, plus a filler community.
const DEMO_PLANTS: &[(&str, &[&str], &[&str], bool, Category)] = &[
    // novel drifts from "good"-like contexts toward "new"-like ones, so its
    // (new, good) triple trends toward c1.
    (
        "novel",
        &["good", "strong", "solid", "robust", "reliable", "effective", "excellent", "superior", "sound", "valuable"],
        &["new", "recent", "emerging", "latest", "modern", "fresh", "unseen", "upcoming", "evolving", "contemporary"],
        false,
        Category::LanguageUsage,
    ),
    // deep drifts from "rigorous"-like toward "neural"-like contexts.
    (
        "deep",
        &["rigorous", "formal", "proof", "theorem", "bounds", "guarantees", "lemma", "convergence", "axioms", "derivation"],
        &["neural", "network", "layers", "convolutional", "recurrent", "attention", "embedding", "gradient", "activation", "dropout"],
        false,
        Category::ResearchInterest,
    ),
    // consider drifts from "certain"-like toward "guess"-like contexts, so
    // its (certain, guess) triple trends toward c2.
    (
        "consider",
        &["certain", "definite", "established", "confirmed", "verified", "proven", "exact", "precise", "sure", "settled"],
        &["guess", "speculate", "conjecture", "suppose", "assume", "suspect", "presume", "reckon", "imagine", "hypothesize"],
        true,
        Category::AcademicActivity,
    ),
];

const DEMO_FILLER: &[&str] = &[
    "model", "data", "method", "results", "experiments", "evaluation", "performance", "baseline",
    "approach", "corpus",
];

/// A small bundled corpus over real preset words (2007–2010, four slices,
/// ~100k tokens) for demos, golden files, and end-to-end tests. Returns the
/// documents and the triples the corpus makes usable; the direction of each
/// planted drift matches the shipped preset orientation.
pub fn demo_corpus(seed: u64) -> (Vec<DocumentRecord>, Vec<TargetCoordinate>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_slices = 4;
    let tokens_per_slice = 24_000;
    let docs_per_slice = 12;

    let mut communities: Vec<Vec<String>> = Vec::new();
    for (_, from, to, _, _) in DEMO_PLANTS {
        communities.push(from.iter().map(|w| w.to_string()).collect());
        communities.push(to.iter().map(|w| w.to_string()).collect());
    }
    communities.push(DEMO_FILLER.iter().map(|w| w.to_string()).collect());

    // Keep the drifting targets well below the community words in frequency:
    // anchors are picked by frequency, and a drifting word that becomes an
    // anchor is pinned to its base position by the alignment.
    let occurrences = tokens_per_slice / 10 / 5 / DEMO_PLANTS.len();
    let community_sentences = tokens_per_slice * 9 / 10 / 6;

    let mut documents = Vec::new();
    for t in 0..n_slices {
        let year = 2007 + t as i32;
        let phi = t as f64 / (n_slices - 1) as f64;
        let mut sentences: Vec<Vec<String>> = Vec::new();
        for (p, (word, from, to, _, _)) in DEMO_PLANTS.iter().enumerate() {
            for _ in 0..occurrences {
                let pick = if rng.random::<f64>() < phi { to } else { from };
                let context: Vec<String> = pick.iter().map(|w| w.to_string()).collect();
                sentences.push(target_sentence(&mut rng, word, &context));
            }
            let _ = p;
        }
        for s in 0..community_sentences {
            let members = &communities[s % communities.len()];
            sentences.push((0..6).map(|_| sample(&mut rng, members).to_string()).collect());
        }
        sentences.shuffle(&mut rng);
        let per_doc = sentences.len().div_ceil(docs_per_slice);
        for (d, chunk) in sentences.chunks(per_doc).enumerate() {
            let body = chunk
                .iter()
                .map(|s| s.join(" "))
                .collect::<Vec<_>>()
                .join(" ");
            documents.push(DocumentRecord {
                id: format!("{year}-{d:04}"),
                year,
                accepted: Some(d % 2 == 0),
                body,
            });
        }
    }

    let triples = DEMO_PLANTS
        .iter()
        .map(|(word, from, to, toward_c2, category)| {
            // Presets orient some triples with c1 as the destination and
            // some with c1 as the source; keep the shipped orientation.
            let (c1, c2) = if *toward_c2 {
                (from[0], to[0])
            } else {
                (to[0], from[0])
            };
            TargetCoordinate::new(word, c1, c2, *category).expect("demo words are distinct")
        })
        .collect();
    (documents, triples)
}

/// Write documents and a manifest under `dir`: one plain-text file per
/// document in `docs/`, and `manifest.csv` rows of `id,year,accepted,path`.
/// Returns the manifest path.
pub fn write_corpus(dir: &Path, documents: &[DocumentRecord]) -> Result<PathBuf> {
    let docs_dir = dir.join("docs");
    std::fs::create_dir_all(&docs_dir).map_err(|e| Error::io(&docs_dir, e))?;
    let mut manifest = String::new();
    for doc in documents {
        let filename = format!("docs/{}.txt", doc.id);
        let path = dir.join(&filename);
        std::fs::write(&path, &doc.body).map_err(|e| Error::io(&path, e))?;
        let accepted = match doc.accepted {
            Some(true) => "1",
            Some(false) => "0",
            None => "",
        };
        manifest.push_str(&format!("{},{},{},{}\n", doc.id, doc.year, accepted, filename));
    }
    let manifest_path = dir.join("manifest.csv");
    std::fs::write(&manifest_path, manifest).map_err(|e| Error::io(&manifest_path, e))?;
    Ok(manifest_path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{self, SlicingScheme};
    use std::collections::HashMap;

    fn small_config() -> DriftCorpusConfig {
        DriftCorpusConfig {
            seed: 11,
            n_slices: 5,
            n_drift: 2,
            n_stationary: 2,
            community_size: 5,
            tokens_per_slice: 6_000,
            docs_per_slice: 6,
            ..DriftCorpusConfig::default()
        }
    }

    /// How often `neighbor` occurs within ±2 tokens of `word` in a slice's
    /// concatenated text.
    fn adjacency(documents: &[DocumentRecord], year: i32, word: &str, neighbor: &str) -> usize {
        let mut count = 0;
        for doc in documents.iter().filter(|d| d.year == year) {
            let tokens = corpus::tokenize(&doc.body);
            for (i, tok) in tokens.iter().enumerate() {
                if tok != word {
                    continue;
                }
                let lo = i.saturating_sub(2);
                let hi = (i + 3).min(tokens.len());
                count += tokens[lo..hi].iter().filter(|t| *t == neighbor).count();
            }
        }
        count
    }

    #[test]
    fn generation_is_deterministic_in_the_seed() {
        let (a, _) = drift_corpus(&small_config());
        let (b, _) = drift_corpus(&small_config());
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.id, y.id);
            assert_eq!(x.body, y.body);
        }
        let mut other = small_config();
        other.seed = 12;
        let (c, _) = drift_corpus(&other);
        assert!(a.iter().zip(&c).any(|(x, y)| x.body != y.body));
    }

    #[test]
    fn drift_word_contexts_migrate_between_communities() {
        let config = small_config();
        let (docs, planted) = drift_corpus(&config);
        let first_year = config.start_year;
        let last_year = config.start_year + config.n_slices as i32 - 1;
        let drift = &planted.drift[0];
        // Early slice: source contexts dominate; late slice: destination.
        let early_src = adjacency(&docs, first_year, &drift.word, &drift.source);
        let early_dst = adjacency(&docs, first_year, &drift.word, &drift.destination);
        let late_src = adjacency(&docs, last_year, &drift.word, &drift.source);
        let late_dst = adjacency(&docs, last_year, &drift.word, &drift.destination);
        assert!(
            early_src > 5 * early_dst.max(1),
            "early src {early_src} vs dst {early_dst}"
        );
        assert!(
            late_dst > 5 * late_src.max(1),
            "late src {late_src} vs dst {late_dst}"
        );
    }

    #[test]
    fn stationary_word_contexts_do_not_migrate() {
        let config = small_config();
        let (docs, planted) = drift_corpus(&config);
        let word = &planted.stationary[0];
        let anchor = "anchoraa";
        let first = adjacency(&docs, config.start_year, word, anchor);
        let last = adjacency(
            &docs,
            config.start_year + config.n_slices as i32 - 1,
            word,
            anchor,
        );
        assert!(first > 0 && last > 0);
        let ratio = first as f64 / last as f64;
        assert!(ratio > 0.5 && ratio < 2.0, "ratio {ratio}");
    }

    #[test]
    fn token_budget_is_roughly_respected() {
        let config = small_config();
        let (docs, _) = drift_corpus(&config);
        let mut per_year: HashMap<i32, usize> = HashMap::new();
        for doc in &docs {
            *per_year.entry(doc.year).or_insert(0) += corpus::tokenize(&doc.body).len();
        }
        assert_eq!(per_year.len(), config.n_slices);
        for (&year, &count) in &per_year {
            let target = config.tokens_per_slice as f64;
            assert!(
                (count as f64) > 0.85 * target && (count as f64) < 1.1 * target,
                "{year}: {count} tokens vs budget {target}"
            );
        }
    }

    #[test]
    fn planted_words_are_frequent_in_every_slice() {
        let config = small_config();
        let (docs, planted) = drift_corpus(&config);
        for t in 0..config.n_slices {
            let year = config.start_year + t as i32;
            let mut counts: HashMap<String, usize> = HashMap::new();
            for doc in docs.iter().filter(|d| d.year == year) {
                for token in corpus::tokenize(&doc.body) {
                    *counts.entry(token).or_insert(0) += 1;
                }
            }
            for drift in &planted.drift {
                for word in [&drift.word, &drift.source, &drift.destination] {
                    assert!(
                        counts.get(word.as_str()).copied().unwrap_or(0) >= 3,
                        "{word} too rare in {year}"
                    );
                }
            }
            for word in &planted.stationary {
                assert!(counts.get(word.as_str()).copied().unwrap_or(0) >= 3);
            }
        }
    }

    #[test]
    fn acceptance_flags_alternate_and_can_be_disabled() {
        let (docs, _) = drift_corpus(&small_config());
        assert!(docs.iter().any(|d| d.accepted == Some(true)));
        assert!(docs.iter().any(|d| d.accepted == Some(false)));

        let mut config = small_config();
        config.acceptance_flags = false;
        let (docs, _) = drift_corpus(&config);
        assert!(docs.iter().all(|d| d.accepted.is_none()));
    }

    #[test]
    fn acceptance_boost_biases_accepted_documents_toward_source() {
        let mut config = small_config();
        config.ac_c1_boost = 1.0;
        config.tokens_per_slice = 12_000;
        let (docs, planted) = drift_corpus(&config);
        let drift = &planted.drift[0];
        let last_year = config.start_year + config.n_slices as i32 - 1;
        let accepted: Vec<DocumentRecord> = docs
            .iter()
            .filter(|d| d.year == last_year && d.accepted == Some(true))
            .cloned()
            .collect();
        let rejected: Vec<DocumentRecord> = docs
            .iter()
            .filter(|d| d.year == last_year && d.accepted == Some(false))
            .cloned()
            .collect();
        // With full boost, accepted documents never leave the source
        // community while rejected ones have fully migrated.
        let ac_dst = adjacency(&accepted, last_year, &drift.word, &drift.destination);
        let nac_dst = adjacency(&rejected, last_year, &drift.word, &drift.destination);
        assert_eq!(ac_dst, 0, "accepted docs should stay on the source side");
        assert!(nac_dst > 10);
    }

    #[test]
    fn written_corpus_round_trips_through_the_manifest() {
        let config = small_config();
        let (docs, _) = drift_corpus(&config);
        let dir = tempfile::tempdir().unwrap();
        let manifest = write_corpus(dir.path(), &docs).unwrap();
        let records = corpus::read_manifest(&manifest).unwrap();
        assert_eq!(records.len(), docs.len());
        for (written, read) in docs.iter().zip(&records) {
            assert_eq!(written.id, read.id);
            assert_eq!(written.year, read.year);
            assert_eq!(written.accepted, read.accepted);
            assert_eq!(written.body, read.body);
        }
        let scheme = SlicingScheme::uniform(
            config.start_year,
            config.start_year + config.n_slices as i32 - 1,
            1,
        )
        .unwrap();
        let corpus = corpus::build_slices(&records, &scheme).unwrap();
        assert_eq!(corpus.slices.len(), config.n_slices);
    }

    #[test]
    fn demo_corpus_contains_its_triple_words_everywhere() {
        let (docs, triples) = demo_corpus(0);
        assert_eq!(triples.len(), 3);
        for year in 2007..=2010 {
            let mut counts: HashMap<String, usize> = HashMap::new();
            for doc in docs.iter().filter(|d| d.year == year) {
                for token in corpus::tokenize(&doc.body) {
                    *counts.entry(token).or_insert(0) += 1;
                }
            }
            for triple in &triples {
                for word in [&triple.target, &triple.c1, &triple.c2] {
                    assert!(
                        counts.get(word.as_str()).copied().unwrap_or(0) >= 3,
                        "{word} too rare in {year}"
                    );
                }
            }
        }
    }

    #[test]
    fn demo_corpus_is_deterministic() {
        let (a, _) = demo_corpus(7);
        let (b, _) = demo_corpus(7);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.body, y.body);
        }
    }

    #[test]
    fn demo_triples_match_preset_orientation() {
        let (_, triples) = demo_corpus(0);
        let bundled = crate::coordinates::bundled_triples();
        for triple in &triples {
            assert!(
                bundled.contains(triple),
                "demo triple {} not in bundled presets",
                triple.describe()
            );
        }
    }
}
