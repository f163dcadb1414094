//! Corpus ingestion: manifests, LaTeX stripping, tokenization, time slicing,
//! and vocabulary construction.

mod latex;

pub use latex::strip_latex;

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::{Error, Result};

/// One document as listed in a manifest, with its body already reduced to
/// plain text (LaTeX sources are stripped at read time).
#[derive(Debug, Clone)]
pub struct DocumentRecord {
    pub id: String,
    pub year: i32,
    pub accepted: Option<bool>,
    pub body: String,
}

/// A tokenized document placed in a slice.
#[derive(Debug, Clone)]
pub struct DocumentTokens {
    pub id: String,
    pub year: i32,
    pub accepted: Option<bool>,
    pub tokens: Vec<String>,
}

/// One time slice with its documents, ordered by document id.
#[derive(Debug, Clone)]
pub struct SliceData {
    pub label: String,
    pub start: i32,
    pub end: i32,
    pub documents: Vec<DocumentTokens>,
}

impl SliceData {
    pub fn token_count(&self) -> usize {
        self.documents.iter().map(|d| d.tokens.len()).sum()
    }

    /// Borrowed token streams, one per document.
    pub fn token_streams(&self) -> Vec<&[String]> {
        self.documents.iter().map(|d| d.tokens.as_slice()).collect()
    }
}

/// The corpus bucketed into non-overlapping, contiguous year ranges.
#[derive(Debug, Clone)]
pub struct TimeSlicedCorpus {
    pub slices: Vec<SliceData>,
}

impl TimeSlicedCorpus {
    pub fn total_tokens(&self) -> usize {
        self.slices.iter().map(|s| s.token_count()).sum()
    }

    /// All documents ordered by (year, id) — the canonical order for base
    /// (all-slices) training, independent of the slicing scheme.
    pub fn documents_by_year_id(&self) -> Vec<&DocumentTokens> {
        let mut docs: Vec<&DocumentTokens> = self
            .slices
            .iter()
            .flat_map(|s| s.documents.iter())
            .collect();
        docs.sort_by(|a, b| (a.year, &a.id).cmp(&(b.year, &b.id)));
        docs
    }
}

/// An ordered list of contiguous, non-overlapping year ranges (inclusive).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlicingScheme {
    ranges: Vec<(i32, i32)>,
}

impl SlicingScheme {
    /// Build from explicit (start, end) ranges; they must be ordered,
    /// non-overlapping, and contiguous.
    pub fn from_ranges(ranges: Vec<(i32, i32)>) -> Result<Self> {
        if ranges.is_empty() {
            return Err(Error::InvalidScheme("no slices given".into()));
        }
        for &(s, e) in &ranges {
            if s > e {
                return Err(Error::InvalidScheme(format!(
                    "range {s}-{e} has start after end"
                )));
            }
        }
        for pair in ranges.windows(2) {
            if pair[1].0 != pair[0].1 + 1 {
                return Err(Error::InvalidScheme(format!(
                    "ranges {}-{} and {}-{} are not contiguous",
                    pair[0].0, pair[0].1, pair[1].0, pair[1].1
                )));
            }
        }
        Ok(SlicingScheme { ranges })
    }

    /// Equal-width slices covering start..=end. When the span is not a
    /// multiple of the width, the remainder widens the first slice (so a
    /// 3-year scheme over 2007-2016 starts with a four-year slice).
    pub fn uniform(start: i32, end: i32, width: u32) -> Result<Self> {
        if width == 0 {
            return Err(Error::InvalidScheme("slice width must be positive".into()));
        }
        if start > end {
            return Err(Error::InvalidScheme(format!(
                "year range {start}-{end} has start after end"
            )));
        }
        let total = (end - start + 1) as u32;
        if width > total {
            return Err(Error::InvalidScheme(format!(
                "slice width {width} exceeds the {total}-year corpus range"
            )));
        }
        let remainder = total % width;
        let mut ranges = Vec::new();
        let mut lo = start;
        let first_width = width + remainder;
        ranges.push((lo, lo + first_width as i32 - 1));
        lo += first_width as i32;
        while lo <= end {
            ranges.push((lo, lo + width as i32 - 1));
            lo += width as i32;
        }
        SlicingScheme::from_ranges(ranges)
    }

    /// Parse either a width form ("1-year", "2-year", ...) applied to the
    /// given corpus year range, or an explicit list like
    /// "2007-2010,2011-2013,2014-2016" (single years may omit the dash).
    pub fn parse(text: &str, start: i32, end: i32) -> Result<Self> {
        let text = text.trim();
        if let Some(width) = text.strip_suffix("-year") {
            let width: u32 = width.parse().map_err(|_| {
                Error::InvalidScheme(format!("bad slice width in {text:?}"))
            })?;
            return SlicingScheme::uniform(start, end, width);
        }
        let mut ranges = Vec::new();
        for piece in text.split(',') {
            let piece = piece.trim();
            let (lo, hi) = match piece.split_once('-') {
                Some((a, b)) => (a.trim(), b.trim()),
                None => (piece, piece),
            };
            let lo: i32 = lo
                .parse()
                .map_err(|_| Error::InvalidScheme(format!("bad year in {piece:?}")))?;
            let hi: i32 = hi
                .parse()
                .map_err(|_| Error::InvalidScheme(format!("bad year in {piece:?}")))?;
            ranges.push((lo, hi));
        }
        SlicingScheme::from_ranges(ranges)
    }

    pub fn ranges(&self) -> &[(i32, i32)] {
        &self.ranges
    }

    pub fn len(&self) -> usize {
        self.ranges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }

    pub fn first_year(&self) -> i32 {
        self.ranges[0].0
    }

    pub fn last_year(&self) -> i32 {
        self.ranges[self.ranges.len() - 1].1
    }

    /// Index of the slice containing `year`, if any.
    pub fn slice_index(&self, year: i32) -> Option<usize> {
        self.ranges.iter().position(|&(s, e)| s <= year && year <= e)
    }

    /// Human-readable label for slice `i` ("2007" or "2007-2010").
    pub fn label(&self, i: usize) -> String {
        let (s, e) = self.ranges[i];
        if s == e {
            s.to_string()
        } else {
            format!("{s}-{e}")
        }
    }

    /// Canonical text form, used for config hashing and artifact naming.
    pub fn describe(&self) -> String {
        let mut out = String::new();
        for (i, _) in self.ranges.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&self.label(i));
        }
        out
    }
}

/// Lowercase alphabetic tokenization: any non-alphabetic character splits,
/// and purely non-alphabetic fragments vanish.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphabetic())
        .filter(|s| !s.is_empty())
        .map(|s| s.to_lowercase())
        .collect()
}

/// Read a corpus manifest: one `id,year,accepted,path` line per document
/// (the accepted field may be empty; paths are relative to the manifest).
/// Bodies of files ending in `.tex` are LaTeX-stripped on the way in.
pub fn read_manifest(path: &Path) -> Result<Vec<DocumentRecord>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new(""));
    let mut seen = HashSet::new();
    let mut records = Vec::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let line = raw_line.trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Manifest {
            path: path.to_path_buf(),
            line: idx + 1,
            msg,
        };
        let fields: Vec<&str> = line.splitn(4, ',').collect();
        if fields.len() != 4 {
            return Err(err("expected id,year,accepted,path".into()));
        }
        let id = fields[0].trim();
        if id.is_empty() {
            return Err(err("empty document id".into()));
        }
        if !seen.insert(id.to_string()) {
            return Err(Error::DuplicateDocumentId { id: id.into() });
        }
        let year: i32 = fields[1]
            .trim()
            .parse()
            .map_err(|_| err(format!("bad year {:?}", fields[1].trim())))?;
        let accepted = match fields[2].trim().to_ascii_lowercase().as_str() {
            "" => None,
            "1" | "true" => Some(true),
            "0" | "false" => Some(false),
            other => return Err(err(format!("bad accepted flag {other:?}"))),
        };
        let body_rel = Path::new(fields[3].trim());
        let body_path: PathBuf = if body_rel.is_absolute() {
            body_rel.to_path_buf()
        } else {
            base.join(body_rel)
        };
        let raw_body =
            std::fs::read_to_string(&body_path).map_err(|e| Error::io(&body_path, e))?;
        let body = if body_path.extension().is_some_and(|e| e == "tex") {
            strip_latex(&raw_body)
        } else {
            raw_body
        };
        records.push(DocumentRecord {
            id: id.into(),
            year,
            accepted,
            body,
        });
    }
    Ok(records)
}

/// Tokenize every record and bucket it into the slice containing its year.
/// Documents inside a slice are ordered by id, making assembly deterministic
/// regardless of manifest order.
pub fn build_slices(
    records: &[DocumentRecord],
    scheme: &SlicingScheme,
) -> Result<TimeSlicedCorpus> {
    let mut slices: Vec<SliceData> = scheme
        .ranges()
        .iter()
        .enumerate()
        .map(|(i, &(start, end))| SliceData {
            label: scheme.label(i),
            start,
            end,
            documents: Vec::new(),
        })
        .collect();

    for record in records {
        let idx = scheme
            .slice_index(record.year)
            .ok_or_else(|| Error::YearOutOfRange {
                id: record.id.clone(),
                year: record.year,
            })?;
        slices[idx].documents.push(DocumentTokens {
            id: record.id.clone(),
            year: record.year,
            accepted: record.accepted,
            tokens: tokenize(&record.body),
        });
    }
    for slice in &mut slices {
        slice.documents.sort_by(|a, b| a.id.cmp(&b.id));
    }
    Ok(TimeSlicedCorpus { slices })
}

/// Word list with dense ids, ordered by descending corpus frequency and then
/// lexicographically; words below `min_count` are excluded entirely.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    words: Vec<String>,
    counts: Vec<u64>,
    index: HashMap<String, u32>,
    min_count: u32,
}

impl Vocabulary {
    /// Rebuild from an ordered word list, as read back from an embedding
    /// file. The order still encodes the frequency ranking, but absolute
    /// counts are not stored in that format, so they read as zero here.
    /// Words must be unique (the caller checks).
    pub fn from_ordered_words(words: Vec<String>) -> Vocabulary {
        let index = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i as u32))
            .collect();
        let counts = vec![0; words.len()];
        Vocabulary {
            words,
            counts,
            index,
            min_count: 1,
        }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn min_count(&self) -> u32 {
        self.min_count
    }

    pub fn id(&self, word: &str) -> Option<u32> {
        self.index.get(word).copied()
    }

    pub fn word(&self, id: u32) -> &str {
        &self.words[id as usize]
    }

    pub fn count(&self, id: u32) -> u64 {
        self.counts[id as usize]
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    /// Sum of retained word frequencies.
    pub fn retained_tokens(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.words
            .iter()
            .map(|w| w.as_str())
            .zip(self.counts.iter().copied())
    }
}

/// Count `tokens` and keep words occurring at least `min_count` times.
pub fn build_vocabulary<'a, I>(tokens: I, min_count: u32) -> Vocabulary
where
    I: IntoIterator<Item = &'a str>,
{
    let min_count = min_count.max(1);
    let mut counts: HashMap<&str, u64> = HashMap::new();
    for token in tokens {
        *counts.entry(token).or_insert(0) += 1;
    }
    let mut entries: Vec<(&str, u64)> = counts
        .into_iter()
        .filter(|&(_, c)| c >= min_count as u64)
        .collect();
    entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));

    let mut words = Vec::with_capacity(entries.len());
    let mut freq = Vec::with_capacity(entries.len());
    let mut index = HashMap::with_capacity(entries.len());
    for (i, (word, count)) in entries.into_iter().enumerate() {
        words.push(word.to_string());
        freq.push(count);
        index.insert(word.to_string(), i as u32);
    }
    Vocabulary {
        words,
        counts: freq,
        index,
        min_count,
    }
}

/// Write one token file per slice (`slice_<label>.txt`, one document per
/// line) plus an index `slices.csv`; returns the slice file paths in order.
pub fn write_slice_files(corpus: &TimeSlicedCorpus, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths = Vec::new();
    let mut index = String::from("label,start_year,end_year,documents,tokens\n");
    for slice in &corpus.slices {
        let path = dir.join(format!("slice_{}.txt", slice.label));
        let mut body = String::new();
        for doc in &slice.documents {
            body.push_str(&doc.tokens.join(" "));
            body.push('\n');
        }
        std::fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
        let _ = writeln!(
            index,
            "{},{},{},{},{}",
            slice.label,
            slice.start,
            slice.end,
            slice.documents.len(),
            slice.token_count()
        );
        paths.push(path);
    }
    let index_path = dir.join("slices.csv");
    std::fs::write(&index_path, index).map_err(|e| Error::io(&index_path, e))?;
    Ok(paths)
}

/// Read a slice token file back: one document per line, space-separated.
pub fn read_slice_file(path: &Path) -> Result<Vec<Vec<String>>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text
        .lines()
        .map(|line| line.split_whitespace().map(str::to_string).collect())
        .collect())
}
