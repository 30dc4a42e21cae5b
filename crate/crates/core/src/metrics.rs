//! Segmentation diagnostics.
//!
//! A word is over-segmented when its piece count exceeds half its length in
//! characters. The marker does not count toward the length; the piece that
//! carries it counts as a piece. Rates aggregate over token occurrences by
//! default, or over distinct types.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use indexmap::IndexMap;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::bpe::{BpeError, MergeList, Segmentation};
use crate::corpus::TextStream;
use crate::pretok::Pretokenize;

const LINES_PER_CHUNK: usize = 2048;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("mismatch: pieces {pieces:?} do not reconstruct {expected:?}")]
    Mismatch { pieces: String, expected: String },
    #[error("invalid-min-word-length: must be at least 1")]
    InvalidMinWordLength,
    #[error(transparent)]
    Bpe(#[from] BpeError),
}

impl MetricsError {
    pub fn kind(&self) -> &'static str {
        match self {
            MetricsError::Mismatch { .. } => "mismatch",
            MetricsError::InvalidMinWordLength => "invalid-min-word-length",
            MetricsError::Bpe(e) => e.kind(),
        }
    }
}

pub fn is_over_segmented(
    word: &str,
    segmentation: &Segmentation,
    marker: &str,
) -> Result<bool, MetricsError> {
    let joined = segmentation.joined();
    let expected_len = word.len() + marker.len();
    if joined.len() != expected_len || !joined.starts_with(word) || !joined.ends_with(marker) {
        return Err(MetricsError::Mismatch {
            pieces: segmentation.to_string(),
            expected: format!("{word}{marker}"),
        });
    }
    Ok(over_segmented(segmentation.len(), word.chars().count()))
}

fn over_segmented(pieces: usize, chars: usize) -> bool {
    2 * pieces > chars
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WordDetail {
    pub word: String,
    pub occurrences: u64,
    pub piece_count: usize,
    pub char_length: usize,
    pub over_segmented: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OsrReport {
    /// `words_over_segmented / words_total`, or 0 when no word qualified.
    pub rate: f64,
    pub words_total: u64,
    pub words_over_segmented: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_word_detail: Option<Vec<WordDetail>>,
}

impl OsrReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "rate: {:.6}", self.rate).unwrap();
        writeln!(out, "words_total: {}", self.words_total).unwrap();
        writeln!(out, "words_over_segmented: {}", self.words_over_segmented).unwrap();
        if let Some(detail) = &self.per_word_detail {
            for d in detail {
                writeln!(
                    out,
                    "word: {} occurrences={} pieces={} chars={} over_segmented={}",
                    d.word, d.occurrences, d.piece_count, d.char_length, d.over_segmented
                )
                .unwrap();
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OsrOptions {
    pub pretokenize: Pretokenize,
    /// Tokens shorter than this (in characters) are ignored.
    pub min_word_length: usize,
    /// Count each distinct token once instead of once per occurrence.
    pub types: bool,
    pub detail: bool,
}

impl Default for OsrOptions {
    fn default() -> Self {
        OsrOptions {
            pretokenize: Pretokenize::default(),
            min_word_length: 1,
            types: false,
            detail: false,
        }
    }
}

/// Token occurrence counts in order of first appearance; chunked in parallel
/// and folded back in line order.
fn token_counts(stream: &TextStream, pretokenize: Pretokenize) -> IndexMap<&str, u64> {
    let partials: Vec<IndexMap<&str, u64>> = stream
        .lines()
        .par_chunks(LINES_PER_CHUNK)
        .map(|chunk| {
            let mut local = IndexMap::new();
            for line in chunk {
                for tok in pretokenize.tokens(line) {
                    *local.entry(tok).or_insert(0u64) += 1;
                }
            }
            local
        })
        .collect();
    let mut total = IndexMap::new();
    for p in partials {
        for (tok, n) in p {
            *total.entry(tok).or_insert(0) += n;
        }
    }
    total
}

/// Segments each distinct token once; results keep the input order.
fn segment_types(
    types: Vec<(&str, u64)>,
    merges: &MergeList,
) -> Result<Vec<(String, u64, Segmentation)>, MetricsError> {
    types
        .into_par_iter()
        .map(|(tok, n)| Ok((tok.to_owned(), n, merges.segment_word(tok)?)))
        .collect()
}

pub fn osr(
    stream: &TextStream,
    merges: &MergeList,
    options: &OsrOptions,
) -> Result<OsrReport, MetricsError> {
    if options.min_word_length == 0 {
        return Err(MetricsError::InvalidMinWordLength);
    }
    let counts = token_counts(stream, options.pretokenize);
    let eligible: Vec<(&str, u64)> = counts
        .into_iter()
        .filter(|(tok, _)| tok.chars().count() >= options.min_word_length)
        .collect();
    let segmented = segment_types(eligible, merges)?;

    let mut total = 0u64;
    let mut over = 0u64;
    let mut detail = options.detail.then(Vec::new);
    for (word, n, seg) in segmented {
        let chars = word.chars().count();
        let flag = over_segmented(seg.len(), chars);
        let weight = if options.types { 1 } else { n };
        total += weight;
        if flag {
            over += weight;
        }
        if let Some(d) = detail.as_mut() {
            d.push(WordDetail {
                word,
                occurrences: n,
                piece_count: seg.len(),
                char_length: chars,
                over_segmented: flag,
            });
        }
    }
    Ok(OsrReport {
        rate: if total == 0 {
            0.0
        } else {
            over as f64 / total as f64
        },
        words_total: total,
        words_over_segmented: over,
        per_word_detail: detail,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharingReport {
    pub shared: BTreeSet<String>,
    pub only_a: BTreeSet<String>,
    pub only_b: BTreeSet<String>,
    /// |shared| / |a ∪ b|; two empty vocabularies count as identical.
    pub jaccard: f64,
}

impl SharingReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "shared: {}", self.shared.len()).unwrap();
        writeln!(out, "only_a: {}", self.only_a.len()).unwrap();
        writeln!(out, "only_b: {}", self.only_b.len()).unwrap();
        writeln!(out, "jaccard: {:.6}", self.jaccard).unwrap();
        for s in &self.shared {
            writeln!(out, "shared_symbol: {s}").unwrap();
        }
        out
    }
}

pub fn shared_subwords(a: &BTreeSet<String>, b: &BTreeSet<String>) -> SharingReport {
    let shared: BTreeSet<String> = a.intersection(b).cloned().collect();
    let only_a: BTreeSet<String> = a.difference(b).cloned().collect();
    let only_b: BTreeSet<String> = b.difference(a).cloned().collect();
    let union = shared.len() + only_a.len() + only_b.len();
    let jaccard = if union == 0 {
        1.0
    } else {
        shared.len() as f64 / union as f64
    };
    SharingReport {
        shared,
        only_a,
        only_b,
        jaccard,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SegmentHistogram {
    /// piece count -> token occurrences
    pub buckets: BTreeMap<usize, u64>,
    pub words: u64,
    /// Absent for an empty stream.
    pub mean_pieces: Option<f64>,
    /// Share of all pieces that hold exactly one character besides the marker.
    pub singleton_piece_fraction: Option<f64>,
}

impl SegmentHistogram {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "words: {}", self.words).unwrap();
        match self.mean_pieces {
            Some(m) => writeln!(out, "mean_pieces: {m:.6}").unwrap(),
            None => writeln!(out, "mean_pieces: absent").unwrap(),
        }
        match self.singleton_piece_fraction {
            Some(f) => writeln!(out, "singleton_piece_fraction: {f:.6}").unwrap(),
            None => writeln!(out, "singleton_piece_fraction: absent").unwrap(),
        }
        for (k, v) in &self.buckets {
            writeln!(out, "pieces_{k}: {v}").unwrap();
        }
        out
    }
}

pub fn segment_histogram(
    stream: &TextStream,
    merges: &MergeList,
    pretokenize: Pretokenize,
) -> Result<SegmentHistogram, MetricsError> {
    let counts = token_counts(stream, pretokenize);
    let segmented = segment_types(counts.into_iter().collect(), merges)?;
    let marker = merges.marker();
    let mut buckets = BTreeMap::new();
    let mut words = 0u64;
    let mut pieces = 0u64;
    let mut singles = 0u64;
    for (_, n, seg) in segmented {
        *buckets.entry(seg.len()).or_insert(0) += n;
        words += n;
        pieces += seg.len() as u64 * n;
        let single = seg
            .pieces
            .iter()
            .filter(|p| p.strip_suffix(marker).unwrap_or(p).chars().count() == 1)
            .count() as u64;
        singles += single * n;
    }
    Ok(SegmentHistogram {
        buckets,
        words,
        mean_pieces: (words > 0).then(|| pieces as f64 / words as f64),
        singleton_piece_fraction: (pieces > 0).then(|| singles as f64 / pieces as f64),
    })
}
