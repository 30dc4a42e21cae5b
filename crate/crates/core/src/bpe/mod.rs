//! Byte-pair encoding: word counting, merge learning and segmentation.
//!
//! Words are split into characters and an end-of-word marker is appended as
//! a standalone trailing symbol. Training repeatedly merges the most frequent
//! adjacent pair, breaking ties by earliest occurrence (word order in the
//! [`WordCountTable`], then position in the word). Segmentation replays the
//! learned rules in order on new words.

mod counts;
mod merges;
mod train;
mod vocab;

use std::collections::HashMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::corpus::TextStream;
use crate::pretok::Pretokenize;

pub use counts::{count_words, WordCountTable};
pub use merges::{MergeList, MergeRule, Segmentation, MERGE_FILE_MAGIC};
pub use train::{train, train_to_size, train_to_size_with, train_with, TrainOptions, Trainer};
pub use vocab::{vocabulary_of, VocabEntry, Vocabulary};

pub const DEFAULT_MARKER: &str = "_";

#[derive(Debug, Error)]
pub enum BpeError {
    #[error("marker-collision: input contains the end-of-word marker {marker:?} in {context:?}")]
    MarkerCollision { marker: String, context: String },
    #[error("invalid-marker: {0:?} must be non-empty and free of whitespace")]
    InvalidMarker(String),
    #[error("empty-word: cannot segment an empty word")]
    EmptyWord,
    #[error("target-too-small: vocabulary target {target} is below the alphabet size {alphabet}")]
    TargetTooSmall { target: usize, alphabet: usize },
    #[error("bad-header: expected `{MERGE_FILE_MAGIC} marker=<m>`, found {0:?}")]
    BadHeader(String),
    #[error("malformed-rule: line {line}: {reason}")]
    MalformedRule { line: usize, reason: String },
    #[error("duplicate-rule: pair ({left}, {right}) appears twice")]
    DuplicateRule { left: String, right: String },
    #[error("malformed-vocab: line {line}: {reason}")]
    MalformedVocab { line: usize, reason: String },
}

impl BpeError {
    pub fn kind(&self) -> &'static str {
        match self {
            BpeError::MarkerCollision { .. } => "marker-collision",
            BpeError::InvalidMarker(_) => "invalid-marker",
            BpeError::EmptyWord => "empty-word",
            BpeError::TargetTooSmall { .. } => "target-too-small",
            BpeError::BadHeader(_) => "bad-header",
            BpeError::MalformedRule { .. } => "malformed-rule",
            BpeError::DuplicateRule { .. } => "duplicate-rule",
            BpeError::MalformedVocab { .. } => "malformed-vocab",
        }
    }
}

pub(crate) fn check_marker(marker: &str) -> Result<(), BpeError> {
    if marker.is_empty() || marker.chars().any(char::is_whitespace) {
        return Err(BpeError::InvalidMarker(marker.to_owned()));
    }
    Ok(())
}

const LINES_PER_CHUNK: usize = 1024;

/// Segments every line: pre-tokenize, segment each token, join the pieces
/// with single spaces.
pub fn segment_text(
    stream: &TextStream,
    merges: &MergeList,
    pretokenize: Pretokenize,
) -> Result<TextStream, BpeError> {
    let chunks: Vec<Result<Vec<String>, BpeError>> = stream
        .lines()
        .par_chunks(LINES_PER_CHUNK)
        .map(|chunk| {
            let mut cache: HashMap<&str, String> = HashMap::new();
            let mut out = Vec::with_capacity(chunk.len());
            for line in chunk {
                let mut segmented = String::new();
                for tok in pretokenize.tokens(line) {
                    if !cache.contains_key(tok) {
                        let seg = merges.segment_word(tok)?;
                        cache.insert(tok, seg.to_string());
                    }
                    if !segmented.is_empty() {
                        segmented.push(' ');
                    }
                    segmented.push_str(&cache[tok]);
                }
                out.push(segmented);
            }
            Ok(out)
        })
        .collect();
    let mut lines = Vec::with_capacity(stream.len());
    for chunk in chunks {
        lines.extend(chunk?);
    }
    Ok(TextStream::new(lines))
}
