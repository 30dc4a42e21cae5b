//! Universal subword vocabularies for multilingual transfer.
//!
//! The pipeline: romanize every language into Latin script, sample and
//! concatenate corpora, learn one BPE vocabulary over the result, then use
//! it unchanged for any new language. Around that core sit diagnostics
//! (over-segmentation rate, subword sharing), a CJK character-scrambling
//! ablation, and embedding-table hand-off strategies.

pub mod ablate;
pub mod bpe;
pub mod corpus;
pub mod metrics;
pub mod pretok;
pub mod rng;
pub mod romanize;
pub mod transfer;

pub use bpe::{
    count_words, segment_text, train, train_to_size, vocabulary_of, BpeError, MergeList, MergeRule,
    Segmentation, Vocabulary, WordCountTable, DEFAULT_MARKER,
};
pub use corpus::{ParallelCorpus, TextStream};
pub use pretok::Pretokenize;

/// Vocabulary size for single-pair baseline models.
pub const BASELINE_VOCAB_SIZE: usize = 8000;
/// Vocabulary size for the universal parent model.
pub const PARENT_VOCAB_SIZE: usize = 16000;
