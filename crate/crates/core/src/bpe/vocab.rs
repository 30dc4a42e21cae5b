use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use super::{BpeError, MergeList, WordCountTable};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VocabEntry {
    pub symbol: String,
    pub frequency: u64,
}

/// Symbols with their corpus frequency, sorted by descending frequency and
/// then by first occurrence in the counting corpus.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Vocabulary {
    entries: Vec<VocabEntry>,
}

impl Vocabulary {
    pub fn entries(&self) -> &[VocabEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, symbol: &str) -> bool {
        self.entries.iter().any(|e| e.symbol == symbol)
    }

    pub fn frequency(&self, symbol: &str) -> Option<u64> {
        self.entries
            .iter()
            .find(|e| e.symbol == symbol)
            .map(|e| e.frequency)
    }

    pub fn symbols(&self) -> BTreeSet<String> {
        self.entries.iter().map(|e| e.symbol.clone()).collect()
    }

    /// `symbol<TAB>frequency` per line.
    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            writeln!(out, "{}\t{}", e.symbol, e.frequency).unwrap();
        }
        out
    }

    /// Reads a vocabulary file, keeping its line order.
    pub fn parse(text: &str) -> Result<Self, BpeError> {
        let mut entries = Vec::new();
        let mut seen = BTreeSet::new();
        for (i, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let malformed = |reason: String| BpeError::MalformedVocab {
                line: i + 1,
                reason,
            };
            let (symbol, freq) = line
                .split_once('\t')
                .ok_or_else(|| malformed("missing tab".into()))?;
            if symbol.is_empty() {
                return Err(malformed("empty symbol".into()));
            }
            let frequency = freq
                .parse()
                .map_err(|e| malformed(format!("bad frequency {freq:?}: {e}")))?;
            if !seen.insert(symbol.to_owned()) {
                return Err(malformed(format!("duplicate symbol {symbol:?}")));
            }
            entries.push(VocabEntry {
                symbol: symbol.to_owned(),
                frequency,
            });
        }
        Ok(Vocabulary { entries })
    }
}

/// Applies `merges` to every word of `counts` and collects the resulting
/// symbols, weighted by word counts.
pub fn vocabulary_of(counts: &WordCountTable, merges: &MergeList) -> Vocabulary {
    // symbol -> (frequency, first (word index, piece index))
    let mut freq: HashMap<String, (u64, (usize, usize))> = HashMap::new();
    for (wi, (word, count)) in counts.iter().enumerate() {
        let seg = merges.segment_unchecked(word);
        for (pi, piece) in seg.pieces.into_iter().enumerate() {
            freq.entry(piece).or_insert((0, (wi, pi))).0 += count;
        }
    }
    let mut entries: Vec<(String, u64, (usize, usize))> = freq
        .into_iter()
        .map(|(s, (f, first))| (s, f, first))
        .collect();
    entries.sort_by(|a, b| b.1.cmp(&a.1).then(a.2.cmp(&b.2)));
    Vocabulary {
        entries: entries
            .into_iter()
            .map(|(symbol, frequency, _)| VocabEntry { symbol, frequency })
            .collect(),
    }
}
