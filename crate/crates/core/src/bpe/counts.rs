use std::fmt;

use indexmap::IndexMap;
use rayon::prelude::*;

use super::{check_marker, BpeError};
use crate::corpus::TextStream;
use crate::pretok::Pretokenize;

const LINES_PER_CHUNK: usize = 4096;

/// Word frequencies in order of first appearance.
///
/// Keys are stored without the end-of-word marker; [`WordCountTable::iter`]
/// hands out the bare word and the marker is re-attached on display and
/// during symbolization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordCountTable {
    marker: String,
    entries: IndexMap<String, u64>,
}

impl WordCountTable {
    pub fn new(marker: &str) -> Result<Self, BpeError> {
        check_marker(marker)?;
        Ok(WordCountTable {
            marker: marker.to_owned(),
            entries: IndexMap::new(),
        })
    }

    /// Builds a table from `(bare word, count)` pairs. Repeated words
    /// accumulate; zero counts are dropped.
    pub fn from_counts<'a, I>(marker: &str, counts: I) -> Result<Self, BpeError>
    where
        I: IntoIterator<Item = (&'a str, u64)>,
    {
        let mut table = Self::new(marker)?;
        for (word, count) in counts {
            table.add(word, count)?;
        }
        Ok(table)
    }

    pub fn add(&mut self, word: &str, count: u64) -> Result<(), BpeError> {
        if word.is_empty() {
            return Err(BpeError::EmptyWord);
        }
        if word.contains(self.marker.as_str()) {
            return Err(BpeError::MarkerCollision {
                marker: self.marker.clone(),
                context: word.to_owned(),
            });
        }
        if count > 0 {
            *self.entries.entry(word.to_owned()).or_insert(0) += count;
        }
        Ok(())
    }

    pub fn marker(&self) -> &str {
        &self.marker
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.entries.iter().map(|(w, &c)| (w.as_str(), c))
    }

    pub fn get(&self, word: &str) -> Option<u64> {
        self.entries.get(word).copied()
    }

    pub fn total_tokens(&self) -> u64 {
        self.entries.values().sum()
    }
}

impl fmt::Display for WordCountTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (w, c)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "'{w}{}': {c}", self.marker)?;
        }
        f.write_str("}")
    }
}

/// Counts pre-tokenized words. Lines are processed in parallel chunks and the
/// per-chunk tables are folded back in line order, so entry order is the
/// order of first appearance regardless of thread count.
pub fn count_words(
    stream: &TextStream,
    pretokenize: Pretokenize,
    marker: &str,
) -> Result<WordCountTable, BpeError> {
    check_marker(marker)?;
    let partials: Vec<Result<IndexMap<&str, u64>, BpeError>> = stream
        .lines()
        .par_chunks(LINES_PER_CHUNK)
        .map(|chunk| {
            let mut local: IndexMap<&str, u64> = IndexMap::new();
            for line in chunk {
                if line.contains(marker) {
                    return Err(BpeError::MarkerCollision {
                        marker: marker.to_owned(),
                        context: line.clone(),
                    });
                }
                for tok in pretokenize.tokens(line) {
                    *local.entry(tok).or_insert(0) += 1;
                }
            }
            Ok(local)
        })
        .collect();

    let mut table = WordCountTable::new(marker)?;
    for partial in partials {
        for (word, count) in partial? {
            *table.entries.entry(word.to_owned()).or_insert(0) += count;
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stream(lines: &[&str]) -> TextStream {
        TextStream::new(lines.iter().map(|s| s.to_string()).collect())
    }

    #[test]
    fn toy_dictionary_counts() {
        let s = stream(&["the the the", "mother father", "fewer fewer"]);
        let t = count_words(&s, Pretokenize::Whitespace, "_").unwrap();
        assert_eq!(
            t.iter().collect::<Vec<_>>(),
            [("the", 3), ("mother", 1), ("father", 1), ("fewer", 2)]
        );
        assert_eq!(
            t.to_string(),
            "{'the_': 3, 'mother_': 1, 'father_': 1, 'fewer_': 2}"
        );
    }

    #[test]
    fn punctuation_split() {
        let t = count_words(&stream(&["a."]), Pretokenize::WhitespacePunct, "_").unwrap();
        assert_eq!(t.iter().collect::<Vec<_>>(), [("a", 1), (".", 1)]);
    }

    #[test]
    fn marker_collision() {
        let err =
            count_words(&stream(&["ok", "snake_case"]), Pretokenize::Whitespace, "_").unwrap_err();
        assert!(matches!(err, BpeError::MarkerCollision { .. }));
        assert_eq!(err.kind(), "marker-collision");
    }

    #[test]
    fn order_is_independent_of_chunking() {
        let lines: Vec<String> = (0..10_000)
            .map(|i| format!("w{} w{}", i % 97, i % 13))
            .collect();
        let s = TextStream::new(lines.clone());
        let parallel = count_words(&s, Pretokenize::Whitespace, "_").unwrap();
        let mut serial = WordCountTable::new("_").unwrap();
        for l in &lines {
            for w in l.split_whitespace() {
                serial.add(w, 1).unwrap();
            }
        }
        assert_eq!(parallel, serial);
    }

    #[test]
    fn rejects_bad_markers() {
        assert!(WordCountTable::new("").is_err());
        assert!(WordCountTable::new("a b").is_err());
    }
}
