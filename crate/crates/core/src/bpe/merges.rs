use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use super::{check_marker, BpeError};

pub const MERGE_FILE_MAGIC: &str = "#uniseg-bpe v1";

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MergeRule {
    pub left: String,
    pub right: String,
    pub new_symbol: String,
    pub frequency: u64,
}

impl MergeRule {
    pub fn new(left: impl Into<String>, right: impl Into<String>, frequency: u64) -> Self {
        let left = left.into();
        let right = right.into();
        let new_symbol = format!("{left}{right}");
        MergeRule {
            left,
            right,
            new_symbol,
            frequency,
        }
    }

    pub fn pair(&self) -> (&str, &str) {
        (&self.left, &self.right)
    }
}

/// Pieces of one word; the final piece carries the end-of-word marker.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Segmentation {
    pub pieces: Vec<String>,
}

impl Segmentation {
    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn joined(&self) -> String {
        self.pieces.concat()
    }

    /// Builds a segmentation from space-separated pieces, e.g. `"lii ken en_"`.
    pub fn parse(text: &str) -> Self {
        Segmentation {
            pieces: text.split_whitespace().map(str::to_owned).collect(),
        }
    }
}

impl std::fmt::Display for Segmentation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.pieces.join(" "))
    }
}

/// Ordered merge rules plus the symbol index used to apply them quickly.
#[derive(Debug, Clone)]
pub struct MergeList {
    rules: Vec<MergeRule>,
    marker: String,
    alphabet: BTreeSet<String>,
    symbols: HashMap<String, u32>,
    names: Vec<String>,
    /// (left id, right id) -> rank and id of the produced symbol.
    ranks: HashMap<(u32, u32), (usize, u32)>,
}

impl PartialEq for MergeList {
    fn eq(&self, other: &Self) -> bool {
        self.rules == other.rules && self.marker == other.marker && self.alphabet == other.alphabet
    }
}

impl Eq for MergeList {}

impl MergeList {
    pub fn empty(marker: &str) -> Result<Self, BpeError> {
        Self::new(Vec::new(), marker, BTreeSet::from([marker.to_owned()]))
    }

    pub fn new(
        rules: Vec<MergeRule>,
        marker: &str,
        alphabet: BTreeSet<String>,
    ) -> Result<Self, BpeError> {
        check_marker(marker)?;
        let mut symbols: HashMap<String, u32> = HashMap::new();
        let mut ranks = HashMap::with_capacity(rules.len());
        let mut intern = |s: &str| -> u32 {
            let next = symbols.len() as u32;
            *symbols.entry(s.to_owned()).or_insert(next)
        };
        for (rank, rule) in rules.iter().enumerate() {
            if rule.left.is_empty() || rule.right.is_empty() {
                return Err(BpeError::MalformedRule {
                    line: rank + 2,
                    reason: "empty symbol".into(),
                });
            }
            if rule.new_symbol != format!("{}{}", rule.left, rule.right) {
                return Err(BpeError::MalformedRule {
                    line: rank + 2,
                    reason: format!("{} is not {} + {}", rule.new_symbol, rule.left, rule.right),
                });
            }
            let l = intern(&rule.left);
            let r = intern(&rule.right);
            let n = intern(&rule.new_symbol);
            if ranks.insert((l, r), (rank, n)).is_some() {
                return Err(BpeError::DuplicateRule {
                    left: rule.left.clone(),
                    right: rule.right.clone(),
                });
            }
        }
        let mut names = vec![String::new(); symbols.len()];
        for (s, &id) in &symbols {
            names[id as usize] = s.clone();
        }
        Ok(MergeList {
            rules,
            marker: marker.to_owned(),
            alphabet,
            symbols,
            names,
            ranks,
        })
    }

    pub fn rules(&self) -> &[MergeRule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn marker(&self) -> &str {
        &self.marker
    }

    /// Initial symbols. For a list read from disk this is the set recoverable
    /// from the rules: every character they mention plus the marker.
    pub fn alphabet(&self) -> &BTreeSet<String> {
        &self.alphabet
    }

    /// Keeps the first `n` rules.
    pub fn truncated(&self, n: usize) -> MergeList {
        let rules = self.rules[..n.min(self.rules.len())].to_vec();
        MergeList::new(rules, &self.marker, self.alphabet.clone()).expect("prefix of a valid list")
    }

    /// Segments a bare word (no marker). Characters unknown to every rule stay
    /// as single-character pieces.
    pub fn segment_word(&self, word: &str) -> Result<Segmentation, BpeError> {
        if word.is_empty() {
            return Err(BpeError::EmptyWord);
        }
        if word.contains(self.marker.as_str()) {
            return Err(BpeError::MarkerCollision {
                marker: self.marker.clone(),
                context: word.to_owned(),
            });
        }
        Ok(self.segment_unchecked(word))
    }

    pub(crate) fn segment_unchecked(&self, word: &str) -> Segmentation {
        let mut buf = [0u8; 4];
        let mut ids: Vec<u32> = Vec::with_capacity(word.len() + 1);
        let mut unknown: Vec<String> = Vec::new();
        let lookup = |s: &str, unknown: &mut Vec<String>| -> u32 {
            match self.symbols.get(s) {
                Some(&id) => id,
                None => {
                    unknown.push(s.to_owned());
                    UNKNOWN_BASE + (unknown.len() as u32 - 1)
                }
            }
        };
        for c in word.chars() {
            ids.push(lookup(c.encode_utf8(&mut buf), &mut unknown));
        }
        ids.push(lookup(&self.marker, &mut unknown));

        // Rules fire in learned order: repeatedly pick the lowest-ranked
        // adjacent pair whose rank exceeds the last one applied, then rewrite
        // all of its occurrences left to right without overlap.
        let mut last: Option<usize> = None;
        loop {
            let mut best: Option<(usize, u32, u32, u32)> = None;
            for w in ids.windows(2) {
                if let Some(&(rank, new)) = self.ranks.get(&(w[0], w[1])) {
                    if last.is_some_and(|l| rank <= l) {
                        continue;
                    }
                    if best.is_none_or(|b| rank < b.0) {
                        best = Some((rank, w[0], w[1], new));
                    }
                }
            }
            let Some((rank, l, r, new)) = best else { break };
            let mut out = Vec::with_capacity(ids.len());
            let mut i = 0;
            while i < ids.len() {
                if i + 1 < ids.len() && ids[i] == l && ids[i + 1] == r {
                    out.push(new);
                    i += 2;
                } else {
                    out.push(ids[i]);
                    i += 1;
                }
            }
            ids = out;
            last = Some(rank);
        }

        let pieces = ids
            .into_iter()
            .map(|id| {
                if id >= UNKNOWN_BASE {
                    unknown[(id - UNKNOWN_BASE) as usize].clone()
                } else {
                    self.names[id as usize].clone()
                }
            })
            .collect();
        Segmentation { pieces }
    }

    /// Serializes to the merge-file format: a header line, then
    /// `left right frequency` per rule.
    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{MERGE_FILE_MAGIC} marker={}", self.marker).unwrap();
        for r in &self.rules {
            writeln!(out, "{} {} {}", r.left, r.right, r.frequency).unwrap();
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, BpeError> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| BpeError::BadHeader(String::new()))?;
        let marker = header
            .strip_prefix(MERGE_FILE_MAGIC)
            .and_then(|rest| rest.strip_prefix(" marker="))
            .filter(|m| !m.is_empty())
            .ok_or_else(|| BpeError::BadHeader(header.to_owned()))?;
        check_marker(marker)?;

        let mut rules = Vec::new();
        let mut alphabet = BTreeSet::from([marker.to_owned()]);
        for (i, line) in lines.enumerate() {
            let lineno = i + 2;
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(' ').collect();
            let [left, right, freq] = fields[..] else {
                return Err(BpeError::MalformedRule {
                    line: lineno,
                    reason: format!("expected 3 space-separated fields, got {}", fields.len()),
                });
            };
            let frequency = freq.parse::<u64>().map_err(|e| BpeError::MalformedRule {
                line: lineno,
                reason: format!("bad frequency {freq:?}: {e}"),
            })?;
            for sym in [left, right] {
                for c in atoms(sym, marker) {
                    alphabet.insert(c);
                }
            }
            rules.push(MergeRule::new(left, right, frequency));
        }
        MergeList::new(rules, marker, alphabet)
    }
}

const UNKNOWN_BASE: u32 = u32::MAX / 2;

/// Splits a symbol into its initial units: characters, with a trailing
/// marker kept whole.
fn atoms(symbol: &str, marker: &str) -> Vec<String> {
    let (body, has_marker) = match symbol.strip_suffix(marker) {
        Some(b) => (b, true),
        None => (symbol, false),
    };
    let mut out: Vec<String> = body.chars().map(String::from).collect();
    if has_marker {
        out.push(marker.to_owned());
    }
    out
}
