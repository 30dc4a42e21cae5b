//! Character scrambling for the "no shared subwords" control corpus.
//!
//! Each Latin letter is swapped for a distinct codepoint from the CJK Unified
//! Ideographs block, chosen at random from a seed. The text keeps its shape
//! (same codepoint count, same whitespace and punctuation) but can no longer
//! share any letter sequence with untouched Latin text.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rand::seq::index;
use thiserror::Error;

use crate::rng;

pub const CJK_FIRST: u32 = 0x4E00;
pub const CJK_LAST: u32 = 0x9FFF;
pub const CJK_BLOCK_SIZE: usize = (CJK_LAST - CJK_FIRST + 1) as usize;
pub const MAP_FILE_MAGIC: &str = "#uniseg-cjkmap v1";

#[derive(Debug, Error)]
pub enum AblateError {
    #[error("alphabet-too-large: {size} codepoints, the CJK block holds {CJK_BLOCK_SIZE}")]
    AlphabetTooLarge { size: usize },
    #[error("not-injective: {0} has more than one source")]
    NotInjective(String),
    #[error("not-cjk: target {0} is outside U+4E00..U+9FFF")]
    NotCjk(String),
    #[error("bad-header: expected `{MAP_FILE_MAGIC} seed=<n>`, found {0:?}")]
    BadHeader(String),
    #[error("malformed-map: line {line}: {reason}")]
    Malformed { line: usize, reason: String },
}

impl AblateError {
    pub fn kind(&self) -> &'static str {
        match self {
            AblateError::AlphabetTooLarge { .. } => "alphabet-too-large",
            AblateError::NotInjective(_) => "not-injective",
            AblateError::NotCjk(_) => "not-cjk",
            AblateError::BadHeader(_) => "bad-header",
            AblateError::Malformed { .. } => "malformed-map",
        }
    }
}

/// An injective codepoint substitution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharMap {
    pairs: BTreeMap<char, char>,
    seed: u64,
}

impl CharMap {
    pub fn new(pairs: BTreeMap<char, char>, seed: u64) -> Result<Self, AblateError> {
        let mut targets = BTreeSet::new();
        for &t in pairs.values() {
            if !targets.insert(t) {
                return Err(AblateError::NotInjective(codepoint(t)));
            }
        }
        Ok(CharMap { pairs, seed })
    }

    pub fn pairs(&self) -> &BTreeMap<char, char> {
        &self.pairs
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn get(&self, c: char) -> Option<char> {
        self.pairs.get(&c).copied()
    }

    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{MAP_FILE_MAGIC} seed={}", self.seed).unwrap();
        for (&s, &t) in &self.pairs {
            writeln!(out, "{}\t{}", codepoint(s), codepoint(t)).unwrap();
        }
        out
    }

    /// Reads a map file. Targets must lie in the CJK block.
    pub fn parse(text: &str) -> Result<Self, AblateError> {
        let mut lines = text.lines();
        let header = lines.next().unwrap_or_default();
        let seed = header
            .strip_prefix(MAP_FILE_MAGIC)
            .and_then(|r| r.strip_prefix(" seed="))
            .and_then(|s| s.parse::<u64>().ok())
            .ok_or_else(|| AblateError::BadHeader(header.to_owned()))?;
        let mut pairs = BTreeMap::new();
        for (i, line) in lines.enumerate() {
            let lineno = i + 2;
            if line.is_empty() {
                continue;
            }
            let malformed = |reason: String| AblateError::Malformed {
                line: lineno,
                reason,
            };
            let (s, t) = line
                .split_once('\t')
                .ok_or_else(|| malformed("missing tab".into()))?;
            let s = parse_codepoint(s).ok_or_else(|| malformed(format!("bad codepoint {s:?}")))?;
            let t = parse_codepoint(t).ok_or_else(|| malformed(format!("bad codepoint {t:?}")))?;
            if !is_cjk(t) {
                return Err(AblateError::NotCjk(codepoint(t)));
            }
            if pairs.insert(s, t).is_some() {
                return Err(malformed(format!("{} mapped twice", codepoint(s))));
            }
        }
        CharMap::new(pairs, seed)
    }
}

pub fn is_cjk(c: char) -> bool {
    (CJK_FIRST..=CJK_LAST).contains(&(c as u32))
}

fn codepoint(c: char) -> String {
    format!("U+{:04X}", c as u32)
}

fn parse_codepoint(s: &str) -> Option<char> {
    let hex = s.strip_prefix("U+")?;
    char::from_u32(u32::from_str_radix(hex, 16).ok()?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AlphabetOptions {
    pub digits: bool,
    /// Letters from Latin-1 Supplement and Latin Extended-A.
    pub accented: bool,
}

/// `A-Z` and `a-z`, optionally extended with digits and accented letters.
pub fn latin_alphabet(options: AlphabetOptions) -> BTreeSet<char> {
    let mut set: BTreeSet<char> = ('A'..='Z').chain('a'..='z').collect();
    if options.digits {
        set.extend('0'..='9');
    }
    if options.accented {
        set.extend(('\u{C0}'..='\u{17F}').filter(|c| c.is_alphabetic()));
    }
    set
}

/// Draws `|alphabet|` distinct CJK codepoints and assigns them to the
/// alphabet in codepoint order.
pub fn build_cjk_map(alphabet: &BTreeSet<char>, seed: u64) -> Result<CharMap, AblateError> {
    if alphabet.len() > CJK_BLOCK_SIZE {
        return Err(AblateError::AlphabetTooLarge {
            size: alphabet.len(),
        });
    }
    let mut rng = rng::seeded(seed);
    let picks = index::sample(&mut rng, CJK_BLOCK_SIZE, alphabet.len());
    let pairs = alphabet
        .iter()
        .zip(picks.iter())
        .map(|(&c, k)| {
            (
                c,
                char::from_u32(CJK_FIRST + k as u32).expect("block is all scalar values"),
            )
        })
        .collect();
    CharMap::new(pairs, seed)
}

pub fn apply_map(text: &str, map: &CharMap) -> String {
    text.chars().map(|c| map.get(c).unwrap_or(c)).collect()
}

pub fn invert(map: &CharMap) -> CharMap {
    CharMap {
        pairs: map.pairs.iter().map(|(&s, &t)| (t, s)).collect(),
        seed: map.seed,
    }
}
