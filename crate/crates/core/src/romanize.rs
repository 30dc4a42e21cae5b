//! Rule-table transliteration into Latin script.
//!
//! Input is put into canonical composed form (NFC) and then scanned left to
//! right; at each position the longest rule source that matches is replaced
//! by its ASCII target. Replacements are never re-scanned. Codepoints no rule
//! covers are either kept as-is or, with [`Fallback::StripDiacritics`],
//! decomposed with their combining marks dropped; a remaining base letter
//! that has a single-character rule is then replaced by that rule.
//!
//! Three starter tables ship with the crate (see [`RomanizationTable::builtin`]).

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

#[derive(Debug, Error)]
pub enum RomanizeError {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("encoding error: {0} is not valid UTF-8")]
    Encoding(PathBuf),
    #[error("duplicate-source: line {line} repeats source {source_text:?}")]
    DuplicateSource { line: usize, source_text: String },
    #[error("non-ascii-target: line {line} target {target:?} is not printable ASCII")]
    NonAsciiTarget { line: usize, target: String },
    #[error("empty-source: line {line} has an empty source")]
    EmptySource { line: usize },
    #[error("malformed-rule: line {line} needs exactly one tab")]
    MalformedRule { line: usize },
    #[error("unknown-table: no built-in table named {0:?}")]
    UnknownTable(String),
}

impl RomanizeError {
    pub fn kind(&self) -> &'static str {
        match self {
            RomanizeError::Io { .. } => "io",
            RomanizeError::Encoding(_) => "encoding",
            RomanizeError::DuplicateSource { .. } => "duplicate-source",
            RomanizeError::NonAsciiTarget { .. } => "non-ascii-target",
            RomanizeError::EmptySource { .. } => "empty-source",
            RomanizeError::MalformedRule { .. } => "malformed-rule",
            RomanizeError::UnknownTable(_) => "unknown-table",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fallback {
    #[default]
    PassThrough,
    StripDiacritics,
}

impl FromStr for Fallback {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pass-through" => Ok(Fallback::PassThrough),
            "strip-diacritics" => Ok(Fallback::StripDiacritics),
            other => Err(format!("unknown fallback {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub source: String,
    pub target: String,
}

#[derive(Debug, Clone, Default)]
pub struct RomanizationTable {
    name: String,
    rules: Vec<Rule>,
    index: HashMap<Vec<char>, usize>,
    longest: usize,
}

const BUILTINS: &[(&str, &str)] = &[
    ("cyrillic", include_str!("../data/cyrillic.tsv")),
    ("greek", include_str!("../data/greek.tsv")),
    ("devanagari", include_str!("../data/devanagari.tsv")),
];

impl RomanizationTable {
    pub fn empty(name: &str) -> Self {
        RomanizationTable {
            name: name.to_owned(),
            ..Default::default()
        }
    }

    /// Builds a table from `(source, target)` pairs. Sources are normalized
    /// to NFC before the uniqueness check.
    pub fn from_rules<S, T, I>(name: &str, rules: I) -> Result<Self, RomanizeError>
    where
        S: AsRef<str>,
        T: AsRef<str>,
        I: IntoIterator<Item = (S, T)>,
    {
        let mut table = Self::empty(name);
        for (i, (s, t)) in rules.into_iter().enumerate() {
            table.push(i + 1, s.as_ref(), t.as_ref())?;
        }
        Ok(table)
    }

    fn push(&mut self, line: usize, source: &str, target: &str) -> Result<(), RomanizeError> {
        if source.is_empty() {
            return Err(RomanizeError::EmptySource { line });
        }
        if !target.bytes().all(|b| (0x20..=0x7e).contains(&b)) {
            return Err(RomanizeError::NonAsciiTarget {
                line,
                target: target.to_owned(),
            });
        }
        let source: String = source.nfc().collect();
        let key: Vec<char> = source.chars().collect();
        if self.index.contains_key(&key) {
            return Err(RomanizeError::DuplicateSource {
                line,
                source_text: source,
            });
        }
        self.longest = self.longest.max(key.len());
        self.index.insert(key, self.rules.len());
        self.rules.push(Rule {
            source,
            target: target.to_owned(),
        });
        Ok(())
    }

    /// Parses the TSV table format: `source<TAB>target`, `#` comment lines,
    /// blank lines ignored.
    pub fn parse(name: &str, text: &str) -> Result<Self, RomanizeError> {
        let mut table = Self::empty(name);
        for (i, line) in text.lines().enumerate() {
            let line = line.strip_suffix('\r').unwrap_or(line);
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split('\t');
            let (Some(source), Some(target), None) = (fields.next(), fields.next(), fields.next())
            else {
                return Err(RomanizeError::MalformedRule { line: i + 1 });
            };
            table.push(i + 1, source, target)?;
        }
        Ok(table)
    }

    pub fn load(path: &Path) -> Result<Self, RomanizeError> {
        let bytes = fs::read(path).map_err(|source| RomanizeError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let text =
            String::from_utf8(bytes).map_err(|_| RomanizeError::Encoding(path.to_path_buf()))?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        Self::parse(&name, &text)
    }

    /// One of the shipped tables: `cyrillic`, `greek` or `devanagari`.
    pub fn builtin(name: &str) -> Result<Self, RomanizeError> {
        let (_, text) = BUILTINS
            .iter()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| RomanizeError::UnknownTable(name.to_owned()))?;
        Ok(Self::parse(name, text).expect("built-in tables are valid"))
    }

    pub fn builtin_names() -> impl Iterator<Item = &'static str> {
        BUILTINS.iter().map(|(n, _)| *n)
    }

    /// All built-in tables merged into one.
    pub fn all_builtins() -> Self {
        let mut table = Self::empty("builtin");
        for name in Self::builtin_names() {
            table = table
                .merged(&Self::builtin(name).unwrap())
                .expect("built-ins are disjoint");
        }
        table
    }

    /// Rules of `self` followed by those of `other`; sources must not overlap.
    pub fn merged(&self, other: &Self) -> Result<Self, RomanizeError> {
        let mut table = self.clone();
        for (i, r) in other.rules.iter().enumerate() {
            table.push(self.rules.len() + i + 1, &r.source, &r.target)?;
        }
        Ok(table)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }
}

pub fn romanize_text(text: &str, table: &RomanizationTable, fallback: Fallback) -> String {
    let chars: Vec<char> = text.nfc().collect();
    let mut out = String::with_capacity(text.len());
    let mut i = 0;
    while i < chars.len() {
        let max = table.longest.min(chars.len() - i);
        let hit = (1..=max)
            .rev()
            .find_map(|len| table.index.get(&chars[i..i + len]).map(|&r| (len, r)));
        match hit {
            Some((len, r)) => {
                out.push_str(&table.rules[r].target);
                i += len;
            }
            None => {
                let c = chars[i];
                match fallback {
                    Fallback::PassThrough => out.push(c),
                    Fallback::StripDiacritics => {
                        for d in std::iter::once(c).nfd().filter(|&d| !is_combining_mark(d)) {
                            match table.index.get(&[d][..]) {
                                Some(&r) => out.push_str(&table.rules[r].target),
                                None => out.push(d),
                            }
                        }
                    }
                }
                i += 1;
            }
        }
    }
    out
}
