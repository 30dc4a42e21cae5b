//! Hand-off of an embedding table from a parent vocabulary to a child.
//!
//! Three strategies:
//!
//! * **universal**: the child reuses the parent vocabulary, so the table is
//!   passed through untouched.
//! * **frequency**: the i-th most frequent child token takes over the row of
//!   the i-th most frequent parent token; surplus child tokens get fresh rows.
//! * **union**: child tokens the parent lacks are appended with fresh rows;
//!   every parent row is kept bit for bit.
//!
//! Fresh rows depend only on (seed, output row index, dimension): row `i`
//! draws from ChaCha8 stream `i` of `seed`.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::distributions::{Distribution, Uniform};
use serde::Serialize;
use thiserror::Error;

use crate::rng;

#[derive(Debug, Error)]
pub enum TransferError {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("encoding error: {0} is not valid UTF-8")]
    Encoding(PathBuf),
    #[error("malformed-embedding: line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("dimension-mismatch: expected {expected} values, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("duplicate-token: {0:?} appears more than once")]
    DuplicateToken(String),
    #[error("invalid-token: {0:?} is empty or contains whitespace")]
    InvalidToken(String),
    #[error(
        "permutation-mismatch: parent frequency order is not a permutation of the parent tokens"
    )]
    PermutationMismatch,
    #[error("empty-child: child frequency order is empty")]
    EmptyChild,
}

impl TransferError {
    pub fn kind(&self) -> &'static str {
        match self {
            TransferError::Io { .. } => "io",
            TransferError::Encoding(_) => "encoding",
            TransferError::Malformed { .. } => "malformed-embedding",
            TransferError::DimensionMismatch { .. } => "dimension-mismatch",
            TransferError::DuplicateToken(_) => "duplicate-token",
            TransferError::InvalidToken(_) => "invalid-token",
            TransferError::PermutationMismatch => "permutation-mismatch",
            TransferError::EmptyChild => "empty-child",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    tokens: Vec<String>,
    dim: usize,
    data: Vec<f32>,
}

impl EmbeddingTable {
    pub fn new(tokens: Vec<String>, dim: usize, data: Vec<f32>) -> Result<Self, TransferError> {
        if data.len() != tokens.len() * dim {
            return Err(TransferError::DimensionMismatch {
                expected: tokens.len() * dim,
                found: data.len(),
            });
        }
        check_tokens(&tokens)?;
        Ok(EmbeddingTable { tokens, dim, data })
    }

    pub fn from_rows(
        tokens: Vec<String>,
        rows: Vec<Vec<f32>>,
        dim: usize,
    ) -> Result<Self, TransferError> {
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(TransferError::DimensionMismatch {
                expected: dim,
                found: bad.len(),
            });
        }
        Self::new(tokens, dim, rows.concat())
    }

    pub fn empty(dim: usize) -> Self {
        EmbeddingTable {
            tokens: Vec::new(),
            dim,
            data: Vec::new(),
        }
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn index_of(&self, token: &str) -> Option<usize> {
        self.tokens.iter().position(|t| t == token)
    }

    /// `V D` header, then `token v1 .. vD` per row. Floats use Rust's
    /// shortest round-trip formatting.
    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{} {}", self.len(), self.dim).unwrap();
        for (i, tok) in self.tokens.iter().enumerate() {
            out.push_str(tok);
            for v in self.row(i) {
                write!(out, " {v:?}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, TransferError> {
        let malformed = |line: usize, reason: String| TransferError::Malformed { line, reason };
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| malformed(1, "missing header".into()))?;
        let nums: Vec<&str> = header.split(' ').collect();
        let [v, d] = nums[..] else {
            return Err(malformed(1, format!("expected `V D`, found {header:?}")));
        };
        let vocab: usize = v
            .parse()
            .map_err(|_| malformed(1, format!("bad count {v:?}")))?;
        let dim: usize = d
            .parse()
            .map_err(|_| malformed(1, format!("bad dimension {d:?}")))?;
        let mut tokens = Vec::with_capacity(vocab);
        let mut data = Vec::with_capacity(vocab * dim);
        for (i, line) in lines.enumerate() {
            let lineno = i + 2;
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split(' ');
            let token = fields.next().unwrap_or_default();
            let before = data.len();
            for f in fields {
                data.push(
                    f.parse::<f32>()
                        .map_err(|_| malformed(lineno, format!("bad float {f:?}")))?,
                );
            }
            if data.len() - before != dim {
                return Err(TransferError::DimensionMismatch {
                    expected: dim,
                    found: data.len() - before,
                });
            }
            tokens.push(token.to_owned());
        }
        if tokens.len() != vocab {
            return Err(malformed(
                1,
                format!("header says {vocab} rows, found {}", tokens.len()),
            ));
        }
        Self::new(tokens, dim, data)
    }

    pub fn load(path: &Path) -> Result<Self, TransferError> {
        let bytes = fs::read(path).map_err(|source| TransferError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let text =
            String::from_utf8(bytes).map_err(|_| TransferError::Encoding(path.to_path_buf()))?;
        Self::parse(&text)
    }
}

fn check_tokens(tokens: &[String]) -> Result<(), TransferError> {
    let mut seen = HashSet::with_capacity(tokens.len());
    for t in tokens {
        if t.is_empty() || t.chars().any(char::is_whitespace) {
            return Err(TransferError::InvalidToken(t.clone()));
        }
        if !seen.insert(t.as_str()) {
            return Err(TransferError::DuplicateToken(t.clone()));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Universal,
    Frequency,
    Union,
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "universal" => Ok(Strategy::Universal),
            "frequency" => Ok(Strategy::Frequency),
            "union" => Ok(Strategy::Union),
            other => Err(format!("unknown strategy {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Init {
    Zero,
    /// Uniform in `(-r, r)`.
    Uniform(f32),
}

impl Default for Init {
    fn default() -> Self {
        Init::Uniform(0.1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSource {
    Parent(usize),
    Fresh,
}

/// Which parent row, if any, each output token starts from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferPlan {
    pub strategy: Strategy,
    pub mapping: Vec<(String, RowSource)>,
    pub seed: u64,
}

impl TransferPlan {
    pub fn apply(&self, parent: &EmbeddingTable, init: Init) -> EmbeddingTable {
        let dim = parent.dim;
        let mut data = Vec::with_capacity(self.mapping.len() * dim);
        for (i, (_, source)) in self.mapping.iter().enumerate() {
            match *source {
                RowSource::Parent(p) => data.extend_from_slice(parent.row(p)),
                RowSource::Fresh => data.extend(fresh_row(self.seed, i, dim, init)),
            }
        }
        EmbeddingTable {
            tokens: self.mapping.iter().map(|(t, _)| t.clone()).collect(),
            dim,
            data,
        }
    }
}

/// Deterministic initial values for output row `index`.
pub fn fresh_row(seed: u64, index: usize, dim: usize, init: Init) -> Vec<f32> {
    match init {
        Init::Zero => vec![0.0; dim],
        Init::Uniform(r) => {
            let mut rng = rng::substream(seed, index as u64);
            let dist = Uniform::new(-r, r);
            (0..dim).map(|_| dist.sample(&mut rng)).collect()
        }
    }
}

pub fn plan_universal(parent: &EmbeddingTable) -> TransferPlan {
    TransferPlan {
        strategy: Strategy::Universal,
        mapping: parent
            .tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), RowSource::Parent(i)))
            .collect(),
        seed: 0,
    }
}

pub fn plan_frequency(
    parent: &EmbeddingTable,
    parent_freq_order: &[String],
    child_freq_order: &[String],
    seed: u64,
) -> Result<TransferPlan, TransferError> {
    if child_freq_order.is_empty() {
        return Err(TransferError::EmptyChild);
    }
    check_tokens(child_freq_order)?;
    let index: HashMap<&str, usize> = parent
        .tokens
        .iter()
        .enumerate()
        .map(|(i, t)| (t.as_str(), i))
        .collect();
    if parent_freq_order.len() != parent.len() {
        return Err(TransferError::PermutationMismatch);
    }
    let mut seen = HashSet::with_capacity(parent.len());
    let mut rows = Vec::with_capacity(parent.len());
    for t in parent_freq_order {
        let &i = index
            .get(t.as_str())
            .ok_or(TransferError::PermutationMismatch)?;
        if !seen.insert(i) {
            return Err(TransferError::PermutationMismatch);
        }
        rows.push(i);
    }
    let mapping = child_freq_order
        .iter()
        .enumerate()
        .map(|(k, t)| {
            let source = rows
                .get(k)
                .map_or(RowSource::Fresh, |&r| RowSource::Parent(r));
            (t.clone(), source)
        })
        .collect();
    Ok(TransferPlan {
        strategy: Strategy::Frequency,
        mapping,
        seed,
    })
}

pub fn plan_union(
    parent: &EmbeddingTable,
    child_vocab: &[String],
    seed: u64,
) -> Result<TransferPlan, TransferError> {
    let mut plan = plan_universal(parent);
    plan.strategy = Strategy::Union;
    plan.seed = seed;
    let mut present: HashSet<&str> = parent.tokens.iter().map(String::as_str).collect();
    for t in child_vocab {
        if t.is_empty() || t.chars().any(char::is_whitespace) {
            return Err(TransferError::InvalidToken(t.clone()));
        }
        if present.insert(t.as_str()) {
            plan.mapping.push((t.clone(), RowSource::Fresh));
        }
    }
    Ok(plan)
}

/// The parent table, unchanged.
pub fn remap_universal(parent: &EmbeddingTable) -> EmbeddingTable {
    plan_universal(parent).apply(parent, Init::Zero)
}

pub fn remap_frequency(
    parent: &EmbeddingTable,
    parent_freq_order: &[String],
    child_freq_order: &[String],
    seed: u64,
    init: Init,
) -> Result<EmbeddingTable, TransferError> {
    Ok(plan_frequency(parent, parent_freq_order, child_freq_order, seed)?.apply(parent, init))
}

pub fn remap_union(
    parent: &EmbeddingTable,
    child_vocab: &[String],
    seed: u64,
    init: Init,
) -> Result<EmbeddingTable, TransferError> {
    Ok(plan_union(parent, child_vocab, seed)?.apply(parent, init))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Default)]
pub struct DiffReport {
    /// Same token, bit-identical row.
    pub preserved: Vec<String>,
    /// Row copied from a different parent token.
    pub reassigned: Vec<String>,
    /// Row found nowhere in `before`.
    pub fresh: Vec<String>,
    /// Tokens of `before` missing from `after`.
    pub dropped: Vec<String>,
}

impl DiffReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "preserved: {}", self.preserved.len()).unwrap();
        writeln!(out, "reassigned: {}", self.reassigned.len()).unwrap();
        writeln!(out, "fresh: {}", self.fresh.len()).unwrap();
        writeln!(out, "dropped: {}", self.dropped.len()).unwrap();
        for (label, list) in [
            ("reassigned_token", &self.reassigned),
            ("fresh_token", &self.fresh),
            ("dropped_token", &self.dropped),
        ] {
            for t in list {
                writeln!(out, "{label}: {t}").unwrap();
            }
        }
        out
    }
}

fn row_bits(row: &[f32]) -> Vec<u32> {
    row.iter().map(|v| v.to_bits()).collect()
}

pub fn diff_report(before: &EmbeddingTable, after: &EmbeddingTable) -> DiffReport {
    let before_rows: HashSet<Vec<u32>> =
        (0..before.len()).map(|i| row_bits(before.row(i))).collect();
    let before_index: HashMap<&str, usize> = before
        .tokens
        .iter()
        .enumerate()
        .map(|(i, t)| (t.as_str(), i))
        .collect();
    let mut report = DiffReport::default();
    for (i, tok) in after.tokens.iter().enumerate() {
        let bits = row_bits(after.row(i));
        let same_token_row = before_index
            .get(tok.as_str())
            .is_some_and(|&b| row_bits(before.row(b)) == bits);
        if same_token_row {
            report.preserved.push(tok.clone());
        } else if after.dim == before.dim && before_rows.contains(&bits) {
            report.reassigned.push(tok.clone());
        } else {
            report.fresh.push(tok.clone());
        }
    }
    let after_tokens: HashSet<&str> = after.tokens.iter().map(String::as_str).collect();
    report.dropped = before
        .tokens
        .iter()
        .filter(|t| !after_tokens.contains(t.as_str()))
        .cloned()
        .collect();
    report
}
