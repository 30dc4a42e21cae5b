//! Parallel and monolingual corpus handling.
//!
//! Corpora are loaded eagerly into memory, sampled, concatenated and finally
//! flattened into a [`TextStream`] that the BPE trainer consumes. Every
//! operation is a pure function of its inputs (and seed), so re-running a
//! pipeline yields byte-identical text.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use rand::seq::index;
use thiserror::Error;

use crate::rng;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("encoding error: {path} is not valid UTF-8 (byte offset {offset})")]
    Encoding { path: PathBuf, offset: usize },
    #[error("malformed-row: {path} line {line} has {tabs} tab separators, expected 1")]
    MalformedRow {
        path: PathBuf,
        line: usize,
        tabs: usize,
    },
    #[error("length-mismatch: source has {source_lines} lines, target has {target_lines}")]
    LengthMismatch {
        source_lines: usize,
        target_lines: usize,
    },
    #[error("empty-list: concat needs at least one corpus")]
    EmptyList,
    #[error("line-break: sentence {index} contains a line break")]
    LineBreak { index: usize },
}

impl CorpusError {
    pub fn kind(&self) -> &'static str {
        match self {
            CorpusError::Io { .. } => "io",
            CorpusError::Encoding { .. } => "encoding",
            CorpusError::MalformedRow { .. } => "malformed-row",
            CorpusError::LengthMismatch { .. } => "length-mismatch",
            CorpusError::EmptyList => "empty-list",
            CorpusError::LineBreak { .. } => "line-break",
        }
    }
}

/// Aligned sentence pairs, in file order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ParallelCorpus {
    pairs: Vec<(String, String)>,
    language_tag: Option<String>,
}

impl ParallelCorpus {
    pub fn new(pairs: Vec<(String, String)>) -> Result<Self, CorpusError> {
        for (i, (s, t)) in pairs.iter().enumerate() {
            if has_line_break(s) || has_line_break(t) {
                return Err(CorpusError::LineBreak { index: i });
            }
        }
        Ok(ParallelCorpus {
            pairs,
            language_tag: None,
        })
    }

    pub fn with_language_tag(mut self, tag: impl Into<String>) -> Self {
        self.language_tag = Some(tag.into());
        self
    }

    pub fn language_tag(&self) -> Option<&str> {
        self.language_tag.as_deref()
    }

    pub fn pairs(&self) -> &[(String, String)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn sources(&self) -> impl Iterator<Item = &str> {
        self.pairs.iter().map(|(s, _)| s.as_str())
    }

    pub fn targets(&self) -> impl Iterator<Item = &str> {
        self.pairs.iter().map(|(_, t)| t.as_str())
    }

    /// Serializes as `source<TAB>target` lines, each LF-terminated.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (s, t) in &self.pairs {
            out.push_str(s);
            out.push('\t');
            out.push_str(t);
            out.push('\n');
        }
        out
    }
}

/// An ordered sequence of sentences.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TextStream {
    lines: Vec<String>,
}

impl TextStream {
    pub fn new(lines: Vec<String>) -> Self {
        TextStream { lines }
    }

    /// Splits `text` on LF. A trailing newline does not produce an extra
    /// empty line, but interior empty lines are kept.
    pub fn from_text(text: &str) -> Self {
        TextStream {
            lines: split_lines(text).map(str::to_owned).collect(),
        }
    }

    pub fn from_reader<R: Read>(mut reader: R, name: &Path) -> Result<Self, CorpusError> {
        let mut bytes = Vec::new();
        reader
            .read_to_end(&mut bytes)
            .map_err(|source| CorpusError::Io {
                path: name.to_path_buf(),
                source,
            })?;
        let text = decode(bytes, name)?;
        Ok(Self::from_text(&text))
    }

    pub fn load(path: &Path) -> Result<Self, CorpusError> {
        Ok(Self::from_text(&read_utf8(path)?))
    }

    pub fn lines(&self) -> &[String] {
        &self.lines
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.lines.iter().map(String::as_str)
    }

    pub fn into_lines(self) -> Vec<String> {
        self.lines
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for line in &self.lines {
            out.push_str(line);
            out.push('\n');
        }
        out
    }
}

impl FromIterator<String> for TextStream {
    fn from_iter<I: IntoIterator<Item = String>>(iter: I) -> Self {
        TextStream {
            lines: iter.into_iter().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParallelFormat {
    /// One `source<TAB>target` row per line.
    Tsv,
    /// The load path is the source side; `target` holds the aligned file.
    TwoFile { target: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LoadReport {
    pub lines_read: usize,
    pub skipped_empty: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleMode {
    Head,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sides {
    Source,
    Target,
    Both,
}

pub fn load_parallel(
    path: &Path,
    format: &ParallelFormat,
) -> Result<(ParallelCorpus, LoadReport), CorpusError> {
    match format {
        ParallelFormat::Tsv => parse_tsv(&read_utf8(path)?, path),
        ParallelFormat::TwoFile { target } => {
            let src = read_utf8(path)?;
            let tgt = read_utf8(target)?;
            pair_lines(&src, &tgt)
        }
    }
}

/// Parses TSV text. Empty lines, and rows whose either side is empty, are
/// dropped and counted in the report.
pub fn parse_tsv(text: &str, name: &Path) -> Result<(ParallelCorpus, LoadReport), CorpusError> {
    let mut report = LoadReport::default();
    let mut pairs = Vec::new();
    for (i, line) in split_lines(text).enumerate() {
        report.lines_read += 1;
        if line.is_empty() {
            report.skipped_empty += 1;
            continue;
        }
        let tabs = line.matches('\t').count();
        if tabs != 1 {
            return Err(CorpusError::MalformedRow {
                path: name.to_path_buf(),
                line: i + 1,
                tabs,
            });
        }
        let (s, t) = line.split_once('\t').expect("exactly one tab");
        if s.is_empty() || t.is_empty() {
            report.skipped_empty += 1;
            continue;
        }
        pairs.push((s.to_owned(), t.to_owned()));
    }
    Ok((
        ParallelCorpus {
            pairs,
            language_tag: None,
        },
        report,
    ))
}

pub fn pair_lines(source: &str, target: &str) -> Result<(ParallelCorpus, LoadReport), CorpusError> {
    let src: Vec<&str> = split_lines(source).collect();
    let tgt: Vec<&str> = split_lines(target).collect();
    if src.len() != tgt.len() {
        return Err(CorpusError::LengthMismatch {
            source_lines: src.len(),
            target_lines: tgt.len(),
        });
    }
    let mut report = LoadReport {
        lines_read: src.len(),
        skipped_empty: 0,
    };
    let mut pairs = Vec::with_capacity(src.len());
    for (s, t) in src.into_iter().zip(tgt) {
        if s.is_empty() || t.is_empty() {
            report.skipped_empty += 1;
            continue;
        }
        pairs.push((s.to_owned(), t.to_owned()));
    }
    Ok((
        ParallelCorpus {
            pairs,
            language_tag: None,
        },
        report,
    ))
}

/// Takes `min(n, len)` pairs. Random mode draws a seed-determined subset
/// (ChaCha8 stream seeded with `seed`, then `rand::seq::index::sample`) and
/// keeps the survivors in their original relative order.
pub fn sample(corpus: &ParallelCorpus, n: usize, seed: u64, mode: SampleMode) -> ParallelCorpus {
    let n = n.min(corpus.len());
    let pairs = match mode {
        SampleMode::Head => corpus.pairs[..n].to_vec(),
        SampleMode::Random => {
            let mut rng = rng::seeded(seed);
            let mut picked = index::sample(&mut rng, corpus.len(), n).into_vec();
            picked.sort_unstable();
            picked
                .into_iter()
                .map(|i| corpus.pairs[i].clone())
                .collect()
        }
    };
    ParallelCorpus {
        pairs,
        language_tag: corpus.language_tag.clone(),
    }
}

/// Concatenates corpora in argument order. The language tag survives only if
/// every input carries the same one.
pub fn concat(corpora: &[ParallelCorpus]) -> Result<ParallelCorpus, CorpusError> {
    let first = corpora.first().ok_or(CorpusError::EmptyList)?;
    let tag = if corpora.iter().all(|c| c.language_tag == first.language_tag) {
        first.language_tag.clone()
    } else {
        None
    };
    let pairs = corpora
        .iter()
        .flat_map(|c| c.pairs.iter().cloned())
        .collect();
    Ok(ParallelCorpus {
        pairs,
        language_tag: tag,
    })
}

/// `Both` yields every source line followed by every target line.
pub fn flatten_bilingual(corpus: &ParallelCorpus, sides: Sides) -> TextStream {
    let lines = match sides {
        Sides::Source => corpus.sources().map(str::to_owned).collect(),
        Sides::Target => corpus.targets().map(str::to_owned).collect(),
        Sides::Both => corpus
            .sources()
            .chain(corpus.targets())
            .map(str::to_owned)
            .collect(),
    };
    TextStream { lines }
}

fn has_line_break(s: &str) -> bool {
    s.contains(['\n', '\r'])
}

fn split_lines(text: &str) -> impl Iterator<Item = &str> {
    let body = text.strip_suffix('\n').unwrap_or(text);
    let mut it = body.split('\n');
    if text.is_empty() {
        it.next();
    }
    it.map(|l| l.strip_suffix('\r').unwrap_or(l))
}

fn read_utf8(path: &Path) -> Result<String, CorpusError> {
    let bytes = fs::read(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    decode(bytes, path)
}

fn decode(bytes: Vec<u8>, name: &Path) -> Result<String, CorpusError> {
    String::from_utf8(bytes).map_err(|e| CorpusError::Encoding {
        path: name.to_path_buf(),
        offset: e.utf8_error().valid_up_to(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn corpus(n: usize) -> ParallelCorpus {
        ParallelCorpus::new((0..n).map(|i| (format!("s{i}"), format!("t{i}"))).collect()).unwrap()
    }

    fn temp_file(contents: &[u8]) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents).unwrap();
        f
    }

    #[test]
    fn tsv_preserves_order() {
        let f = temp_file(b"a\tA\nb\tB\nc\tC\n");
        let (c, report) = load_parallel(f.path(), &ParallelFormat::Tsv).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.sources().collect::<Vec<_>>(), ["a", "b", "c"]);
        assert_eq!(c.targets().collect::<Vec<_>>(), ["A", "B", "C"]);
        assert_eq!(report.skipped_empty, 0);
    }

    #[test]
    fn tsv_skips_blank_lines_and_reports_them() {
        let f = temp_file(b"a\tA\n\nb\tB\n");
        let (c, report) = load_parallel(f.path(), &ParallelFormat::Tsv).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(report.lines_read, 3);
        assert_eq!(report.skipped_empty, 1);
    }

    #[test]
    fn tsv_rejects_extra_tabs() {
        let f = temp_file(b"a\tA\nb\tB\tX\n");
        let err = load_parallel(f.path(), &ParallelFormat::Tsv).unwrap_err();
        assert!(matches!(
            err,
            CorpusError::MalformedRow {
                line: 2,
                tabs: 2,
                ..
            }
        ));
        let f = temp_file(b"no tab here\n");
        let err = load_parallel(f.path(), &ParallelFormat::Tsv).unwrap_err();
        assert_eq!(err.kind(), "malformed-row");
    }

    #[test]
    fn two_file_length_mismatch() {
        let src = temp_file(b"1\n2\n3\n4\n5\n");
        let tgt = temp_file(b"1\n2\n3\n4\n");
        let err = load_parallel(
            src.path(),
            &ParallelFormat::TwoFile {
                target: tgt.path().to_path_buf(),
            },
        )
        .unwrap_err();
        assert!(matches!(
            err,
            CorpusError::LengthMismatch {
                source_lines: 5,
                target_lines: 4
            }
        ));
    }

    #[test]
    fn invalid_utf8_is_an_encoding_error() {
        let f = temp_file(b"ok\t\xFF\n");
        let err = load_parallel(f.path(), &ParallelFormat::Tsv).unwrap_err();
        assert!(matches!(err, CorpusError::Encoding { offset: 3, .. }));
        let err = TextStream::load(f.path()).unwrap_err();
        assert_eq!(err.kind(), "encoding");
    }

    #[test]
    fn missing_file_is_io() {
        let err = TextStream::load(Path::new("/nonexistent/uniseg/x.txt")).unwrap_err();
        assert_eq!(err.kind(), "io");
    }

    #[test]
    fn sample_head_and_clip() {
        let c = corpus(10);
        let s = sample(&c, 3, 0, SampleMode::Head);
        assert_eq!(s.pairs(), &c.pairs()[..3]);
        let small = corpus(2);
        assert_eq!(sample(&small, 60000, 0, SampleMode::Head), small);
        assert_eq!(sample(&small, 60000, 9, SampleMode::Random), small);
        assert!(sample(&c, 0, 1, SampleMode::Random).is_empty());
    }

    #[test]
    fn sample_random_is_deterministic() {
        let c = corpus(10);
        let a = sample(&c, 3, 7, SampleMode::Random);
        let b = sample(&c, 3, 7, SampleMode::Random);
        assert_eq!(a, b);
        assert_eq!(a.len(), 3);
    }

    #[test]
    fn concat_in_argument_order() {
        let a = corpus(2);
        let b = ParallelCorpus::new(vec![("x".into(), "X".into()); 3]).unwrap();
        let c = concat(&[a.clone(), b]).unwrap();
        assert_eq!(c.len(), 5);
        assert_eq!(&c.pairs()[..2], a.pairs());
        assert_eq!(concat(std::slice::from_ref(&a)).unwrap(), a);
        assert!(matches!(concat(&[]), Err(CorpusError::EmptyList)));
    }

    #[test]
    fn concat_nineteen_corpora() {
        let sizes: Vec<usize> = (1..=19).collect();
        let parts: Vec<_> = sizes.iter().map(|&n| corpus(n)).collect();
        assert_eq!(concat(&parts).unwrap().len(), sizes.iter().sum::<usize>());
    }

    #[test]
    fn concat_keeps_shared_tag_only() {
        let a = corpus(1).with_language_tag("ro");
        let b = corpus(1).with_language_tag("ro");
        let c = corpus(1).with_language_tag("fi");
        assert_eq!(concat(&[a.clone(), b]).unwrap().language_tag(), Some("ro"));
        assert_eq!(concat(&[a, c]).unwrap().language_tag(), None);
    }

    #[test]
    fn flatten_sides() {
        let c = corpus(3);
        let both = flatten_bilingual(&c, Sides::Both);
        assert_eq!(both.lines(), ["s0", "s1", "s2", "t0", "t1", "t2"]);
        assert_eq!(
            flatten_bilingual(&c, Sides::Source).lines(),
            ["s0", "s1", "s2"]
        );
        assert!(flatten_bilingual(&ParallelCorpus::default(), Sides::Both).is_empty());
    }

    #[test]
    fn rejects_line_breaks() {
        let err = ParallelCorpus::new(vec![("a\nb".into(), "c".into())]).unwrap_err();
        assert_eq!(err.kind(), "line-break");
    }

    #[test]
    fn text_stream_line_splitting() {
        assert!(TextStream::from_text("").is_empty());
        assert_eq!(TextStream::from_text("a\n\nb\n").lines(), ["a", "", "b"]);
        assert_eq!(TextStream::from_text("a\r\nb").lines(), ["a", "b"]);
        let mut buf = Vec::new();
        writeln!(buf, "x").unwrap();
        let s = TextStream::from_reader(&buf[..], Path::new("-")).unwrap();
        assert_eq!(s.to_text(), "x\n");
    }
}
