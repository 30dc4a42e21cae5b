//! The `uniseg` command line.
//!
//! Every text input and output accepts `-` for stdin/stdout, so stages can be
//! piped: `uniseg romanize --table builtin:cyrillic | uniseg train-bpe`.

mod commands;
mod error;

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "uniseg",
    version,
    about = "Universal subword vocabulary toolkit"
)]
pub struct Cli {
    /// Worker threads for training and metrics (0 = one per core). Output
    /// does not depend on this value.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Transliterate text into Latin script with rule tables.
    Romanize(RomanizeArgs),
    /// Take a head or seeded random subset of a parallel corpus.
    Sample(SampleArgs),
    /// Concatenate parallel corpora in argument order.
    Concat(ConcatArgs),
    /// Learn BPE merges from text.
    TrainBpe(TrainArgs),
    /// Segment text with a merge file.
    Segment(SegmentArgs),
    /// Over-segmentation rate of text under a merge file.
    Osr(OsrArgs),
    /// Compare two vocabularies.
    Share(ShareArgs),
    /// Histogram of pieces per word.
    Hist(HistArgs),
    /// Replace Latin letters with random CJK ideographs.
    CjkAblate(AblateArgs),
    /// Build a child embedding table from a parent one.
    TransferEmbed(TransferArgs),
    /// Classify rows of two embedding tables as preserved, reassigned or fresh.
    DiffEmbed(DiffArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PretokArg {
    #[value(name = "ws")]
    Ws,
    #[value(name = "ws+punct")]
    WsPunct,
}

impl From<PretokArg> for uniseg::Pretokenize {
    fn from(p: PretokArg) -> Self {
        match p {
            PretokArg::Ws => uniseg::Pretokenize::Whitespace,
            PretokArg::WsPunct => uniseg::Pretokenize::WhitespacePunct,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SidesArg {
    Source,
    Target,
    Both,
}

impl From<SidesArg> for uniseg::corpus::Sides {
    fn from(s: SidesArg) -> Self {
        match s {
            SidesArg::Source => uniseg::corpus::Sides::Source,
            SidesArg::Target => uniseg::corpus::Sides::Target,
            SidesArg::Both => uniseg::corpus::Sides::Both,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
pub enum ReportArg {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FallbackArg {
    PassThrough,
    StripDiacritics,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Head,
    Random,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum StrategyArg {
    Universal,
    Frequency,
    Union,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum InitArg {
    Zero,
    Uniform,
}

#[derive(Debug, Args)]
pub struct RomanizeArgs {
    #[arg(long, default_value = "-")]
    pub input: PathBuf,
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
    /// Rule table: a TSV path or `builtin:<cyrillic|greek|devanagari|all>`.
    /// Repeatable; tables are merged.
    #[arg(long)]
    pub table: Vec<String>,
    #[arg(long, value_enum, default_value_t = FallbackArg::PassThrough)]
    pub fallback: FallbackArg,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// Parallel TSV (or the source side when --target is given).
    #[arg(long, default_value = "-")]
    pub input: PathBuf,
    /// Aligned target-side file; switches to two-file mode.
    #[arg(long)]
    pub target: Option<PathBuf>,
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = ModeArg::Head)]
    pub mode: ModeArg,
}

#[derive(Debug, Args)]
pub struct ConcatArgs {
    /// Parallel TSV files, concatenated in the order given.
    #[arg(long, required = true)]
    pub input: Vec<PathBuf>,
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long, default_value = "-")]
    pub input: PathBuf,
    /// Merge file to write.
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
    /// Number of merges to learn.
    #[arg(long, conflicts_with = "vocab_size")]
    pub merges: Option<usize>,
    /// Train until this many distinct symbols are in use. Defaults to 8000,
    /// or 16000 with --parent.
    #[arg(long)]
    pub vocab_size: Option<usize>,
    /// Use the parent-model vocabulary size as the default target.
    #[arg(long)]
    pub parent: bool,
    #[arg(long, default_value = uniseg::DEFAULT_MARKER)]
    pub marker: String,
    #[arg(long, value_enum, default_value_t = PretokArg::WsPunct)]
    pub pretokenize: PretokArg,
    /// Read the input as parallel TSV and train on these sides.
    #[arg(long, value_enum)]
    pub sides: Option<SidesArg>,
    /// Stop when the best pair occurs fewer times than this.
    #[arg(long, default_value_t = 2)]
    pub min_frequency: u64,
    /// Also write the resulting vocabulary (`symbol<TAB>frequency`).
    #[arg(long)]
    pub vocab_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SegmentArgs {
    #[arg(long)]
    pub merges: PathBuf,
    #[arg(long, default_value = "-")]
    pub input: PathBuf,
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = PretokArg::WsPunct)]
    pub pretokenize: PretokArg,
}

#[derive(Debug, Args)]
pub struct OsrArgs {
    #[arg(long)]
    pub merges: PathBuf,
    #[arg(long, default_value = "-")]
    pub input: PathBuf,
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = PretokArg::WsPunct)]
    pub pretokenize: PretokArg,
    #[arg(long, default_value_t = 1)]
    pub min_word_length: usize,
    /// Count distinct word types instead of occurrences.
    #[arg(long)]
    pub types: bool,
    /// Include one line per word type.
    #[arg(long)]
    pub detail: bool,
    #[arg(long, value_enum, default_value_t = ReportArg::Text)]
    pub report: ReportArg,
}

#[derive(Debug, Args)]
pub struct ShareArgs {
    /// Exactly two vocabulary files or merge files.
    #[arg(long, num_args = 1, required = true)]
    pub input: Vec<PathBuf>,
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = ReportArg::Text)]
    pub report: ReportArg,
}

#[derive(Debug, Args)]
pub struct HistArgs {
    #[arg(long)]
    pub merges: PathBuf,
    #[arg(long, default_value = "-")]
    pub input: PathBuf,
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = PretokArg::WsPunct)]
    pub pretokenize: PretokArg,
    #[arg(long, value_enum, default_value_t = ReportArg::Text)]
    pub report: ReportArg,
}

#[derive(Debug, Args)]
pub struct AblateArgs {
    #[arg(long, default_value = "-")]
    pub input: PathBuf,
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Existing map file to use instead of drawing a new one.
    #[arg(long)]
    pub map: Option<PathBuf>,
    /// Where to save the map that was used.
    #[arg(long)]
    pub map_out: Option<PathBuf>,
    #[arg(long)]
    pub include_digits: bool,
    #[arg(long)]
    pub include_accented: bool,
    /// Apply the inverse of --map.
    #[arg(long, requires = "map")]
    pub invert: bool,
    /// Read parallel TSV and transform only these sides.
    #[arg(long, value_enum)]
    pub sides: Option<SidesArg>,
}

#[derive(Debug, Args)]
pub struct TransferArgs {
    /// Parent embedding table.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = StrategyArg::Universal)]
    pub strategy: StrategyArg,
    /// Child tokens, most frequent first; one per line, first field used.
    #[arg(long)]
    pub child_vocab: Option<PathBuf>,
    /// Parent tokens, most frequent first. Defaults to table order.
    #[arg(long)]
    pub parent_order: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = InitArg::Uniform)]
    pub init: InitArg,
    #[arg(long, default_value_t = 0.1)]
    pub init_range: f32,
}

#[derive(Debug, Args)]
pub struct DiffArgs {
    #[arg(long)]
    pub before: PathBuf,
    #[arg(long)]
    pub after: PathBuf,
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = ReportArg::Text)]
    pub report: ReportArg,
}

/// Process-level streams, injectable for tests.
pub struct Streams<'a> {
    pub stdin: &'a mut (dyn Read + Send),
    pub stdout: &'a mut (dyn Write + Send),
    pub stderr: &'a mut (dyn Write + Send),
}

impl Streams<'_> {
    pub(crate) fn read_text(&mut self, path: &Path) -> Result<String, CliError> {
        let bytes = if is_dash(path) {
            let mut buf = Vec::new();
            self.stdin
                .read_to_end(&mut buf)
                .map_err(|source| CliError::Read {
                    path: path.to_path_buf(),
                    source,
                })?;
            buf
        } else {
            std::fs::read(path).map_err(|source| CliError::Read {
                path: path.to_path_buf(),
                source,
            })?
        };
        String::from_utf8(bytes).map_err(|_| CliError::Encoding {
            path: path.to_path_buf(),
        })
    }

    pub(crate) fn write_text(&mut self, path: &Path, text: &str) -> Result<(), CliError> {
        let err = |source| CliError::Write {
            path: path.to_path_buf(),
            source,
        };
        if is_dash(path) {
            self.stdout.write_all(text.as_bytes()).map_err(err)?;
            self.stdout.flush().map_err(err)
        } else {
            std::fs::write(path, text).map_err(err)
        }
    }

    pub(crate) fn note(&mut self, msg: &str) {
        let _ = writeln!(self.stderr, "uniseg: {msg}");
    }
}

fn is_dash(path: &Path) -> bool {
    path.as_os_str() == "-"
}

/// Parses `args` (including the program name) and runs the subcommand.
/// Returns the process exit code: 0 on success, 1 for module errors, 2 for
/// usage errors.
pub fn run<I, T>(args: I, streams: &mut Streams<'_>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = streams.stderr.write_all(rendered.as_bytes());
            } else {
                let _ = streams.stdout.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(streams.stderr, "uniseg: cli error [threads]: {e}");
            return 1;
        }
    };
    match pool.install(|| commands::dispatch(cli.command, streams)) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(streams.stderr, "{}", e.diagnostic());
            if matches!(e, CliError::Usage(_)) {
                2
            } else {
                1
            }
        }
    }
}
