use std::collections::BTreeSet;
use std::path::Path;

use uniseg::ablate::{self, AlphabetOptions, CharMap};
use uniseg::bpe::{self, TrainOptions, Vocabulary, MERGE_FILE_MAGIC};
use uniseg::corpus::{self, ParallelCorpus, SampleMode, TextStream};
use uniseg::metrics::{self, OsrOptions};
use uniseg::romanize::{self, Fallback, RomanizationTable};
use uniseg::transfer::{self, EmbeddingTable, Init};
use uniseg::{MergeList, BASELINE_VOCAB_SIZE, PARENT_VOCAB_SIZE};

use crate::CliError;
use crate::{
    AblateArgs, Command, ConcatArgs, DiffArgs, FallbackArg, HistArgs, InitArg, ModeArg, OsrArgs,
    ReportArg, RomanizeArgs, SampleArgs, SegmentArgs, ShareArgs, StrategyArg, Streams, TrainArgs,
    TransferArgs,
};

type Result<T> = std::result::Result<T, CliError>;

pub(crate) fn dispatch(command: Command, io: &mut Streams<'_>) -> Result<()> {
    match command {
        Command::Romanize(a) => romanize(a, io),
        Command::Sample(a) => sample(a, io),
        Command::Concat(a) => concat(a, io),
        Command::TrainBpe(a) => train_bpe(a, io),
        Command::Segment(a) => segment(a, io),
        Command::Osr(a) => osr(a, io),
        Command::Share(a) => share(a, io),
        Command::Hist(a) => hist(a, io),
        Command::CjkAblate(a) => cjk_ablate(a, io),
        Command::TransferEmbed(a) => transfer_embed(a, io),
        Command::DiffEmbed(a) => diff_embed(a, io),
    }
}

fn render<T: serde::Serialize>(
    report: ReportArg,
    value: &T,
    text: impl FnOnce() -> String,
) -> String {
    match report {
        ReportArg::Text => text(),
        ReportArg::Json => {
            let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
            s.push('\n');
            s
        }
    }
}

fn read_stream(io: &mut Streams<'_>, path: &Path) -> Result<TextStream> {
    Ok(TextStream::from_text(&io.read_text(path)?))
}

fn read_merges(io: &mut Streams<'_>, path: &Path) -> Result<MergeList> {
    Ok(MergeList::parse(&io.read_text(path)?)?)
}

fn read_tsv(io: &mut Streams<'_>, path: &Path) -> Result<ParallelCorpus> {
    let (corpus, report) = corpus::parse_tsv(&io.read_text(path)?, path)?;
    if report.skipped_empty > 0 {
        io.note(&format!(
            "{}: skipped {} empty or one-sided rows",
            path.display(),
            report.skipped_empty
        ));
    }
    Ok(corpus)
}

fn romanize(a: RomanizeArgs, io: &mut Streams<'_>) -> Result<()> {
    let mut table = if a.table.is_empty() {
        RomanizationTable::all_builtins()
    } else {
        RomanizationTable::empty("cli")
    };
    for spec in &a.table {
        let next = match spec.strip_prefix("builtin:") {
            Some("all") => RomanizationTable::all_builtins(),
            Some(name) => RomanizationTable::builtin(name)?,
            None => {
                let text = io.read_text(Path::new(spec))?;
                RomanizationTable::parse(spec, &text)?
            }
        };
        table = table.merged(&next)?;
    }
    let fallback = match a.fallback {
        FallbackArg::PassThrough => Fallback::PassThrough,
        FallbackArg::StripDiacritics => Fallback::StripDiacritics,
    };
    let text = io.read_text(&a.input)?;
    let out = romanize::romanize_text(&text, &table, fallback);
    io.write_text(&a.out, &out)
}

fn sample(a: SampleArgs, io: &mut Streams<'_>) -> Result<()> {
    let corpus = match &a.target {
        Some(target) => {
            let src = io.read_text(&a.input)?;
            let tgt = io.read_text(target)?;
            corpus::pair_lines(&src, &tgt)?.0
        }
        None => read_tsv(io, &a.input)?,
    };
    let mode = match a.mode {
        ModeArg::Head => SampleMode::Head,
        ModeArg::Random => SampleMode::Random,
    };
    let picked = corpus::sample(&corpus, a.n, a.seed, mode);
    if picked.len() < a.n {
        io.note(&format!(
            "requested {} pairs, corpus has {}",
            a.n,
            picked.len()
        ));
    }
    io.write_text(&a.out, &picked.to_tsv())
}

fn concat(a: ConcatArgs, io: &mut Streams<'_>) -> Result<()> {
    let mut parts = Vec::with_capacity(a.input.len());
    for path in &a.input {
        parts.push(read_tsv(io, path)?);
    }
    let joined = corpus::concat(&parts)?;
    io.write_text(&a.out, &joined.to_tsv())
}

fn train_bpe(a: TrainArgs, io: &mut Streams<'_>) -> Result<()> {
    let stream = match a.sides {
        Some(sides) => corpus::flatten_bilingual(&read_tsv(io, &a.input)?, sides.into()),
        None => read_stream(io, &a.input)?,
    };
    let counts = bpe::count_words(&stream, a.pretokenize.into(), &a.marker)?;
    let options = TrainOptions {
        min_frequency: a.min_frequency,
    };
    let merges = match a.merges {
        Some(n) => bpe::train_with(&counts, n, options),
        None => {
            let default = if a.parent {
                PARENT_VOCAB_SIZE
            } else {
                BASELINE_VOCAB_SIZE
            };
            bpe::train_to_size_with(&counts, a.vocab_size.unwrap_or(default), options)?
        }
    };
    io.write_text(&a.out, &merges.to_file_string())?;
    if let Some(path) = &a.vocab_out {
        let vocab = bpe::vocabulary_of(&counts, &merges);
        io.write_text(path, &vocab.to_file_string())?;
    }
    Ok(())
}

fn segment(a: SegmentArgs, io: &mut Streams<'_>) -> Result<()> {
    let merges = read_merges(io, &a.merges)?;
    let stream = read_stream(io, &a.input)?;
    let out = bpe::segment_text(&stream, &merges, a.pretokenize.into())?;
    io.write_text(&a.out, &out.to_text())
}

fn osr(a: OsrArgs, io: &mut Streams<'_>) -> Result<()> {
    let merges = read_merges(io, &a.merges)?;
    let stream = read_stream(io, &a.input)?;
    let options = OsrOptions {
        pretokenize: a.pretokenize.into(),
        min_word_length: a.min_word_length,
        types: a.types,
        detail: a.detail,
    };
    let report = metrics::osr(&stream, &merges, &options)?;
    let out = render(a.report, &report, || report.to_text());
    io.write_text(&a.out, &out)
}

/// A vocabulary file, or the symbol inventory of a merge file.
fn read_symbols(io: &mut Streams<'_>, path: &Path) -> Result<BTreeSet<String>> {
    let text = io.read_text(path)?;
    if text.starts_with(MERGE_FILE_MAGIC) {
        let merges = MergeList::parse(&text)?;
        let mut symbols = merges.alphabet().clone();
        symbols.extend(merges.rules().iter().map(|r| r.new_symbol.clone()));
        Ok(symbols)
    } else {
        Ok(Vocabulary::parse(&text)?.symbols())
    }
}

fn share(a: ShareArgs, io: &mut Streams<'_>) -> Result<()> {
    let [first, second] = a.input.as_slice() else {
        return Err(CliError::Usage(format!(
            "share needs exactly two --input files, got {}",
            a.input.len()
        )));
    };
    let sa = read_symbols(io, first)?;
    let sb = read_symbols(io, second)?;
    let report = metrics::shared_subwords(&sa, &sb);
    let out = render(a.report, &report, || report.to_text());
    io.write_text(&a.out, &out)
}

fn hist(a: HistArgs, io: &mut Streams<'_>) -> Result<()> {
    let merges = read_merges(io, &a.merges)?;
    let stream = read_stream(io, &a.input)?;
    let report = metrics::segment_histogram(&stream, &merges, a.pretokenize.into())?;
    let out = render(a.report, &report, || report.to_text());
    io.write_text(&a.out, &out)
}

fn cjk_ablate(a: AblateArgs, io: &mut Streams<'_>) -> Result<()> {
    let map = match &a.map {
        Some(path) => CharMap::parse(&io.read_text(path)?)?,
        None => {
            let alphabet = ablate::latin_alphabet(AlphabetOptions {
                digits: a.include_digits,
                accented: a.include_accented,
            });
            ablate::build_cjk_map(&alphabet, a.seed)?
        }
    };
    if let Some(path) = &a.map_out {
        io.write_text(path, &map.to_file_string())?;
    }
    let map = if a.invert { ablate::invert(&map) } else { map };
    let out = match a.sides {
        None => ablate::apply_map(&io.read_text(&a.input)?, &map),
        Some(sides) => {
            let corpus = read_tsv(io, &a.input)?;
            let (src, tgt) = match sides {
                crate::SidesArg::Source => (true, false),
                crate::SidesArg::Target => (false, true),
                crate::SidesArg::Both => (true, true),
            };
            let pairs = corpus
                .pairs()
                .iter()
                .map(|(s, t)| {
                    let s = if src {
                        ablate::apply_map(s, &map)
                    } else {
                        s.clone()
                    };
                    let t = if tgt {
                        ablate::apply_map(t, &map)
                    } else {
                        t.clone()
                    };
                    (s, t)
                })
                .collect();
            ParallelCorpus::new(pairs)?.to_tsv()
        }
    };
    io.write_text(&a.out, &out)
}

/// First whitespace-separated field of every non-empty line.
fn read_token_list(io: &mut Streams<'_>, path: &Path) -> Result<Vec<String>> {
    let text = io.read_text(path)?;
    Ok(text
        .lines()
        .filter_map(|l| l.split_whitespace().next())
        .map(str::to_owned)
        .collect())
}

fn transfer_embed(a: TransferArgs, io: &mut Streams<'_>) -> Result<()> {
    let parent = EmbeddingTable::parse(&io.read_text(&a.input)?)?;
    let init = match a.init {
        InitArg::Zero => Init::Zero,
        InitArg::Uniform => Init::Uniform(a.init_range),
    };
    let child = match &a.child_vocab {
        Some(path) => Some(read_token_list(io, path)?),
        None => None,
    };
    let need_child = || CliError::Usage("this strategy needs --child-vocab".into());
    let table = match a.strategy {
        StrategyArg::Universal => transfer::remap_universal(&parent),
        StrategyArg::Frequency => {
            let child = child.ok_or_else(need_child)?;
            let parent_order = match &a.parent_order {
                Some(path) => read_token_list(io, path)?,
                None => parent.tokens().to_vec(),
            };
            transfer::remap_frequency(&parent, &parent_order, &child, a.seed, init)?
        }
        StrategyArg::Union => {
            let child = child.ok_or_else(need_child)?;
            transfer::remap_union(&parent, &child, a.seed, init)?
        }
    };
    io.write_text(&a.out, &table.to_file_string())
}

fn diff_embed(a: DiffArgs, io: &mut Streams<'_>) -> Result<()> {
    let before = EmbeddingTable::parse(&io.read_text(&a.before)?)?;
    let after = EmbeddingTable::parse(&io.read_text(&a.after)?)?;
    let report = transfer::diff_report(&before, &after);
    let out = render(a.report, &report, || report.to_text());
    io.write_text(&a.out, &out)
}
