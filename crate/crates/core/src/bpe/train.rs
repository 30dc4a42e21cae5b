//! Incremental BPE training.
//!
//! Pair statistics are kept across iterations: a merge only revisits the
//! words that contain the merged pair. Candidates live in a max-heap keyed by
//! (frequency, earliest occurrence) with lazy invalidation; an entry is
//! trusted only if it still matches the live statistics when popped.
//!
//! The earliest occurrence of a pair is its smallest (word index, character
//! offset) across the current symbolization. Character offsets order symbols
//! within a word exactly like symbol positions do, and unlike positions they
//! do not shift when unrelated merges happen.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeSet, BinaryHeap, HashMap};

use rayon::prelude::*;

use super::{BpeError, MergeList, MergeRule, WordCountTable};

type Pair = (u32, u32);
/// (word index, character offset of the left symbol)
type Position = (u32, u32);

/// Affected-word count above which a merge step rewrites words in parallel.
const PAR_THRESHOLD: usize = 512;
const WORDS_PER_CHUNK: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrainOptions {
    /// Training stops once the best pair occurs fewer times than this.
    pub min_frequency: u64,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions { min_frequency: 2 }
    }
}

struct Word {
    symbols: Vec<u32>,
    count: u64,
}

#[derive(PartialEq, Eq)]
struct Candidate {
    count: u64,
    first: Reverse<Position>,
    pair: Pair,
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.count
            .cmp(&other.count)
            .then(self.first.cmp(&other.first))
            .then(self.pair.cmp(&other.pair))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Default, Clone)]
struct PairStats {
    count: u64,
    first: Position,
    /// Words that contained the pair at some point; may hold stale entries.
    words: BTreeSet<u32>,
}

/// Stateful trainer; each [`Trainer::step`] learns one merge.
pub struct Trainer {
    marker: String,
    options: TrainOptions,
    names: Vec<String>,
    char_len: Vec<u32>,
    ids: HashMap<String, u32>,
    alphabet: BTreeSet<String>,
    words: Vec<Word>,
    pairs: HashMap<Pair, PairStats>,
    heap: BinaryHeap<Candidate>,
    /// Weighted occurrences of each symbol in the current symbolization.
    symbol_freq: Vec<u64>,
    live_symbols: usize,
    rules: Vec<MergeRule>,
}

impl Trainer {
    pub fn new(counts: &WordCountTable, options: TrainOptions) -> Self {
        let marker = counts.marker().to_owned();
        let mut trainer = Trainer {
            marker: marker.clone(),
            options,
            names: Vec::new(),
            char_len: Vec::new(),
            ids: HashMap::new(),
            alphabet: BTreeSet::new(),
            words: Vec::with_capacity(counts.len()),
            pairs: HashMap::new(),
            heap: BinaryHeap::new(),
            symbol_freq: Vec::new(),
            live_symbols: 0,
            rules: Vec::new(),
        };
        let mut buf = [0u8; 4];
        for (word, count) in counts.iter() {
            let mut symbols: Vec<u32> = word
                .chars()
                .map(|c| trainer.intern(c.encode_utf8(&mut buf), 1))
                .collect();
            symbols.push(trainer.intern(&marker, 1));
            for &s in &symbols {
                trainer.add_symbol_freq(s, count);
            }
            trainer.words.push(Word { symbols, count });
        }
        trainer.alphabet = trainer.names.iter().cloned().collect();
        trainer.count_initial_pairs();
        trainer
    }

    fn intern(&mut self, s: &str, char_len: u32) -> u32 {
        if let Some(&id) = self.ids.get(s) {
            return id;
        }
        let id = self.names.len() as u32;
        self.names.push(s.to_owned());
        self.char_len.push(char_len);
        self.symbol_freq.push(0);
        self.ids.insert(s.to_owned(), id);
        id
    }

    fn add_symbol_freq(&mut self, s: u32, n: u64) {
        let f = &mut self.symbol_freq[s as usize];
        if *f == 0 && n > 0 {
            self.live_symbols += 1;
        }
        *f += n;
    }

    fn sub_symbol_freq(&mut self, s: u32, n: u64) {
        let f = &mut self.symbol_freq[s as usize];
        *f -= n;
        if *f == 0 && n > 0 {
            self.live_symbols -= 1;
        }
    }

    fn count_initial_pairs(&mut self) {
        let char_len = &self.char_len;
        let words = &self.words;
        // Partitioned count; the reduction sums counts, takes minimum
        // positions and unions word sets, so it is exact for any split.
        let partials: Vec<HashMap<Pair, PairStats>> = words
            .par_chunks(WORDS_PER_CHUNK)
            .enumerate()
            .map(|(chunk, ws)| {
                let base = (chunk * WORDS_PER_CHUNK) as u32;
                let mut local: HashMap<Pair, PairStats> = HashMap::new();
                for (i, w) in ws.iter().enumerate() {
                    let wi = base + i as u32;
                    let mut offset = 0u32;
                    for p in w.symbols.windows(2) {
                        let st = local.entry((p[0], p[1])).or_insert_with(|| PairStats {
                            count: 0,
                            first: (wi, offset),
                            words: BTreeSet::new(),
                        });
                        st.count += w.count;
                        st.words.insert(wi);
                        offset += char_len[p[0] as usize];
                    }
                }
                local
            })
            .collect();
        for partial in partials {
            for (pair, st) in partial {
                match self.pairs.get_mut(&pair) {
                    Some(g) => {
                        g.count += st.count;
                        g.first = g.first.min(st.first);
                        g.words.extend(st.words);
                    }
                    None => {
                        self.pairs.insert(pair, st);
                    }
                }
            }
        }
        let mut heap: Vec<Candidate> = self
            .pairs
            .iter()
            .map(|(&pair, st)| Candidate {
                count: st.count,
                first: Reverse(st.first),
                pair,
            })
            .collect();
        heap.sort_unstable();
        self.heap = BinaryHeap::from(heap);
    }

    pub fn rules(&self) -> &[MergeRule] {
        &self.rules
    }

    /// Number of distinct symbols present in the current symbolization.
    pub fn vocab_size(&self) -> usize {
        self.live_symbols
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet.len()
    }

    fn best(&mut self) -> Option<(Pair, u64)> {
        while let Some(top) = self.heap.pop() {
            let Some(st) = self.pairs.get(&top.pair) else {
                continue;
            };
            if st.count == top.count && st.first == top.first.0 && st.count > 0 {
                let found = (top.pair, st.count);
                self.heap.push(top);
                return Some(found);
            }
        }
        None
    }

    /// Learns one merge, or returns `None` when no pair reaches the minimum
    /// frequency.
    pub fn step(&mut self) -> Option<&MergeRule> {
        let (pair, freq) = self.best()?;
        if freq < self.options.min_frequency.max(1) {
            return None;
        }
        let (a, b) = pair;
        let new_name = format!("{}{}", self.names[a as usize], self.names[b as usize]);
        let new_len = self.char_len[a as usize] + self.char_len[b as usize];
        let c = self.intern(&new_name, new_len);

        let affected: Vec<u32> = std::mem::take(&mut self.pairs.get_mut(&pair).unwrap().words)
            .into_iter()
            .collect();

        let rewrite = |wi: &u32| -> Option<(u32, Vec<u32>)> {
            let w = &self.words[*wi as usize];
            let s = &w.symbols;
            if !s.windows(2).any(|p| p[0] == a && p[1] == b) {
                return None;
            }
            let mut out = Vec::with_capacity(s.len());
            let mut i = 0;
            while i < s.len() {
                if i + 1 < s.len() && s[i] == a && s[i + 1] == b {
                    out.push(c);
                    i += 2;
                } else {
                    out.push(s[i]);
                    i += 1;
                }
            }
            Some((*wi, out))
        };
        let rewritten: Vec<(u32, Vec<u32>)> = if affected.len() >= PAR_THRESHOLD {
            affected.par_iter().filter_map(rewrite).collect()
        } else {
            affected.iter().filter_map(rewrite).collect()
        };

        let mut touched: BTreeSet<Pair> = BTreeSet::new();
        let mut merged_total = 0u64;
        for (wi, new_symbols) in rewritten {
            let count = self.words[wi as usize].count;
            let old_symbols = std::mem::replace(&mut self.words[wi as usize].symbols, new_symbols);
            let mut delta: HashMap<Pair, i64> = HashMap::new();
            for p in old_symbols.windows(2) {
                *delta.entry((p[0], p[1])).or_insert(0) -= 1;
            }
            for p in self.words[wi as usize].symbols.windows(2) {
                *delta.entry((p[0], p[1])).or_insert(0) += 1;
            }
            let merged = (old_symbols.len() - self.words[wi as usize].symbols.len()) as u64;
            merged_total += merged * count;
            for (p, d) in delta {
                if d == 0 {
                    continue;
                }
                let st = self.pairs.entry(p).or_default();
                if d > 0 {
                    st.count += d as u64 * count;
                    st.words.insert(wi);
                } else {
                    st.count -= (-d) as u64 * count;
                }
                touched.insert(p);
            }
        }
        debug_assert!(merged_total <= freq);
        self.sub_symbol_freq(a, merged_total);
        self.sub_symbol_freq(b, merged_total);
        self.add_symbol_freq(c, merged_total);

        for p in touched {
            self.refresh(p);
        }
        self.pairs.remove(&pair);

        self.rules.push(MergeRule {
            left: self.names[a as usize].clone(),
            right: self.names[b as usize].clone(),
            new_symbol: new_name,
            frequency: freq,
        });
        self.rules.last()
    }

    /// Recomputes the earliest occurrence of `p` and queues a fresh candidate.
    fn refresh(&mut self, p: Pair) {
        let Some(st) = self.pairs.get_mut(&p) else {
            return;
        };
        if st.count == 0 {
            self.pairs.remove(&p);
            return;
        }
        let mut first = None;
        while let Some(&wi) = st.words.first() {
            let mut offset = 0u32;
            for s in self.words[wi as usize].symbols.windows(2) {
                if s[0] == p.0 && s[1] == p.1 {
                    first = Some((wi, offset));
                    break;
                }
                offset += self.char_len[s[0] as usize];
            }
            if first.is_some() {
                break;
            }
            st.words.pop_first();
        }
        let first = first.expect("pair with positive count occurs somewhere");
        st.first = first;
        self.heap.push(Candidate {
            count: st.count,
            first: Reverse(first),
            pair: p,
        });
    }

    pub fn finish(self) -> MergeList {
        MergeList::new(self.rules, &self.marker, self.alphabet)
            .expect("trainer never repeats a pair")
    }
}

/// Learns up to `num_merges` rules, stopping early when no pair occurs at
/// least twice.
pub fn train(counts: &WordCountTable, num_merges: usize) -> MergeList {
    train_with(counts, num_merges, TrainOptions::default())
}

pub fn train_with(counts: &WordCountTable, num_merges: usize, options: TrainOptions) -> MergeList {
    let mut trainer = Trainer::new(counts, options);
    for _ in 0..num_merges {
        if trainer.step().is_none() {
            break;
        }
    }
    trainer.finish()
}

/// Trains until the realized vocabulary (distinct symbols in the rewritten
/// corpus) reaches `target_vocab`, or no pair is left to merge.
pub fn train_to_size(counts: &WordCountTable, target_vocab: usize) -> Result<MergeList, BpeError> {
    train_to_size_with(counts, target_vocab, TrainOptions::default())
}

pub fn train_to_size_with(
    counts: &WordCountTable,
    target_vocab: usize,
    options: TrainOptions,
) -> Result<MergeList, BpeError> {
    let mut trainer = Trainer::new(counts, options);
    if target_vocab < trainer.alphabet_size() {
        return Err(BpeError::TargetTooSmall {
            target: target_vocab,
            alphabet: trainer.alphabet_size(),
        });
    }
    while trainer.vocab_size() < target_vocab {
        if trainer.step().is_none() {
            break;
        }
    }
    Ok(trainer.finish())
}
