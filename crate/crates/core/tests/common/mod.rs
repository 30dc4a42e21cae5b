//! Test-only reference implementations. Nothing here shares code with the
//! library paths they check.
#![allow(dead_code)]

use std::collections::HashMap;

/// Brute-force BPE: every iteration recounts all adjacent pairs of the
/// current symbolization from scratch.
pub fn brute_force_bpe(
    words: &[(&str, u64)],
    marker: &str,
    num_merges: usize,
    min_frequency: u64,
) -> Vec<(String, String, u64)> {
    let mut corpus: Vec<(Vec<String>, u64)> = words
        .iter()
        .map(|(w, c)| {
            let mut syms: Vec<String> = w.chars().map(|c| c.to_string()).collect();
            syms.push(marker.to_string());
            (syms, *c)
        })
        .collect();
    let mut out = Vec::new();
    for _ in 0..num_merges {
        // pair -> (count, first (word, position))
        let mut stats: HashMap<(String, String), (u64, (usize, usize))> = HashMap::new();
        for (wi, (syms, count)) in corpus.iter().enumerate() {
            for pi in 0..syms.len().saturating_sub(1) {
                let key = (syms[pi].clone(), syms[pi + 1].clone());
                let e = stats.entry(key).or_insert((0, (wi, pi)));
                e.0 += count;
            }
        }
        let best = stats
            .into_iter()
            .max_by(|a, b| a.1 .0.cmp(&b.1 .0).then(b.1 .1.cmp(&a.1 .1)));
        let Some(((l, r), (count, _))) = best else {
            break;
        };
        if count < min_frequency {
            break;
        }
        for (syms, _) in corpus.iter_mut() {
            let mut next = Vec::with_capacity(syms.len());
            let mut i = 0;
            while i < syms.len() {
                if i + 1 < syms.len() && syms[i] == l && syms[i + 1] == r {
                    next.push(format!("{l}{r}"));
                    i += 2;
                } else {
                    next.push(syms[i].clone());
                    i += 1;
                }
            }
            *syms = next;
        }
        out.push((l, r, count));
    }
    out
}

/// Applies rules one after another, each rewriting every occurrence.
pub fn apply_rules_naively(word: &str, marker: &str, rules: &[(String, String)]) -> Vec<String> {
    let mut syms: Vec<String> = word.chars().map(|c| c.to_string()).collect();
    syms.push(marker.to_string());
    for (l, r) in rules {
        let mut next = Vec::with_capacity(syms.len());
        let mut i = 0;
        while i < syms.len() {
            if i + 1 < syms.len() && &syms[i] == l && &syms[i + 1] == r {
                next.push(format!("{l}{r}"));
                i += 2;
            } else {
                next.push(syms[i].clone());
                i += 1;
            }
        }
        syms = next;
    }
    syms
}

/// Small deterministic generator for building random corpora in tests.
pub struct SplitMix(pub u64);

impl SplitMix {
    pub fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next() % n
    }
}

/// A random corpus of word types with counts: `words` types drawn from an
/// alphabet of `alphabet` letters (Latin letters, then Cyrillic).
pub fn random_corpus(rng: &mut SplitMix, words: usize, alphabet: usize) -> Vec<(String, u64)> {
    let letters: Vec<char> = ('a'..='z').chain('а'..='я').take(alphabet).collect();
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    while out.len() < words {
        let len = 1 + rng.below(9) as usize;
        let w: String = (0..len)
            .map(|_| letters[rng.below(letters.len() as u64) as usize])
            .collect();
        if seen.insert(w.clone()) {
            out.push((w, 1 + rng.below(5)));
        }
    }
    out
}
