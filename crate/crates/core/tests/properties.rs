use std::collections::BTreeSet;

use proptest::prelude::*;
use unicode_normalization::char::is_combining_mark;
use uniseg::ablate::{self, AlphabetOptions};
use uniseg::bpe::{self, TrainOptions};
use uniseg::corpus::{self, SampleMode};
use uniseg::metrics::{self, OsrOptions};
use uniseg::romanize::{romanize_text, Fallback, RomanizationTable};
use uniseg::{ParallelCorpus, Pretokenize, TextStream};

fn mixed_script_char() -> impl Strategy<Value = char> {
    prop_oneof![
        prop::char::range(' ', '~'),
        prop::char::range('\u{400}', '\u{4FF}'),
        prop::char::range('\u{370}', '\u{3FF}'),
        prop::char::range('\u{900}', '\u{97F}'),
        prop::char::range('\u{C0}', '\u{17F}'),
        prop::char::range('\u{300}', '\u{36F}'),
    ]
    .prop_filter("assigned scalar", |c| !c.is_control())
}

fn line() -> impl Strategy<Value = String> {
    "[a-zA-Zéàçñ ,.!?0-9]{0,40}"
}

fn corpus(max: usize) -> impl Strategy<Value = ParallelCorpus> {
    prop::collection::vec((line(), line()), 0..max).prop_map(|p| ParallelCorpus::new(p).unwrap())
}

proptest! {
    #[test]
    fn romanize_strip_is_idempotent(s in prop::collection::vec(mixed_script_char(), 0..30)) {
        let s: String = s.into_iter().collect();
        let t = RomanizationTable::all_builtins();
        let once = romanize_text(&s, &t, Fallback::StripDiacritics);
        prop_assert_eq!(romanize_text(&once, &t, Fallback::StripDiacritics), once);
    }

    #[test]
    fn romanize_pass_through_is_idempotent(
        s in prop::collection::vec(mixed_script_char().prop_filter("no marks", |&c| !is_combining_mark(c)), 0..30)
    ) {
        let s: String = s.into_iter().collect();
        let t = RomanizationTable::all_builtins();
        let once = romanize_text(&s, &t, Fallback::PassThrough);
        prop_assert_eq!(romanize_text(&once, &t, Fallback::PassThrough), once);
    }

    #[test]
    fn sample_is_an_ordered_subsequence(c in corpus(40), n in 0usize..60, seed: u64) {
        let head = corpus::sample(&c, n, seed, SampleMode::Head);
        prop_assert_eq!(head.pairs(), &c.pairs()[..n.min(c.len())]);
        let picked = corpus::sample(&c, n, seed, SampleMode::Random);
        prop_assert_eq!(picked.len(), n.min(c.len()));
        let mut rest = c.pairs().iter();
        for p in picked.pairs() {
            prop_assert!(rest.any(|q| q == p), "{:?} out of order", p);
        }
        prop_assert_eq!(corpus::sample(&c, n, seed, SampleMode::Random), picked);
    }

    #[test]
    fn concat_is_associative(a in corpus(8), b in corpus(8), c in corpus(8)) {
        let ab = corpus::concat(&[a.clone(), b.clone()]).unwrap();
        let bc = corpus::concat(&[b.clone(), c.clone()]).unwrap();
        let left = corpus::concat(&[ab, c.clone()]).unwrap();
        let right = corpus::concat(&[a.clone(), bc]).unwrap();
        prop_assert_eq!(&left, &right);
        prop_assert_eq!(left, corpus::concat(&[a, b, c]).unwrap());
    }

    #[test]
    fn osr_is_invariant_under_line_duplication(
        lines in prop::collection::vec(line(), 1..20),
        merges in 0usize..40,
        types: bool,
    ) {
        let stream = TextStream::new(lines.clone());
        let counts = bpe::count_words(&stream, Pretokenize::default(), "_").unwrap();
        let m = bpe::train_with(&counts, merges, TrainOptions { min_frequency: 1 });
        let doubled = TextStream::new(lines.iter().flat_map(|l| [l.clone(), l.clone()]).collect());
        let options = OsrOptions { types, ..OsrOptions::default() };
        let once = metrics::osr(&stream, &m, &options).unwrap();
        let twice = metrics::osr(&doubled, &m, &options).unwrap();
        prop_assert_eq!(once.rate, twice.rate);
    }

    #[test]
    fn share_is_symmetric(
        a in prop::collection::btree_set("[a-e]{1,3}", 0..20),
        b in prop::collection::btree_set("[a-e]{1,3}", 0..20),
    ) {
        let ab = metrics::shared_subwords(&a, &b);
        let ba = metrics::shared_subwords(&b, &a);
        prop_assert_eq!(&ab.shared, &ba.shared);
        prop_assert_eq!(&ab.only_a, &ba.only_b);
        prop_assert_eq!(&ab.only_b, &ba.only_a);
        prop_assert_eq!(ab.jaccard, ba.jaccard);
        prop_assert!((0.0..=1.0).contains(&ab.jaccard));
        let union: BTreeSet<_> = a.union(&b).cloned().collect();
        prop_assert_eq!(ab.shared.len() + ab.only_a.len() + ab.only_b.len(), union.len());
    }

    #[test]
    fn ablate_round_trips(
        s in prop::collection::vec(mixed_script_char(), 0..60),
        seed: u64,
        digits: bool,
        accented: bool,
    ) {
        let s: String = s.into_iter().collect();
        let map = ablate::build_cjk_map(&ablate::latin_alphabet(AlphabetOptions { digits, accented }), seed).unwrap();
        let image = ablate::apply_map(&s, &map);
        prop_assert_eq!(image.chars().count(), s.chars().count());
        prop_assert!(!image.chars().any(|c| c.is_ascii_alphabetic()));
        prop_assert_eq!(ablate::apply_map(&image, &ablate::invert(&map)), s);
    }
}
