#!/usr/bin/env python3
"""Regenerates crates/core/data/devanagari.tsv.

Consonants carry an inherent "a" unless followed by a vowel sign or virama;
the table spells out every consonant + sign combination so that plain
longest-match replacement produces the right vowel.
"""
import sys
import unicodedata

CONSONANTS = [
    ("क", "k"), ("ख", "kh"), ("ग", "g"), ("घ", "gh"), ("ङ", "ng"),
    ("च", "ch"), ("छ", "chh"), ("ज", "j"), ("झ", "jh"), ("ञ", "ny"),
    ("ट", "t"), ("ठ", "th"), ("ड", "d"), ("ढ", "dh"), ("ण", "n"),
    ("त", "t"), ("थ", "th"), ("द", "d"), ("ध", "dh"), ("न", "n"),
    ("प", "p"), ("फ", "ph"), ("ब", "b"), ("भ", "bh"), ("म", "m"),
    ("य", "y"), ("र", "r"), ("ल", "l"), ("व", "v"),
    ("श", "sh"), ("ष", "sh"), ("स", "s"), ("ह", "h"),
    ("क़", "q"), ("ख़", "kh"), ("ग़", "gh"), ("ज़", "z"),
    ("ड़", "r"), ("ढ़", "rh"), ("फ़", "f"), ("य़", "y"),
]
VOWELS = [
    ("अ", "a"), ("आ", "a"), ("इ", "i"), ("ई", "i"), ("उ", "u"), ("ऊ", "u"),
    ("ऋ", "ri"), ("ए", "e"), ("ऐ", "ai"), ("ओ", "o"), ("औ", "au"),
    ("ऍ", "e"), ("ऑ", "o"),
]
SIGNS = [
    ("ा", "a"), ("ि", "i"), ("ी", "i"), ("ु", "u"),
    ("ू", "u"), ("ृ", "ri"), ("े", "e"), ("ै", "ai"),
    ("ो", "o"), ("ौ", "au"), ("ॅ", "e"), ("ॉ", "o"),
]
VIRAMA = "्"
OTHER = [
    ("ं", "n"), ("ँ", "n"), ("ः", "h"),
    ("़", ""), (VIRAMA, ""), ("ॐ", "om"),
    ("।", "."), ("॥", "."),
] + [(chr(0x0966 + d), str(d)) for d in range(10)]


def main(out):
    rows = []
    for src, tgt in VOWELS:
        rows.append((src, tgt))
    for src, base in CONSONANTS:
        rows.append((src, base + "a"))
        rows.append((src + VIRAMA, base))
        for sign, v in SIGNS:
            rows.append((src + sign, base + v))
    rows.extend(OTHER)
    seen = set()
    out.write("# Devanagari subset: consonants with inherent a, vowel signs, virama, digits.\n")
    out.write("# Generated by scripts/gen_devanagari_table.py\n")
    for src, tgt in rows:
        src = unicodedata.normalize("NFC", src)
        assert src not in seen, src
        seen.add(src)
        out.write(f"{src}\t{tgt}\n")


if __name__ == "__main__":
    main(sys.stdout)
