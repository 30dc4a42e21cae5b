#!/usr/bin/env python3
"""Generate the small romanized corpora used by the OsR ordering check.

Sentences are drawn from per-language word frequency lists (the `wordfreq`
package), weighted by frequency, then romanized with `unidecode`. Output is
fully determined by SEED and the installed wordfreq data.

    pip install wordfreq unidecode
    python3 scripts/gen_fixtures.py crates/core/tests/fixtures
"""

import random
import sys
from pathlib import Path

from unidecode import unidecode
from wordfreq import top_n_list, word_frequency

SEED = 20191
VOCAB = 20000
MULTI = ["es", "it", "pt"]
MONO = "fr"
HELD_OUT = "ro"
TOKENS_PER_MULTI = 10000
TOKENS_MONO = 30000
TOKENS_HELD_OUT = 10000


def sentences(lang, tokens, rng):
    words = [w for w in top_n_list(lang, VOCAB) if w.isalpha()]
    weights = [word_frequency(w, lang) for w in words]
    out, n = [], 0
    while n < tokens:
        k = min(rng.randint(6, 16), tokens - n)
        line = " ".join(rng.choices(words, weights=weights, k=k))
        out.append(unidecode(line))
        n += k
    return out


def write(path, lines):
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def main():
    dest = Path(sys.argv[1] if len(sys.argv) > 1 else "crates/core/tests/fixtures")
    dest.mkdir(parents=True, exist_ok=True)
    rng = random.Random(SEED)
    multi = []
    for lang in MULTI:
        multi += sentences(lang, TOKENS_PER_MULTI, rng)
    write(dest / "multi_es_it_pt.txt", multi)
    write(dest / "mono_fr.txt", sentences(MONO, TOKENS_MONO, rng))
    write(dest / "heldout_ro.txt", sentences(HELD_OUT, TOKENS_HELD_OUT, rng))


if __name__ == "__main__":
    main()
