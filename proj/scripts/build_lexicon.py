#!/usr/bin/env python3
"""Convert a Brill-format lexicon ("word TAG" per line) into the coarse
word<TAB>tag lexicon read by the tagger.

    python3 scripts/build_lexicon.py en-lexicon.txt > data/lexicon_en.tsv

Penn tags NN* map to NOUN, JJ* to ADJ, everything else to OTHER. Entries
containing digits are dropped so the tagger's digit rule handles them.
"""
import sys


def coarse(tag: str) -> str:
    if tag.startswith("NN"):
        return "NOUN"
    if tag.startswith("JJ"):
        return "ADJ"
    return "OTHER"


def main(path: str) -> None:
    seen = {}
    with open(path, encoding="utf-8") as f:
        for line in f:
            if line.startswith(";;;"):
                continue
            parts = line.split()
            if len(parts) < 2:
                continue
            word, tag = parts[0], parts[1]
            if any(c.isdigit() for c in word) or "\t" in word:
                continue
            seen.setdefault(word, coarse(tag))
    out = sys.stdout
    out.write("# coarse POS lexicon: word<TAB>{NOUN,ADJ,OTHER}\n")
    for word in sorted(seen):
        out.write(f"{word}\t{seen[word]}\n")


if __name__ == "__main__":
    main(sys.argv[1])
