#!/usr/bin/env python3
"""Freeze Porter (1980) reference outputs for the stemmer test.

Uses NLTK's independent implementation in ORIGINAL_ALGORITHM mode over the
lowercase alphabetic words of the bundled lexicon.

    python3 scripts/make_porter_oracle.py data/lexicon_en.tsv > tests/fixtures/porter_vectors.tsv
"""
import sys

from nltk.stem.porter import PorterStemmer


def main(path: str) -> None:
    stemmer = PorterStemmer(mode=PorterStemmer.ORIGINAL_ALGORITHM)
    words = set()
    with open(path, encoding="utf-8") as f:
        for line in f:
            if line.startswith("#"):
                continue
            word = line.split("\t")[0]
            if word.isascii() and word.isalpha() and word.islower():
                words.add(word)
    for w in sorted(words):
        sys.stdout.write(f"{w}\t{stemmer.stem(w, to_lowercase=False)}\n")


if __name__ == "__main__":
    main(sys.argv[1])
