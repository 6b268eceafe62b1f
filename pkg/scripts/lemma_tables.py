"""Sup over k + l <= K of the four truncated double sums, for growing K.

    python3 scripts/lemma_tables.py [--cutoff 10000] [--K 10 25 50 100 200]
"""

import argparse

from ksband.lemmas import _GramSums, lemma2_uniformity_scan


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cutoff", type=int, default=10_000)
    ap.add_argument("--K", type=int, nargs="+", default=[10, 25, 50, 100, 200])
    args = ap.parse_args()
    gram = _GramSums(max(args.K), args.cutoff)
    print(f"{'K':>5} " + " ".join(f"{'item ' + str(i):>22}" for i in (1, 2, 3, 4)))
    for K in args.K:
        cells = []
        for item in (1, 2, 3, 4):
            s = lemma2_uniformity_scan(item, K, args.cutoff, gram)
            cells.append(f"{s.sup_with_tail:10.5f} at {str(s.argsup):>9}")
        print(f"{K:5d} " + " ".join(cells))


if __name__ == "__main__":
    main()
