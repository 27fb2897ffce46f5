"""Chi-square check that the rejection sampler hits every rooted class at
small n with equal frequency."""

import argparse

import numpy as np
from scipy.stats import chisquare

from genuslab import enumeration as en
from genuslab.maps import canonical_key
from genuslab.sampler import batch_sample


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", default="1,2,3")
    ap.add_argument("--per-class", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    for n in (int(s) for s in args.sizes.split(",")):
        census = en.brute_force_census(n)
        for g in sorted(census.representatives):
            idx = census.class_index(g)
            if len(idx) < 2:
                print(f"n={n} g={g}: single class, nothing to test")
                continue
            maps, stats = batch_sample(n, g, args.per_class * len(idx), [args.seed + 100 * n + g])
            counts = np.bincount([idx[canonical_key(m)] for m in maps], minlength=len(idx))
            p = chisquare(counts).pvalue
            print(f"n={n} g={g}: {len(idx)} classes, {len(maps)} samples, "
                  f"acceptance {stats.acceptance_rate:.3f}, p={p:.3f}")


if __name__ == "__main__":
    main()
