"""Calibrate the seed cell on the n <= 3 census, fill tau up to --nmax and
print how fast tau(n-1, g)/tau(n, g) approaches lambda(g/n)."""

import argparse
import time
from pathlib import Path

from genuslab import enumeration as en


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--nmax", type=int, default=120)
    ap.add_argument("--out", default="tau.csv")
    ap.add_argument("--census-dir", default=None, help="reuse census_n{1,2,3}.json from here")
    ap.add_argument("--thetas", default="0.1,0.25,0.4")
    args = ap.parse_args()

    cache = Path(args.census_dir) if args.census_dir else None
    censuses = []
    for n in (1, 2, 3):
        path = cache / f"census_n{n}.json" if cache else None
        if path and path.exists():
            censuses.append(en.GluingCensus.load(path))
            continue
        t0 = time.perf_counter()
        c = en.brute_force_census(n)
        print(f"census n={n}: {dict(sorted(c.counts.items()))} in {time.perf_counter() - t0:.1f}s")
        if path:
            cache.mkdir(parents=True, exist_ok=True)
            c.save(path)
        censuses.append(c)

    seeded = en.calibrate_seed(*censuses)
    print(f"seed cell tau(0,0) = {seeded.seed_cell}")
    t0 = time.perf_counter()
    table = en.gj_extend(seeded, args.nmax)
    print(f"filled to n={args.nmax} in {time.perf_counter() - t0:.2f}s")
    table.to_csv(args.out)

    for theta in (float(t) for t in args.thetas.split(",")):
        sizes = [n for n in (10, 20, 40, 80, args.nmax) if n <= args.nmax]
        print(f"theta={theta}")
        for r in en.ratio_diagnostic(table, theta, sizes):
            print(f"  n={r.n:4d} g={r.g:3d} ratio={r.ratio_float:.6f} lambda={r.lam:.6f} err={r.error:.2e}")


if __name__ == "__main__":
    main()
