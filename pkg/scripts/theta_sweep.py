"""Run the experiment command for several theta values; one CSV and one
diameter plot per theta land in --out."""

import argparse
import sys

from genuslab.cli import main as cli


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--thetas", default="0.1,0.25")
    ap.add_argument("--sizes", default="6,8,10,12,14")
    ap.add_argument("--count", type=int, default=5)
    ap.add_argument("--seed", default="1")
    ap.add_argument("--out", default="sweep")
    ap.add_argument("--strict", action="store_true")
    args = ap.parse_args()

    status = 0
    for theta in args.thetas.split(","):
        argv = ["experiment", "--theta", theta, "--sizes", args.sizes, "--count", str(args.count),
                "--seed", args.seed, "--out", args.out]
        if args.strict:
            argv.append("--strict")
        status = max(status, cli(argv))
    sys.exit(status)


if __name__ == "__main__":
    main()
