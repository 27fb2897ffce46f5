"""Print the theta-dependent constants on a grid as an aligned table."""

import argparse

import numpy as np

from genuslab.asymptotics import theta_constants

COLUMNS = ("theta", "h", "lambda", "f", "f_second", "m", "D", "delta", "K")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lo", type=float, default=0.05)
    ap.add_argument("--hi", type=float, default=0.45)
    ap.add_argument("--steps", type=int, default=9)
    args = ap.parse_args()

    print("".join(f"{c:>13}" for c in COLUMNS))
    for theta in np.linspace(args.lo, args.hi, args.steps):
        row = theta_constants(float(theta)).to_dict()
        print("".join(f"{row[c]:>13.6g}" for c in COLUMNS))


if __name__ == "__main__":
    main()
