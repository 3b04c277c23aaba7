"""Tabulate |mismatch factor|^2 against delta_k * L and compare with sinc^2."""

import argparse
import sys

import numpy as np

from nlq.modes import mismatch_factor


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--span", type=float, default=4 * np.pi, help="sweep delta_k*L over [-span, span]")
    p.add_argument("--points", type=int, default=401)
    args = p.parse_args()
    x = np.linspace(-args.span, args.span, args.points)
    f = np.array([mismatch_factor(v, 1.0) for v in x])
    sinc2 = np.sinc(x / (2 * np.pi)) ** 2
    out = sys.stdout
    out.write("delta_k_L,re,im,magnitude_sq,sinc_sq\n")
    for row in zip(x, f.real, f.imag, np.abs(f) ** 2, sinc2):
        out.write(",".join("%.17g" % v for v in row) + "\n")
    print(f"# max |magnitude_sq - sinc_sq| = {np.abs(np.abs(f) ** 2 - sinc2).max():.3e}", file=sys.stderr)


if __name__ == "__main__":
    main()
