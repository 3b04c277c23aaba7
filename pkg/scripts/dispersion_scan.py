"""Normal-mode frequencies of the linear dielectric Hamiltonian.

Homogeneous media reproduce w / sqrt(eps); the shipped cube inclusion shows
the shift and splitting produced by an inhomogeneous medium.
"""

import argparse
from pathlib import Path

import numpy as np

from nlq import Box, DielectricSpec, FockBasis, Mode
from nlq.bogoliubov import bogoliubov_diagonalize, extract_quadratic
from nlq.hamiltonians import build_linear_inhomogeneous
from nlq.media import load_dielectric

SCENARIOS = Path(__file__).resolve().parents[1] / "src" / "nlq" / "scenarios"


def pair_modes(k, pol, start_label=0):
    m = Mode.from_wavevector(k, pol, label=start_label)
    return [m, m.reversed(label=start_label + 1)]


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--eps", type=float, nargs="+", default=[1.0, 1.21, 1.5, 2.25, 3.0, 4.0, 6.25])
    args = p.parse_args()
    box = Box((1.0, 1.0, 1.0))
    modes = pair_modes(2 * np.pi * np.array([0.0, 0.0, 1.0]), [1, 0, 0])
    print("# homogeneous: eps, normal frequency, w_free / sqrt(eps), relative difference")
    for eps in args.eps:
        b = build_linear_inhomogeneous(modes, DielectricSpec.homogeneous(eps), FockBasis((1, 1)), box=box)
        w, _ = bogoliubov_diagonalize(extract_quadratic(b))
        ref = modes[0].omega / np.sqrt(eps)
        print(f"{eps:.4f},{w[0]:.15f},{ref:.15f},{abs(w[0] / ref - 1):.2e}")

    spec = load_dielectric(SCENARIOS / "cube_inclusion.grid")
    modes = pair_modes(2 * np.pi * np.array([0.0, 0.0, 1.0]), [1, 1, 0]) + pair_modes(
        2 * np.pi * np.array([1.0, 0.0, 0.0]), [0, 1, 1], 2
    )
    b = build_linear_inhomogeneous(modes, spec, FockBasis((1,) * 4))
    w, _ = bogoliubov_diagonalize(extract_quadratic(b))
    mean_eta = spec.contrast[0, 0, 0, 0, 0].real
    print("# cube inclusion: normal frequencies and the effective-medium guess w sqrt(1 - <eta>)")
    print(", ".join(f"{v:.12f}" for v in w), f"| {modes[0].omega * np.sqrt(1 - mean_eta):.12f}")


if __name__ == "__main__":
    main()
