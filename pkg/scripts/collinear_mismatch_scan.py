"""Quantum sum-frequency conversion in a collinear crystal versus phase mismatch.

Starts from one photon in each of modes 1 and 2. The exchange is resonant, so
the photon always converts fully; the mismatch only slows it down. Reported:
|g| (which follows |alpha| |sinc(delta_k L / 2)|), the simulated time of first
full conversion and the two-level prediction pi / (2|g|).
"""

import argparse

import numpy as np

from nlq import Box, FockBasis, Mode, ProcessSpec, build_parametric, evolve, number_state
from nlq.dynamics import mode_observables


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--length", type=float, default=20.0)
    p.add_argument("--points", type=int, default=21)
    args = p.parse_args()
    z = np.array([0.0, 0.0, 1.0])
    x = np.array([1.0, 0.0, 0.0])
    box = Box((1.0, 1.0, args.length))
    basis = FockBasis((1, 1, 1))
    m1 = Mode.plane_wave(1.0, z, x, n=1.5, label=0)
    m2 = Mode.plane_wave(1.5, z, x, n=1.5, label=1)
    matched_n3 = (m1.k[2] + m2.k[2]) / 2.5
    print("delta_k_L,abs_g,abs_g_over_abs_alpha,peak_N3,conversion_time,predicted")
    for dkl in np.linspace(-4 * np.pi, 4 * np.pi, args.points):
        n3 = matched_n3 - dkl / args.length / 2.5
        m3 = Mode.plane_wave(2.5, z, x, n=n3, label=2)
        spec = ProcessSpec("parametric3", (m1, m2, m3), 1.0, box, geometry="collinear")
        b = build_parametric(spec, basis)
        g = b.couplings.g
        if abs(g) < 1e-12 * abs(b.couplings.alpha):
            print(f"{dkl:.6f},{abs(g):.6e},0,0,inf,inf")
            continue
        predicted = np.pi / (2 * abs(g))
        times = np.linspace(0, 1.5 * predicted, 3001)
        traj = evolve(b.h, number_state((1, 1, 0), basis), times, mode_observables(basis),
                      truncation_threshold=np.inf)
        n3 = traj.observables["N_2"].real
        t_conv = times[np.argmax(n3)]
        print(f"{dkl:.6f},{abs(g):.6e},{abs(g) / abs(b.couplings.alpha):.6f},{n3.max():.6f},{t_conv:.4f},{predicted:.4f}")


if __name__ == "__main__":
    main()
