import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_unit, transverse_pol
from nlq.errors import DimensionMismatchError, InvalidGeometryError, ProcessMismatchError
from nlq.fock import FockBasis, hermiticity_residual, max_abs
from nlq.hamiltonians import (
    ProcessSpec,
    alpha2,
    alpha2_from_contraction,
    alpha3,
    alpha3_from_contraction,
    build_fwm,
    build_linear_inhomogeneous,
    build_parametric,
    classical_pump_reduce,
    fwm_hamiltonian,
    parametric_hamiltonian,
    squeezing_hamiltonian,
)
from nlq.media import Box, DielectricSpec, symmetrize_chi2, symmetrize_chi3
from nlq.modes import Mode, mismatch_factor

X, Y, Z = np.eye(3)
UNIT_BOX = Box((1.0, 1.0, 1.0))


def _unit_modes(count):
    return [Mode.plane_wave(1.0, Z, X, label=i) for i in range(count)]


def test_alpha2_unit_substitution():
    assert abs(alpha2_from_contraction(1.0, _unit_modes(3), 1.0) - (-1j / (2 * np.sqrt(2)))) < 1e-15


def test_alpha3_unit_substitution():
    assert abs(alpha3_from_contraction(1.0, _unit_modes(4), 1.0) - (-0.25j)) < 1e-15


def test_alpha_polarization_mismatch():
    chi = np.zeros((3, 3, 3))
    chi[0, 0, 0] = 1.0
    chi2 = symmetrize_chi2(chi, (1.0, 2.0, 3.0))
    modes = [Mode.plane_wave(w, Z, X) for w in (1.0, 2.0)] + [Mode.plane_wave(3.0, Z, Y)]
    assert alpha2(chi2, modes, 1.0) == 0
    chi = np.zeros((3, 3, 3, 3))
    chi[0, 0, 0, 0] = 1.0
    chi3 = symmetrize_chi3(chi, (1.0, 2.0, 1.5, 1.5))
    modes = [Mode.plane_wave(w, Z, X) for w in (1.0, 2.0, 1.5)] + [Mode.plane_wave(1.5, X, Y)]
    assert alpha3(chi3, modes, 1.0) == 0


def _loop_alpha2(chi, modes, vol, hbar):
    s = 0j
    e1, e2, e3 = (m.pol for m in modes)
    for i, j, k in itertools.product(range(3), repeat=3):
        s += chi[i, j, k] * e3[i].conjugate() * e2[j] * e1[k]
    w1, w2, w3 = (m.omega for m in modes)
    n1, n2, n3 = (m.n for m in modes)
    return -1j * math.sqrt(hbar**3 * w1 * w2 * w3 / (8 * vol * n1**2 * n2**2 * n3**2)) * s


def _loop_alpha3(chi, modes, vol, hbar):
    s = 0j
    e1, e2, e3, e4 = (m.pol for m in modes)
    for i, j, k, l in itertools.product(range(3), repeat=4):
        s += chi[i, j, k, l] * e4[i].conjugate() * e3[j].conjugate() * e2[k] * e1[l]
    w = math.prod(m.omega for m in modes)
    n2 = math.prod(m.n**2 for m in modes)
    return -1j * math.sqrt(hbar**4 * w / (16 * vol**2 * n2)) * s


def _random_modes(rng, omegas):
    out = []
    for i, w in enumerate(omegas):
        d = random_unit(rng)
        out.append(Mode.plane_wave(w, d, transverse_pol(rng, d, True), n=rng.uniform(1, 2), label=i))
    return out


def test_alpha2_random_vs_loop(rng):
    for _ in range(10):
        w1, w2 = rng.uniform(0.5, 2, size=2)
        freqs = (w1, w2, w1 + w2)
        chi = symmetrize_chi2(rng.normal(size=(3, 3, 3)) + 1j * rng.normal(size=(3, 3, 3)), freqs)
        modes = _random_modes(rng, freqs)
        vol, hbar = rng.uniform(0.5, 3), rng.uniform(0.5, 2)
        oracle = _loop_alpha2(chi.components, modes, vol, hbar)
        assert abs(alpha2(chi, modes, vol, hbar) - oracle) <= 1e-12 * max(1, abs(oracle))


def test_alpha3_random_vs_loop(rng):
    for _ in range(10):
        w1, w2, w3 = rng.uniform(0.5, 2, size=3)
        freqs = (w1 + 1, w2 + 1, w3, w1 + w2 + 2 - w3)
        chi = symmetrize_chi3(rng.normal(size=(3,) * 4), freqs)
        modes = _random_modes(rng, freqs)
        vol, hbar = rng.uniform(0.5, 3), rng.uniform(0.5, 2)
        oracle = _loop_alpha3(chi.components, modes, vol, hbar)
        assert abs(alpha3(chi, modes, vol, hbar) - oracle) <= 1e-12 * max(1, abs(oracle))


def test_alpha_volume_scaling(rng):
    w1, w2 = rng.uniform(0.5, 2, size=2)
    freqs = (w1, w2, w1 + w2)
    chi = symmetrize_chi2(rng.normal(size=(3, 3, 3)), freqs)
    modes = _random_modes(rng, freqs)
    a, b = alpha2(chi, modes, 1.3), alpha2(chi, modes, 2.6)
    assert abs(b - a / np.sqrt(2)) < 1e-14
    freqs4 = (w1, w2, w1, w2)
    chi3 = symmetrize_chi3(rng.normal(size=(3,) * 4), freqs4)
    modes4 = _random_modes(rng, freqs4)
    a, b = alpha3(chi3, modes4, 1.3), alpha3(chi3, modes4, 2.6)
    assert abs(b - a / 2) < 1e-14


def test_alpha_frequency_mismatch():
    chi = symmetrize_chi2(np.ones((3, 3, 3)), (1.0, 2.0, 3.0))
    modes = [Mode.plane_wave(w, Z, X) for w in (1.0, 1.5, 2.5)]
    with pytest.raises(ProcessMismatchError):
        alpha2(chi, modes, 1.0)


def _apply_ladder_word(occ, truncs, word):
    """Apply a product of ladder ops (rightmost first) to a number state by hand.

    word: list of (mode, +1 create / -1 annihilate). Returns (new_occ, amplitude) or None.
    """
    occ = list(occ)
    amp = 1.0
    for mode, sign in reversed(word):
        if sign < 0:
            if occ[mode] == 0:
                return None
            amp *= math.sqrt(occ[mode])
            occ[mode] -= 1
        else:
            if occ[mode] == truncs[mode]:
                return None
            occ[mode] += 1
            amp *= math.sqrt(occ[mode])
    return tuple(occ), amp


def _hand_matrix(truncs, omegas, g, word):
    states = list(itertools.product(*(range(n + 1) for n in truncs)))
    index = {s: i for i, s in enumerate(states)}
    h = np.zeros((len(states), len(states)), dtype=complex)
    for s in states:
        h[index[s], index[s]] += sum(w * n for w, n in zip(omegas, s))
        hit = _apply_ladder_word(s, truncs, word)
        if hit:
            t, amp = hit
            h[index[t], index[s]] += g * amp
            h[index[s], index[t]] += np.conj(g) * amp
    return h


def test_parametric_eight_dim_matrix():
    g = 0.37
    bundle = parametric_hamiltonian((1.0, 1.0, 1.0), g, FockBasis((1, 1, 1)))
    h = bundle.h.toarray()
    assert h.shape == (8, 8)
    # |0,0,1> is index 1, |1,1,0> is index 6
    assert h[1, 6] == g and h[6, 1] == g
    off = h - np.diag(np.diag(h))
    off[1, 6] = off[6, 1] = 0
    assert np.all(off == 0)
    np.testing.assert_array_equal(np.diag(h).real, [0, 1, 1, 2, 1, 2, 2, 3])


@pytest.mark.parametrize("truncs", [(1, 1, 1), (2, 1, 3), (2, 2, 2)])
def test_parametric_matches_hand_enumeration(rng, truncs):
    g = complex(*rng.normal(size=2))
    omegas = (0.7, 1.1, 1.8)
    word = [(2, +1), (1, -1), (0, -1)]
    bundle = parametric_hamiltonian(omegas, g, FockBasis(truncs))
    np.testing.assert_allclose(bundle.h.toarray(), _hand_matrix(truncs, omegas, g, word), atol=1e-14)


def test_fwm_sixteen_dim_matrix():
    g = 0.21 - 0.4j
    bundle = fwm_hamiltonian((1.0, 2.0, 1.2, 1.8), g, FockBasis((1, 1, 1, 1)))
    inter = bundle.interaction_part.toarray()
    # |0,0,1,1> is index 3, |1,1,0,0> is index 12
    assert inter[3, 12] == g and inter[12, 3] == np.conj(g)
    inter[3, 12] = inter[12, 3] = 0
    assert np.all(inter == 0)
    word = [(2, +1), (3, +1), (1, -1), (0, -1)]
    np.testing.assert_allclose(
        bundle.h.toarray(), _hand_matrix((1, 1, 1, 1), (1.0, 2.0, 1.2, 1.8), g, word), atol=1e-15
    )


def test_zero_coupling_gives_free():
    b = parametric_hamiltonian((1.0, 2.0, 3.0), 0.0, FockBasis((2, 2, 2)))
    assert max_abs(b.interaction_part.entries) == 0
    assert max_abs(b.h.entries - b.free_part.entries) == 0
    b = fwm_hamiltonian((1.0, 2.0, 1.5, 1.5), 0.0, FockBasis((1, 1, 1, 1)))
    h = b.h.toarray()
    assert np.all(h == np.diag(np.diag(h)))


@given(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False))
def test_random_complex_g_hermitian(g):
    for b in (
        parametric_hamiltonian((1.0, 2.0, 3.0), g, FockBasis((2, 1, 2))),
        fwm_hamiltonian((1.0, 2.0, 1.2, 1.8), g, FockBasis((1, 2, 1, 1))),
    ):
        assert hermiticity_residual(b.h.entries) == 0
        assert max_abs(b.h.entries - (b.free_part + b.interaction_part).entries) == 0


def _collinear_modes(ks, n=1.0):
    return [Mode.plane_wave(k / n, Z, X, n=n, label=i) for i, k in enumerate(ks)]


def test_collinear_equals_general(rng):
    for _ in range(5):
        k1, k2 = rng.uniform(1, 3, size=2)
        k3 = k1 + k2 - rng.uniform(-1, 1)
        modes = _collinear_modes([k1, k2])
        modes.append(Mode.plane_wave(modes[0].omega + modes[1].omega, Z, X, n=k3 / (k1 + k2), label=2))
        box = Box((0.5, 0.8, 7.0))
        general = ProcessSpec("parametric3", modes, 1.0, box)
        collinear = ProcessSpec("parametric3", modes, 1.0, box, geometry="collinear")
        basis = FockBasis((1, 1, 1))
        g1 = build_parametric(general, basis).couplings.g
        g2 = build_parametric(collinear, basis).couplings.g
        assert abs(g1 - g2) < 1e-12
        assert abs(build_parametric(collinear, basis).couplings.mismatch - mismatch_factor(k1 + k2 - k3, 7.0)) < 1e-15


def test_collinear_requires_axis_alignment():
    modes = [Mode.plane_wave(1.0, X, Y), Mode.plane_wave(1.0, X, Y), Mode.plane_wave(2.0, X, Y)]
    spec = ProcessSpec("parametric3", modes, 1.0, UNIT_BOX, geometry="collinear")
    with pytest.raises(InvalidGeometryError):
        build_parametric(spec, FockBasis((1, 1, 1)))


def test_process_frequency_relations():
    with pytest.raises(ProcessMismatchError):
        ProcessSpec("parametric3", [Mode.plane_wave(w, Z, X) for w in (1.0, 1.0, 2.1)], 1.0, UNIT_BOX)
    with pytest.raises(ProcessMismatchError):
        ProcessSpec("fwm4", [Mode.plane_wave(w, Z, X) for w in (1.0, 1.0, 1.0, 1.1)], 1.0, UNIT_BOX)
    with pytest.raises(ProcessMismatchError):
        ProcessSpec("fwm4", [Mode.plane_wave(w, Z, X) for w in (1.0, 1.0, 2.0)], 1.0, UNIT_BOX)
    spec = ProcessSpec("parametric3", [Mode.plane_wave(w, Z, X) for w in (1.0, 1.0, 2.0)], 1.0, UNIT_BOX)
    with pytest.raises(DimensionMismatchError):
        build_parametric(spec, FockBasis((1, 1)))
    with pytest.raises(ProcessMismatchError):
        build_fwm(spec, FockBasis((1, 1, 1, 1)))


def test_fwm_builder_coupling():
    modes = [Mode.plane_wave(w, Z, X, label=i) for i, w in enumerate((1.0, 2.0, 1.2, 1.8))]
    spec = ProcessSpec("fwm4", modes, 1.0, UNIT_BOX)
    b = build_fwm(spec, FockBasis((1, 1, 1, 1)))
    c = b.couplings
    assert abs(c.g - c.alpha * c.beta) < 1e-15
    assert abs(c.alpha - alpha3_from_contraction(1.0, modes, 1.0)) < 1e-15


def _linear_pair(eps):
    k = 2 * np.pi * Z
    m = Mode.from_wavevector(k, X, label=0)
    return [m, m.reversed(label=1)]


def test_linear_vacuum_is_free():
    modes = _linear_pair(1.0)
    b = build_linear_inhomogeneous(modes, DielectricSpec.homogeneous(1.0), FockBasis((2, 2)), box=UNIT_BOX)
    assert max_abs(b.interaction_part.entries) == 0
    grid = DielectricSpec.from_grid(np.ones((4, 4, 4)), (1, 1, 1))
    b = build_linear_inhomogeneous(modes, grid, FockBasis((2, 2)))
    assert max_abs(b.interaction_part.entries) == 0
    assert max_abs(b.h.entries - b.free_part.entries) == 0


@pytest.mark.parametrize("eps", [1.21, 2.25, 4.0])
def test_linear_homogeneous_pair_coefficients(eps):
    hbar = 0.8
    modes = _linear_pair(eps)
    w = modes[0].omega
    shift = hbar * w / 4 * (1 - 1 / eps)
    b = build_linear_inhomogeneous(modes, DielectricSpec.homogeneous(eps), FockBasis((1, 1)), hbar=hbar, box=UNIT_BOX)
    c_pp, c_pm = b.terms["c_pp"], b.terms["c_pm"]
    np.testing.assert_allclose(c_pp, [[0, shift], [shift, 0]], atol=1e-15)
    np.testing.assert_allclose(c_pm, [[-shift, 0], [0, -shift]], atol=1e-15)
    h = b.h.toarray()
    # |0,1> index 1, |1,0> index 2, |1,1> index 3
    assert abs(h[2, 2] - (hbar * w - 2 * shift)) < 1e-13
    assert abs(h[3, 0] - 2 * shift) < 1e-13


def test_linear_random_grid_hermitian(rng):
    a = rng.normal(size=(4, 4, 4, 3, 3)) * 0.3
    grid = 2 * np.eye(3) + (a + np.swapaxes(a, -1, -2)) / 2
    spec = DielectricSpec.from_grid(grid, (1, 1, 1))
    modes = []
    for i, m in enumerate([(1, 0, 0), (0, 1, 0), (0, 0, 1)]):
        k = 2 * np.pi * np.array(m, dtype=float)
        mode = Mode.from_wavevector(k, transverse_pol(rng, k, True), label=2 * i)
        modes += [mode, mode.reversed(label=2 * i + 1)]
    b = build_linear_inhomogeneous(modes, spec, FockBasis((1,) * 6))
    assert hermiticity_residual(b.h.entries) <= 1e-12 * max_abs(b.h.entries)
    assert max_abs(b.interaction_part.entries) > 0


def test_linear_rejects_off_lattice_and_wrong_frequency():
    spec = DielectricSpec.from_grid(np.full((4, 4, 4), 2.0), (1, 1, 1))
    off = Mode.plane_wave(1.0, Z, X)
    with pytest.raises(InvalidGeometryError):
        build_linear_inhomogeneous([off, off.reversed()], spec, FockBasis((1, 1)))
    slow = Mode.plane_wave(np.pi, Z, X, n=2.0)
    with pytest.raises(ProcessMismatchError):
        build_linear_inhomogeneous([slow, slow.reversed()], spec, FockBasis((1, 1)))


def _squeezing_spec(g):
    modes = [Mode.plane_wave(w, Z, X, label=i) for i, w in enumerate((1.0, 1.0, 2.0))]
    return ProcessSpec("parametric3", modes, None, UNIT_BOX, coupling=g)


def test_classical_pump_zero_amplitude():
    b = classical_pump_reduce(_squeezing_spec(0.5), 0.0, FockBasis((2, 2)))
    assert max_abs(b.h.entries) == 0


def test_classical_pump_four_dim():
    kappa = 0.3
    b = squeezing_hamiltonian(kappa, FockBasis((1, 1)))
    h = b.h.toarray()
    # |0,0> index 0, |1,1> index 3
    expected = np.zeros((4, 4))
    expected[3, 0] = expected[0, 3] = kappa
    np.testing.assert_array_equal(h, expected)


@given(
    st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False),
    st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False),
)
def test_classical_pump_hermitian_and_magnitude(g, amp):
    b = classical_pump_reduce(_squeezing_spec(g), amp, FockBasis((2, 2)))
    assert hermiticity_residual(b.h.entries) == 0
    assert abs(abs(b.terms["kappa"]) - abs(g) * abs(amp)) <= 1e-12 * max(1, abs(g * amp))


def test_classical_pump_rejects_fwm():
    modes = [Mode.plane_wave(w, Z, X) for w in (1.0, 2.0, 1.5, 1.5)]
    with pytest.raises(ProcessMismatchError):
        classical_pump_reduce(ProcessSpec("fwm4", modes, 1.0, UNIT_BOX), 1.0, FockBasis((1, 1)))
