"""Scenario files: YAML documents describing one medium, process, state and run.

Schema (``schema_version: 1``)::

    schema_version: 1
    name: rabi
    units: {hbar: 1.0, c: 1.0}
    medium:
      epsilon: 2.25                 # homogeneous dielectric (linear kind)
      grid_file: cube.grid          # or a dielectric grid, path relative to this file
      chi2: [27 numbers]            # raw chi2 (symmetrized on load); or chi2_effective: 1.0
      chi3: [81 numbers]            # raw chi3; or chi3_effective: 1.0
    modes:
      - {omega: 1.0, direction: [0, 0, 1], pol: [1, 0, 0], n: 1.0}
      - {k: [0, 0, 6.283185307179586], pol: [1, 0, 0]}   # omega = c|k|/n
    process:
      kind: parametric3             # linear | parametric3 | fwm4 | classical_pump
                                    # (the process block may be omitted for phase-match)
      box: [1.0, 1.0, 10.0]
      length: 10.0                  # defaults to box z length
      geometry: general             # or collinear
      delta_k: 0.0                  # collinear mismatch override
      coupling: 0.3                 # g override, number or [re, im]
      pump_amplitude: 1.0           # classical_pump only
      profiles: [a.grid, b.grid, c.grid]   # optional transverse profiles (collinear)
    state:
      occupations: [0, 0, 1]        # or coherent: [alpha_1, ...] (numbers or [re, im])
    run:
      truncations: [1, 1, 1]
      times: {t_max: 20.0, steps: 200}
      sweep: {start: -20.0, stop: 20.0, num: 1001}   # phase-match only; or a list of delta_k*L values
      dense_threshold: 4096
      truncation_threshold: 1.0e-6
      tolerances: {hermiticity: 1.0e-12, ...}

Complex numbers may be written as ``[re, im]`` pairs wherever a complex value
is accepted; polarizations take an optional ``pol_imag`` vector.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from .errors import ConfigError, NLQError
from .fock import FockBasis, QuantumState, coherent_state, number_state, product_state
from .hamiltonians import ProcessSpec
from .media import (
    Box,
    DielectricSpec,
    load_dielectric,
    symmetrization_correction,
    symmetrize_chi2,
    symmetrize_chi3,
)
from .modes import Mode, TransverseProfile, load_profile

SCHEMA_VERSION = 1
KINDS = ("linear", "parametric3", "fwm4", "classical_pump")

DEFAULT_TOLERANCES = {
    "hermiticity": 1e-12,
    "commutant": 0.0,
    "heisenberg": 1e-10,
    "orthonormality": 1e-10,
    "symplectic": 1e-10,
    "bogoliubov_residual": 1e-9,
    "dispersion": 1e-8,
    "norm": 1e-10,
    "energy": 1e-9,
}


def _complex(v, where: str) -> complex:
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ConfigError(f"{where}: complex values are [re, im] pairs, got {v!r}")
        return complex(float(v[0]), float(v[1]))
    try:
        return complex(v)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: expected a number, got {v!r}") from exc


def _vector(v, where: str, size: int = 3) -> np.ndarray:
    try:
        arr = np.asarray(v, dtype=float).reshape(-1)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: expected {size} numbers") from exc
    if arr.size != size:
        raise ConfigError(f"{where}: expected {size} numbers, got {arr.size}")
    return arr


def _tensor(v, size: int, where: str) -> np.ndarray:
    """Flat row-major list of ``size`` entries, each a number or an [re, im] pair."""
    if not isinstance(v, list) or len(v) != size:
        raise ConfigError(f"{where}: expected a flat list of {size} components")
    return np.array([_complex(x, where) for x in v], dtype=complex)


@dataclass
class Scenario:
    name: str
    kind: str
    hbar: float
    c: float
    modes: tuple[Mode, ...]
    box: Box | None
    process: ProcessSpec | None
    dielectric: DielectricSpec | None
    pump_amplitude: complex
    truncations: tuple[int, ...] | None
    state_spec: dict
    times: np.ndarray | None
    sweep: np.ndarray | None
    dense_threshold: int
    truncation_threshold: float
    tolerances: dict[str, float]
    source: Path | None = None
    digest: str = ""
    chi_correction: float | None = None
    raw: dict = field(default_factory=dict)

    @property
    def basis(self) -> FockBasis:
        if self.truncations is None:
            raise ConfigError(f"{self.name}: run.truncations is required")
        expected = 2 if self.kind == "classical_pump" else len(self.modes)
        if len(self.truncations) != expected:
            raise ConfigError(f"{self.name}: need {expected} truncations, got {len(self.truncations)}")
        return FockBasis(self.truncations)

    def initial_state(self) -> QuantumState:
        basis = self.basis
        spec = self.state_spec
        if "coherent" in spec:
            alphas = [_complex(a, "state.coherent") for a in spec["coherent"]]
            if len(alphas) != basis.mode_count:
                raise ConfigError("state.coherent needs one amplitude per mode")
            return product_state([coherent_state(a, n)[0] for a, n in zip(alphas, basis.truncations)])
        occ = spec.get("occupations", [0] * basis.mode_count)
        return number_state([int(n) for n in occ], basis)


def _load_modes(raw_modes, c: float) -> tuple[Mode, ...]:
    if not isinstance(raw_modes, list) or not raw_modes:
        raise ConfigError("modes: expected a non-empty list")
    modes = []
    for i, m in enumerate(raw_modes):
        where = f"modes[{i}]"
        if not isinstance(m, dict) or "pol" not in m:
            raise ConfigError(f"{where}: needs at least 'pol'")
        pol = _vector(m["pol"], f"{where}.pol").astype(complex)
        if "pol_imag" in m:
            pol = pol + 1j * _vector(m["pol_imag"], f"{where}.pol_imag")
        n = float(m.get("n", 1.0))
        label = int(m.get("label", i))
        if "k" in m:
            modes.append(Mode.from_wavevector(_vector(m["k"], f"{where}.k"), pol, n, label, c))
        elif "omega" in m:
            direction = _vector(m.get("direction", [0, 0, 1]), f"{where}.direction")
            modes.append(Mode.plane_wave(float(m["omega"]), direction, pol, n, label, c))
        else:
            raise ConfigError(f"{where}: give either 'k' or 'omega'")
    return tuple(modes)


def parse_scenario(doc: dict, source: Path | None = None, digest: str = "") -> Scenario:
    if not isinstance(doc, dict):
        raise ConfigError("scenario must be a mapping")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError(f"schema_version must be {SCHEMA_VERSION}, got {doc.get('schema_version')!r}")
    base = source.parent if source is not None else Path.cwd()
    name = str(doc.get("name", source.stem if source else "scenario"))
    units = doc.get("units", {}) or {}
    hbar, c = float(units.get("hbar", 1.0)), float(units.get("c", 1.0))
    medium = doc.get("medium", {}) or {}
    proc = doc.get("process", {}) or {}
    state = doc.get("state", {}) or {}
    run = doc.get("run", {}) or {}

    kind = proc.get("kind")
    if kind is None and not proc and "sweep" in run:
        pass  # phase-match only
    elif kind not in KINDS:
        raise ConfigError(f"process.kind must be one of {KINDS}, got {kind!r}")

    modes = _load_modes(doc.get("modes"), c) if doc.get("modes") is not None else ()

    dielectric = None
    if "grid_file" in medium:
        dielectric = load_dielectric(base / medium["grid_file"])
    elif "epsilon" in medium:
        dielectric = DielectricSpec.homogeneous(float(medium["epsilon"]))

    box = None
    if "box" in proc:
        box = Box(tuple(_vector(proc["box"], "process.box")))
    elif dielectric is not None and dielectric.box is not None:
        box = dielectric.box

    chi_correction = None
    process = None
    pump = _complex(proc.get("pump_amplitude", 1.0), "process.pump_amplitude")
    if kind in ("parametric3", "fwm4", "classical_pump"):
        if box is None:
            raise ConfigError("process.box is required for nonlinear processes")
        pkind = "fwm4" if kind == "fwm4" else "parametric3"
        freqs = tuple(m.omega for m in modes)
        chi_key, rank = ("chi3", 4) if pkind == "fwm4" else ("chi2", 3)
        susceptibility = None
        if chi_key in medium:
            raw = _tensor(medium[chi_key], 3**rank, f"medium.{chi_key}")
            chi_correction = symmetrization_correction(raw, rank)
            sym = symmetrize_chi3 if rank == 4 else symmetrize_chi2
            susceptibility = sym(raw, freqs)
        elif f"{chi_key}_effective" in medium:
            susceptibility = _complex(medium[f"{chi_key}_effective"], f"medium.{chi_key}_effective")
        coupling = proc.get("coupling")
        coupling = None if coupling is None else _complex(coupling, "process.coupling")
        if susceptibility is None and coupling is None:
            raise ConfigError(f"nonlinear process needs medium.{chi_key}, medium.{chi_key}_effective or process.coupling")
        profiles = None
        if "profiles" in proc:
            profiles = tuple(load_profile(base / p) for p in proc["profiles"])
        process = ProcessSpec(
            kind=pkind,
            modes=modes,
            susceptibility=susceptibility,
            box=box,
            length=proc.get("length"),
            geometry=proc.get("geometry", "general"),
            profiles=profiles,
            delta_k=proc.get("delta_k"),
            coupling=coupling,
        )
    elif kind == "linear":
        if dielectric is None:
            raise ConfigError("linear process needs medium.epsilon or medium.grid_file")
        if not modes:
            raise ConfigError("linear process needs modes")

    truncs = run.get("truncations")
    if truncs is not None:
        truncs = tuple(int(t) for t in truncs)
        if any(t < 1 for t in truncs):
            raise ConfigError("run.truncations must be positive")

    times = None
    if "times" in run:
        t = run["times"]
        if isinstance(t, dict):
            steps = int(t.get("steps", 100))
            if steps < 1 or float(t["t_max"]) <= 0:
                raise ConfigError("run.times needs t_max > 0 and steps >= 1")
            times = np.linspace(0.0, float(t["t_max"]), steps + 1)
        else:
            times = np.asarray(t, dtype=float)
        if times.size == 0 or times[0] != 0 or np.any(np.diff(times) < 0):
            raise ConfigError("run.times must be ascending and start at 0")

    sweep = None
    if "sweep" in run:
        s = run["sweep"]
        if isinstance(s, dict):
            num = int(s.get("num", 0))
            sweep = np.linspace(float(s["start"]), float(s["stop"]), max(num, 0))
        else:
            sweep = np.asarray(s, dtype=float).ravel()
        if sweep.size == 0:
            raise ConfigError("run.sweep is empty")

    tolerances = dict(DEFAULT_TOLERANCES)
    for key, val in (run.get("tolerances") or {}).items():
        if key not in DEFAULT_TOLERANCES:
            raise ConfigError(f"unknown tolerance {key!r}")
        tolerances[key] = float(val)

    return Scenario(
        name=name,
        kind=kind,
        hbar=hbar,
        c=c,
        modes=modes,
        box=box,
        process=process,
        dielectric=dielectric,
        pump_amplitude=pump,
        truncations=truncs,
        state_spec=state,
        times=times,
        sweep=sweep,
        dense_threshold=int(run.get("dense_threshold", 4096)),
        truncation_threshold=float(run.get("truncation_threshold", 1e-6)),
        tolerances=tolerances,
        source=source,
        digest=digest,
        chi_correction=chi_correction,
        raw=doc,
    )


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML ({exc})") from exc
    try:
        return parse_scenario(doc, path, hashlib.sha256(text).hexdigest())
    except NLQError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def shipped_scenarios() -> list[Path]:
    return sorted((Path(__file__).parent / "scenarios").glob("*.yaml"))
