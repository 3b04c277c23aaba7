"""Command-line front end: ``nlq {phase-match,build,evolve,verify,diagonalize}``.

Exit codes: 0 success, 2 config error, 3 physics/validation error, 4 numeric failure.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
import warnings
from contextlib import nullcontext
from typing import Any

import numpy as np

from . import __version__
from .bogoliubov import (
    bogoliubov_diagonalize,
    extract_quadratic,
    symplectic_residual,
    transformed_energy_matrix,
)
from .config import DEFAULT_TOLERANCES, Scenario, load_scenario, shipped_scenarios
from .dynamics import (
    TruncationWarning,
    conserved_report,
    evolve,
    heisenberg_witness,
    mode_observables,
    norm_drift,
)
from .errors import ConfigError, NLQError
from .fock import hermiticity_residual, max_abs
from .hamiltonians import (
    HamiltonianBundle,
    build_fwm,
    build_linear_inhomogeneous,
    build_parametric,
    classical_pump_reduce,
)
from .modes import check_mode_orthonormality, mismatch_factor

FMT = "%.17g"


def _num(x: float) -> str:
    return FMT % x


def _cjson(z: complex) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def build_bundle(scn: Scenario) -> HamiltonianBundle:
    if scn.kind is None:
        raise ConfigError(f"scenario {scn.name!r} has no process block")
    basis = scn.basis
    if scn.kind == "parametric3":
        return build_parametric(scn.process, basis, scn.hbar)
    if scn.kind == "fwm4":
        return build_fwm(scn.process, basis, scn.hbar)
    if scn.kind == "classical_pump":
        return classical_pump_reduce(scn.process, scn.pump_amplitude, basis, scn.hbar)
    return build_linear_inhomogeneous(scn.modes, scn.dielectric, basis, scn.hbar, scn.c, scn.box)


# --------------------------------------------------------------------------- #
# commands; each returns (text, exit_code)


def cmd_phase_match(scn: Scenario, fmt: str = "csv") -> tuple[str, int]:
    if scn.sweep is None or scn.sweep.size == 0:
        raise ConfigError("phase-match needs a non-empty run.sweep")
    rows = []
    for x in scn.sweep:
        f = mismatch_factor(float(x), 1.0)
        rows.append((float(x), f.real, f.imag, abs(f) ** 2))
    if fmt == "json":
        cols = ("delta_k_L", "re", "im", "magnitude_sq")
        return json.dumps({c: [r[i] for r in rows] for i, c in enumerate(cols)}), 0
    out = io.StringIO()
    out.write(f"# nlq phase-match config_sha256={scn.digest}\n")
    out.write("delta_k_L,re,im,magnitude_sq\n")
    for r in rows:
        out.write(",".join(_num(v) for v in r) + "\n")
    return out.getvalue(), 0


def build_summary(scn: Scenario) -> dict[str, Any]:
    bundle = build_bundle(scn)
    tol = scn.tolerances
    h = bundle.h.entries
    scale = max_abs(h)
    herm = hermiticity_residual(h)
    split = max_abs(h - (bundle.free_part.entries + bundle.interaction_part.entries))
    conserved = conserved_report(bundle)
    ok = herm <= tol["hermiticity"] * max(scale, 1e-300) and split == 0.0
    ok = ok and all(r <= tol["commutant"] * max(scale, 1.0) for r in conserved.values())
    summary = {
        "schema_version": 1,
        "name": scn.name,
        "kind": bundle.kind,
        "config_sha256": scn.digest,
        "units": {"hbar": scn.hbar, "c": scn.c},
        "dimension": bundle.basis.dim,
        "truncations": list(bundle.basis.truncations),
        "couplings": {k: (_cjson(v) if isinstance(v, complex) else v) for k, v in bundle.couplings.as_dict().items()},
        "hermiticity_residual": herm,
        "max_abs_h": scale,
        "interaction_norm": max_abs(bundle.interaction_part.entries),
        "split_residual": split,
        "conserved_residuals": conserved,
        "pass": bool(ok),
    }
    if "kappa" in bundle.terms:
        summary["couplings"]["kappa"] = _cjson(bundle.terms["kappa"])
    return summary


def cmd_build(scn: Scenario, fmt: str = "json") -> tuple[str, int]:
    summary = build_summary(scn)
    return json.dumps(summary, indent=2, sort_keys=True), 0 if summary["pass"] else 3


def run_evolution(scn: Scenario):
    if scn.times is None:
        raise ConfigError("evolve needs run.times")
    bundle = build_bundle(scn)
    psi0 = scn.initial_state()
    obs = mode_observables(bundle.basis)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        traj = evolve(
            bundle.h,
            psi0,
            scn.times,
            obs,
            hbar=scn.hbar,
            dense_threshold=scn.dense_threshold,
            truncation_threshold=scn.truncation_threshold,
        )
    return bundle, traj


def cmd_evolve(scn: Scenario, fmt: str = "csv") -> tuple[str, int, list[str]]:
    bundle, traj = run_evolution(scn)
    n = bundle.basis.mode_count
    cols: dict[str, np.ndarray] = {"t": traj.times}
    for j in range(n):
        cols[f"N_{j}"] = traj.observables[f"N_{j}"].real
    for j in range(n):
        a = traj.observables[f"a_{j}"]
        cols[f"a_{j}_re"] = a.real
        cols[f"a_{j}_im"] = a.imag
    cols["energy"] = traj.observables["energy"].real
    cols["norm"] = traj.norms
    if fmt == "json":
        doc = {"name": scn.name, "config_sha256": scn.digest, "warnings": traj.warnings}
        doc["columns"] = {k: v.tolist() for k, v in cols.items()}
        return json.dumps(doc), 0, traj.warnings
    out = io.StringIO()
    out.write(f"# nlq evolve name={scn.name} config_sha256={scn.digest}\n")
    out.write(f"# units hbar={_num(scn.hbar)} c={_num(scn.c)}\n")
    for w in traj.warnings:
        out.write(f"# warning: {w}\n")
    out.write(",".join(cols) + "\n")
    for i in range(traj.times.size):
        out.write(",".join(_num(v[i]) for v in cols.values()) + "\n")
    return out.getvalue(), 0, traj.warnings


def _check(name, residual, threshold, **extra) -> dict:
    return {"name": name, "residual": float(residual), "threshold": float(threshold),
            "pass": bool(residual <= threshold), **extra}


def _skipped(name, reason) -> dict:
    return {"name": name, "residual": None, "threshold": None, "pass": True, "skipped": reason}


def diagonalize_summary(scn: Scenario) -> dict[str, Any]:
    if scn.kind != "linear":
        raise ConfigError("diagonalize needs a linear scenario")
    bundle = build_bundle(scn)
    q = extract_quadratic(bundle)
    freqs, T = bogoliubov_diagonalize(q)
    n = q.n_modes
    m = transformed_energy_matrix(q, T)
    target = np.diag(np.concatenate([freqs, freqs]))
    out = {
        "name": scn.name,
        "config_sha256": scn.digest,
        "frequencies": freqs.tolist(),
        "free_frequencies": sorted(bundle.omegas),
        "symplectic_residual": symplectic_residual(T),
        "anomalous_residual": float(np.abs(m - target).max()),
        "n_modes": n,
    }
    if scn.dielectric.is_homogeneous and _paired(scn.modes):
        ratio = np.asarray(freqs) * np.sqrt(scn.dielectric.epsilon) / (np.sort(bundle.omegas) * scn.hbar)
        out["dispersion_residual"] = float(np.abs(ratio - 1).max())
    return out


def _paired(modes) -> bool:
    return all(any(np.allclose(-m.k, o.k, atol=1e-12) for o in modes) for m in modes)


def verify_checks(scn: Scenario) -> list[dict]:
    tol = scn.tolerances
    checks: list[dict] = []
    if scn.chi_correction is not None:
        checks.append({"name": "chi_symmetrization", "residual": scn.chi_correction, "threshold": None,
                       "pass": True, "note": "max |raw - symmetrized| applied on load"})

    if scn.modes:
        transv = max(abs(m.k @ m.pol) for m in scn.modes)
        checks.append(_check("transversality", transv, 1e-12))
        if scn.box is not None and all(scn.box.reciprocal_index(m.k) is not None for m in scn.modes):
            rep = check_mode_orthonormality(scn.modes, scn.box, tol["orthonormality"])
            checks.append(_check("orthonormality", rep.max_deviation, tol["orthonormality"]))
        else:
            checks.append(_skipped("orthonormality", "modes are off the box lattice"))

    bundle = build_bundle(scn)
    scale = max(max_abs(bundle.h.entries), 1e-300)
    checks.append(_check("hermiticity", hermiticity_residual(bundle.h.entries), tol["hermiticity"] * scale))
    split = max_abs(bundle.h.entries - (bundle.free_part.entries + bundle.interaction_part.entries))
    checks.append(_check("free_plus_interaction", split, 0.0))
    for name, res in conserved_report(bundle).items():
        checks.append(_check(f"commutant[{name}]", res, tol["commutant"] * max(scale, 1.0)))
    if bundle.kind in ("parametric3", "fwm4"):
        for j in range(bundle.basis.mode_count):
            checks.append(_check(f"heisenberg[a_{j}]", heisenberg_witness(bundle, j), tol["heisenberg"]))

    if scn.kind == "linear":
        diag = diagonalize_summary(scn)
        checks.append(_check("bogoliubov_symplectic", diag["symplectic_residual"], tol["symplectic"]))
        checks.append(_check("bogoliubov_residual", diag["anomalous_residual"], tol["bogoliubov_residual"]))
        if "dispersion_residual" in diag:
            checks.append(_check("bogoliubov_dispersion", diag["dispersion_residual"], tol["dispersion"]))
        else:
            checks.append(_skipped("bogoliubov_dispersion", "needs a homogeneous medium and a +-k closed mode set"))

    if scn.times is not None:
        _, traj = run_evolution(scn)
        e = traj.observables["energy"].real
        checks.append(_check("unitarity", norm_drift(traj), tol["norm"]))
        checks.append(_check("energy_conservation", float(np.abs(e - e[0]).max()), tol["energy"] * abs(e[0]) + 1e-12))
    return checks


def cmd_verify(scn: Scenario, fmt: str = "json") -> tuple[str, int]:
    checks = verify_checks(scn)
    ok = all(c["pass"] for c in checks)
    if fmt == "csv":
        out = io.StringIO()
        out.write(f"# nlq verify name={scn.name} config_sha256={scn.digest}\n")
        out.write("name,residual,threshold,pass\n")
        for c in checks:
            res = "" if c["residual"] is None else _num(c["residual"])
            thr = "" if c["threshold"] is None else _num(c["threshold"])
            out.write(f"{c['name']},{res},{thr},{int(c['pass'])}\n")
        return out.getvalue(), 0 if ok else 3
    return json.dumps({"name": scn.name, "config_sha256": scn.digest, "pass": ok, "checks": checks}, indent=2), 0 if ok else 3


def cmd_diagonalize(scn: Scenario, fmt: str = "json") -> tuple[str, int]:
    out = diagonalize_summary(scn)
    if fmt == "csv":
        buf = io.StringIO()
        buf.write(f"# nlq diagonalize name={scn.name} config_sha256={scn.digest}\n")
        buf.write("index,frequency,free_frequency\n")
        for i, (f, w) in enumerate(zip(out["frequencies"], out["free_frequencies"])):
            buf.write(f"{i},{_num(f)},{_num(w)}\n")
        return buf.getvalue(), 0
    return json.dumps(out, indent=2), 0


# --------------------------------------------------------------------------- #
# entry point


def _apply_overrides(scn: Scenario, overrides: list[str]) -> None:
    for item in overrides:
        for pair in item.split(","):
            if not pair.strip():
                continue
            key, sep, val = pair.partition("=")
            key = key.strip()
            if not sep or key not in DEFAULT_TOLERANCES:
                raise ConfigError(f"bad tolerance override {pair!r}; keys: {', '.join(DEFAULT_TOLERANCES)}")
            try:
                scn.tolerances[key] = float(val)
            except ValueError as exc:
                raise ConfigError(f"bad tolerance value in {pair!r}") from exc


def _thread_limit():
    n = os.environ.get("NLQ_THREADS")
    if not n:
        return nullcontext()
    from threadpoolctl import threadpool_limits

    return threadpool_limits(limits=int(n))


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nlq", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"nlq {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name, default_fmt in (("phase-match", "csv"), ("build", "json"), ("evolve", "csv"),
                              ("verify", "json"), ("diagonalize", "json")):
        s = sub.add_parser(name)
        s.add_argument("--config", required=name != "verify",
                       help="scenario YAML" + ("; omit to verify every shipped scenario" if name == "verify" else ""))
        s.add_argument("--out", help="output file (default stdout)")
        s.add_argument("--format", choices=("csv", "json"), default=default_fmt)
        s.add_argument("--tolerance-overrides", action="append", default=[], metavar="KEY=VAL")
    return p


def _run(args) -> int:
    commands = {
        "phase-match": cmd_phase_match,
        "build": cmd_build,
        "evolve": cmd_evolve,
        "verify": cmd_verify,
        "diagonalize": cmd_diagonalize,
    }
    paths = [args.config] if args.config else [str(p) for p in shipped_scenarios()]
    texts, code = [], 0
    for path in paths:
        scn = load_scenario(path)
        _apply_overrides(scn, args.tolerance_overrides)
        result = commands[args.command](scn, args.format)
        text, rc = result[0], result[1]
        if len(result) > 2:
            for w in result[2]:
                print(f"warning: {w}", file=sys.stderr)
        texts.append(text)
        code = max(code, rc)
    text = texts[0] if len(texts) == 1 else (
        "[\n" + ",\n".join(texts) + "\n]" if args.format == "json" else "".join(texts)
    )
    if not text.endswith("\n"):
        text += "\n"
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        with _thread_limit():
            return _run(args)
    except NLQError as exc:
        err = {"error": exc.kind, "message": str(exc), "exit_code": exc.exit_code}
        print(json.dumps(err))
        return exc.exit_code
    except (np.linalg.LinAlgError, FloatingPointError, ArithmeticError) as exc:
        print(json.dumps({"error": "numeric-failure", "message": str(exc), "exit_code": 4}))
        return 4


if __name__ == "__main__":
    sys.exit(main())
