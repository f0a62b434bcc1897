"""Command-line interface.

Subcommands: ``spectrum``, ``phase-diagram``, ``scaling``, ``states``,
``verify``.  Model parameters come from a JSON config file (either a bare
model document or ``{"model": {...}, "method": ..., "tolerances": {...}}``).
Outputs are plot-ready CSV (floats at 17 significant digits) or JSON.

Exit codes: 0 success, 2 configuration error, 3 solver failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import phases, secular, states
from .dense import REAL_THRESHOLD, eig, match_spectra
from .errors import SflocalError
from .models import (AaImaginary, AaNonreciprocal, DoubleChain, ImpurityChain,
                     ModelSpec, SshLocal, build_hamiltonian, spec_from_json)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3


def _fmt(x: float) -> str:
    if math.isinf(x):
        return "inf"
    if math.isnan(x):
        return "nan"
    return f"{x:.17g}"


def _load_config(path: str):
    """Returns (spec, method, tolerances) from a JSON config file."""
    doc = json.loads(Path(path).read_text())
    method = "dense"
    tolerances = {}
    if isinstance(doc.get("model"), dict):
        method = doc.get("method", method)
        tolerances = doc.get("tolerances", {})
        model_doc = doc["model"]
    else:
        model_doc = doc
    return spec_from_json(model_doc), method, tolerances


def _write_csv(path: Path, header: list, rows: list) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(str(c) for c in row))
    path.write_text("\n".join(lines) + "\n")


def _spectrum_rows(spec: ModelSpec, method: str, tol_real: float) -> list:
    if method == "dense":
        analyzed = states.analyze_spectrum(spec)
    else:  # secular
        analyzed = []
        if isinstance(spec, (DoubleChain, SshLocal)):
            params = secular.SecularParams.from_physical(spec.t1, spec.t2, spec.delta,
                                                         spec.gamma, spec.n_cells)
            roots = secular.dc_all_roots(params)
            signs = (1, -1)
        elif isinstance(spec, ImpurityChain):
            roots = secular.impurity_all_roots(spec.t, spec.gamma, spec.length)
            signs = (1,)
        else:
            raise SflocalError("secular route unavailable for quasiperiodic models")
        for root in roots:
            for sign in signs:
                st = states.construct_wavefunction(
                    dataclasses.replace(root, branch_sign=sign), spec)
                st = dataclasses.replace(st, chi=states.chi(st, spec))
                st = dataclasses.replace(st, xi=states.fit_localization_length(st, spec))
                st = dataclasses.replace(st, classification=states.classify(
                    st, spec, real_tol=tol_real))
                analyzed.append(st)
        analyzed.sort(key=lambda s: (s.energy.real, s.energy.imag))
    rows = []
    for idx, st in enumerate(analyzed):
        rows.append([idx, _fmt(st.energy.real), _fmt(st.energy.imag), st.classification,
                     _fmt(st.chi), _fmt(st.xi), _fmt(st.residual), method])
    return rows


def cmd_spectrum(args) -> int:
    spec, method, _ = _load_config(args.config)
    method = args.method or method
    tol_real = args.tol_real if args.tol_real is not None else REAL_THRESHOLD
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if method in ("secular", "both") and isinstance(spec, (AaNonreciprocal, AaImaginary)):
        print("error: secular route is not defined for quasiperiodic models", file=sys.stderr)
        return EXIT_CONFIG
    try:
        primary = "dense" if method in ("dense", "both") else "secular"
        rows = _spectrum_rows(spec, primary, tol_real)
        header = ["index", "re_e", "im_e", "class", "chi", "xi", "residual", "method"]
        if args.format == "json":
            doc = [dict(zip(header, row)) for row in rows]
            (out / "spectrum.json").write_text(json.dumps(doc, indent=1) + "\n")
        else:
            _write_csv(out / "spectrum.csv", header, rows)
        if method == "both":
            dense_e = eig(build_hamiltonian(spec)).eigenvalues
            sec_rows = _spectrum_rows(spec, "secular", tol_real)
            sec_e = np.array([complex(float(r[1]), float(r[2])) for r in sec_rows])
            distance = match_spectra(dense_e, sec_e)
            (out / "match.json").write_text(
                json.dumps({"match_distance": distance}) + "\n")
    except SflocalError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


def _parse_range(text: str) -> np.ndarray:
    try:
        lo, hi, num = text.split(":")
        return np.linspace(float(lo), float(hi), int(num))
    except ValueError as exc:
        raise SflocalError(f"bad range {text!r}; expected MIN:MAX:STEPS") from exc


def cmd_phase_diagram(args) -> int:
    spec, _, _ = _load_config(args.config)
    if not isinstance(spec, (DoubleChain, SshLocal)):
        print("error: phase diagrams are defined for the two-band models", file=sys.stderr)
        return EXIT_CONFIG
    try:
        deltas = _parse_range(args.delta_range)
        gammas = _parse_range(args.gamma_range)
    except SflocalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    points = phases.sweep(spec.t1, spec.t2, deltas, gammas, spec.n_cells, spec.m)
    rows = []
    n_failed = 0
    for p in points:
        bounds = phases.regime_boundaries(spec.t1, p.delta)
        gamma_a = _fmt(bounds.gamma_a) if bounds.gamma_a is not None else "nan"
        rows.append([_fmt(p.delta), _fmt(p.gamma), p.n_im, p.n_bound, p.regime,
                     _fmt(bounds.gamma_c1), gamma_a, _fmt(bounds.gamma_c2), p.error])
        n_failed += bool(p.error)
    _write_csv(out / "phase.csv",
               ["delta", "gamma", "n_im", "n_bound", "regime",
                "gamma_c1", "gamma_a", "gamma_c2", "error"], rows)
    if n_failed > 0.01 * len(points):
        print(f"error: {n_failed}/{len(points)} grid nodes failed", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


def _resize(spec: ModelSpec, size: int) -> ModelSpec:
    """Rebuild the model at a new total dimension, defect re-centred."""
    if isinstance(spec, (DoubleChain, SshLocal)):
        if size % 2:
            raise SflocalError("two-band sizes must be even")
        n = size // 2
        return dataclasses.replace(spec, n_cells=n, m=n // 2 + 1)
    return dataclasses.replace(spec, length=size, m=size // 2 + 1)


def cmd_scaling(args) -> int:
    spec, _, _ = _load_config(args.config)
    try:
        sizes = sorted(int(s) for s in args.sizes.split(","))
    except ValueError:
        print(f"error: bad sizes list {args.sizes!r}", file=sys.stderr)
        return EXIT_CONFIG
    if len(sizes) < 2:
        print("error: need at least two sizes", file=sys.stderr)
        return EXIT_CONFIG
    selector = args.selector
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    profiles = []
    try:
        for size in sizes:
            sized = _resize(spec, size)
            spectrum = eig(build_hamiltonian(sized))
            if selector == "largest-im":
                picks = [states.select_largest_im(spectrum)]
            elif selector == "all":
                picks = list(range(spectrum.dim))
            elif selector.startswith("index:"):
                k = int(selector.split(":", 1)[1])
                if not 0 <= k < spectrum.dim:
                    raise SflocalError(f"state index {k} absent at size {size}")
                picks = [k]
            else:
                print(f"error: unknown selector {selector!r}", file=sys.stderr)
                return EXIT_CONFIG
            xis, chis = [], []
            for k in picks:
                st = states.EigenState(complex(spectrum.eigenvalues[k]),
                                       spectrum.eigenvectors[:, k], "any")
                xis.append(states.fit_localization_length(st, sized))
                chis.append(states.chi(st, sized))
            xi = float(np.median(xis))
            chi_val = float(np.median(chis))
            if len(picks) == 1:
                amps = np.abs(spectrum.eigenvectors[:, picks[0]])
            else:
                amps = np.sqrt(np.sum(np.abs(spectrum.eigenvectors) ** 2, axis=1))
            imp = (2 * sized.m - 1) if isinstance(sized, (DoubleChain, SshLocal)) else sized.m
            profiles.append((size, amps, imp))
            collapse = (states.collapse_error([profiles[0], profiles[-1]])
                        if len(profiles) > 1 else 0.0)
            rows.append([size, _fmt(xi), _fmt(xi / size), _fmt(chi_val), _fmt(collapse)])
    except SflocalError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    _write_csv(out / "scaling.csv",
               ["size", "xi", "xi_over_size", "chi", "collapse_error"], rows)
    return EXIT_OK


def cmd_states(args) -> int:
    spec, _, _ = _load_config(args.config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        analyzed = states.analyze_spectrum(spec)
    except SflocalError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    rows = []
    for idx, st in enumerate(analyzed):
        for site, amp in enumerate(st.amplitudes, start=1):
            rows.append([idx, _fmt(st.energy.real), _fmt(st.energy.imag),
                         st.classification, site, _fmt(amp.real), _fmt(amp.imag)])
    _write_csv(out / "states.csv",
               ["state_index", "re_e", "im_e", "class", "site", "re_psi", "im_psi"], rows)
    return EXIT_OK


def cmd_verify(args) -> int:
    from . import verify
    return EXIT_OK if verify.run_all() else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sflocal",
        description="Spectra and phase diagrams of rings with one local non-Hermitian defect")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="JSON model/config file")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--format", choices=["csv", "json"], default="csv")
        p.add_argument("--tol-real", type=float, default=None,
                       help="relative |Im E| threshold for reality classification")

    p = sub.add_parser("spectrum", help="eigenvalues and per-state diagnostics")
    common(p)
    p.add_argument("--method", choices=["dense", "secular", "both"], default=None)
    p.set_defaults(fn=cmd_spectrum)

    p = sub.add_parser("phase-diagram", help="(δ, γ) sweep of complex-eigenvalue counts")
    common(p)
    p.add_argument("--delta-range", required=True, help="MIN:MAX:STEPS")
    p.add_argument("--gamma-range", required=True, help="MIN:MAX:STEPS")
    p.set_defaults(fn=cmd_phase_diagram)

    p = sub.add_parser("scaling", help="cross-size localization and collapse study")
    common(p)
    p.add_argument("--sizes", required=True, help="comma-separated total dimensions")
    p.add_argument("--selector", default="largest-im",
                   help="largest-im | all | index:K")
    p.set_defaults(fn=cmd_scaling)

    p = sub.add_parser("states", help="full eigenvector dump")
    common(p)
    p.set_defaults(fn=cmd_states)

    p = sub.add_parser("verify", help="run the acceptance suite")
    p.set_defaults(fn=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except SflocalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
