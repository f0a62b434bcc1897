"""Analytic regime boundaries and (δ, γ) phase-diagram sweeps.

For the equal-hopping two-band ring with defect bond δ and gain/loss γ the
three analytic lines are

* γ_c1 = |δ − t₁| — first appearance of complex bulk eigenvalues,
* γ_a  = √(δ² − t₁²) (only for δ ≥ t₁) — every bulk eigenvalue complex,
* γ_c2 = δ + t₁ — bulk eigenvalues real again beyond this line; only the
  defect-pinned pair stays complex.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dense import REAL_THRESHOLD, Spectrum, eig
from .models import DoubleChain, build_hamiltonian

PT_UNBROKEN = "pt_unbroken"
PT_BROKEN = "pt_broken"
PT_RESTORATION = "pt_restoration"


@dataclass(frozen=True)
class RegimeBoundaries:
    gamma_c1: float
    gamma_a: Optional[float]
    gamma_c2: float


@dataclass(frozen=True)
class PhasePoint:
    delta: float
    gamma: float
    n_im: int
    n_bound: int
    regime: str
    error: str = ""


def regime_boundaries(t1: float, delta: float) -> RegimeBoundaries:
    gamma_a = math.sqrt(delta ** 2 - t1 ** 2) if delta >= t1 else None
    return RegimeBoundaries(abs(delta - t1), gamma_a, delta + t1)


def _bound_pair_mask(evals: np.ndarray, h_norm: float, real_tol: float) -> np.ndarray:
    """Complex eigenvalues that are purely imaginary (the defect-bound pair)."""
    is_complex = np.abs(evals.imag) > real_tol * max(1.0, h_norm)
    return is_complex & (np.abs(evals.real) <= 1e-6)


def classify_regime(spectrum: Spectrum, boundaries: RegimeBoundaries,
                    gamma: float, real_tol: float = REAL_THRESHOLD) -> PhasePoint:
    """Empirical regime label from the complex-eigenvalue census.

    Restoration means the only complex eigenvalues left are the purely
    imaginary defect-bound pair while γ exceeds γ_c2.  The label is assigned
    from the spectrum alone; the analytic boundaries are carried along for
    cross-checking by the caller.
    """
    evals = spectrum.eigenvalues
    n_im = spectrum.n_imaginary(real_tol)
    bound_mask = _bound_pair_mask(evals, spectrum.h_norm, real_tol)
    n_bound = int(bound_mask.sum())
    if n_im == 0:
        regime = PT_UNBROKEN
    elif n_im == n_bound and gamma > boundaries.gamma_c2:
        regime = PT_RESTORATION
    else:
        regime = PT_BROKEN
    return PhasePoint(math.nan, gamma, n_im, n_bound, regime)


def sweep(t1: float, t2: float, delta_range, gamma_range, n_cells: int,
          m: Optional[int] = None, real_tol: float = REAL_THRESHOLD) -> list:
    """Phase points over a (δ, γ) grid, row-major in δ then γ.

    ``delta_range`` and ``gamma_range`` are iterables of grid values.  A
    failed eigensolve is recorded in the point's ``error`` field instead of
    aborting the sweep.
    """
    if m is None:
        m = n_cells // 2 + 1
    points = []
    for delta in delta_range:
        bounds = regime_boundaries(t1, delta)
        for gamma in gamma_range:
            try:
                spec = DoubleChain(t1, t2, float(delta), float(gamma), n_cells, m)
                spectrum = eig(build_hamiltonian(spec))
                point = classify_regime(spectrum, bounds, float(gamma), real_tol)
                points.append(PhasePoint(float(delta), float(gamma), point.n_im,
                                         point.n_bound, point.regime))
            except Exception as exc:  # noqa: BLE001 — per-node fault isolation
                points.append(PhasePoint(float(delta), float(gamma), -1, -1,
                                         "", error=str(exc)))
    return points
