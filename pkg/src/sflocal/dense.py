"""Dense eigendecomposition with residual validation and spectrum matching.

This is the numerical oracle: every analytic result in the package is checked
against the spectra produced here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import LengthMismatch
from .models import HamiltonianMatrix

#: Classification threshold for "purely real eigenvalue", relative to the
#: matrix infinity norm (scale-free complex parts sit orders of magnitude
#: above this; genuinely real eigenvalues at solver noise sit far below).
REAL_THRESHOLD = 1e-8

#: Residual above which an eigenpair is flagged defective.
DEFECT_RESIDUAL = 1e-9


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray   # shape (dim,)
    eigenvectors: np.ndarray  # shape (dim, dim), columns, max-abs normalized
    residuals: np.ndarray     # shape (dim,)
    defective: np.ndarray     # shape (dim,), bool
    h_norm: float             # infinity norm of the source matrix

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    def real_mask(self, tol: float = REAL_THRESHOLD) -> np.ndarray:
        """Boolean mask of eigenvalues classified as purely real."""
        return np.abs(self.eigenvalues.imag) <= tol * max(1.0, self.h_norm)

    def n_imaginary(self, tol: float = REAL_THRESHOLD) -> int:
        """Number of eigenvalues with a resolved imaginary part."""
        return int(np.sum(~self.real_mask(tol)))


def _as_matrix(h) -> np.ndarray:
    return h.entries if isinstance(h, HamiltonianMatrix) else np.asarray(h, dtype=complex)


def eig(h) -> Spectrum:
    """Full eigendecomposition, deterministic ordering, validated residuals.

    Eigenvalues are sorted lexicographically by (Re, Im).  Each eigenvector is
    scaled so its max-abs component is 1 with the phase rotated to make that
    component real positive.
    """
    mat = _as_matrix(h)
    dim = mat.shape[0]
    h_norm = float(np.max(np.abs(mat).sum(axis=1))) if dim else 0.0
    evals, evecs = np.linalg.eig(mat)
    order = np.lexsort((evals.imag, evals.real))
    evals = evals[order]
    evecs = evecs[:, order]
    # phase-fix and normalize
    for k in range(dim):
        v = evecs[:, k]
        peak = np.argmax(np.abs(v))
        v = v / v[peak]
        evecs[:, k] = v / np.max(np.abs(v))
    resid = np.array([
        np.max(np.abs(mat @ evecs[:, k] - evals[k] * evecs[:, k])) / max(h_norm, 1e-300)
        for k in range(dim)
    ])
    # A numerically repeated eigenvalue whose residual cannot be driven down,
    # or whose eigenvectors collapse onto each other, indicates a defective
    # (Jordan) block; flag rather than fail.
    defective = resid > DEFECT_RESIDUAL
    scale = max(h_norm, 1.0)
    norms = np.linalg.norm(evecs, axis=0)
    for i in range(dim):
        for j in range(i + 1, dim):
            if abs(evals[i] - evals[j]) > 1e-8 * scale:
                continue
            overlap = abs(np.vdot(evecs[:, i], evecs[:, j])) / (norms[i] * norms[j])
            if overlap > 1.0 - 1e-8:
                defective[i] = defective[j] = True
    return Spectrum(evals, evecs, resid, defective, h_norm)


def _as_values(s) -> np.ndarray:
    if isinstance(s, Spectrum):
        return s.eigenvalues
    return np.asarray(s, dtype=complex)


def match_spectra(a, b) -> float:
    """Greedy nearest-neighbor matching distance between two spectra.

    Values from ``a`` are visited in lexicographic (Re, Im) order; each is
    paired with the nearest still-unused value of ``b``.  Returns the max
    pairing distance.
    """
    va, vb = _as_values(a), _as_values(b)
    if len(va) != len(vb):
        raise LengthMismatch(f"spectrum lengths differ: {len(va)} vs {len(vb)}")
    order = np.lexsort((va.imag, va.real))
    remaining = list(vb)
    worst = 0.0
    for idx in order:
        z = va[idx]
        j = min(range(len(remaining)), key=lambda k: abs(remaining[k] - z))
        worst = max(worst, abs(remaining[j] - z))
        remaining.pop(j)
    return worst
