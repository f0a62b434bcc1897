"""Model definitions and Hamiltonian builders.

Five ring models with a single local defect:

* ``DoubleChain`` — two coupled chains with balanced gain/loss ``±iγ`` on one
  rung; PT-symmetric for every γ.
* ``SshLocal`` — the similarity-equivalent two-band chain in which the same
  defect appears as one non-reciprocal intracell bond ``δ±γ``.
* ``ImpurityChain`` — uniform ring with a single imaginary on-site potential
  ``iγ``.
* ``AaNonreciprocal`` / ``AaImaginary`` — the quasiperiodic variants: cosine
  on-site potential ``2λ cos(2παn)`` plus the non-reciprocal bond or the
  imaginary on-site defect.

Site ordering for the two-band models is ``x = 2n-1`` for sublattice A and
``x = 2n`` for sublattice B of cell ``n`` (1-based).  Chain variants use the
1-based site index directly.  The ring wrap-around bond is always present and
carries the plain intercell structure, including when the defect sits at the
seam cell ``m = N``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields
from typing import Union

import numpy as np

from .errors import DimensionMismatch, InvalidModel, UnsupportedRelation

#: Inverse golden ratio used as the default quasiperiodic frequency.
ALPHA = (math.sqrt(5.0) - 1.0) / 2.0

DOUBLE_CHAIN_BASIS = "double_chain"
SSH_BASIS = "ssh"
SITE_BASIS = "site"


@dataclass(frozen=True)
class DoubleChain:
    t1: float
    t2: float
    delta: float
    gamma: float
    n_cells: int
    m: int


@dataclass(frozen=True)
class SshLocal:
    t1: float
    t2: float
    delta: float
    gamma: float
    n_cells: int
    m: int


@dataclass(frozen=True)
class ImpurityChain:
    t: float
    gamma: float
    length: int
    m: int


@dataclass(frozen=True)
class AaNonreciprocal:
    t: float
    lam: float
    delta: float
    gamma: float
    length: int
    m: int
    alpha: float = ALPHA


@dataclass(frozen=True)
class AaImaginary:
    t: float
    lam: float
    gamma: float
    length: int
    m: int
    alpha: float = ALPHA


ModelSpec = Union[DoubleChain, SshLocal, ImpurityChain, AaNonreciprocal, AaImaginary]

_MODEL_NAMES = {
    DoubleChain: "double_chain",
    SshLocal: "ssh_local",
    ImpurityChain: "impurity_chain",
    AaNonreciprocal: "aa_nonreciprocal",
    AaImaginary: "aa_imaginary",
}
_NAME_TO_MODEL = {v: k for k, v in _MODEL_NAMES.items()}
# JSON field name for the quasiperiodic amplitude is "lambda"; the Python
# attribute is "lam" because "lambda" is a keyword.
_JSON_FIELD = {"lam": "lambda"}
_ATTR_FIELD = {v: k for k, v in _JSON_FIELD.items()}


def validate(spec: ModelSpec) -> None:
    """Raise InvalidModel if the spec violates its invariants."""
    if isinstance(spec, (DoubleChain, SshLocal)):
        if spec.t1 == 0:
            raise InvalidModel("t1 must be nonzero")
        if spec.n_cells < 2:
            raise InvalidModel("n_cells must be at least 2")
        if not 1 <= spec.m <= spec.n_cells:
            raise InvalidModel(f"impurity cell m={spec.m} out of range 1..{spec.n_cells}")
    elif isinstance(spec, (ImpurityChain, AaNonreciprocal, AaImaginary)):
        if spec.t == 0:
            raise InvalidModel("t must be nonzero")
        if spec.length < 3:
            raise InvalidModel("length must be at least 3")
        if not 1 <= spec.m <= spec.length:
            raise InvalidModel(f"impurity site m={spec.m} out of range 1..{spec.length}")
    else:
        raise InvalidModel(f"unknown model spec {spec!r}")


def spec_to_json(spec: ModelSpec) -> str:
    """Canonical JSON encoding of a model spec."""
    doc = {"model": _MODEL_NAMES[type(spec)]}
    for f in fields(spec):
        doc[_JSON_FIELD.get(f.name, f.name)] = getattr(spec, f.name)
    return json.dumps(doc, sort_keys=True)


def spec_from_json(text_or_doc) -> ModelSpec:
    """Decode a model spec from JSON text or an already-parsed mapping."""
    doc = json.loads(text_or_doc) if isinstance(text_or_doc, (str, bytes)) else dict(text_or_doc)
    try:
        cls = _NAME_TO_MODEL[doc.pop("model")]
    except KeyError as exc:
        raise InvalidModel(f"unknown or missing model name: {exc}") from exc
    kwargs = {}
    for key, value in doc.items():
        kwargs[_ATTR_FIELD.get(key, key)] = value
    try:
        spec = cls(**kwargs)
    except TypeError as exc:
        raise InvalidModel(str(exc)) from exc
    validate(spec)
    return spec


@dataclass(frozen=True)
class HamiltonianMatrix:
    entries: np.ndarray
    dim: int
    basis_tag: str


@dataclass(frozen=True)
class SymmetryOperator:
    kind: str  # parity_p | sublattice_gamma | sublattice_gamma_bar | pseudo_herm_eta | similarity_s
    matrix: np.ndarray


def _cell_block_diag(block: np.ndarray, n_cells: int) -> np.ndarray:
    out = np.zeros((2 * n_cells, 2 * n_cells), dtype=complex)
    for n in range(n_cells):
        out[2 * n:2 * n + 2, 2 * n:2 * n + 2] = block
    return out


_SX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_SY = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
_SZ = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
# exp(i pi/4 sigma_x): the cell-wise unitary relating the two two-band pictures
_S_CELL = (1.0 / math.sqrt(2.0)) * np.array([[1.0, 1.0j], [1.0j, 1.0]], dtype=complex)


def parity_p(n_cells: int) -> SymmetryOperator:
    return SymmetryOperator("parity_p", _cell_block_diag(_SX, n_cells))


def sublattice_gamma(n_cells: int) -> SymmetryOperator:
    return SymmetryOperator("sublattice_gamma", _cell_block_diag(_SY, n_cells))


def sublattice_gamma_bar(n_cells: int) -> SymmetryOperator:
    return SymmetryOperator("sublattice_gamma_bar", _cell_block_diag(_SZ, n_cells))


def similarity_s(n_cells: int) -> SymmetryOperator:
    return SymmetryOperator("similarity_s", _cell_block_diag(_S_CELL, n_cells))


def pseudo_herm_eta(n_cells: int, m: int) -> SymmetryOperator:
    """Block anti-diagonal permutation realizing eta H eta^-1 = H^dagger.

    The two exchange blocks have sizes set by the defect position: the ring
    splits into the arc through the defect and its complement, reflected
    independently.
    """
    n = n_cells
    if m <= (n + 1) / 2:
        l1, l2 = 2 * (2 * m - 1), 2 * (n - 2 * m + 1)
    else:
        l1, l2 = 2 * (2 * m - n - 1), 2 * (2 * (n - m) + 1)
    mat = np.zeros((2 * n, 2 * n), dtype=complex)
    mat[:l1, :l1] = np.fliplr(np.eye(l1))
    mat[l1:, l1:] = np.fliplr(np.eye(l2))
    return SymmetryOperator("pseudo_herm_eta", mat)


def build_hamiltonian(spec: ModelSpec) -> HamiltonianMatrix:
    """Dense Hamiltonian matrix for any model variant."""
    validate(spec)
    if isinstance(spec, DoubleChain):
        return _build_double_chain(spec)
    if isinstance(spec, SshLocal):
        return _build_ssh_local(spec)
    if isinstance(spec, ImpurityChain):
        h = _uniform_aa_ring(spec.t, 0.0, ALPHA, spec.length)
        h[spec.m - 1, spec.m - 1] += 1.0j * spec.gamma
        return HamiltonianMatrix(h, spec.length, SITE_BASIS)
    if isinstance(spec, AaNonreciprocal):
        h = _uniform_aa_ring(spec.t, spec.lam, spec.alpha, spec.length)
        wrap = spec.m % spec.length  # 0-based index of site m+1
        h[spec.m - 1, wrap] += spec.delta + spec.gamma - spec.t
        h[wrap, spec.m - 1] += spec.delta - spec.gamma - spec.t
        return HamiltonianMatrix(h, spec.length, SITE_BASIS)
    if isinstance(spec, AaImaginary):
        h = _uniform_aa_ring(spec.t, spec.lam, spec.alpha, spec.length)
        h[spec.m - 1, spec.m - 1] += 1.0j * spec.gamma
        return HamiltonianMatrix(h, spec.length, SITE_BASIS)
    raise InvalidModel(f"unknown model spec {spec!r}")


def _uniform_aa_ring(t: float, lam: float, alpha: float, length: int) -> np.ndarray:
    h = np.zeros((length, length), dtype=complex)
    for n in range(1, length + 1):
        nxt = n % length + 1
        h[n - 1, nxt - 1] += t
        h[nxt - 1, n - 1] += t
        h[n - 1, n - 1] += 2.0 * lam * math.cos(2.0 * math.pi * alpha * n)
    return h


def _build_double_chain(spec: DoubleChain) -> HamiltonianMatrix:
    n_cells, m = spec.n_cells, spec.m
    t1, t2, delta, gamma = spec.t1, spec.t2, spec.delta, spec.gamma
    dim = 2 * n_cells
    h = np.zeros((dim, dim), dtype=complex)
    a = lambda n: 2 * ((n - 1) % n_cells)
    b = lambda n: 2 * ((n - 1) % n_cells) + 1
    for n in range(1, n_cells + 1):
        tin = delta if n == m else t1
        h[a(n), b(n)] += tin
        h[b(n), a(n)] += tin
        nn = n + 1
        # cross intercell bonds t2/2
        h[b(nn), a(n)] += t2 / 2.0
        h[a(n), b(nn)] += t2 / 2.0
        h[a(nn), b(n)] += t2 / 2.0
        h[b(n), a(nn)] += t2 / 2.0
        # imaginary intra-sublattice intercell bonds
        h[a(nn), a(n)] += 1.0j * t2 / 2.0
        h[a(n), a(nn)] += -1.0j * t2 / 2.0
        h[b(nn), b(n)] += -1.0j * t2 / 2.0
        h[b(n), b(nn)] += 1.0j * t2 / 2.0
    h[a(m), a(m)] += 1.0j * gamma
    h[b(m), b(m)] += -1.0j * gamma
    return HamiltonianMatrix(h, dim, DOUBLE_CHAIN_BASIS)


def _build_ssh_local(spec: SshLocal) -> HamiltonianMatrix:
    n_cells, m = spec.n_cells, spec.m
    t1, t2, delta, gamma = spec.t1, spec.t2, spec.delta, spec.gamma
    dim = 2 * n_cells
    h = np.zeros((dim, dim), dtype=complex)
    a = lambda n: 2 * ((n - 1) % n_cells)
    b = lambda n: 2 * ((n - 1) % n_cells) + 1
    for n in range(1, n_cells + 1):
        if n == m:
            h[a(n), b(n)] += delta + gamma
            h[b(n), a(n)] += delta - gamma
        else:
            h[a(n), b(n)] += t1
            h[b(n), a(n)] += t1
        nn = n + 1
        h[a(nn), b(n)] += t2
        h[b(n), a(nn)] += t2
    return HamiltonianMatrix(h, dim, SSH_BASIS)


def similarity_conjugate(h: HamiltonianMatrix, s: SymmetryOperator) -> HamiltonianMatrix:
    """Return S H S^-1 with the two-band basis tag flipped."""
    if s.kind != "similarity_s":
        raise UnsupportedRelation("similarity_conjugate requires the similarity operator")
    if s.matrix.shape[0] != h.dim:
        raise DimensionMismatch(f"operator dim {s.matrix.shape[0]} != matrix dim {h.dim}")
    out = s.matrix @ h.entries @ np.conj(s.matrix.T)  # S is unitary
    flipped = {DOUBLE_CHAIN_BASIS: SSH_BASIS, SSH_BASIS: DOUBLE_CHAIN_BASIS}.get(h.basis_tag, h.basis_tag)
    return HamiltonianMatrix(out, h.dim, flipped)


def symmetry_deviation(h: HamiltonianMatrix, op: SymmetryOperator) -> float:
    """Max-norm defect of the symmetry relation selected by the operator kind.

    parity_p: PT relation  P conj(H) P^-1 = H.
    sublattice_gamma / sublattice_gamma_bar: anticommutation  M H M^-1 = -H.
    pseudo_herm_eta: eta H eta^-1 = H^dagger.
    """
    if op.matrix.shape[0] != h.dim:
        raise DimensionMismatch(f"operator dim {op.matrix.shape[0]} != matrix dim {h.dim}")
    mat = op.matrix
    inv = np.conj(mat.T) if op.kind == "similarity_s" else np.linalg.inv(mat)
    if op.kind == "parity_p":
        return float(np.max(np.abs(mat @ np.conj(h.entries) @ inv - h.entries)))
    if op.kind in ("sublattice_gamma", "sublattice_gamma_bar"):
        return float(np.max(np.abs(mat @ h.entries @ inv + h.entries)))
    if op.kind == "pseudo_herm_eta":
        return float(np.max(np.abs(mat @ h.entries @ inv - np.conj(h.entries.T))))
    raise UnsupportedRelation(f"no defect relation defined for kind {op.kind!r}")


def impurity_site_indices(spec: ModelSpec) -> list:
    """0-based site indices occupied by the defect."""
    if isinstance(spec, (DoubleChain, SshLocal)):
        return [2 * (spec.m - 1), 2 * (spec.m - 1) + 1]
    return [spec.m - 1]
