"""Eigenstate analysis: construction from θ roots, weight ratios, localization
lengths, classification, mobility edges, and cross-size profile collapse.

Conventions
-----------
The weight ratio χ is the summed |ψ|² over the sites left of the defect
divided by the sum over the sites right of it, walking around the ring; the
defect sites themselves (and, when the remaining count is odd, the antipodal
site) are excluded so the two halves have equal length.

Localization lengths are least-squares slopes of log-amplitude versus site
distance from the defect on the heavier side.  For the two-band models the
fit uses per-cell 2-norms (invariant under the cell-wise unitary relating the
two pictures) because the raw sublattice amplitudes alternate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import secular
from .dense import REAL_THRESHOLD, Spectrum, eig
from .errors import (DefectiveAtEP, InsufficientSites, NotInKernel, SizeMismatch,
                     ZeroDenominator)
from .models import (DOUBLE_CHAIN_BASIS, SITE_BASIS, SSH_BASIS, DoubleChain,
                     HamiltonianMatrix, ImpurityChain, ModelSpec, SshLocal,
                     build_hamiltonian, impurity_site_indices, similarity_s)

EXTENDED = "extended"
SFL = "sfl"
BOUND = "bound"
UNCLASSIFIED = "unclassified"


@dataclass(frozen=True)
class BoundaryMatrix:
    entries: np.ndarray  # 2x2 complex
    model_tag: str


@dataclass(frozen=True)
class EigenState:
    energy: complex
    amplitudes: np.ndarray  # max-abs normalized
    basis_tag: str
    classification: str = UNCLASSIFIED
    chi: float = math.nan
    xi: float = math.nan
    residual: float = math.nan


def boundary_matrix(theta: complex, energy: complex, spec: ModelSpec) -> BoundaryMatrix:
    """2×2 solvability matrix whose kernel carries the (c₁, c₂) coefficients."""
    if isinstance(spec, (DoubleChain, SshLocal)):
        t1, t2, n, m = spec.t1, spec.t2, spec.n_cells, spec.m
        delta, gamma = spec.delta, spec.gamma
        zs = [np.exp(1j * theta), np.exp(-1j * theta)]
        phi_b = [energy / (t2 + t1 * z) for z in zs]
        hb = np.array([
            [(t1 - (delta - gamma) * z ** n) * 1.0 for z in zs],
            [(t1 * zs[i] ** n - (delta + gamma)) * zs[i] * phi_b[i] for i in range(2)],
        ], dtype=complex)
        return BoundaryMatrix(hb, "two_band")
    if isinstance(spec, ImpurityChain):
        t, gamma, length = spec.t, spec.gamma, spec.length
        zs = [np.exp(1j * theta), np.exp(-1j * theta)]
        hb = np.array([
            [1.0 - z ** length for z in zs],
            [t * z * (1.0 - z ** length) + 1.0j * gamma * z ** length for z in zs],
        ], dtype=complex)
        return BoundaryMatrix(hb, "impurity")
    raise NotInKernel(f"no boundary matrix for model {type(spec).__name__}")


def construct_wavefunction(root: secular.ThetaRoot, spec: ModelSpec) -> EigenState:
    """Assemble the eigenstate for a θ root from the boundary-matrix kernel.

    The superposition coefficients are the singular direction of the 2×2
    boundary matrix.  Amplitudes are indexed from the defect cell/site with
    ring wrap; for the double-chain picture the two-band assembly is rotated
    back by the inverse cell-wise similarity.
    """
    theta = root.theta
    if isinstance(spec, (DoubleChain, SshLocal)):
        e_plus, e_minus = secular.energies_from_theta(root, spec.t1, spec.t2)
        energy = e_plus if root.branch_sign >= 0 else e_minus
    elif isinstance(spec, ImpurityChain):
        energy = 2.0 * spec.t * np.cos(theta)
    else:
        raise NotInKernel(f"construction unavailable for model {type(spec).__name__}")

    hb = boundary_matrix(theta, energy, spec).entries
    _, svals, vh = np.linalg.svd(hb)
    scale = max(svals[0], 1e-300)
    if svals[1] / scale > 1e-6:
        raise NotInKernel(f"boundary matrix is nonsingular at θ={theta} (ratio {svals[1] / scale:.2e})")
    if svals[0] < 1e-8 * np.max(np.abs(hb) + 1e-300):
        raise DefectiveAtEP(f"boundary matrix vanishes at θ={theta}; coalescent root")
    c = vh[-1].conj()
    zs = [np.exp(1j * theta), np.exp(-1j * theta)]

    if isinstance(spec, ImpurityChain):
        length, m = spec.length, spec.m
        psi = np.zeros(length, dtype=complex)
        for n in range(1, length + 1):
            power = length - m + n if n <= m else n - m
            psi[n - 1] = sum(c[i] * zs[i] ** power for i in range(2))
        basis = SITE_BASIS
    else:
        t1, t2, n_cells, m = spec.t1, spec.t2, spec.n_cells, spec.m
        phi_b = [energy / (t2 + t1 * z) for z in zs]
        psi = np.zeros(2 * n_cells, dtype=complex)
        for n in range(1, n_cells + 1):
            pow_a = n_cells - m + n if n <= m else n - m
            pow_b = n_cells - m + 1 + n if n < m else n - m + 1
            psi[2 * (n - 1)] = sum(c[i] * zs[i] ** pow_a for i in range(2))
            psi[2 * (n - 1) + 1] = sum(c[i] * zs[i] ** pow_b * phi_b[i] for i in range(2))
        basis = SSH_BASIS
        if isinstance(spec, DoubleChain):
            s = similarity_s(n_cells).matrix
            psi = np.conj(s.T) @ psi
            basis = DOUBLE_CHAIN_BASIS

    peak = np.argmax(np.abs(psi))
    psi = psi / psi[peak]
    psi = psi / np.max(np.abs(psi))
    h = build_hamiltonian(spec)
    h_norm = np.max(np.abs(h.entries).sum(axis=1))
    residual = float(np.max(np.abs(h.entries @ psi - energy * psi)) / h_norm)
    return EigenState(complex(energy), psi, basis, residual=residual)


def _ring_halves(spec: ModelSpec, dim: int):
    """0-based index lists for the left/right halves around the defect."""
    imp = impurity_site_indices(spec)
    if len(imp) == 2:
        exclude = set(imp)
        left_start, right_start = min(imp) - 1, max(imp) + 1
    else:
        exclude = set(imp)
        if (dim - 1) % 2:
            exclude.add((imp[0] + dim // 2) % dim)
        left_start, right_start = imp[0] - 1, imp[0] + 1
    half = (dim - len(exclude)) // 2
    left = [(left_start - k) % dim for k in range(half)]
    right = [(right_start + k) % dim for k in range(half)]
    return left, right


def chi(state, spec: ModelSpec) -> float:
    """Left-over-right weight ratio around the ring (defect sites excluded)."""
    amps = state.amplitudes if isinstance(state, EigenState) else np.asarray(state)
    dim = len(amps)
    if dim < 4:
        raise ZeroDenominator("ring too small for a weight ratio")
    left, right = _ring_halves(spec, dim)
    weight = np.abs(amps) ** 2
    denom = weight[right].sum()
    if denom == 0:
        if weight[left].sum() == 0:
            raise ZeroDenominator("state carries no weight off the defect")
        return math.inf
    return float(weight[left].sum() / denom)


def _two_band_cell_norms(amps: np.ndarray) -> np.ndarray:
    return np.sqrt(np.abs(amps[0::2]) ** 2 + np.abs(amps[1::2]) ** 2)


def fit_localization_length(state, spec: ModelSpec) -> float:
    """Exponential decay length from the heavier side of the defect.

    Returns ``inf`` when the fitted slope is below 1/(10·dim) — a flat
    (extended) profile.  Distances are measured in lattice sites; for the
    two-band models the fit runs over per-cell norms (2 sites per cell).
    """
    amps = state.amplitudes if isinstance(state, EigenState) else np.asarray(state)
    dim = len(amps)
    if dim < 12:
        raise InsufficientSites(f"need at least 12 sites, got {dim}")
    if isinstance(spec, (DoubleChain, SshLocal)):
        cells = _two_band_cell_norms(amps)
        n = spec.n_cells
        half = (n - 1) // 2
        m0 = spec.m - 1
        left = [(m0 - 1 - k) % n for k in range(half)]
        right = [(m0 + 1 + k) % n for k in range(half)]
        heavier = left if (cells[left] ** 2).sum() >= (cells[right] ** 2).sum() else right
        dist = 2.0 * np.arange(1, half + 1)
        window = slice(1, half - 1)  # drop the cells flanking defect and antipode
        logs = np.log(np.clip(cells[heavier], 1e-300, None))
    else:
        length = len(amps)
        half = (length - 1) // 2
        m0 = spec.m - 1
        left = [(m0 - 1 - k) % length for k in range(half)]
        right = [(m0 + 1 + k) % length for k in range(half)]
        mags = np.abs(amps)
        heavier = left if (mags[left] ** 2).sum() >= (mags[right] ** 2).sum() else right
        dist = np.arange(1, half + 1, dtype=float)
        window = slice(2, half - 2)  # drop 2 sites at the defect and 2 at the antipode
        logs = np.log(np.clip(mags[heavier], 1e-300, None))
    slope, _ = np.polyfit(dist[window], logs[window], 1)
    if abs(slope) < 1.0 / (10.0 * dim):
        return math.inf
    return float(1.0 / abs(slope))


def peak_localization_length(amplitudes, floor: float = 1e-10) -> float:
    """Decay length fitted symmetrically around the profile peak.

    Intended for localized states that are pinned by the background potential
    rather than the defect; amplitudes below ``floor`` (times the max) are
    left out of the fit.
    """
    amps = np.abs(np.asarray(amplitudes))
    amps = amps / amps.max()
    length = len(amps)
    peak = int(np.argmax(amps))
    half = (length - 1) // 2
    dist, logs = [], []
    for sgn in (1, -1):
        for k in range(2, half - 1):
            idx = (peak + sgn * k) % length
            if amps[idx] > floor:
                dist.append(k)
                logs.append(math.log(amps[idx]))
    slope, _ = np.polyfit(dist, logs, 1)
    if abs(slope) < 1.0 / (10.0 * length):
        return math.inf
    return float(1.0 / abs(slope))


def classify(state: EigenState, spec: ModelSpec,
             companion: Optional[EigenState] = None,
             real_tol: float = REAL_THRESHOLD,
             chi_band: float = 0.1,
             ratio_tol: float = 0.1) -> str:
    """Extended / SFL / bound classification.

    A real-energy state with balanced weight is extended.  With a companion
    state from a doubled system, a size-independent ξ marks a bound state and
    a size-proportional ξ marks an SFL state.  Without a companion a
    single-size heuristic is used: ξ < dim/4 suggests bound, larger finite ξ
    suggests SFL.
    """
    is_real = abs(state.energy.imag) <= real_tol * max(1.0, abs(state.energy))
    if is_real and math.isfinite(state.chi) and abs(state.chi - 1.0) <= chi_band:
        return EXTENDED
    xi = state.xi
    if companion is not None:
        xi_c = companion.xi
        if math.isfinite(xi) and math.isfinite(xi_c):
            if abs(xi_c - xi) / xi <= ratio_tol:
                return BOUND
            dim = len(state.amplitudes)
            dim_c = len(companion.amplitudes)
            per, per_c = xi / dim, xi_c / dim_c
            if abs(per_c - per) / per <= ratio_tol:
                return SFL
        return UNCLASSIFIED
    if math.isfinite(xi):
        return BOUND if xi < len(state.amplitudes) / 4.0 else SFL
    return SFL if not is_real else UNCLASSIFIED


def analyze_spectrum(spec: ModelSpec, spectrum: Optional[Spectrum] = None) -> list:
    """Dense-route eigenstates of a model with χ, ξ, and heuristic classes."""
    if spectrum is None:
        spectrum = eig(build_hamiltonian(spec))
    h = build_hamiltonian(spec)
    basis = h.basis_tag
    out = []
    for k in range(spectrum.dim):
        amps = spectrum.eigenvectors[:, k]
        state = EigenState(complex(spectrum.eigenvalues[k]), amps, basis,
                           residual=float(spectrum.residuals[k]))
        state = replace(state, chi=chi(state, spec))
        try:
            state = replace(state, xi=fit_localization_length(state, spec))
        except InsufficientSites:
            pass
        state = replace(state, classification=classify(state, spec))
        out.append(state)
    return out


def mobility_edges(states) -> list:
    """Real energies where the spectrum jumps between extended and SFL states.

    States are walked in order of Re(E); an edge is recorded at the midpoint
    of every consecutive pair whose classifications differ between extended
    and SFL.  The classification already folds in the χ criterion (balanced
    weight for extended states); at accessible sizes χ itself crosses over
    smoothly while the classification switch is sharp, so the jump is
    detected on the latter.  Bound states are left out of the scan: their χ
    reflects pinning at the defect, not transport character, and they
    interleave the bulk bands.
    """
    bulk = [s for s in states if s.classification != BOUND]
    bulk.sort(key=lambda s: s.energy.real)
    edges = []
    for a, b in zip(bulk, bulk[1:]):
        if {a.classification, b.classification} == {EXTENDED, SFL}:
            edges.append(0.5 * (a.energy.real + b.energy.real))
    return edges


def collapse_error(profiles, n_grid: int = 64, exclusion: float = 0.05) -> float:
    """Max pairwise L∞ distance of rescaled log-profiles across sizes.

    Each (size, amplitudes, impurity_pos) profile is max-abs normalized and
    mapped to the rescaled ring coordinate u = (x − x_imp)/size ∈ [−1/2, 1/2),
    then linearly interpolated onto a common u-grid; points with |u| below
    ``exclusion`` are ignored.
    """
    if len(profiles) < 2:
        raise SizeMismatch("need profiles from at least two sizes")
    u_grid = -0.5 + (np.arange(n_grid) + 0.5) / n_grid
    mask = np.abs(u_grid) >= exclusion
    curves = []
    for size, amps, imp_pos in profiles:
        amps = np.abs(np.asarray(amps))
        if len(amps) != size:
            raise SizeMismatch(f"profile length {len(amps)} != size {size}")
        x = np.arange(1, size + 1)
        u = ((x - imp_pos + size / 2.0) % size - size / 2.0) / size
        logs = np.log10(np.clip(amps / amps.max(), 1e-300, None))
        order = np.argsort(u)
        u_ext = np.concatenate([u[order] - 1.0, u[order], u[order] + 1.0])
        y_ext = np.tile(logs[order], 3)
        curves.append(np.interp(u_grid, u_ext, y_ext))
    worst = 0.0
    for i in range(len(curves)):
        for j in range(i + 1, len(curves)):
            worst = max(worst, float(np.max(np.abs(curves[i][mask] - curves[j][mask]))))
    return worst


def select_largest_im(spectrum: Spectrum) -> int:
    """Index of the largest-Im-E state; ties broken by largest Re E."""
    im = spectrum.eigenvalues.imag
    top = im.max()
    candidates = [k for k in range(spectrum.dim) if im[k] >= top - 1e-9 * max(1.0, abs(top))]
    return max(candidates, key=lambda k: spectrum.eigenvalues[k].real)
