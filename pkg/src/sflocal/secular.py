"""Transcendental secular equations for the solvable ring models.

Two equations are handled:

* two-band ring with one defected intracell bond:
  ``sin((N+1)θ) + η₃ sin(Nθ) − η₂ sin((N−1)θ) − η₁ sin(θ) = 0``
* uniform ring with one imaginary on-site potential:
  ``sin(Lθ/2) · [2t sinθ sin(Lθ/2) + iγ cos(Lθ/2)] = 0``

Real roots are found by a bracketing scan; the complete complex root sets are
obtained by converting each equation (exactly) to a polynomial in
``z = e^{iθ}`` and taking companion-matrix roots, followed by a damped complex
Newton polish on the trigonometric form.  Residuals are reported relative to
the largest term magnitude so that exponentially large ``sin(Nθ)`` values for
complex θ do not mask genuinely converged roots.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import GridTooCoarse, InvalidRegime, RootCountMismatch

REAL_BULK = "real_bulk"
COMPLEX_SFL = "complex_sfl"
BOUND_STATE = "bound_state"
ODD_PARITY = "odd_parity"
GAMMA_A_LINE = "gamma_a_line"

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class SecularParams:
    eta1: float
    eta2: float
    eta3: float
    t1: float
    t2: float
    n_cells: int

    @classmethod
    def from_physical(cls, t1: float, t2: float, delta: float, gamma: float,
                      n_cells: int) -> "SecularParams":
        eta1 = 2.0 * delta / t1
        eta2 = (delta ** 2 - gamma ** 2) / t1 ** 2
        eta3 = (t1 ** 2 - delta ** 2 + gamma ** 2) / (t1 * t2)
        return cls(eta1, eta2, eta3, t1, t2, n_cells)


@dataclass(frozen=True)
class ThetaRoot:
    theta: complex
    family: str
    residual: float
    branch_sign: int = 1


def _canonical(theta: complex) -> complex:
    return complex(theta.real % _TWO_PI, theta.imag)


def secular_residual_dc(theta: complex, p: SecularParams) -> complex:
    n = p.n_cells
    return (cmath.sin((n + 1) * theta) + p.eta3 * cmath.sin(n * theta)
            - p.eta2 * cmath.sin((n - 1) * theta) - p.eta1 * cmath.sin(theta))


def secular_derivative_dc(theta: complex, p: SecularParams) -> complex:
    n = p.n_cells
    return ((n + 1) * cmath.cos((n + 1) * theta) + p.eta3 * n * cmath.cos(n * theta)
            - p.eta2 * (n - 1) * cmath.cos((n - 1) * theta) - p.eta1 * cmath.cos(theta))


def secular_scale_dc(theta: complex, p: SecularParams) -> float:
    """Largest term magnitude; normalizer for scale-relative residuals."""
    n = p.n_cells
    return max(abs(cmath.sin((n + 1) * theta)), abs(p.eta3 * cmath.sin(n * theta)),
               abs(p.eta2 * cmath.sin((n - 1) * theta)), abs(p.eta1 * cmath.sin(theta)), 1e-300)


def secular_residual_dc_reduced(theta: complex, p: SecularParams) -> complex:
    """Equal-hopping reduction; the full form equals 2 cos(θ/2) times this."""
    n = p.n_cells
    return (cmath.sin((n + 0.5) * theta) - p.eta1 * cmath.sin(theta / 2.0)
            - p.eta2 * cmath.sin((n - 0.5) * theta))


def _newton(f, fp, z0: complex, max_iter: int = 200, tol: float = 1e-13) -> complex:
    z = z0
    fz = f(z)
    for _ in range(max_iter):
        d = fp(z)
        if d == 0:
            break
        step = fz / d
        if abs(step) <= tol:
            z = z - step
            break
        # damp by halving while the residual fails to decrease
        factor = 1.0
        for _ in range(30):
            cand = z - factor * step
            fc = f(cand)
            if abs(fc) < abs(fz):
                z, fz = cand, fc
                break
            factor /= 2.0
        else:
            break
    return z


def scan_real_roots_dc(p: SecularParams, grid_points: int) -> list:
    """Real θ roots in (0, π) of the two-band secular equation.

    The trivial factor sin(θ) (roots at 0 and π for every parameter set) is
    divided out before bracketing, so only bulk roots are reported.
    """
    n = p.n_cells
    if grid_points < 8 * n:
        raise GridTooCoarse(f"need at least {8 * n} grid points to resolve sin({n}θ)")

    def deflated(theta: float) -> float:
        return secular_residual_dc(theta, p).real / math.sin(theta)

    grid = np.linspace(1e-9, math.pi - 1e-9, grid_points)
    values = np.array([deflated(t) for t in grid])
    roots = []
    signs = np.sign(values)
    for i in range(len(grid) - 1):
        if signs[i] != signs[i + 1] and signs[i] != 0:
            r = brentq(deflated, grid[i], grid[i + 1], xtol=1e-14)
            roots.append(r)
    roots.sort()
    for a, b in zip(roots, roots[1:]):
        if b - a < 1e-8:
            raise GridTooCoarse(f"refined roots collide near θ={a}")
    out = []
    for r in roots:
        resid = abs(secular_residual_dc(r, p)) / secular_scale_dc(r, p)
        out.append(ThetaRoot(complex(r), REAL_BULK, resid))
    return out


def dc_all_roots(p: SecularParams) -> list:
    """Complete θ root set (one per ±E pair) via the polynomial in z = e^{iθ}.

    The secular equation times (2i)·z^{N+1} is a palindromic polynomial of
    degree 2N+2 whose roots come in (z, 1/z) pairs plus the trivial z = ±1;
    after deflating z²−1, each pair yields one θ with Im θ ≤ 0.
    """
    n = p.n_cells
    coeffs = np.zeros(2 * n + 3)
    coeffs[0] = 1.0
    coeffs[1] = p.eta3
    coeffs[2] = -p.eta2
    coeffs[n] = -p.eta1
    coeffs[n + 2] = p.eta1
    coeffs[2 * n] = p.eta2
    coeffs[2 * n + 1] = -p.eta3
    coeffs[2 * n + 2] = -1.0
    quot, rem = np.polynomial.polynomial.polydiv(coeffs[::-1], np.array([-1.0, 0.0, 1.0]))
    if np.max(np.abs(rem)) > 1e-9 * np.max(np.abs(coeffs)):
        raise RootCountMismatch("z²−1 does not divide the secular polynomial")
    roots = np.roots(quot[::-1])
    thetas = _pair_roots(roots)
    if len(thetas) != n:
        raise RootCountMismatch(f"expected {n} θ roots, found {len(thetas)}")
    out = []
    for th in thetas:
        th = _newton(lambda z: secular_residual_dc(z, p) / secular_scale_dc(z, p),
                     lambda z: secular_derivative_dc(z, p) / secular_scale_dc(z, p), th)
        th = _canonical(th)
        resid = abs(secular_residual_dc(th, p)) / secular_scale_dc(th, p)
        out.append(ThetaRoot(th, _dc_family(th, n), resid))
    return out


def _pair_roots(roots: np.ndarray) -> list:
    """Collapse (z, 1/z) pairs, keeping the |z| ≥ 1 representative as θ."""
    rs = list(roots)
    used = [False] * len(rs)
    thetas = []
    for i, z in enumerate(rs):
        if used[i]:
            continue
        inv = 1.0 / z
        candidates = [k for k in range(len(rs)) if k != i and not used[k]]
        j = min(candidates, key=lambda k: abs(rs[k] - inv))
        if abs(rs[j] - inv) > 1e-6 * max(1.0, abs(inv)):
            raise RootCountMismatch(f"unpaired polynomial root z={z}")
        used[i] = used[j] = True
        rep = z if abs(z) >= abs(rs[j]) else rs[j]
        if abs(abs(rep) - 1.0) < 1e-10:
            th = cmath.log(rep).imag % _TWO_PI
            if th > math.pi:
                th = _TWO_PI - th
            thetas.append(complex(th))
        else:
            th = -1.0j * cmath.log(rep)
            thetas.append(_canonical(th))
    return thetas


def _dc_family(theta: complex, n_cells: int) -> str:
    if abs(theta.imag) <= 1e-10:
        return REAL_BULK
    off_axis = min(abs(theta.real), abs(theta.real - math.pi), abs(theta.real - _TWO_PI))
    if off_axis < 1e-6 and abs(theta.imag) * n_cells > 3.0:
        return BOUND_STATE
    if abs(theta.imag) * n_cells > 10.0:
        return BOUND_STATE
    return COMPLEX_SFL


def gamma_a_closed_form(t1: float, delta: float, n_cells: int) -> list:
    """All N roots on the special line γ² = δ² − t₁² (equal hoppings).

    θ_l = 2πl/N − i·log(μ)/N with μ = δ/t₁ + √((δ/t₁)² − 1), l = 0..N−1.
    """
    ratio = delta / t1
    if ratio < 1.0:
        raise InvalidRegime("closed-form line requires δ ≥ t₁")
    mu = ratio + math.sqrt(ratio ** 2 - 1.0)
    gamma = math.sqrt(delta ** 2 - t1 ** 2)
    p = SecularParams.from_physical(t1, t1, delta, gamma, n_cells)
    out = []
    for l in range(n_cells):
        th = complex(_TWO_PI * l / n_cells, -math.log(mu) / n_cells)
        resid = abs(secular_residual_dc(th, p)) / secular_scale_dc(th, p)
        out.append(ThetaRoot(th, GAMMA_A_LINE, resid))
    return out


def energies_from_theta(root, t1: float, t2: float):
    """±E energy pair for a θ root of the two-band ring.

    E² = 2 t₁t₂ cos θ + t₁² + t₂².  For equal hoppings the branch is taken as
    +2t cos(θ/2); otherwise the principal square root is used.
    """
    theta = root.theta if isinstance(root, ThetaRoot) else complex(root)
    if t1 == t2:
        e = 2.0 * t1 * cmath.cos(theta / 2.0)
    else:
        e = cmath.sqrt(2.0 * t1 * t2 * cmath.cos(theta) + t1 ** 2 + t2 ** 2)
    return e, -e


class ImpurityFactors:
    """Both factors of the single-impurity secular equation at one θ."""

    __slots__ = ("type1", "type2")

    def __init__(self, type1: complex, type2: complex):
        self.type1 = type1
        self.type2 = type2

    @property
    def product(self) -> complex:
        return self.type1 * self.type2


def impurity_secular_residual(theta: complex, t: float, gamma: float,
                              length: int) -> ImpurityFactors:
    half = length * theta / 2.0
    type1 = cmath.sin(half)
    type2 = 2.0 * t * cmath.sin(theta) * cmath.sin(half) + 1.0j * gamma * cmath.cos(half)
    return ImpurityFactors(type1, type2)


def _type2_scale(theta: complex, t: float, gamma: float, length: int) -> float:
    half = length * theta / 2.0
    return max(abs(2.0 * t * cmath.sin(theta) * cmath.sin(half)),
               abs(gamma * cmath.cos(half)), 1e-300)


def impurity_all_roots(t: float, gamma: float, length: int) -> list:
    """All L θ roots of the single-impurity ring (even L).

    L/2−1 odd-parity roots θ = 2πl/L (states with a node on the impurity,
    unaffected by γ) plus L/2+1 roots of the second factor, found from the
    equivalent degree-(L+2) polynomial in z = e^{iθ} and polished by Newton.
    When γ > 2|t| the second-factor root with the largest |Im θ| is the bound
    state; its |Im θ| is size-independent.
    """
    if t <= 0 or length < 4:
        raise RootCountMismatch("requires t > 0 and length ≥ 4")
    if length % 2:
        raise RootCountMismatch("odd ring lengths are not supported")
    out = [ThetaRoot(complex(_TWO_PI * l / length), ODD_PARITY, 0.0)
           for l in range(1, length // 2)]

    coeffs = np.zeros(length + 3, dtype=complex)
    coeffs[0] = -t
    coeffs[1] = 1.0j * gamma
    coeffs[2] = t
    coeffs[length] = t
    coeffs[length + 1] = 1.0j * gamma
    coeffs[length + 2] = -t
    thetas = _pair_roots(np.roots(coeffs))

    def f(th):
        return impurity_secular_residual(th, t, gamma, length).type2 / _type2_scale(th, t, gamma, length)

    def fp(th, h=1e-7):
        return (f(th + h) - f(th - h)) / (2.0 * h)

    polished = []
    for th in thetas:
        th = _canonical(_newton(f, fp, th))
        polished.append((th, abs(f(th))))
    bound_idx = -1
    if gamma > 2.0 * abs(t):
        bound_idx = max(range(len(polished)), key=lambda k: abs(polished[k][0].imag))
    for k, (th, resid) in enumerate(polished):
        family = BOUND_STATE if k == bound_idx else COMPLEX_SFL
        out.append(ThetaRoot(th, family, resid))
    if len(out) != length:
        raise RootCountMismatch(f"expected {length} roots, found {len(out)}")
    return out
