"""Wavefunction construction, weight ratios, localization fits, collapse."""

import dataclasses
import math

import numpy as np
import pytest

from sflocal import (DoubleChain, ImpurityChain, SshLocal, build_hamiltonian,
                     eig)
from sflocal import secular, states
from sflocal.dense import Spectrum
from sflocal.errors import (InsufficientSites, NotInKernel, SizeMismatch,
                            ZeroDenominator)
from sflocal.secular import ODD_PARITY, ThetaRoot

GAMMA_A = math.sqrt(15.0)
MU = 4.0 + math.sqrt(15.0)


# ---------------------------------------------------------------- construction

def test_two_band_construction_residuals():
    spec = DoubleChain(1.0, 1.0, 4.0, 3.2, 20, 11)
    params = secular.SecularParams.from_physical(1.0, 1.0, 4.0, 3.2, 20)
    for root in secular.dc_all_roots(params):
        for sign in (1, -1):
            state = states.construct_wavefunction(
                dataclasses.replace(root, branch_sign=sign), spec)
            assert state.residual <= 1e-8


def test_impurity_construction_residuals():
    spec = ImpurityChain(1.0, 2.05, 40, 20)
    for root in secular.impurity_all_roots(1.0, 2.05, 40):
        state = states.construct_wavefunction(root, spec)
        assert state.residual <= 1e-8


def test_odd_parity_states_vanish_at_defect():
    spec = ImpurityChain(1.0, 1.7, 40, 20)
    for root in secular.impurity_all_roots(1.0, 1.7, 40):
        if root.family != ODD_PARITY:
            continue
        state = states.construct_wavefunction(root, spec)
        assert abs(state.amplitudes[19]) <= 1e-10


def test_closed_form_line_profile():
    # on the closed-form line every amplitude profile is a pure power law in
    # mu = delta + sqrt(delta^2 - 1), with the kink at the defect bond
    n, m = 20, 11
    spec = SshLocal(1.0, 1.0, 4.0, GAMMA_A, n, m)
    x_ma = 2 * m - 1
    x = np.arange(1, 2 * n + 1)
    expected = np.where(x <= x_ma, MU ** ((x - x_ma) / (2.0 * n) + 1.0),
                        MU ** ((x - x_ma) / (2.0 * n)))
    expected = expected / expected.max()
    root = secular.gamma_a_closed_form(1.0, 4.0, n)[3]
    state = states.construct_wavefunction(root, spec)
    amps = np.abs(state.amplitudes)
    assert np.max(np.abs(amps / amps.max() - expected)) <= 1e-6


def test_construct_rejects_non_root():
    spec = DoubleChain(1.0, 1.0, 4.0, 3.2, 20, 11)
    with pytest.raises(NotInKernel):
        states.construct_wavefunction(ThetaRoot(0.3 + 0.1j, "real_bulk", 0.0), spec)


# ------------------------------------------------------------------- chi / xi

def _signed_distance(length, m):
    x = np.arange(1, length + 1)
    return ((x - m + length / 2.0) % length) - length / 2.0


def test_chi_inverts_under_mirror():
    spec = ImpurityChain(1.0, 1.0, 40, 20)
    d = _signed_distance(40, 20)
    left_heavy = np.exp(-np.abs(d) / 5.0) * np.exp(-d / 9.0)
    right_heavy = np.exp(-np.abs(d) / 5.0) * np.exp(d / 9.0)
    c1 = states.chi(left_heavy, spec)
    c2 = states.chi(right_heavy, spec)
    assert c1 > 1.0 > c2
    assert c1 * c2 == pytest.approx(1.0, rel=1e-10)


def test_chi_balanced_when_symmetric():
    spec = ImpurityChain(1.0, 1.0, 40, 20)
    amps = np.exp(-np.abs(_signed_distance(40, 20)) / 5.0)
    assert states.chi(amps, spec) == pytest.approx(1.0, rel=1e-12)


def test_chi_error_paths():
    spec = ImpurityChain(1.0, 1.0, 40, 20)
    with pytest.raises(ZeroDenominator):
        states.chi(np.ones(2), ImpurityChain(1.0, 1.0, 4, 1))
    dead = np.zeros(40)
    dead[19] = 1.0  # all weight on the defect site itself
    with pytest.raises(ZeroDenominator):
        states.chi(dead, spec)


def test_unbroken_regime_bulk_extended():
    # real spectrum below the first threshold: every bulk state is extended;
    # the strong defect bond binds one symmetric pair outside the band
    spec = DoubleChain(1.0, 1.0, 4.0, 1.0, 20, 11)
    analyzed = states.analyze_spectrum(spec)
    bulk = [s for s in analyzed if abs(s.energy.real) <= 2.0]
    bond = [s for s in analyzed if abs(s.energy.real) > 2.0]
    assert len(bulk) == 38 and len(bond) == 2
    assert all(s.classification == states.EXTENDED for s in bulk)
    assert all(abs(s.chi - 1.0) <= 0.1 for s in bulk)
    assert all(s.classification == states.BOUND for s in bond)


def test_closed_form_line_chi_one_sided():
    spec = DoubleChain(1.0, 1.0, 4.0, GAMMA_A, 20, 11)
    spectrum = eig(build_hamiltonian(spec))
    analyzed = states.analyze_spectrum(spec, spectrum)
    cplx = [s for s, r in zip(analyzed, spectrum.real_mask()) if not r]
    assert len(cplx) == 38
    assert min(s.chi for s in cplx) > 1.5  # every state piles onto one side


def test_closed_form_line_xi():
    spec = SshLocal(1.0, 1.0, 4.0, GAMMA_A, 20, 11)
    root = secular.gamma_a_closed_form(1.0, 4.0, 20)[5]
    state = states.construct_wavefunction(root, spec)
    xi = states.fit_localization_length(state, spec)
    assert xi == pytest.approx(40.0 / math.log(MU), rel=0.02)


def test_bound_state_xi_size_independent():
    xis = []
    for length in [40, 80]:
        spec = ImpurityChain(1.0, 2.05, length, length // 2)
        spectrum = eig(build_hamiltonian(spec))
        k = states.select_largest_im(spectrum)
        xis.append(states.fit_localization_length(spectrum.eigenvectors[:, k], spec))
    assert abs(xis[1] - xis[0]) / xis[0] <= 0.1
    # decay length of the defect-pinned mode: 1/acosh(gamma/2t)
    assert xis[0] == pytest.approx(1.0 / math.acosh(2.05 / 2.0), rel=0.15)


def test_fit_requires_enough_sites():
    spec = ImpurityChain(1.0, 1.0, 8, 4)
    with pytest.raises(InsufficientSites):
        states.fit_localization_length(np.ones(8), spec)


def test_flat_profile_gives_infinite_xi():
    spec = ImpurityChain(1.0, 0.0, 40, 20)
    assert states.fit_localization_length(np.ones(40), spec) == math.inf


def test_peak_localization_length_synthetic():
    length = 60
    k = np.arange(length)
    d = np.abs(((k - 30 + length / 2.0) % length) - length / 2.0)
    xi = states.peak_localization_length(np.exp(-d / 7.0))
    assert xi == pytest.approx(7.0, rel=0.01)


# ------------------------------------------------------- classification et al

def test_classify_with_companion():
    base = states.EigenState(0.3j, np.ones(40), "site", chi=5.0, xi=4.5)
    stable = states.EigenState(0.3j, np.ones(80), "site", chi=5.0, xi=4.6)
    scaled = states.EigenState(0.3j, np.ones(80), "site", chi=5.0, xi=9.0)
    spec = ImpurityChain(1.0, 2.05, 40, 20)
    assert states.classify(base, spec, companion=stable) == states.BOUND
    assert states.classify(base, spec, companion=scaled) == states.SFL


def test_mobility_edges_symmetric_or_absent():
    spec = DoubleChain(1.0, 1.0, 4.0, 3.2, 40, 21)
    edges = sorted(states.mobility_edges(states.analyze_spectrum(spec)))
    assert edges and len(edges) % 2 == 0
    assert all(abs(a + b) <= 1e-6 for a, b in zip(edges, reversed(edges)))
    quiet = DoubleChain(1.0, 1.0, 4.0, 1.0, 20, 11)
    assert states.mobility_edges(states.analyze_spectrum(quiet)) == []


def test_collapse_error_closed_form_line():
    profiles = []
    for n in [20, 40]:
        m = n // 2 + 1
        spec = SshLocal(1.0, 1.0, 4.0, GAMMA_A, n, m)
        root = secular.gamma_a_closed_form(1.0, 4.0, n)[1]
        state = states.construct_wavefunction(root, spec)
        profiles.append((2 * n, np.abs(state.amplitudes), 2 * m - 1))
    assert states.collapse_error(profiles) <= 1e-6


def test_collapse_error_detects_fixed_width():
    profiles = []
    for length in [40, 80]:
        d = np.abs(_signed_distance(length, length // 2))
        profiles.append((length, np.exp(-d / 4.0), length // 2))
    assert states.collapse_error(profiles) > 0.3


def test_collapse_error_size_checks():
    with pytest.raises(SizeMismatch):
        states.collapse_error([(40, np.ones(40), 20)])
    with pytest.raises(SizeMismatch):
        states.collapse_error([(40, np.ones(40), 20), (80, np.ones(40), 40)])


def test_select_largest_im_tie_break():
    evals = np.array([1.0 + 1.0j, -1.0 + 1.0j, 0.0 + 0.0j])
    spectrum = Spectrum(evals, np.eye(3, dtype=complex), np.zeros(3),
                        np.zeros(3, dtype=bool), 1.0)
    assert states.select_largest_im(spectrum) == 0
