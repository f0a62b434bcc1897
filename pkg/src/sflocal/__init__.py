"""Spectral numerics for 1D ring lattices with a single local non-Hermitian
defect: exact secular solutions, dense-diagonalization oracles, eigenstate
localization analysis, and PT phase diagrams."""

from .models import (ALPHA, AaImaginary, AaNonreciprocal, DoubleChain,
                     HamiltonianMatrix, ImpurityChain, SshLocal,
                     build_hamiltonian, parity_p, pseudo_herm_eta,
                     similarity_conjugate, similarity_s, spec_from_json,
                     spec_to_json, sublattice_gamma, sublattice_gamma_bar,
                     symmetry_deviation)
from .dense import Spectrum, eig, match_spectra
from .secular import (SecularParams, ThetaRoot, dc_all_roots, energies_from_theta,
                      gamma_a_closed_form, impurity_all_roots,
                      impurity_secular_residual, scan_real_roots_dc,
                      secular_residual_dc)
from .states import (EigenState, chi, classify, collapse_error,
                     construct_wavefunction, fit_localization_length,
                     mobility_edges, peak_localization_length)
from .phases import (PhasePoint, RegimeBoundaries, classify_regime,
                     regime_boundaries, sweep)

__version__ = "0.1.0"
