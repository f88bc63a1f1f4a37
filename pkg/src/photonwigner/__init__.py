"""Photon Wigner functions on continuous x discrete phase space."""
from .checks import SUITES, SuiteReport, run_suite
from .estimators import TriadTransformer, WignerTransformer
from .grid import (
    KernelK, boxtimes_oracle, boxtimes_table, get_kernel, grid_inverse, grid_tilde, grid_untilde,
    grid_weyl_op, star_grid, verify_table,
)
from .operators import DensityPair, KernelOperator, density_from_pure, density_properties
from .state import (
    KGrid, PhotonStateK, SpectralAmplitudes, bb_inner, bb_norm, build_state, gaussian_state,
    helicity_triad, synthesize_position,
)
from .tilde import TildeField, boxtimes_continuous, rho_from_tilde, tilde_rho
from .units import NATURAL, Units
from .wigner import (
    KernelP, PhaseSpaceField, SampleSpec, constraint_residual, evolution_residual, marginals,
    r_w_transform, wigner_general, wigner_k67, wigner_k69,
)

__version__ = "0.1.0"
