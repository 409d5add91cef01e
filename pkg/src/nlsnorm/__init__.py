"""Numerics for normalized solutions of weakly coupled Schrodinger systems.

Radial ground states of -ΔU + U = U^p, the linearized response constant α,
the weighted eigenvalue problem behind non-degeneracy, synchronized states of
the cubic system and the leading-order mass asymptotics.
"""

from .radial import (GroundState, GroundStateError, RadialGrid, RadialProfile,
                     critical_exponent, integrate_ivp, ode_residual, radial_quadrature,
                     shoot_ground_state, surface_area)
from .linearized import (AlphaPoint, LinearizedProblem, ResonanceError, SweepFailure,
                         closed_form_z, compute_alpha, solve_linearized_affine, solve_z0,
                         sweep_alpha, write_sweep)
from .spectrum import SpectralQuery, merged_spectrum, sector_eigenvalues
from .synchronized import (CouplingMatrix, NondegeneracyReport, SpectrumPolicy,
                           SynchronizedState, Verdict, check_nondegeneracy, solve_sigma)
from .concentration import (GlobalPotential, PotentialModel, build_global_potential,
                            compute_Xi, compute_upsilon, find_critical_point,
                            predict_critical, predict_noncritical, predict_tau_critical,
                            solve_correction_Z)

__version__ = "0.1.0"
