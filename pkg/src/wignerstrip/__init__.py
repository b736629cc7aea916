"""Phase-space numerics for quantum devices on an interval.

Core objects: uniform grids carrying hbar, wave functions, phase-space fields;
Wigner/cross-Wigner transforms with machine-exact discrete identities; the
star-product boundary machinery for confined states; profile admissibility and
realization; harmonic transport; and the closest-Wigner spectral approximation.
"""

from .approx import (ClosestPureResult, CoefficientMatrix, SpectralDecomposition,
                     choose_truncation, closest_pure, coefficients, hermite_state,
                     monotonicity_probe, positive_part)
from .dynamics import (TimeProfile, consistency_check, harmonic_flow,
                       initial_from_profile, moyal_rhs, profile_from_initial, rk4_evolve)
from .errors import (ConstructionError, DomainError, GridMismatchError,
                     InsufficientBasisError, NearResonanceError, NonlocalityError,
                     ReconstructionError, ResolutionError)
from .grid import (Grid1D, MixedState, PhaseGrid, PhaseSpaceField, WaveFunction,
                   field_integral, fourier_transform, integrate_1d)
from .profiles import (CompatibilityVerdict, Profile, ProfileReport,
                       check_two_point_compatibility, extract_profile,
                       gaussian_profile_bound, realize_profile, validate_profile)
from .projection import (PositivityWitness, assemble_bulk, positivity_witness,
                         project_strip)
from .schrod1d import (energy_scan, smoothed_operator_ground_energy,
                       solve_boundary_potential, solve_reference_box)
from .starcalc import (BoundaryPotentialSpec, boundary_term_B1, half_strip_field,
                       kinetic_star, lambda_epsilon, potential_kernel,
                       smoothed_boundary_symbol, stargenvalue_residual)
from .states import (box_eigenstate, box_energy, box_wigner_analytic,
                     box_wigner_at_critical_momentum, gaussian_state, harmonic_wigner)
from .wigner import (cross_wigner, coherent_positivity_probe, marginals, mixed_wigner,
                     moyal_overlap, support_and_bound_report, wigner_property_checks,
                     wigner_transform)

__version__ = "0.1.0"
