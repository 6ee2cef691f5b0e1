"""Curved Kepler-Coulomb and oscillator systems on Bertrand spaces.

Classical closed-orbit machinery, the coupling-constant duality between the
two metric families, and the radial quantum eigenproblem under three
quantization prescriptions.
"""

import os as _os

# honor BERTRAND_THREADS before numpy/scipy pull in a BLAS; explicit
# per-library settings in the environment still win
_threads = _os.environ.get("BERTRAND_THREADS")
if _threads:
    for _var in ("OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS",
                 "OMP_NUM_THREADS", "NUMEXPR_NUM_THREADS"):
        _os.environ.setdefault(_var, _threads)
del _os, _threads

from .catalog import describe, preset, preset_names, stackel_pairs
from .dynamics import (CircularOrbit, ClosureResult, OrbitResult,
                       RadialOrbitData, angular_momentum,
                       angular_momentum_sq, apoapsis_state, apsidal_angle,
                       bounded_orbit_grid, circular_orbit, closure_check,
                       effective_potential, equations_of_motion, hamiltonian,
                       integrate_orbit, measured_apsidal_angles,
                       radial_orbit_data, radial_period, turning_points)
from .errors import (BertrandError, ConvergenceFailureError,
                     DegenerateOrbitError, DomainViolationError,
                     EmptyDomainError, IllConditionedError,
                     InvalidOverrideError, LengthMismatchError,
                     NoBoundedOrbitError, NoCircularOrbitError,
                     NotClosedWithinCapError, ParseError,
                     QuadratureFailureError, SchemaError,
                     StepSizeUnderflowError, UnknownPresetError)
from .geometry import (BertrandSpace, RadialProfile, TypeIIParams,
                       TypeIParams, as_exponent, conformal_factor,
                       green_function, green_function_derivative,
                       intrinsic_potentials, lorentzian_time_coefficient,
                       scalar_curvature)
from .quantum import (DegeneracyCluster, QuantizationScheme,
                      RadialEigenproblem, RadialGrid, Spectrum,
                      SpectrumComparison, build_radial_operator,
                      compare_spectra, default_grid, degeneracy_pairs,
                      degeneracy_report, degeneracy_tolerance,
                      discretization_error, eigenfunction_gauge_deviation,
                      gauge_factor, gauge_transform_eigenfunction,
                      operator_gauge_defect, operator_gauge_residual,
                      solve_spectrum, spectrum_for)
from .stackel import (StackelDescriptor, identity_residual,
                      identity_residual_sweep, map_i_to_ii, map_ii_to_i)

__version__ = "0.1.0"

__all__ = [
    "BertrandError", "BertrandSpace", "CircularOrbit", "ClosureResult",
    "ConvergenceFailureError", "DegeneracyCluster", "DegenerateOrbitError",
    "DomainViolationError", "EmptyDomainError", "IllConditionedError",
    "InvalidOverrideError", "LengthMismatchError", "NoBoundedOrbitError",
    "NoCircularOrbitError", "NotClosedWithinCapError", "OrbitResult",
    "ParseError", "QuadratureFailureError", "QuantizationScheme",
    "RadialEigenproblem", "RadialGrid", "RadialOrbitData", "RadialProfile",
    "SchemaError", "Spectrum", "SpectrumComparison", "StackelDescriptor",
    "StepSizeUnderflowError", "TypeIIParams", "TypeIParams",
    "UnknownPresetError",
    "angular_momentum", "angular_momentum_sq", "apoapsis_state",
    "apsidal_angle", "as_exponent", "bounded_orbit_grid",
    "build_radial_operator", "circular_orbit", "closure_check",
    "compare_spectra", "conformal_factor", "default_grid",
    "degeneracy_pairs", "degeneracy_report", "degeneracy_tolerance",
    "describe", "discretization_error", "effective_potential",
    "eigenfunction_gauge_deviation", "equations_of_motion", "gauge_factor",
    "gauge_transform_eigenfunction", "green_function",
    "green_function_derivative", "hamiltonian", "identity_residual",
    "identity_residual_sweep", "integrate_orbit", "intrinsic_potentials",
    "lorentzian_time_coefficient", "map_i_to_ii", "map_ii_to_i",
    "measured_apsidal_angles", "operator_gauge_defect",
    "operator_gauge_residual", "preset", "preset_names",
    "radial_orbit_data", "radial_period", "scalar_curvature",
    "solve_spectrum", "spectrum_for", "stackel_pairs", "turning_points",
]
