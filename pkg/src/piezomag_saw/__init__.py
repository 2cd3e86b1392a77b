"""Rayleigh surface waves on a piezomagnetic substrate and the magnetic
quantum systems they can drive."""
__version__ = "0.1.0"

from .materials import (MaterialError, MaterialParams, TERFENOL_D, bulk_velocities,
                        get_material, load_materials, rotate_to_110, save_materials)
from .rayleigh import (NoSurfaceModeError, NumericalError, RayleighMode, boundary_determinant,
                       characteristic_matrix, decay_roots, evaluate_fields, mode_at_frequency,
                       solve_mode, solve_velocity)
from .quantize import (QuantizedMode, depth_integrals, normalize_single_phonon,
                       verify_canonical_form, zero_point_fields)
from .coupling import (CouplingResult, DefectCenter, Fluxonium, MagnonFilm, Transmon, couple)
from .dynamics import DDEProblem, Trace, analytic_segments, figure_preset, integrate, steady_state

__all__ = [name for name in dir() if not name.startswith("_")]
