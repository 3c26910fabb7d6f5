"""Numerical laboratory for the 2-D wave equation with damping near infinity.

    u_tt - Δu + a(x) u_t = 0  in the plane, compactly supported data.
"""

from .geometry import Bump, DampingProfile, Grid2D, InitialData, make_bump, make_damping
from .solver import GridTooSmallError, InstabilityError, RunResult, WaveState, init_state, run, step
from .diagnostics import DiagnosticsRecord, MultiplierParams, calibrate_k, energy, G_k, staggered_energy
from .potential import SourceTerm, newton_potential, potential_report, source_term
from .rates import RateFit, bounded_ratio_check, fit

__version__ = "0.1.0"
