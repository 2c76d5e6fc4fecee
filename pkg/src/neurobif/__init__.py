"""Bifurcation analysis and rhythm simulation for neural mass models."""

__version__ = "0.1.0"

from .models import (   # noqa: F401
    JRParams, WCParams, DBTParams, PhysicalJRParams, PhysicalWCParams,
    preset, sigmoid, sigmoid_prime, reduce_jr, reduce_wc, field, jacobian,
    equilibrium_from_x, set_param, get_param,
)
from .equilibria import (  # noqa: F401
    sweep_branch, detect_saddle_nodes, detect_hopf, first_lyapunov,
    codim1_report, EquilibriumBranch, BifurcationPoint,
)
from .codim2 import trace_curve, codim2_report  # noqa: F401
from .cycles import (  # noqa: F401
    integrate, find_cycle, continue_cycles, classify_band, cycle_census,
    trace_flc_curve, LimitCycle, CycleBranch,
)
from .scenarios import (  # noqa: F401
    NoiseSpec, simulate_sde, detect_spikes, seizure_scenario,
    linear_noise_spectrum,
)
