"""Toolkit for 1-D doubly degenerate diffusion with absorption.

Classifies short-time interface behavior over the nonlinearity parameters,
evaluates the closed-form solutions and envelope bounds, computes self-similar
profiles by ODE integration, and cross-checks everything against a fifth-order
WENO finite-difference solver.
"""

from .analytic import (
    AnalyticSolution,
    envelope_eval,
    explicit_eval,
    ips_eval,
    ips_interface,
    reaction_limit_eval,
)
from .classification import (
    ConstantSet,
    Exact,
    InterfaceLaw,
    Interval,
    ProfileDetermined,
    Region,
    RegionReport,
    appendix_constants,
    classify,
    critical_constant,
    delta_star,
    interface_law,
)
from .harness import (
    FitReport,
    Scenario,
    fit_powerlaw,
    load_scenario,
    load_scenario_file,
    make_initial_condition,
    run_scenario,
)
from .params import ProblemParams
from .profiles import (
    PhasePlaneTable,
    ProfileTable,
    integrate_region1,
    integrate_region2,
    phase_plane,
    seed_from_pde,
    wave_profile,
)
from .weno import (
    Field,
    Grid,
    SolverInstability,
    StepControl,
    degenerate_diffusion,
    evolve,
    flux_phi,
    locate_interface,
    rhs,
    rk3_step,
    weno5_halfnode_reconstruct,
    weno5_node_derivative,
)

__all__ = [
    "AnalyticSolution",
    "ConstantSet",
    "Exact",
    "Field",
    "FitReport",
    "Grid",
    "InterfaceLaw",
    "Interval",
    "PhasePlaneTable",
    "ProblemParams",
    "ProfileDetermined",
    "ProfileTable",
    "Region",
    "RegionReport",
    "Scenario",
    "SolverInstability",
    "StepControl",
    "appendix_constants",
    "classify",
    "critical_constant",
    "degenerate_diffusion",
    "delta_star",
    "envelope_eval",
    "evolve",
    "explicit_eval",
    "fit_powerlaw",
    "flux_phi",
    "integrate_region1",
    "integrate_region2",
    "interface_law",
    "ips_eval",
    "ips_interface",
    "load_scenario",
    "load_scenario_file",
    "locate_interface",
    "make_initial_condition",
    "phase_plane",
    "reaction_limit_eval",
    "rhs",
    "rk3_step",
    "run_scenario",
    "seed_from_pde",
    "wave_profile",
    "weno5_halfnode_reconstruct",
    "weno5_node_derivative",
]
