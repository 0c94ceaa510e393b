"""Diffusive predator-prey systems u_t = d1 Lu + g(u)(f(u) - v), v_t = d2 Lv + v(h(v) + c g(u))."""

from .equilibria import (
    DispersionReport,
    Equilibrium,
    SmallCCertificate,
    certify_small_c,
    dispersion,
    find_constant_equilibria,
    holling2_large_a_constants,
    holling2_large_a_threshold,
    interior_equilibria,
)
from .harness import ExperimentSpec, HypothesisError, VerdictReport, parameter_sweep, verify_proposition
from .kinetics import (
    AssumptionReport,
    AssumptionViolation,
    DomainError,
    KineticsFamily,
    ModelSpec,
    check_assumptions,
    compute_prey_capacity,
    dl_model,
    eval_derivative,
    eval_H,
    eval_kinetics,
    strong_allee_model,
    weak_allee_model,
)
from .monotone import BoundsBox, IterationTrace, construct_bounds, estimate_lipschitz, monotone_iterate
from .pde import ConfigurationError, Grid, InitialCondition, Monitors, SimOutcome, build_grid, simulate
from .steady import (
    Continuation,
    Eigenmodes,
    Multistart,
    NewtonFailure,
    SteadySolution,
    lyapunov_G,
    newton_solve,
    search_steady_states,
    transform_to_rho,
)

__version__ = "0.1.0"
