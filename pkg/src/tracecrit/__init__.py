"""Quantitative toolkit for the trace-distance key security criterion."""
from .bounds import (
    BoundReport,
    PerBitReport,
    extremal_guessing_distribution,
    failure_per_bit,
    guessing_bound,
    kpa_counterexample,
    kpa_distance,
    markov_tail_bound,
    naive_ber_bound,
)
from .classical import (
    Coupling,
    Distribution,
    Infeasible,
    MixtureBoundsCheck,
    best_guess,
    condition_on_prefix,
    equality_probability,
    guessing_probability,
    maximal_coupling,
    mixture_residual,
    statistical_distance,
    uniform_mixture_bounds_check,
)
from .errors import ConvergenceError, DimensionError, ValidationError
from .quantum import (
    DensityOperator,
    HermitianOperator,
    composition_bound,
    embed_classical,
    equal_prior_conditionals,
    helstrom_correct_probability,
    hermitian_eigenvalues,
    ml_decision_conditionals,
    random_density_operator,
    trace_distance,
    trace_norm,
)
from .sim import SimConfig, SimReport, analytic_expectation, simulate_rounds

__version__ = "0.1.0"
