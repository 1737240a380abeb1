"""Weight characterizations and best-constant certificates for iterated
Hardy-type and generalized-Stieltjes inequalities with an L1 right-hand
side.

The package computes the matched weight condition for a given exponent
regime, produces an independent lower bound on the best constant from
explicit test inputs, and checks the two against each other; supporting
modules provide the piecewise-power weight algebra, Lebesgue-Stieltjes
envelope measures, quasiconcave discretization, and a batch CLI.
"""

from .conditions import (
    ConditionReport,
    EvalContext,
    Exponents,
    InequalitySpec,
    RegimeError,
    chain_A,
    chain_B,
    compute_condition,
    condition_C,
    condition_I,
    condition_S,
    discrete_A,
    discrete_D,
    local_B,
    local_C,
)
from .gridutil import DEFAULT_GRID_POINTS, DEFAULT_WINDOW, QuadratureError
from .measures import (
    EnvelopeMeasure,
    MonotoneEnvelope,
    envelope_power,
    integration_by_parts_check,
    stieltjes_integral,
    stieltjes_measure,
)
from .oracle import (
    OracleEstimate,
    TestFunction,
    estimate_best_constant,
    exact_kernel_constant,
    lhs_31,
    lhs_32,
    maximize_ratio,
    reduce_monotone,
    reduce_stieltjes,
)
from .quasiconcave import (
    DegenerateFunctionError,
    DiscretizingSequence,
    FundamentalFunction,
    anti_discretization_residual,
    build_discretizing_sequence,
    fundamental_function,
    least_majorant,
    split_form_bounds,
    verify_sequence,
)
from .weights import (
    CumulativeWeight,
    WeightError,
    WeightFunction,
    calligraphic_u,
    check_admissible,
    check_nondegenerate,
    cumulative,
    eval_density,
    integrate,
    reciprocal_envelope,
)

__version__ = "0.1.0"

__all__ = [
    "ConditionReport",
    "CumulativeWeight",
    "DEFAULT_GRID_POINTS",
    "DEFAULT_WINDOW",
    "DegenerateFunctionError",
    "DiscretizingSequence",
    "EnvelopeMeasure",
    "EvalContext",
    "Exponents",
    "FundamentalFunction",
    "InequalitySpec",
    "MonotoneEnvelope",
    "OracleEstimate",
    "QuadratureError",
    "RegimeError",
    "TestFunction",
    "WeightError",
    "WeightFunction",
    "anti_discretization_residual",
    "build_discretizing_sequence",
    "calligraphic_u",
    "chain_A",
    "chain_B",
    "check_admissible",
    "check_nondegenerate",
    "compute_condition",
    "condition_C",
    "condition_I",
    "condition_S",
    "cumulative",
    "discrete_A",
    "discrete_D",
    "envelope_power",
    "estimate_best_constant",
    "eval_density",
    "exact_kernel_constant",
    "fundamental_function",
    "integrate",
    "integration_by_parts_check",
    "least_majorant",
    "lhs_31",
    "lhs_32",
    "local_B",
    "local_C",
    "maximize_ratio",
    "reciprocal_envelope",
    "reduce_monotone",
    "reduce_stieltjes",
    "split_form_bounds",
    "stieltjes_integral",
    "stieltjes_measure",
    "verify_sequence",
]
