"""Curated example configurations.

Five reference setups (r1..r5) are shipped as JSON files under specs/ and
exercised in the CLI documentation; the batteries below drive the
equivalence, chain, scaling and reduction verification suites.  Every
battery entry was screened numerically: condition value finite, oracle
estimate stable under grid doubling, and the certificate ratio
c_lo / condition inside RATIO_BRACKET with margin.
"""

from __future__ import annotations

import math

from .conditions import InequalitySpec
from .weights import WeightFunction

INF = math.inf

# certificate band asserted across the equivalence battery: the oracle lower
# bound must reach the condition value (factor >= 1) and may exceed it by at
# most the equivalence slack (factor <= 50)
RATIO_BRACKET = (1.0, 50.0)


def _wf(*pieces) -> WeightFunction:
    return WeightFunction.piecewise_power(list(pieces))


_ONE = WeightFunction.constant(1.0)
_U_LIN = WeightFunction.power(1.0, 1.0)
# bounded cumulative: density 1 on (0,1), then t^-2
_U_BUMP = WeightFunction.two_power(1.0, 0.0, 1.0, -2.0)

_V1 = _wf((0, 1, 1, 0), (1, INF, 1, 1))   # max(1,t)
_V2 = _wf((0, 1, 1, 0), (1, INF, 1, 2))   # max(1,t)^2
_V3 = _wf((0, 1, 1, 0), (1, INF, 1, 3))   # max(1,t)^3
_V_COMPACT = _wf((0, 1, 2, 0), (1, INF, 0, 0))

_W_R1 = WeightFunction.two_power(1, 1, 1, -1.5)
_W_DEC = WeightFunction.two_power(1, 1, 1, -3)
_W_R3 = WeightFunction.two_power(1, -0.5, 1, -0.75)
_W_R4 = WeightFunction.two_power(1, 1, 1, -0.5)
_W_HALF = WeightFunction.power(1.0, 0.5)
_W_QUAR = WeightFunction.power(1.0, 0.25)
_W_CORNER = WeightFunction.shifted_power(1.0, 1.0, -2.0)  # (1+t)^-2


def _spec(inequality, p, q, u, v, w) -> InequalitySpec:
    return InequalitySpec(inequality, float(p), float(q), u, v, w)


# -- reference configurations ------------------------------------------------

REFERENCE: dict[str, InequalitySpec] = {
    # sum-form iterated average, p < 1: formula I1
    "r1": _spec("3.1", 0.5, 1, _ONE, _V2, _W_R1),
    # sup-form iterated average, p < 1: formula I5
    "r2": _spec("3.2", 0.5, INF, _ONE, _V2, _W_HALF),
    # sum-form iterated average, p >= 1: formula I3
    "r3": _spec("3.1", 2, 1, _ONE, _V3, _W_R3),
    # monotone-cone average: formula C3
    "r4": _spec("5.1", 2, 2, _ONE, _ONE, _W_R4),
    # generalized Stieltjes transform: formula S3
    "r5": _spec("5.5", 2, 2, _ONE, _V1, _W_R4),
}

# linear corner with closed-form kernel constant 1
CORNER = _spec("3.1", 1, 1, _ONE, _ONE, _W_CORNER)

# v == const violates the vanishing-envelope hypothesis; with w = t^(-1/2)
# the condition and the oracle both grow like sqrt(hi) with the window
DIVERGENCE = _spec("3.1", 1, 1, _ONE, _ONE, WeightFunction.power(1.0, -0.5))


# -- two-sided equivalence battery -------------------------------------------

EQUIVALENCE_BATTERY: dict[str, InequalitySpec] = {
    # p < 1, q >= 1 (formula I1)
    "i1-r1": REFERENCE["r1"],
    "i1-a": _spec("3.1", 0.5, 2, _ONE, _V2, _W_R1),
    "i1-b": _spec("3.1", 0.7, 1.5, _U_LIN, _V3, _W_DEC),
    "i1-c": _spec("3.1", 0.3, 1, _ONE, _V1, _W_DEC),
    "i1-d": _spec("3.1", 0.5, 1, _U_BUMP, _V1, _W_DEC),
    "i1-e": _spec("3.1", 0.4, 3, _ONE, _V3, _W_R1),
    # p < 1, q < 1 (formula I2)
    "i2-a": _spec("3.1", 0.5, 0.4, _ONE, _V2, _W_DEC),
    "i2-b": _spec("3.1", 0.8, 0.5, _ONE, _V2, _W_DEC),
    "i2-c": _spec("3.1", 0.6, 0.3, _U_LIN, _V3, _W_DEC),
    "i2-d": _spec("3.1", 0.5, 0.7, _ONE, _V1, _W_R1),
    # p >= 1, q >= 1 (formula I3)
    "i3-r3": REFERENCE["r3"],
    "i3-a": _spec("3.1", 2, 2, _ONE, _V2, _W_DEC),
    "i3-b": _spec("3.1", 1.5, 3, _U_LIN, _V3, _W_DEC),
    "i3-c": _spec("3.1", 3, 2, _U_LIN, _V3, _W_DEC),
    # p >= 1, q < 1 (formula I4)
    "i4-a": _spec("3.1", 2, 0.5, _ONE, _V2, _W_DEC),
    "i4-b": _spec("3.1", 3, 0.7, _ONE, _V3, _W_DEC),
    "i4-c": _spec("3.1", 1.2, 0.6, _U_LIN, _V2, _W_DEC),
    "i4-d": _spec("3.1", 2, 0.8, _ONE, _V2, _W_R1),
    # q = inf (formulas I5 / I6)
    "i5-r2": REFERENCE["r2"],
    "i5-a": _spec("3.2", 0.6, INF, _ONE, _V3, _W_HALF),
    "i6-r2b": _spec("3.2", 2, INF, _ONE, _V2, _W_QUAR),
    "i6-a": _spec("3.2", 2, INF, _ONE, _V3, _W_QUAR),
    # monotone-cone conditions (formulas C2 / C3 / C4)
    "c2-a": _spec("5.1", 1, 0.5, _ONE, _V1, _W_DEC),
    "c2-b": _spec("5.1", 0.7, 0.4, _ONE, _V2, _W_DEC),
    "c2-c": _spec("5.1", 1, 0.6, _ONE, _V2, _W_R1),
    "c3-r4": REFERENCE["r4"],
    "c3-a": _spec("5.1", 2, 3, _ONE, _V1, _W_DEC),
    "c3-b": _spec("5.1", 3, 3, _ONE, _V1, _W_R4),
    "c3-c": _spec("5.1", 1.5, 2, _ONE, _V2, _W_DEC),
    "c4-a": _spec("5.1", 2, 1, _ONE, _ONE, _W_DEC),
    # Stieltjes conditions (formulas S2 / S3 / S4)
    "s2-a": _spec("5.5", 1, 0.5, _ONE, _V2, _W_DEC),
    "s2-b": _spec("5.5", 1, 0.7, _ONE, _V1, _W_R1),
    "s3-r5": REFERENCE["r5"],
    "s3-a": _spec("5.5", 2, 3, _ONE, _V1, _W_DEC),
    "s3-b": _spec("5.5", 1.5, 3, _ONE, _V1, _W_R4),
    "s4-a": _spec("5.5", 3, 1, _ONE, _V2, _W_DEC),
    "s4-b": _spec("5.5", 2, 1, _ONE, _V1, _W_DEC),
    "s4-c": _spec("5.5", 2.5, 1.5, _ONE, _V2, _W_R1),
    "s4-d": _spec("5.5", 3, 2, _ONE, _V2, _W_DEC),
}

# criterion-8 subset: scaling laws are checked on these (the two sup-form
# entries scale linearly in w instead of by 2^(1/q))
SCALING_NAMES = (
    "i1-r1", "i1-b", "i2-a", "i2-c", "i3-r3",
    "i3-a", "i4-a", "i4-c", "i5-r2", "i6-r2b",
)

# monotone-cone reduction round trips; every v here has a closed-form
# cumulative so the reduced problem stays inside the weight algebra
MONOTONE_BATTERY: dict[str, InequalitySpec] = {
    "m1": REFERENCE["r4"],
    "m2": _spec("5.1", 2, 1, _ONE, _ONE, _W_DEC),
    "m3": _spec("5.1", 1.5, 0.5, _ONE, _ONE, _W_DEC),
    "m4": _spec("5.3", 2, INF, _ONE, _ONE, _W_R4),
    "m5": _spec("5.1", 2, 1.5, _ONE, _V_COMPACT, _W_R1),
}


def battery_names(prefix: str) -> list[str]:
    """Battery entries whose name starts with the given family prefix."""
    return [k for k in EQUIVALENCE_BATTERY if k.startswith(prefix)]
