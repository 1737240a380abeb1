"""Extended-real arithmetic conventions used throughout the library.

Degenerate and divergent quantities propagate as IEEE infinities instead of
exceptions: a condition functional evaluating to +inf means the inequality
admits no finite constant, which is a legitimate answer, not an error.

The conventions are the usual ones for weighted-norm computations:
1/(+inf) = 0, 1/0 = +inf, 0/0 = 0, inf/inf = 0, 0 * inf = 0,
a**0 = 1 (including a = +inf), inf**e = +inf for e > 0 and 0 for e < 0.
"""

from __future__ import annotations

import math

INF = math.inf


def xdiv(a: float, b: float) -> float:
    """Quotient a/b under the conventions above."""
    if a == 0.0:
        return 0.0
    if math.isinf(b):
        return 0.0
    if b == 0.0:
        return INF if a > 0 else -INF
    return a / b


def xmul(a: float, b: float) -> float:
    """Product a*b with 0 * (+-inf) = 0."""
    if a == 0.0 or b == 0.0:
        return 0.0
    return a * b


def xpow(a: float, e: float) -> float:
    """Power a**e with a**0 = 1, inf**e = inf (e > 0), 0**e = inf (e < 0)."""
    if e == 0.0:
        return 1.0
    if math.isinf(a):
        return INF if e > 0 else 0.0
    if a == 0.0:
        return 0.0 if e > 0 else INF
    return a ** e


def plus_part(a: float) -> float:
    return a if a > 0.0 else 0.0


def conjugate_exponent(p: float) -> float:
    """p' with 1/p + 1/p' = 1, defined for p in [1, inf]."""
    if p < 1.0:
        raise ValueError(f"conjugate exponent needs p >= 1, got {p}")
    if p == 1.0:
        return INF
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


def star_exponent(p: float) -> float:
    """p* = p/(1-p) for p in (0, 1), p* = +inf at p = 1; undefined above."""
    if not 0.0 < p <= 1.0:
        raise ValueError(f"star exponent needs p in (0, 1], got {p}")
    if p == 1.0:
        return INF
    return p / (1.0 - p)


def rho_exponent(q: float) -> float:
    """rho with 1/rho = (1/q - 1)_+: +inf for q >= 1, q/(1-q) for q < 1."""
    if q <= 0.0:
        raise ValueError(f"rho needs q > 0, got {q}")
    if q >= 1.0:
        return INF
    return q / (1.0 - q)
