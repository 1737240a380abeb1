"""Monotone envelopes and the Lebesgue-Stieltjes measures they induce.

The reciprocal envelope of a weight v on (t, b) is ess sup of 1/v over (t, b),
a nonincreasing function of t.  For cell-form weights the envelope is an exact
list of segments, each constant, a decreasing power c*t^e (e < 0), or a
decreasing reciprocal-affine power (a + b*t)^(-r).  Powers of the envelope
stay inside this class, so the measure d(-g(t-)) splits exactly into atoms at
the jump points plus absolutely continuous pieces with closed-form density.

Stored representatives are right-continuous; left limits are explicit.  The
interval conventions are the half-open ones: the measure of [a, b) is
g(a-) - g(b-), and the atom at a jump point tau carries g(tau-) - g(tau+).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .extreal import INF, xdiv
from .gridutil import quad_checked
from .weights import AFFINE, POWER, WeightFunction


class EnvelopeError(ValueError):
    pass


CONST = "const"
POWREC = "powrec"
AFFRECPOW = "affrecpow"


@dataclass(frozen=True)
class EnvelopeSegment:
    """Envelope piece on [lo, hi): value(t) is constant, c*t^e (e < 0), or
    (a + b*t)^(-r) with b > 0, r > 0."""

    lo: float
    hi: float
    kind: str
    params: tuple[float, ...]

    def value(self, t: float) -> float:
        if self.kind == CONST:
            return self.params[0]
        if self.kind == POWREC:
            c, e = self.params
            if math.isinf(t):
                return 0.0
            return c * t ** e
        a, b, r = self.params
        if math.isinf(t):
            return 0.0
        return (a + b * t) ** (-r)

    def value_array(self, t: np.ndarray) -> np.ndarray:
        if self.kind == CONST:
            return np.full_like(t, self.params[0])
        if self.kind == POWREC:
            c, e = self.params
            return c * t ** e
        a, b, r = self.params
        return (a + b * t) ** (-r)

    def density(self, t: np.ndarray) -> np.ndarray:
        """Density of d(-g) on the segment (zero for constants)."""
        if self.kind == CONST:
            return np.zeros_like(t)
        if self.kind == POWREC:
            c, e = self.params
            return -c * e * t ** (e - 1.0)
        a, b, r = self.params
        return r * b * (a + b * t) ** (-r - 1.0)

    def inverse(self, gval: float) -> float:
        """t with value(t) = gval, for strictly decreasing kinds."""
        if self.kind == POWREC:
            c, e = self.params
            return (gval / c) ** (1.0 / e)
        if self.kind == AFFRECPOW:
            a, b, r = self.params
            return (gval ** (-1.0 / r) - a) / b
        raise EnvelopeError("constant segment has no inverse")

    def pow(self, r: float) -> "EnvelopeSegment":
        if r <= 0:
            raise EnvelopeError("envelope power must be positive")
        if self.kind == CONST:
            v = self.params[0]
            return EnvelopeSegment(self.lo, self.hi, CONST, (v ** r if v > 0 else 0.0 if v == 0 else INF if math.isinf(v) else v ** r,))
        if self.kind == POWREC:
            c, e = self.params
            return EnvelopeSegment(self.lo, self.hi, POWREC, (c ** r, e * r))
        a, b, r0 = self.params
        return EnvelopeSegment(self.lo, self.hi, AFFRECPOW, (a, b, r0 * r))


class MonotoneEnvelope:
    """Nonincreasing right-continuous function on (0, domain_hi) stored as
    contiguous exact segments."""

    def __init__(self, segments: Sequence[EnvelopeSegment], domain_hi: float = INF):
        if not segments:
            raise EnvelopeError("envelope needs at least one segment")
        self.segments = tuple(segments)
        self.domain_hi = domain_hi
        self._los = np.array([s.lo for s in segments])
        if self.segments[0].lo != 0.0:
            raise EnvelopeError("envelope must start at 0")

    def _segment_at(self, t: float, side: str = "right") -> EnvelopeSegment:
        i = int(np.searchsorted(self._los, t, side=side)) - 1
        return self.segments[max(i, 0)]

    def value(self, t: float) -> float:
        """Right-continuous representative g(t)."""
        if t >= self.domain_hi:
            return self.value_at_end() if math.isinf(self.domain_hi) else self.segments[-1].value(self.domain_hi)
        return self._segment_at(t, "right").value(t)

    def left(self, t: float) -> float:
        """Left limit g(t-); g(0-) is defined as g(0+)."""
        if t <= 0.0:
            return self.value_at_start()
        if t >= self.domain_hi:
            t = self.domain_hi
        return self._segment_at(t, "left").value(t)

    def value_array(self, t: np.ndarray) -> np.ndarray:
        out = np.empty_like(t)
        idx = np.clip(np.searchsorted(self._los, t, side="right") - 1, 0, len(self.segments) - 1)
        for i, s in enumerate(self.segments):
            m = idx == i
            if m.any():
                out[m] = s.value_array(t[m])
        return out

    def value_at_start(self) -> float:
        s = self.segments[0]
        if s.kind == CONST:
            return s.params[0]
        if s.kind == POWREC:
            return INF if s.lo == 0.0 else s.value(s.lo)
        return s.value(s.lo)

    def value_at_end(self) -> float:
        s = self.segments[-1]
        if math.isfinite(self.domain_hi):
            return s.value(self.domain_hi)
        if s.kind == CONST:
            return s.params[0]
        return 0.0

    def pow(self, r: float) -> "MonotoneEnvelope":
        return MonotoneEnvelope([s.pow(r) for s in self.segments], self.domain_hi)

    def breakpoints(self) -> list[float]:
        return [s.lo for s in self.segments[1:]]

    def is_finite(self) -> bool:
        return all(
            not (s.kind == CONST and math.isinf(s.params[0])) for s in self.segments
        )


def _local_suffix_descriptor(cell, hi: float):
    """Descriptor of t -> ess sup of 1/v over (t, hi) inside one cell, as
    (kind, params, value_at_lo_plus, value_at_hi_minus)."""
    if cell.kind == POWER:
        c, e, s = cell.a, cell.b, cell.shift
        if c == 0.0:
            return (CONST, (INF,), INF, INF)
        if e > 0.0:
            lo_val = INF if cell.lo + s == 0.0 else (1.0 / c) * (cell.lo + s) ** (-e)
            hi_val = 0.0 if math.isinf(hi) else (1.0 / c) * (hi + s) ** (-e)
            if s > 0.0:
                scale = c ** (1.0 / e)
                return (AFFRECPOW, (scale * s, scale, e), lo_val, hi_val)
            return (POWREC, (1.0 / c, -e), lo_val, hi_val)
        if e < 0.0:
            val = INF if math.isinf(hi) else (1.0 / c) * (hi + s) ** (-e)
            return (CONST, (val,), val, val)
        return (CONST, (1.0 / c,), 1.0 / c, 1.0 / c)
    a0, a1 = cell.a, cell.b
    if a1 > 0.0:
        lo_val = xdiv(1.0, a0 + a1 * cell.lo)
        hi_val = 1.0 / (a0 + a1 * hi)
        return (AFFRECPOW, (a0, a1, 1.0), lo_val, hi_val)
    val = xdiv(1.0, a0 + a1 * hi)
    return (CONST, (val,), val, val)


def _crossing(kind: str, params: tuple, level: float) -> float:
    if kind == POWREC:
        c, e = params
        return (level / c) ** (1.0 / e)
    a, b, r = params
    return (level ** (-1.0 / r) - a) / b


def envelope_of_reciprocal(v: WeightFunction, b: float = INF) -> MonotoneEnvelope:
    """The nonincreasing function t -> ess sup of 1/v over (t, b)."""
    if b <= 0:
        raise EnvelopeError("upper endpoint must be positive")
    segments: list[EnvelopeSegment] = []
    running = 0.0  # sup of 1/v to the right of the current cell
    for cell in reversed(v.cells):
        lo = cell.lo
        hi = min(cell.hi, b)
        if hi <= lo:
            continue
        kind, params, lo_val, hi_val = _local_suffix_descriptor(cell, hi)
        if kind == CONST:
            merged = max(params[0], running)
            segments.append(EnvelopeSegment(lo, hi, CONST, (merged,)))
            running = merged
            continue
        if lo_val <= running:
            segments.append(EnvelopeSegment(lo, hi, CONST, (running,)))
        elif hi_val >= running:
            segments.append(EnvelopeSegment(lo, hi, kind, params))
        else:
            t_cross = _crossing(kind, params, running)
            t_cross = min(max(t_cross, lo), hi)
            if t_cross < hi:
                segments.append(EnvelopeSegment(t_cross, hi, CONST, (running,)))
            if t_cross > lo:
                segments.append(EnvelopeSegment(lo, t_cross, kind, params))
        running = max(running, lo_val)
    segments.reverse()
    merged: list[EnvelopeSegment] = []
    for s in segments:
        if merged and merged[-1].kind == CONST and s.kind == CONST and merged[-1].params == s.params:
            merged[-1] = EnvelopeSegment(merged[-1].lo, s.hi, CONST, s.params)
        else:
            merged.append(s)
    return MonotoneEnvelope(merged, domain_hi=b)


def envelope_power(v: WeightFunction, exponent: float, b: float = INF) -> MonotoneEnvelope:
    """The envelope of 1/v over suffix intervals, raised to a positive power."""
    return envelope_of_reciprocal(v, b).pow(exponent)


@dataclass(frozen=True)
class EnvelopeMeasure:
    """d(-g(t-)) for a nonincreasing g: atoms at jumps plus closed-form
    absolutely continuous segments.  Mass escaping to infinity, g(inf), is
    recorded but excluded from the measure."""

    envelope: MonotoneEnvelope
    atoms: tuple[tuple[float, float], ...]
    ac_segments: tuple[EnvelopeSegment, ...]
    mass_at_inf: float

    def total_mass(self) -> float:
        start = self.envelope.value_at_start()
        if math.isinf(start):
            return INF
        return start - self.mass_at_inf

    def interval_mass(
        self, a: float, b: float, include_left: bool = True, include_right: bool = False
    ) -> float:
        g = self.envelope
        ga = g.left(a) if include_left else g.value(a)
        gb = g.value(b) if include_right else g.left(b)
        if math.isinf(b):
            gb = self.mass_at_inf
        return max(ga - gb, 0.0)

    def ac_density(self, t: np.ndarray) -> np.ndarray:
        out = np.zeros_like(t)
        for s in self.ac_segments:
            m = (t >= s.lo) & (t < s.hi)
            if m.any():
                out[m] = s.density(t[m])
        return out

    def atoms_in(
        self, a: float, b: float, include_left: bool = True, include_right: bool = False
    ):
        for loc, mass in self.atoms:
            left_ok = loc >= a if include_left else loc > a
            right_ok = loc <= b if include_right else loc < b
            if left_ok and right_ok:
                yield loc, mass


def stieltjes_measure(g: MonotoneEnvelope) -> EnvelopeMeasure:
    """Split d(-g(t-)) into atoms and absolutely continuous segments."""
    if not g.is_finite():
        raise EnvelopeError("envelope is infinite on an interval; no sigma-finite measure")
    atoms = []
    ac = []
    segs = g.segments
    for i, s in enumerate(segs):
        if s.kind != CONST:
            ac.append(s)
        if i + 1 < len(segs):
            nxt = segs[i + 1]
            left_val = s.value(s.hi)
            right_val = nxt.value(nxt.lo)
            jump = left_val - right_val
            if jump > 0:
                atoms.append((s.hi, jump))
    if math.isfinite(g.domain_hi):
        mass_inf = segs[-1].value(g.domain_hi)
    else:
        mass_inf = g.value_at_end()
    return EnvelopeMeasure(g, tuple(atoms), tuple(ac), mass_inf)


def stieltjes_integral(
    f: Callable[[float], float],
    mu: EnvelopeMeasure,
    a: float = 0.0,
    b: float = INF,
    include_left: bool = True,
    include_right: bool = False,
) -> float:
    """integral of f over [a, b) (or the chosen interval type) against mu.

    Absolutely continuous segments are integrated in the mass coordinate
    m = g(t), which turns each piece into a proper integral of f(g^{-1}(m))
    over a finite mass range even when the t-range is infinite.
    """
    total = 0.0
    for loc, mass in mu.atoms_in(a, b, include_left, include_right):
        fv = f(loc)
        if fv != 0.0:
            total += fv * mass
    for s in mu.ac_segments:
        lo = max(s.lo, a)
        hi = min(s.hi, b)
        if hi <= lo:
            continue
        m_hi = s.value(lo)  # mass coordinate runs downward in t
        m_lo = s.value(hi)
        if math.isinf(m_hi):
            part = quad_checked(
                lambda m, s=s: f(s.inverse(m)), m_lo, INF
            )
        else:
            part = quad_checked(lambda m, s=s: f(s.inverse(m)), m_lo, m_hi)
        total += part
    return total


@dataclass
class MonotoneTestFunction:
    """Nondecreasing test function: smooth part plus upward jumps.

    value(t) is the right-continuous representative; left(t) the left limit.
    """

    smooth: Callable[[float], float]
    deriv: Callable[[float], float]
    jumps: tuple[tuple[float, float], ...] = ()

    def value(self, t: float) -> float:
        return self.smooth(t) + sum(sz for loc, sz in self.jumps if loc <= t)

    def left(self, t: float) -> float:
        return self.smooth(t) + sum(sz for loc, sz in self.jumps if loc < t)


@dataclass
class SmoothFunction:
    """Continuous function of bounded variation with a closed-form derivative."""

    fn: Callable[[float], float]
    deriv: Callable[[float], float]


def integration_by_parts_check(
    f: MonotoneTestFunction, g: SmoothFunction, alpha: float, beta: float
) -> float:
    """Relative residual of the integration-by-parts identity on [alpha, beta):

    int f dg = f(beta-) g(beta) - f(alpha-) g(alpha) + int g d(-f(t-)),

    where d(-f(t-)) assigns mass -(f(tau+) - f(tau-)) to each jump point tau
    and -f'(t) dt to the smooth part.
    """
    cut_points = [loc for loc, _ in f.jumps if alpha < loc < beta]
    lhs = quad_checked(
        lambda t: f.value(t) * g.deriv(t), alpha, beta, points=cut_points
    )
    smooth_part = quad_checked(
        lambda t: g.fn(t) * f.deriv(t), alpha, beta, points=cut_points
    )
    atom_part = sum(
        g.fn(loc) * sz for loc, sz in f.jumps if alpha <= loc < beta
    )
    rhs = (
        f.left(beta) * g.fn(beta)
        - f.left(alpha) * g.fn(alpha)
        - (smooth_part + atom_part)
    )
    scale = max(1.0, abs(lhs), abs(rhs))
    return abs(lhs - rhs) / scale
