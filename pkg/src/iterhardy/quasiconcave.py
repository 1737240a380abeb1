"""Quasiconcave calculus: fundamental functions, least majorants,
discretizing sequences and anti-discretization checks.

A function phi on (0, inf) is quasiconcave relative to a growth scale G when
phi is equivalent to a nondecreasing function and phi/G to a nonincreasing
one.  Two constructions produce such functions here:

* the integral form phi(x) = int kernel(x, s)^r w(s) ds with the saturation
  kernel U(x)/(U(s) + U(x)), for a weight w and cumulative weight U;
* the sup form phi(t) = ess sup over s < t of U(s)^(1/p) times the suffix
  sup of w / U^(1/p), the least U^(1/p)-quasiconcave majorant of w.

A discretizing sequence for phi picks knots x_k (x_0 = 1) along which phi
grows geometrically while phi/U^r decays geometrically, and labels each knot
interval by which of the two functions stays flat (within a fixed factor) on
it.  The builder is greedy and bidirectional: the next knot is the first
point where both thresholds (factor a up for phi, factor a down for phi/U^r)
are simultaneously met, so one of them is met with equality and that function
is flat on the interval (within 2a after grid slack).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .extreal import INF, xdiv
from .gridutil import (
    DEFAULT_GRID_POINTS,
    DEFAULT_WINDOW,
    log_nodes,
    merge_nodes,
    quad_checked,
    trap_weights,
)
from .weights import CumulativeWeight, WeightFunction


class DegenerateFunctionError(RuntimeError):
    """The function does not vary enough on the window to discretize."""


@dataclass(frozen=True)
class DegeneracyFlags:
    """Window-relative non-degeneracy indicators for a quasiconcave phi."""

    finite: bool
    vanishes_at_zero: bool
    unbounded_at_inf: bool
    ratio_unbounded_at_zero: bool
    ratio_vanishes_at_inf: bool

    def all_ok(self) -> bool:
        return (
            self.finite
            and self.vanishes_at_zero
            and self.unbounded_at_inf
            and self.ratio_unbounded_at_zero
            and self.ratio_vanishes_at_inf
        )

    def warnings(self) -> list[str]:
        out = []
        if not self.finite:
            out.append("phi is not finite on the window")
        if not self.vanishes_at_zero:
            out.append("phi does not vanish at the left window edge")
        if not self.unbounded_at_inf:
            out.append("phi does not grow large at the right window edge")
        if not self.ratio_unbounded_at_zero:
            out.append("phi/U^r does not blow up at the left window edge")
        if not self.ratio_vanishes_at_inf:
            out.append("phi/U^r does not vanish at the right window edge")
        return out


class FundamentalFunction:
    """Grid-backed quasiconcave function with monotone-corrected values."""

    def __init__(
        self,
        kind: str,
        U: CumulativeWeight,
        r: float,
        nodes: np.ndarray,
        raw: np.ndarray,
        err_est: float,
        source: WeightFunction,
    ):
        self.kind = kind
        self.U = U
        self.r = r
        self.nodes = nodes
        self.raw = raw
        uvals = np.asarray(U.value(nodes), dtype=float)
        self._log_nodes = np.log(nodes)
        finite = np.all(np.isfinite(raw))
        if finite:
            self.values = np.maximum.accumulate(raw)
            with np.errstate(divide="ignore", invalid="ignore"):
                ratio_raw = np.where(uvals > 0, self.values / uvals ** r, INF)
            # nonincreasing correction: suffix max keeps a decreasing profile
            # intact and only lifts local quadrature dips
            rev = np.maximum.accumulate(ratio_raw[::-1])[::-1]
            self.ratio_values = rev
            num = np.abs(self.values - raw)
            den = np.maximum(np.abs(raw), 1e-300)
            self.correction = float(np.max(num / den))
        else:
            self.values = raw
            self.ratio_values = np.full_like(raw, INF)
            self.correction = INF
        self.err_est = err_est
        self.source = source
        mid = int(np.searchsorted(nodes, 1.0))
        mid = min(max(mid, 1), len(nodes) - 2)
        v_mid = self.values[mid] if finite else INF
        r_mid = self.ratio_values[mid] if finite else INF
        self.flags = DegeneracyFlags(
            finite=bool(finite),
            vanishes_at_zero=bool(finite and self.values[0] < 1e-2 * v_mid),
            unbounded_at_inf=bool(finite and self.values[-1] > 1e2 * v_mid),
            ratio_unbounded_at_zero=bool(finite and self.ratio_values[0] > 1e2 * r_mid),
            ratio_vanishes_at_inf=bool(finite and self.ratio_values[-1] < 1e-2 * r_mid),
        )

    def value(self, x: float) -> float:
        """Monotone interpolation in log-x; power extension off the window."""
        if x <= 0:
            return 0.0
        lx = math.log(x)
        if lx <= self._log_nodes[0]:
            return self._extend(x, 0, 1)
        if lx >= self._log_nodes[-1]:
            return self._extend(x, -2, -1)
        return float(np.interp(lx, self._log_nodes, self.values))

    def _extend(self, x: float, i0: int, i1: int) -> float:
        v0, v1 = self.values[i0], self.values[i1]
        n0, n1 = self.nodes[i0], self.nodes[i1]
        if v0 <= 0 or v1 <= 0 or not (math.isfinite(v0) and math.isfinite(v1)):
            return float(v0 if x < n0 else v1)
        slope = math.log(v1 / v0) / math.log(n1 / n0)
        slope = max(slope, 0.0)
        anchor_v, anchor_n = (v0, n0) if x < n0 else (v1, n1)
        return float(anchor_v * (x / anchor_n) ** slope)

    def ratio_value(self, x: float) -> float:
        """phi(x)/U(x)^r with the nonincreasing correction, interpolated."""
        if x <= 0:
            return INF
        lx = math.log(x)
        lx = min(max(lx, self._log_nodes[0]), self._log_nodes[-1])
        return float(np.interp(lx, self._log_nodes, self.ratio_values))

    def values_at(self, xs: np.ndarray) -> np.ndarray:
        """Vectorized interpolation of the corrected values at sorted xs."""
        lx = np.log(np.asarray(xs, dtype=float))
        return np.interp(lx, self._log_nodes, self.values)


def _tail_integral_coef(w: WeightFunction, U: CumulativeWeight, r: float, hi: float):
    """Closed-form J = int_hi^inf U(s)^(-r) w(s) ds via power tails.

    Returns (J, exact) where exact is False when a log-growth tail forced a
    numeric extension.
    """
    tw = w.behavior_at_inf()
    if tw is None:
        return 0.0, True
    cw, ew = tw
    tu = U.tail_behavior()
    if tu[0] == "power":
        _, C, beta = tu
        crit = ew - r * beta
        if crit >= -1.0:
            return INF, True
        return cw * C ** (-r) * hi ** (crit + 1.0) / (-(crit + 1.0)), True
    if tu[0] == "bounded":
        total = tu[1]
        if ew >= -1.0:
            return INF, True
        return cw * total ** (-r) * hi ** (ew + 1.0) / (-(ew + 1.0)), True
    # logarithmic growth of U: extend numerically over a few decades
    ts = np.geomspace(hi, hi * 1e6, 600)
    uu = np.asarray(U.value(ts)) ** r
    vals = w.eval_density(ts) / uu
    return float(np.trapezoid(vals, ts)), False


def fundamental_function(
    w: WeightFunction,
    U: CumulativeWeight,
    r: float,
    window: tuple[float, float] = DEFAULT_WINDOW,
    n: int = DEFAULT_GRID_POINTS,
) -> FundamentalFunction:
    """phi(x) = int_0^inf (U(x)/(U(s)+U(x)))^r w(s) ds on a log grid.

    Values carry a monotone correction (phi nondecreasing, phi/U^r
    nonincreasing) and window flags; tails beyond the window enter through
    closed-form power analysis of w and U.
    """
    if r <= 0:
        raise ValueError("kernel exponent r must be positive")
    lo, hi = window
    nodes = merge_nodes(log_nodes(lo, hi, n), w.breakpoints() + U.w.breakpoints())
    tw_weights = trap_weights(nodes)
    wv = w.eval_density(nodes)
    uv = np.asarray(U.value(nodes), dtype=float)
    mass = wv * tw_weights
    with np.errstate(divide="ignore", invalid="ignore"):
        K = (uv[:, None] / (uv[None, :] + uv[:, None])) ** r
    K = np.nan_to_num(K, nan=0.0, posinf=0.0)
    phi = K @ mass
    head = w.integrate(0.0, lo)
    tail_j, _ = _tail_integral_coef(w, U, r, hi)
    if math.isinf(tail_j):
        raw = np.full_like(phi, INF)
        return FundamentalFunction("integral", U, r, nodes, raw, INF, w)
    phi = phi + head + (uv ** r) * tail_j
    err = head + tail_j * float(uv[-1]) ** r
    err_rel = 4.0 * (math.log(nodes[1] / nodes[0])) ** 2
    return FundamentalFunction("integral", U, r, nodes, phi, err_rel + err, w)


def _sup_tail(w: WeightFunction, U: CumulativeWeight, e: float, hi: float) -> float:
    """sup over (hi, inf) of w(s) U(s)^(-e), via power tails."""
    tw = w.behavior_at_inf()
    if tw is None:
        return 0.0
    cw, ew = tw
    tu = U.tail_behavior()
    if tu[0] == "power":
        _, C, beta = tu
        crit = ew - e * beta
        if crit > 0:
            return INF
        return cw * C ** (-e) * hi ** crit
    if tu[0] == "bounded":
        if ew > 0:
            return INF
        return cw * tu[1] ** (-e) * hi ** ew
    # log tail: decreasing in all sane cases; evaluate at hi
    return w.eval_density(hi) * float(U.value(hi)) ** (-e)


def _sup_head(w: WeightFunction, lo: float) -> float:
    """sup over (0, lo] of w."""
    nz = w.behavior_near_zero()
    if nz is None:
        return 0.0
    c, e = nz
    if e < 0:
        return INF
    return c * lo ** e


def least_majorant(
    w: WeightFunction,
    U: CumulativeWeight,
    p: float,
    window: tuple[float, float] = DEFAULT_WINDOW,
    n: int = DEFAULT_GRID_POINTS,
) -> FundamentalFunction:
    """Least U^(1/p)-quasiconcave majorant of w, as a sup-form function.

    Three equivalent nestings of the double essential supremum are evaluated
    on the same grid and must agree to rounding; their common value is also
    bracketed against the smoothed-kernel form
    ess sup_s w(s) (U(t)/(U(s)+U(t)))^(1/p), which lies within
    [2^(-1/p), 1] of the majorant.
    """
    e = 1.0 / p
    lo, hi = window
    nodes = merge_nodes(log_nodes(lo, hi, n), w.breakpoints() + U.w.breakpoints())
    wv = w.eval_density(nodes)
    uv = np.asarray(U.value(nodes), dtype=float)
    upow = uv ** e
    with np.errstate(divide="ignore", invalid="ignore"):
        inner = np.where(upow > 0, wv / upow, np.where(wv > 0, INF, 0.0))
    tail_sup = _sup_tail(w, U, e, hi)
    head_sup = _sup_head(w, lo)
    # form A: prefix sup of U^e times suffix sup of w U^{-e}
    suffix_inner = np.maximum.accumulate(np.maximum(inner, 0.0)[::-1])[::-1]
    suffix_inner = np.maximum(suffix_inner, tail_sup)
    phi_a = np.maximum.accumulate(upow * suffix_inner)
    phi_a = np.maximum(phi_a, head_sup)
    # form B: split the single sup at the evaluation point
    prefix_w = np.maximum.accumulate(wv)
    prefix_w = np.maximum(prefix_w, head_sup)
    suffix_shift = np.empty_like(suffix_inner)
    suffix_shift[:-1] = suffix_inner[1:]
    suffix_shift[-1] = tail_sup
    phi_b = np.maximum(prefix_w, upow * suffix_shift)
    # form C: U^e times suffix sup of U^{-e} prefix sup of w
    with np.errstate(divide="ignore", invalid="ignore"):
        outer_c = np.where(upow > 0, prefix_w / upow, INF)
    outer_c[-1] = max(outer_c[-1], tail_sup)
    phi_c = upow * np.maximum.accumulate(outer_c[::-1])[::-1]
    finite = np.isfinite(phi_a) & np.isfinite(phi_b) & np.isfinite(phi_c)
    agree = 0.0
    if finite.any():
        stack = np.stack([phi_a[finite], phi_b[finite], phi_c[finite]])
        spread = stack.max(axis=0) - stack.min(axis=0)
        agree = float(np.max(spread / np.maximum(stack.max(axis=0), 1e-300)))
    ff = FundamentalFunction("supform", U, e, nodes, np.maximum(phi_a, phi_b), 0.0, w)
    ff.form_agreement = agree
    # smoothed-kernel comparison, within [2^(-1/p), 1] of the majorant
    with np.errstate(divide="ignore", invalid="ignore"):
        Ksm = (uv[:, None] / (uv[None, :] + uv[:, None])) ** e
    Ksm = np.nan_to_num(Ksm, nan=0.0, posinf=0.0)
    smoothed = (Ksm * wv[None, :]).max(axis=1)
    ff.smoothed_values = smoothed
    return ff


@dataclass(frozen=True)
class SplitFormBounds:
    """Two-term split of the integral-form phi and its certified bracket."""

    x: float
    s_value: float
    phi_value: float
    lower: float
    upper: float

    @property
    def holds(self) -> bool:
        if math.isinf(self.s_value):
            return math.isinf(self.upper)
        tol = 1e-7 * max(1.0, self.s_value)
        return self.lower - tol <= self.s_value <= self.upper + tol


def phi_exact(
    w: WeightFunction,
    U: CumulativeWeight,
    r: float,
    x: float,
    window: tuple[float, float] = DEFAULT_WINDOW,
) -> float:
    """Quadrature evaluation of the integral-form phi at a single point."""
    if x <= 0:
        return 0.0
    lo, hi = window
    tail_j, _ = _tail_integral_coef(w, U, r, max(hi, x))
    if math.isinf(tail_j):
        return INF
    ux = float(U.value(x))
    if ux <= 0:
        return 0.0
    pts = [b for b in w.breakpoints() + U.w.breakpoints() if lo < b < hi]
    kernel = lambda s: w.eval_density(s) * (ux / (float(U.value(s)) + ux)) ** r
    return (
        quad_checked(kernel, lo, max(hi, x), points=pts + [x])
        + w.integrate(0.0, lo)
        + ux ** r * tail_j
    )


def split_form_bounds(
    w: WeightFunction,
    U: CumulativeWeight,
    r: float,
    x: float,
    window: tuple[float, float] = DEFAULT_WINDOW,
) -> SplitFormBounds:
    """S(x) = int_0^x w + U(x)^r int_x^inf U^(-r) w, with the certified
    bracket phi(x) <= S(x) <= 2^r phi(x) around the integral-form phi."""
    if x <= 0:
        raise ValueError("x must be positive")
    lo, hi = window
    head = w.integrate(0.0, x)
    pts = [b for b in w.breakpoints() + U.w.breakpoints() if x < b < hi]
    tail_j, _ = _tail_integral_coef(w, U, r, max(hi, x))
    ux = float(U.value(x))
    if math.isinf(tail_j):
        s_val = INF
        phi = INF
    else:
        mid = quad_checked(
            lambda s: w.eval_density(s) * float(U.value(s)) ** (-r),
            x,
            max(hi, x),
            points=pts,
        )
        s_val = head + ux ** r * (mid + tail_j)
        phi = phi_exact(w, U, r, x, window)
    return SplitFormBounds(x, s_val, phi, phi, 2.0 ** r * phi)


@dataclass
class DiscretizingSequence:
    """Knots x_k with geometric phi growth and geometric phi/U^r decay.

    labels[i] describes the interval [knots[i], knots[i+1]): "Z1" when phi is
    flat on it (within the covering factor), "Z2" when phi/U^r is.
    """

    a: float
    r: float
    knots: tuple[float, ...]
    k_first: int
    labels: tuple[str, ...]
    window: tuple[float, float]
    phi_at: tuple[float, ...]
    ratio_at: tuple[float, ...]
    u_at: tuple[float, ...]
    constants: dict
    warnings: tuple[str, ...] = ()

    def k_values(self) -> list[int]:
        return list(range(self.k_first, self.k_first + len(self.knots)))

    def to_json(self) -> dict:
        knots = []
        for i, (k, x) in enumerate(zip(self.k_values(), self.knots)):
            label = self.labels[i] if i < len(self.labels) else None
            knots.append({"k": k, "x": x, "label": label})
        return {
            "a": self.a,
            "r": self.r,
            "window": list(self.window),
            "knots": knots,
            "constants": dict(self.constants),
            "warnings": list(self.warnings),
        }


def _as_callables(phi, U: CumulativeWeight, r: float):
    if isinstance(phi, FundamentalFunction):
        return phi.value, phi.ratio_value
    def ratio(t: float) -> float:
        ut = float(U.value(t))
        return xdiv(phi(t), ut ** r)
    return phi, ratio


def _solve_level(fn, target, lo, hi, increasing, iters=80) -> float:
    a, b = math.log(lo), math.log(hi)
    for _ in range(iters):
        m = 0.5 * (a + b)
        v = fn(math.exp(m))
        high_side = v >= target if increasing else v <= target
        if high_side:
            b = m
        else:
            a = m
        if b - a < 5e-16:
            break
    return math.exp(b)


def build_discretizing_sequence(
    phi,
    U: CumulativeWeight,
    r: float,
    a: float = 2.0,
    window: tuple[float, float] = DEFAULT_WINDOW,
    max_knots: int = 400,
) -> DiscretizingSequence:
    """Greedy bidirectional knot construction from x_0 = 1.

    The next knot up is the first point where phi has grown by the factor a
    AND phi/U^r has decayed by the factor a; the binding threshold (the one
    reached last) identifies the function that stayed flat on the interval,
    giving the Z1/Z2 label (ties go to Z1).  Construction stops at the window
    edges; it raises DegenerateFunctionError when either function varies by
    less than a across the whole window (then no knot step is possible, as
    for phi(t) = t with U = id and r = 1, where phi/U^r is constant).
    """
    if a < 2.0:
        raise ValueError("step ratio a must be >= 2")
    lo, hi = window
    if not lo < 1.0 < hi:
        raise ValueError("window must contain the base knot x_0 = 1")
    value, ratio = _as_callables(phi, U, r)
    warnings = []
    if isinstance(phi, FundamentalFunction):
        warnings.extend(phi.flags.warnings())
        if not phi.flags.finite:
            raise DegenerateFunctionError("phi is infinite on the window")
    v_lo, v_hi = value(lo), value(hi)
    r_lo, r_hi = ratio(lo), ratio(hi)
    phi_var = xdiv(v_hi, v_lo) if v_lo > 0 else INF
    ratio_var = xdiv(r_lo, r_hi) if r_hi > 0 else INF
    if phi_var < a or ratio_var < a:
        raise DegenerateFunctionError(
            f"phi varies by {phi_var:.4g} and phi/U^r by {ratio_var:.4g} "
            f"across the window; both must vary by at least a = {a:g}"
        )
    xs = [1.0]
    labels_fwd: list[str] = []
    labels_bwd: list[str] = []
    # forward
    x = 1.0
    while len(xs) < max_knots:
        pv, rv = value(x), ratio(x)
        if not (value(hi) >= a * pv and ratio(hi) <= rv / a):
            break
        s_phi = _solve_level(value, a * pv, x, hi, increasing=True)
        s_ratio = _solve_level(ratio, rv / a, x, hi, increasing=False)
        nxt = max(s_phi, s_ratio)
        if nxt <= x * (1 + 1e-13):
            break
        labels_fwd.append("Z1" if s_phi >= s_ratio else "Z2")
        xs.append(nxt)
        x = nxt
    # backward
    back: list[float] = []
    x = 1.0
    while len(back) + len(xs) < 2 * max_knots:
        pv, rv = value(x), ratio(x)
        if not (value(lo) <= pv / a and ratio(lo) >= a * rv):
            break
        b_phi = _solve_level(value, pv / a, lo, x, increasing=True)
        b_ratio = _solve_level(ratio, a * rv, lo, x, increasing=False)
        prv = min(b_phi, b_ratio)
        if prv >= x * (1 - 1e-13):
            break
        labels_bwd.append("Z1" if b_phi <= b_ratio else "Z2")
        back.append(prv)
        x = prv
    knots = list(reversed(back)) + xs
    labels = list(reversed(labels_bwd)) + labels_fwd
    if len(knots) < 2:
        raise DegenerateFunctionError(
            "no knot step is possible inside the window"
        )
    phi_at = tuple(value(t) for t in knots)
    ratio_at = tuple(ratio(t) for t in knots)
    u_at = tuple(float(U.value(t)) for t in knots)
    steps_phi = [b / amax for amax, b in zip(phi_at[:-1], phi_at[1:])]
    steps_ratio = [b / amax for amax, b in zip(ratio_at[:-1], ratio_at[1:])]
    constants = {
        "phi_step_min": min(steps_phi),
        "ratio_step_max": max(steps_ratio),
        "u_step_min": min(b / amax for amax, b in zip(u_at[:-1], u_at[1:])),
        "covering_factor": 2.0 * a,
    }
    return DiscretizingSequence(
        a=a,
        r=r,
        knots=tuple(knots),
        k_first=-len(back),
        labels=tuple(labels),
        window=window,
        phi_at=phi_at,
        ratio_at=ratio_at,
        u_at=u_at,
        constants=constants,
        warnings=tuple(warnings),
    )


@dataclass(frozen=True)
class SequenceVerification:
    ok: bool
    clauses: tuple[tuple[str, bool, str], ...]
    constants: dict

    def failures(self) -> list[str]:
        return [f"{name}: {detail}" for name, ok, detail in self.clauses if not ok]


def verify_sequence(
    seq: DiscretizingSequence,
    phi,
    U: CumulativeWeight,
    r: float,
    samples_per_interval: int = 33,
) -> SequenceVerification:
    """Re-checks the defining clauses of a discretizing sequence by dense
    sampling: geometric growth along the knots, both step thresholds, and the
    per-interval flatness encoded by the Z1/Z2 labels (covering factor 2a)."""
    value, ratio = _as_callables(phi, U, r)
    tol = 1e-9
    clauses = []
    xs = seq.knots
    if len(xs) < 2:
        return SequenceVerification(
            False,
            (("knot_count", False, "fewer than 2 knots"),),
            {},
        )
    has_base = any(abs(x - 1.0) <= 1e-9 for x in xs)
    clauses.append(("base_knot", has_base, "x_0 = 1 present" if has_base else "missing x_0 = 1"))
    uvals = [float(U.value(x)) for x in xs]
    u_ratios = [b / a for a, b in zip(uvals[:-1], uvals[1:])]
    ok_u = all(rr > 1.0 + 1e-12 for rr in u_ratios)
    clauses.append(
        ("cumulative_geometric", ok_u, f"min U step {min(u_ratios):.6g}")
    )
    pvals = [value(x) for x in xs]
    p_ratios = [b / a for a, b in zip(pvals[:-1], pvals[1:])]
    ok_p = all(rr >= seq.a * (1 - 1e-6) for rr in p_ratios)
    clauses.append(
        ("phi_steps", ok_p, f"min phi step {min(p_ratios):.6g} vs a = {seq.a:g}")
    )
    rvals = [ratio(x) for x in xs]
    r_ratios = [b / a for a, b in zip(rvals[:-1], rvals[1:])]
    ok_r = all(rr <= (1 + 1e-6) / seq.a for rr in r_ratios)
    clauses.append(
        ("ratio_steps", ok_r, f"max phi/U^r step {max(r_ratios):.6g} vs 1/a = {1/seq.a:g}")
    )
    cover = 2.0 * seq.a
    worst_z1, worst_z2 = 1.0, 1.0
    for i, lab in enumerate(seq.labels):
        lo_x, hi_x = xs[i], xs[i + 1]
        ts = np.geomspace(lo_x, hi_x, samples_per_interval)
        if lab == "Z1":
            vals = [value(t) / pvals[i] for t in ts]
            worst_z1 = max(worst_z1, max(vals))
        else:
            vals = [rvals[i] / ratio(t) for t in ts]
            worst_z2 = max(worst_z2, max(vals))
    ok_cover = worst_z1 <= cover * (1 + tol) and worst_z2 <= cover * (1 + tol)
    clauses.append(
        (
            "covering",
            ok_cover,
            f"flatness factors Z1 {worst_z1:.6g}, Z2 {worst_z2:.6g} vs {cover:g}",
        )
    )
    constants = {
        "u_step_min": min(u_ratios),
        "phi_step_min": min(p_ratios),
        "ratio_step_max": max(r_ratios),
        "z1_flatness": worst_z1,
        "z2_flatness": worst_z2,
    }
    return SequenceVerification(all(c[1] for c in clauses), tuple(clauses), constants)


def anti_discretization_residual(
    f: Callable[[float], float],
    w: WeightFunction,
    U: CumulativeWeight,
    r_pair: tuple[float, float],
    seq: DiscretizingSequence,
    n: int = 2048,
) -> dict:
    """Window-truncated two-sided checks of the discretization identities.

    For e = q/p and phi the integral-form fundamental function the sequence
    was built for, compares, over the knot span:

    * sum form:  (int (f/U)^e w dt)^(1/e)  vs  (sum_k (f(x_k)/U(x_k))^e phi_k)^(1/e)
    * product form: int phi(t) f(t)^(-2e) w dt  vs  sum_k phi_k^2 f(x_k)^(-2e)
      (phi(t) read from the knot bracket)
    * sup form:  sup_t phi(t)^(1/e)/f(t)  vs  sup_k phi_k^(1/e)/f(x_k)

    Returns the three (lhs, rhs, ratio) triples keyed by name.
    """
    p, q = r_pair
    e = q / p
    lo, hi = seq.knots[0], seq.knots[-1]
    nodes = merge_nodes(log_nodes(lo, hi, n), w.breakpoints())
    tws = trap_weights(nodes)
    wv = w.eval_density(nodes)
    uv = np.asarray(U.value(nodes), dtype=float)
    fv = np.array([f(t) for t in nodes])
    knots = np.asarray(seq.knots)
    phis = np.asarray(seq.phi_at)
    f_k = np.array([f(x) for x in knots])
    u_k = np.array([float(U.value(x)) for x in knots])
    idx = np.clip(np.searchsorted(knots, nodes, side="right") - 1, 0, len(knots) - 1)
    phi_nodes = phis[idx]

    with np.errstate(divide="ignore", invalid="ignore"):
        lhs_sum = float(np.sum((fv / uv) ** e * wv * tws)) ** (1.0 / e)
        rhs_sum = float(np.sum((f_k / u_k) ** e * phis)) ** (1.0 / e)
        lhs_prod = float(np.sum(phi_nodes * fv ** (-2.0 * e) * wv * tws))
        rhs_prod = float(np.sum(phis ** 2 * f_k ** (-2.0 * e)))
        lhs_sup = float(np.max(phi_nodes ** (1.0 / e) / fv))
        rhs_sup = float(np.max(phis ** (1.0 / e) / f_k))

    def triple(lhs: float, rhs: float):
        if lhs == 0.0 and rhs == 0.0:
            return (0.0, 0.0, 1.0)
        return (lhs, rhs, xdiv(lhs, rhs))

    return {
        "sum_form": triple(lhs_sum, rhs_sum),
        "product_form": triple(lhs_prod, rhs_prod),
        "sup_form": triple(lhs_sup, rhs_sup),
    }
