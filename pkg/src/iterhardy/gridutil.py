"""Log-spaced working grids, trapezoid weights, scan-and-refine maximisation
and a checked adaptive quadrature wrapper."""

from __future__ import annotations

import math
import warnings
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import integrate as _sci_integrate

from .extreal import INF

DEFAULT_WINDOW = (1e-8, 1e8)
DEFAULT_GRID_POINTS = 1024

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to converge to the requested tolerance."""


def log_nodes(lo: float, hi: float, n: int) -> np.ndarray:
    if not (0.0 < lo < hi < math.inf):
        raise ValueError(f"need 0 < lo < hi < inf, got ({lo}, {hi})")
    return np.geomspace(lo, hi, n)


def trap_weights(nodes: np.ndarray) -> np.ndarray:
    """Trapezoid weights on an arbitrary sorted node set."""
    w = np.zeros_like(nodes)
    d = np.diff(nodes)
    w[:-1] += 0.5 * d
    w[1:] += 0.5 * d
    return w


def merge_nodes(nodes: np.ndarray, extra: Iterable[float]) -> np.ndarray:
    lo, hi = nodes[0], nodes[-1]
    pts = [x for x in extra if math.isfinite(x) and lo < x < hi]
    if not pts:
        return nodes
    out = np.unique(np.concatenate([nodes, np.asarray(pts, dtype=float)]))
    return out


def running_max(a: np.ndarray) -> np.ndarray:
    return np.maximum.accumulate(a)


def suffix_max(a: np.ndarray) -> np.ndarray:
    return np.maximum.accumulate(a[::-1])[::-1]


def refine_max(
    fn: Callable[[float], float], lo: float, hi: float, iters: int = 48
) -> tuple[float, float]:
    """Golden-section maximum of fn on [lo, hi] in log coordinates.

    Assumes fn is unimodal on the bracket (callers pass one grid cell around a
    scanned argmax); returns (x_best, f_best) including the endpoints.
    """
    a, b = math.log(lo), math.log(hi)
    best_x, best_f = lo, fn(lo)
    fhi = fn(hi)
    if fhi > best_f:
        best_x, best_f = hi, fhi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = fn(math.exp(c)), fn(math.exp(d))
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = fn(math.exp(c))
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = fn(math.exp(d))
        if b - a < 1e-12:
            break
    for x, f in ((math.exp(c), fc), (math.exp(d), fd)):
        if f > best_f:
            best_x, best_f = x, f
    return best_x, best_f


def scan_and_refine(
    fn: Callable[[float], float], nodes: np.ndarray, values: np.ndarray
) -> tuple[float, float]:
    """Maximise fn given its values on a node scan, refining around the argmax."""
    i = int(np.argmax(values))
    best_x, best_f = float(nodes[i]), float(values[i])
    if not math.isfinite(best_f):
        return best_x, best_f
    lo = float(nodes[max(i - 1, 0)])
    hi = float(nodes[min(i + 1, len(nodes) - 1)])
    if lo < hi:
        x, f = refine_max(fn, lo, hi)
        if f > best_f:
            best_x, best_f = x, f
    return best_x, best_f


def bisect_crossing(
    fn: Callable[[float], float],
    target: float,
    lo: float,
    hi: float,
    increasing: bool,
    iters: int = 80,
) -> float:
    """Smallest x in [lo, hi] with fn(x) >= target (increasing fn), or
    fn(x) <= target (decreasing fn). Assumes fn is monotone and that the
    crossing is bracketed; works in log coordinates."""
    a, b = math.log(lo), math.log(hi)
    for _ in range(iters):
        m = 0.5 * (a + b)
        v = fn(math.exp(m))
        hit = v >= target if increasing else v <= target
        if hit:
            b = m
        else:
            a = m
        if b - a < 1e-14:
            break
    return math.exp(b)


def quad_checked(
    fn: Callable[[float], float],
    a: float,
    b: float,
    *,
    atol: float = 1e-10,
    rtol: float = 1e-8,
    points: Sequence[float] | None = None,
) -> float:
    """Adaptive quadrature of fn over (a, b) with an explicit failure mode.

    Splits on the supplied interior points plus a log-spaced initial mesh,
    integrates each chunk adaptively and raises QuadratureError if the summed
    error estimate exceeds the tolerance by two orders of magnitude.
    """
    if b <= a:
        return 0.0
    cuts = [a, b]
    if points:
        cuts.extend(x for x in points if a < x < b and math.isfinite(x))
    if math.isinf(b):
        top = max(a, 1.0) if a > 0 else 1.0
        cuts.extend(top * 10.0 ** k for k in range(1, 9))
        cuts = [c for c in cuts if not math.isinf(c)]
        cuts.append(b)
    if a > 0 and (b / a if math.isfinite(b) else math.inf) > 1e3:
        hi_fin = min(b, max(c for c in cuts if math.isfinite(c)))
        cuts.extend(np.geomspace(a, hi_fin, 8).tolist())
    cuts = sorted(set(cuts))
    total, err_total = 0.0, 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", _sci_integrate.IntegrationWarning)
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            val, err = _sci_integrate.quad(
                fn, lo, hi, epsabs=atol, epsrel=rtol, limit=200
            )
            total += val
            err_total += err
    if not math.isfinite(total):
        return math.inf
    if err_total > 100.0 * max(atol, rtol * abs(total)):
        raise QuadratureError(
            f"quadrature error estimate {err_total:.3e} exceeds tolerance "
            f"for integral value {total:.6e} on ({a}, {b})"
        )
    return total


def power_end_corrections(
    nodes: np.ndarray, fvals: np.ndarray
) -> tuple[float, float]:
    """Head (0, nodes[0]) and tail (nodes[-1], inf) corrections for the
    integral of f, assuming f continues as the power law read off the two
    edge samples.  A head exponent <= -1 or a tail exponent >= -1 yields inf.
    """
    head = 0.0
    f0, f1 = float(fvals[0]), float(fvals[1])
    if f0 > 0 and f1 > 0 and math.isfinite(f0) and math.isfinite(f1):
        kappa = math.log(f1 / f0) / math.log(nodes[1] / nodes[0])
        head = INF if kappa <= -1.0 else f0 * nodes[0] / (kappa + 1.0)
    elif not math.isfinite(f0):
        head = INF
    tail = 0.0
    g0, g1 = float(fvals[-2]), float(fvals[-1])
    if g0 > 0 and g1 > 0 and math.isfinite(g0) and math.isfinite(g1):
        kappa = math.log(g1 / g0) / math.log(nodes[-1] / nodes[-2])
        tail = INF if kappa >= -1.0 else g1 * nodes[-1] / (-kappa - 1.0)
    elif not math.isfinite(g1):
        tail = INF
    return head, tail


def grid_integral(nodes: np.ndarray, fvals: np.ndarray) -> float:
    """Trapezoid integral over the nodes plus power-law end corrections."""
    fvals = np.asarray(fvals, dtype=float)
    if not np.all(np.isfinite(fvals)):
        return INF
    head, tail = power_end_corrections(nodes, fvals)
    core = float(np.sum(fvals * trap_weights(nodes)))
    return core + head + tail


def grid_integral_rows(nodes: np.ndarray, fmat: np.ndarray) -> np.ndarray:
    """grid_integral along axis 1 of fmat (rows = evaluation points),
    vectorizing the edge-slope corrections."""
    tw = trap_weights(nodes)
    core = fmat @ tw
    out = np.array(core, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        f0, f1 = fmat[:, 0], fmat[:, 1]
        kappa = np.log(f1 / f0) / math.log(nodes[1] / nodes[0])
        head = np.where(
            (f0 > 0) & (f1 > 0),
            np.where(kappa <= -1.0, INF, f0 * nodes[0] / (kappa + 1.0)),
            np.where(~np.isfinite(f0), INF, 0.0),
        )
        g0, g1 = fmat[:, -2], fmat[:, -1]
        kap2 = np.log(g1 / g0) / math.log(nodes[-1] / nodes[-2])
        tail = np.where(
            (g0 > 0) & (g1 > 0),
            np.where(kap2 >= -1.0, INF, g1 * nodes[-1] / (-kap2 - 1.0)),
            np.where(~np.isfinite(g1), INF, 0.0),
        )
    out += np.nan_to_num(head, nan=0.0, posinf=INF) + np.nan_to_num(
        tail, nan=0.0, posinf=INF
    )
    bad = ~np.isfinite(fmat).all(axis=1)
    out[bad] = INF
    return out
