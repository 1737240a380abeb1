"""Independent lower bounds for best constants.

Three routes, kept deliberately separate from the condition functionals:
exact corner evaluation where the problem is linear in the test input,
multi-start coordinate ascent over discrete test functions everywhere
else, and the reduction maps connecting the monotone-cone and
kernel-transform forms to the iterated-average family.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .conditions import InequalitySpec, RegimeError, _density_sup_on, json_float
from .extreal import INF, xdiv, xpow
from .gridutil import (
    DEFAULT_WINDOW,
    log_nodes,
    merge_nodes,
    quad_checked,
    refine_max,
    trap_weights,
)
from .quasiconcave import _sup_tail, _tail_integral_coef
from .weights import (
    AFFINE,
    POWER,
    Cell,
    CumulativeWeight,
    WeightError,
    WeightFunction,
)

ATOMS = "atoms"
STEPS = "steps"
CELLS = "cells"


def _trunc_integral(nodes: np.ndarray, fvals: np.ndarray) -> float:
    """Trapezoid integral truncated at the grid edges.

    Evaluator LHS values feed lower-bound certificates, so tails beyond the
    (already window-extended) grid are dropped rather than extrapolated:
    underestimating keeps the certificate sound, and edge extrapolation can
    misread a kink at the last test-function node as a divergent power."""
    fvals = np.asarray(fvals, dtype=float)
    if not np.all(np.isfinite(fvals)):
        return INF
    return float(np.sum(fvals * trap_weights(nodes)))

# test grids live inside the window; inner/outer quadrature grids reach this
# factor past it so end-point power extrapolation sees true asymptotics
_EXT = 1e6
_UNBOUNDED_CUTOFF = 1e12


@dataclass(frozen=True)
class TestFunction:
    """Discrete test input for ratio evaluation.

    kind "atoms": point masses m_i at z_i (h = sum m_i delta_{z_i}).
    kind "steps": a non-increasing step function f = sum m_i chi_{(0, z_i)}.
    kind "cells": a piecewise-constant density, value m_j on (z_j, z_{j+1});
    z then holds the len(m) + 1 cell edges.
    """

    kind: str
    z: tuple
    m: tuple

    def __post_init__(self):
        if self.kind not in (ATOMS, STEPS, CELLS):
            raise ValueError(f"unknown test-function kind {self.kind!r}")
        z = tuple(float(x) for x in self.z)
        m = tuple(float(x) for x in self.m)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "m", m)
        if not z:
            raise ValueError("test function needs at least one location")
        if any(not (0.0 < x < INF) for x in z):
            raise ValueError("locations must be finite and positive")
        if any(b <= a for a, b in zip(z[:-1], z[1:])):
            raise ValueError("locations must be strictly increasing")
        if any(not (x >= 0.0) or math.isinf(x) for x in m):
            raise ValueError("masses must be finite and nonnegative")
        want = len(z) - 1 if self.kind == CELLS else len(z)
        if len(m) != want:
            raise ValueError(f"expected {want} masses for kind {self.kind!r}")

    @classmethod
    def atoms(cls, z, m) -> "TestFunction":
        return cls(ATOMS, tuple(z), tuple(m))

    @classmethod
    def steps(cls, z, m) -> "TestFunction":
        return cls(STEPS, tuple(z), tuple(m))

    @classmethod
    def cells(cls, edges, densities) -> "TestFunction":
        return cls(CELLS, tuple(edges), tuple(densities))

    @property
    def zv(self) -> np.ndarray:
        return np.asarray(self.z, dtype=float)

    @property
    def mv(self) -> np.ndarray:
        return np.asarray(self.m, dtype=float)

    def to_json(self) -> list:
        if self.kind == CELLS:
            # per-cell density keyed by its left edge; trailing zero entry
            # carries the final edge so the function is reconstructible
            out = [
                {"z": z, "m": m} for z, m in zip(self.z[:-1], self.m)
            ]
            out.append({"z": self.z[-1], "m": 0.0})
            return out
        return [{"z": z, "m": m} for z, m in zip(self.z, self.m) if m > 0.0]


@dataclass
class OracleEstimate:
    """A certified lower bound c_lo = LHS(tf)/RHS(tf) for the stored tf."""

    inequality: str
    c_lo: float
    tf: TestFunction | None
    stable: bool
    trace: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "inequality": self.inequality,
            "c_lo": json_float(self.c_lo),
            "atoms": self.tf.to_json() if self.tf is not None else [],
            "stable": bool(self.stable),
        }


def _family_kind(spec: InequalitySpec) -> str:
    if spec.inequality in ("3.1", "3.2"):
        return ATOMS
    if spec.inequality in ("5.1", "5.3"):
        return STEPS
    return ATOMS if spec.p == 1.0 else CELLS


def _work_grid(
    spec: InequalitySpec,
    window: tuple[float, float],
    n: int,
    extra: Sequence[float] = (),
) -> np.ndarray:
    lo, hi = window
    span = math.log10(hi / lo)
    m = max(9, round(n * (span + 2.0 * math.log10(_EXT)) / span))
    pts = list(extra)
    for wf in (spec.u, spec.v, spec.w):
        pts += list(wf.breakpoints())
    return merge_nodes(log_nodes(lo / _EXT, hi * _EXT, m), pts)


def _suffix_sums(m: np.ndarray) -> np.ndarray:
    """S[k] = sum of m[k:], with the trailing S[len] = 0 entry."""
    return np.concatenate([np.cumsum(m[::-1])[::-1], [0.0]])


class _Eval31:
    """LHS/RHS of the iterated-average family on atomic h.

    With H(s) = sum of masses above s constant between atoms, the inner
    integral F(t) = int_0^t H^p u is an exact prefix sum over atom gaps.
    """

    def __init__(self, spec, z, window, n):
        self.spec = spec
        self.p, self.q = spec.p, spec.q
        self.z = np.asarray(z, dtype=float)
        t = _work_grid(spec, window, n, extra=self.z)
        self.t = t
        self.Ut = np.asarray(spec.U.value(t), dtype=float)
        self.wt = np.asarray(spec.w.eval_density(t), dtype=float)
        self.Uz = np.asarray(spec.U.value(self.z), dtype=float)
        self.vz = np.asarray(spec.v.eval_density(self.z), dtype=float)
        self.dU = np.diff(np.concatenate([[0.0], self.Uz]))
        self.UzPad = np.concatenate([[0.0], self.Uz])
        self.kidx = np.searchsorted(self.z, t, side="right")
        if math.isinf(self.q):
            self.head_w = _density_sup_on(spec.w, 0.0, float(t[0]))
            self.tail_wu = _sup_tail(spec.w, spec.U, 1.0 / self.p, float(t[-1]))

    def lhs(self, m) -> float:
        m = np.asarray(m, dtype=float)
        S = _suffix_sums(m)
        with np.errstate(over="ignore"):
            Sp = S**self.p
        P = np.concatenate([[0.0], np.cumsum(Sp[:-1] * self.dU)])
        F = P[self.kidx] + Sp[self.kidx] * (self.Ut - self.UzPad[self.kidx])
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(self.Ut > 0.0, F / self.Ut, 0.0)
        if math.isinf(self.q):
            vals = self.wt * ratio ** (1.0 / self.p)
            best = float(np.max(vals))
            best = max(best, float(S[0]) * self.head_w)
            best = max(best, xpow(float(P[-1]), 1.0 / self.p) * self.tail_wu)
            return best
        with np.errstate(over="ignore"):
            integrand = ratio ** (self.q / self.p) * self.wt
        return xpow(_trunc_integral(self.t, integrand), 1.0 / self.q)

    def rhs(self, m) -> float:
        return float(np.asarray(m, dtype=float) @ self.vz)


class _Eval51:
    """LHS/RHS of the monotone-cone family on steps f = sum a_i chi_{(0,z_i)}.

    int_0^x f u = sum a_i U(min(x, z_i)) splits into a prefix over passed
    steps plus U(x) times the mass still active.
    """

    def __init__(self, spec, z, window, n):
        if math.isinf(spec.p):
            raise ValueError("step-function oracle needs a finite p")
        self.spec = spec
        self.p, self.q = spec.p, spec.q
        self.z = np.asarray(z, dtype=float)
        t = _work_grid(spec, window, n, extra=self.z)
        self.t = t
        self.Ut = np.asarray(spec.U.value(t), dtype=float)
        self.wt = np.asarray(spec.w.eval_density(t), dtype=float)
        self.Uz = np.asarray(spec.U.value(self.z), dtype=float)
        self.dV = np.diff(
            np.concatenate([[0.0], np.asarray(spec.V.value(self.z), dtype=float)])
        )
        self.kidx = np.searchsorted(self.z, t, side="right")
        if math.isinf(self.q):
            self.head_w = _density_sup_on(spec.w, 0.0, float(t[0]))
            self.tail_wu = _sup_tail(spec.w, spec.U, 1.0, float(t[-1]))

    def lhs(self, a) -> float:
        a = np.asarray(a, dtype=float)
        PA = np.concatenate([[0.0], np.cumsum(a * self.Uz)])
        SA = _suffix_sums(a)
        T = PA[self.kidx] + self.Ut * SA[self.kidx]
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(self.Ut > 0.0, T / self.Ut, 0.0)
        if math.isinf(self.q):
            vals = self.wt * ratio
            best = float(np.max(vals))
            best = max(best, float(SA[0]) * self.head_w)
            best = max(best, float(PA[-1]) * self.tail_wu)
            return best
        with np.errstate(over="ignore"):
            integrand = ratio**self.q * self.wt
        return xpow(_trunc_integral(self.t, integrand), 1.0 / self.q)

    def rhs(self, a) -> float:
        SA = _suffix_sums(np.asarray(a, dtype=float))
        with np.errstate(over="ignore"):
            total = float(np.sum(SA[:-1] ** self.p * self.dV))
        return xpow(total, 1.0 / self.p)


class _EvalKernelAtoms:
    """Kernel-transform family at p = 1: g atomic, S g(x) closed form."""

    def __init__(self, spec, z, window, n):
        self.spec = spec
        self.q = spec.q
        self.z = np.asarray(z, dtype=float)
        x = _work_grid(spec, window, n, extra=self.z)
        self.x = x
        Ux = np.asarray(spec.U.value(x), dtype=float)
        Uz = np.asarray(spec.U.value(self.z), dtype=float)
        self.wx = np.asarray(spec.w.eval_density(x), dtype=float)
        self.vz = np.asarray(spec.v.eval_density(self.z), dtype=float)
        with np.errstate(divide="ignore"):
            self.K = 1.0 / (Ux[:, None] + Uz[None, :])

    def lhs(self, m) -> float:
        vec = self.K @ np.asarray(m, dtype=float)
        if math.isinf(self.q):
            return float(np.max(self.wx * vec))
        with np.errstate(over="ignore"):
            integrand = vec**self.q * self.wx
        return xpow(_trunc_integral(self.x, integrand), 1.0 / self.q)

    def rhs(self, m) -> float:
        return float(np.asarray(m, dtype=float) @ self.vz)


class _EvalKernelCells:
    """Kernel-transform family, p != 1: g piecewise constant on cells.

    Per-cell kernel integrals use trapezoid panels of the smooth kernel on
    a refined grid containing the cell edges, so the only error is U's
    curvature within a panel; the RHS weight integrals are closed form.
    """

    def __init__(self, spec, edges, window, n):
        self.spec = spec
        self.p, self.q = spec.p, spec.q
        self.edges = np.asarray(edges, dtype=float)
        ncell = len(self.edges) - 1
        x = _work_grid(spec, window, n, extra=self.edges)
        self.x = x
        Ux = np.asarray(spec.U.value(x), dtype=float)
        self.wx = np.asarray(spec.w.eval_density(x), dtype=float)
        with np.errstate(divide="ignore"):
            A = 1.0 / (Ux[:, None] + Ux[None, :])
        widths = np.diff(x)
        panel = 0.5 * (A[:, :-1] + A[:, 1:]) * widths[None, :]
        mids = np.sqrt(x[:-1] * x[1:])
        cidx = np.searchsorted(self.edges, mids, side="right") - 1
        inside = (cidx >= 0) & (cidx < ncell) & (mids > self.edges[0]) & (
            mids < self.edges[-1]
        )
        self.C = np.zeros((len(x), ncell))
        for j in range(ncell):
            cols = inside & (cidx == j)
            if cols.any():
                self.C[:, j] = panel[:, cols].sum(axis=1)
        self.cellv = np.array(
            [
                spec.v.integrate(a, b)
                for a, b in zip(self.edges[:-1], self.edges[1:])
            ]
        )
        if math.isinf(self.p):
            self.supv = np.array(
                [
                    _density_sup_on(spec.v, a, b)
                    for a, b in zip(self.edges[:-1], self.edges[1:])
                ]
            )

    def lhs(self, rho) -> float:
        vec = self.C @ np.asarray(rho, dtype=float)
        if math.isinf(self.q):
            return float(np.max(self.wx * vec))
        with np.errstate(over="ignore"):
            integrand = vec**self.q * self.wx
        return xpow(_trunc_integral(self.x, integrand), 1.0 / self.q)

    def rhs(self, rho) -> float:
        rho = np.asarray(rho, dtype=float)
        if math.isinf(self.p):
            return float(np.max(rho * self.supv))
        with np.errstate(over="ignore"):
            total = float(np.sum(rho**self.p * self.cellv))
        return xpow(total, 1.0 / self.p)


def _make_evaluator(spec, kind, z, window, n):
    fam = spec.inequality
    if fam in ("3.1", "3.2"):
        if kind != ATOMS:
            raise ValueError(f"{fam} takes atomic test functions, got {kind!r}")
        return _Eval31(spec, z, window, n)
    if fam in ("5.1", "5.3"):
        if kind != STEPS:
            raise ValueError(f"{fam} takes step test functions, got {kind!r}")
        return _Eval51(spec, z, window, n)
    if kind == ATOMS:
        if spec.p != 1.0:
            raise ValueError(
                f"atomic test functions for {fam} need p = 1, got p = {spec.p}"
            )
        return _EvalKernelAtoms(spec, z, window, n)
    if kind != CELLS:
        raise ValueError(f"{fam} takes atom or cell test functions, got {kind!r}")
    return _EvalKernelCells(spec, z, window, n)


def lhs_value(
    spec: InequalitySpec,
    tf: TestFunction,
    *,
    window: tuple[float, float] = DEFAULT_WINDOW,
    n: int = 2049,
) -> float:
    ev = _make_evaluator(spec, tf.kind, tf.zv, window, n)
    return ev.lhs(tf.mv)


def rhs_value(
    spec: InequalitySpec,
    tf: TestFunction,
    *,
    window: tuple[float, float] = DEFAULT_WINDOW,
    n: int = 2049,
) -> float:
    ev = _make_evaluator(spec, tf.kind, tf.zv, window, n)
    return ev.rhs(tf.mv)


def ratio_value(
    spec: InequalitySpec,
    tf: TestFunction,
    *,
    window: tuple[float, float] = DEFAULT_WINDOW,
    n: int = 2049,
) -> float:
    ev = _make_evaluator(spec, tf.kind, tf.zv, window, n)
    return xdiv(ev.lhs(tf.mv), ev.rhs(tf.mv))


def lhs_31(spec: InequalitySpec, h: TestFunction, **kw) -> float:
    if spec.inequality != "3.1":
        raise ValueError(f"lhs_31 needs inequality 3.1, got {spec.inequality}")
    return lhs_value(spec, h, **kw)


def lhs_32(spec: InequalitySpec, h: TestFunction, **kw) -> float:
    if spec.inequality != "3.2":
        raise ValueError(f"lhs_32 needs inequality 3.2, got {spec.inequality}")
    return lhs_value(spec, h, **kw)


# -- exact corner evaluation ----------------------------------------------


def _corner_31(spec, window):
    """Phi(z) = int (U(min(t,z))/U(t)) w dt and its supremum against v."""
    U, w, v = spec.U, spec.w, spec.v
    lo, hi = window
    ext_lo, ext_hi = lo / _EXT, hi * _EXT
    tail_coef, _ = _tail_integral_coef(w, U, 1.0, ext_hi)
    nodes = _work_grid(spec, window, 1025)
    Ut = np.asarray(U.value(nodes), dtype=float)
    wt = np.asarray(w.eval_density(nodes), dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        g = np.where(Ut > 0.0, wt / Ut, 0.0)
    # reverse cumulative of w/U for the scan; exact quadrature for refinement
    panels = 0.5 * (g[:-1] + g[1:]) * np.diff(nodes)
    rev = np.concatenate([np.cumsum(panels[::-1])[::-1], [0.0]]) + tail_coef

    cuts = sorted(
        {float(b) for b in list(w.breakpoints()) + list(spec.u.breakpoints())}
    )

    def tail_exact(z: float) -> float:
        if z >= ext_hi:
            c, _ = _tail_integral_coef(w, U, 1.0, z)
            return c

        def fn(s: float) -> float:
            us = float(U.value(s))
            return w.eval_density(s) / us if us > 0.0 else 0.0

        return quad_checked(fn, z, ext_hi, points=cuts) + tail_coef

    def phi(z: float) -> float:
        uz = float(U.value(z))
        if uz == 0.0:
            return float(w.integrate(0.0, z))
        if math.isinf(uz):
            return float(w.integrate(0.0, z))
        return float(w.integrate(0.0, z)) + uz * tail_exact(z)

    def phi_grid(i: int) -> float:
        return float(w.integrate(0.0, float(nodes[i]))) + Ut[i] * rev[i]

    vz = np.asarray(v.eval_density(nodes), dtype=float)
    scan = np.array([phi_grid(i) for i in range(len(nodes))])
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = np.where(vz > 0.0, scan / vz, INF)
    vals = np.where(scan == 0.0, 0.0, vals)
    # certificate points stay inside the window; the wider grid is only
    # there so the reverse-cumulative tail below is accurate
    vals = np.where((nodes >= lo) & (nodes <= hi), vals, 0.0)
    i = int(np.nanargmax(vals))
    best_z, best = float(nodes[i]), float(vals[i])
    if math.isfinite(best):
        a = float(nodes[max(i - 1, 0)])
        b = float(nodes[min(i + 1, len(nodes) - 1)])

        def target(z: float) -> float:
            dv = v.eval_density(z)
            return xdiv(phi(z), dv)

        if a < b:
            zr, fr = refine_max(target, a, b)
            if fr > best:
                best_z, best = zr, fr
    return best, best_z, phi


def _corner_32(spec, window):
    """Psi(z) = sup_t w(t) U(min(t,z))/U(t) and its supremum against v."""
    U, w, v = spec.U, spec.w, spec.v
    lo, hi = window
    nodes = _work_grid(spec, window, 1025)
    Ut = np.asarray(U.value(nodes), dtype=float)
    wt = np.asarray(w.eval_density(nodes), dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        g = np.where(Ut > 0.0, wt / Ut, 0.0)
    suffix = np.maximum.accumulate(g[::-1])[::-1]
    tail = _sup_tail(w, U, 1.0, float(nodes[-1]))

    def psi(z: float) -> float:
        head = _density_sup_on(w, 0.0, z)
        uz = float(U.value(z))
        i = int(np.searchsorted(nodes, z, side="left"))
        after = float(suffix[i]) if i < len(nodes) else 0.0
        return max(head, uz * max(after, tail))

    vals = []
    for i, z in enumerate(nodes):
        vals.append(psi(float(z)))
    vals = np.asarray(vals)
    vz = np.asarray(v.eval_density(nodes), dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(vz > 0.0, vals / vz, INF)
    ratio = np.where(vals == 0.0, 0.0, ratio)
    ratio = np.where((nodes >= lo) & (nodes <= hi), ratio, 0.0)
    i = int(np.nanargmax(ratio))
    best_z, best = float(nodes[i]), float(ratio[i])
    if math.isfinite(best):
        a = float(nodes[max(i - 1, 0)])
        b = float(nodes[min(i + 1, len(nodes) - 1)])
        if a < b:
            zr, fr = refine_max(lambda z: xdiv(psi(z), v.eval_density(z)), a, b)
            if fr > best:
                best_z, best = zr, fr
    return best, best_z, psi


def exact_kernel_constant(
    spec: InequalitySpec, *, window: tuple[float, float] = DEFAULT_WINDOW
):
    """Best constant where the problem is linear in the test input.

    Supported: inequality 3.1 at (p, q) = (1, 1) and 3.2 at (p, q) = (1, inf).
    Returns (value, Phi) with Phi the one-corner kernel function of z.
    """
    if spec.inequality == "3.1" and spec.p == 1.0 and spec.q == 1.0:
        value, _, phi = _corner_31(spec, window)
        return value, phi
    if spec.inequality == "3.2" and spec.p == 1.0 and math.isinf(spec.q):
        value, _, psi = _corner_32(spec, window)
        return value, psi
    raise RegimeError(
        "exact corner evaluation needs (p, q) = (1, 1) on 3.1 or (1, inf) on 3.2"
    )


# -- coordinate ascent ------------------------------------------------------


def _ascend(ratio_fn, v0, rng, max_sweeps, sweep_tol, cutoff):
    v = np.array(v0, dtype=float)
    best = ratio_fn(v)
    if not best >= 0.0:
        best = 0.0
    sweeps = 0
    for s in range(max_sweeps):
        sweeps = s + 1
        sweep_start = best
        for i in rng.permutation(len(v)):
            cur = float(v[i])
            mean = float(np.mean(v))
            for cand in (cur * 2.0, cur * 0.5, cur + 0.2 * mean, 0.0):
                if cand == cur:
                    continue
                v[i] = cand
                r = ratio_fn(v)
                if r > best * (1.0 + 1e-12):
                    best = r
                    cur = cand
                else:
                    v[i] = cur
            if best > cutoff:
                return best, v, sweeps
        peak = float(np.max(v))
        if peak > 0.0:
            v /= peak
        if not math.isfinite(best) or (
            math.isfinite(sweep_start) and best <= sweep_start * (1.0 + sweep_tol)
        ):
            break
    return best, v, sweeps


def _lift(vec: np.ndarray, dim: int, kind: str) -> np.ndarray:
    """Carry a maximizer to the doubled grid (node i maps to node 2i)."""
    out = np.zeros(dim)
    if kind == CELLS:
        for j, val in enumerate(vec):
            out[2 * j] = val
            out[2 * j + 1] = val
        return out
    for i, val in enumerate(vec):
        out[min(2 * i, dim - 1)] += val
    return out


def _vec_to_tf(kind: str, z: np.ndarray, vec: np.ndarray) -> TestFunction:
    if kind == CELLS:
        return TestFunction.cells(z, vec)
    if kind == STEPS:
        return TestFunction.steps(z, vec)
    return TestFunction.atoms(z, vec)


def maximize_ratio(
    spec: InequalitySpec,
    levels=(65, 129, 257),
    restarts: int = 3,
    *,
    window: tuple[float, float] = DEFAULT_WINDOW,
    seed: int = 0,
    max_sweeps: int = 30,
    sweep_tol: float = 1e-3,
    work_n: int = 513,
    final_n: int = 2049,
) -> OracleEstimate:
    """Multi-start coordinate ascent over test masses on nested log grids.

    Starts per level: the best single-coordinate vector, uniform masses,
    the lifted previous-level maximizer, and ``restarts`` random vectors.
    Ratios above 1e12 are reported as an unbounded problem (+inf).
    """
    if isinstance(levels, int):
        levels = (levels,)
    rng = np.random.default_rng(seed)
    kind = _family_kind(spec)
    cutoff = _UNBOUNDED_CUTOFF
    trace: list = []
    level_best: list = []
    prev_vec = None
    unbounded = 0
    for L in levels:
        z = log_nodes(window[0], window[1], int(L))
        ev = _make_evaluator(spec, kind, z, window, work_n)
        dim = len(z) - 1 if kind == CELLS else len(z)

        def ratio(vec, _ev=ev):
            return xdiv(_ev.lhs(vec), _ev.rhs(vec))

        corner_r = np.empty(dim)
        for i in range(dim):
            e = np.zeros(dim)
            e[i] = 1.0
            corner_r[i] = ratio(e)
        e0 = np.zeros(dim)
        e0[int(np.nanargmax(corner_r))] = 1.0
        starts = [("corner", e0), ("uniform", np.ones(dim))]
        if prev_vec is not None:
            starts.append(("lifted", _lift(prev_vec, dim, kind)))
        for k in range(restarts):
            starts.append((f"random{k}", rng.uniform(0.1, 1.0, dim)))

        lvl_c, lvl_vec = -1.0, e0
        for label, v0 in starts:
            c, vec, nsw = _ascend(ratio, v0, rng, max_sweeps, sweep_tol, cutoff)
            trace.append(
                {
                    "level": int(L),
                    "start": label,
                    "c": json_float(c),
                    "sweeps": nsw,
                }
            )
            if c > lvl_c:
                lvl_c, lvl_vec = c, vec.copy()
            if c > cutoff:
                break
        if lvl_c > cutoff:
            unbounded += 1
        level_best.append((z, lvl_vec, lvl_c))
        prev_vec = lvl_vec

    if unbounded:
        z, vec, _ = level_best[-1]
        tf = _vec_to_tf(kind, z, vec)
        return OracleEstimate(
            spec.inequality, INF, tf, stable=unbounded >= 2, trace=trace
        )

    finals = []
    best_c, best_tf = -1.0, None
    for z, vec, _ in level_best:
        tf = _vec_to_tf(kind, z, vec)
        c = ratio_value(spec, tf, window=window, n=final_n)
        finals.append(c)
        if c > best_c:
            best_c, best_tf = c, tf
    if best_c > cutoff:
        best_c = INF
    if len(finals) >= 2 and math.isfinite(finals[-2]) and finals[-2] > 0.0:
        stable = finals[-1] <= 1.3 * finals[-2]
    else:
        stable = len(finals) == 1
    return OracleEstimate(spec.inequality, float(best_c), best_tf, stable, trace)


# -- reduction maps ---------------------------------------------------------


def cumulative_as_weight(v: WeightFunction) -> WeightFunction:
    """The running integral V(t) of v, re-expressed as a closed-form density.

    Representable shapes: a single power cell from zero, or a power first
    cell followed by constant cells whose last (unbounded) cell vanishes.
    """
    cells = v.cells
    first = cells[0]
    if first.kind != POWER or first.shift != 0.0:
        raise WeightError("cumulative not representable: first cell must be a pure power")
    V = CumulativeWeight(v)
    out = []
    if len(cells) == 1:
        g = first.b + 1.0
        return WeightFunction([Cell(0.0, INF, POWER, first.a / g, first.b + 1.0)])
    if first.b != 0.0:
        g = first.b + 1.0
        out.append(Cell(0.0, first.hi, POWER, first.a / g, first.b + 1.0))
        rest = cells[1:]
    else:
        out.append(Cell(0.0, first.hi, AFFINE, 0.0, first.a))
        rest = cells[1:]
    for c in rest:
        if c.kind != POWER or c.shift != 0.0 or c.b != 0.0:
            raise WeightError(
                "cumulative not representable: trailing cells must be constant"
            )
        v0 = float(V.value(c.lo))
        if math.isinf(c.hi):
            if c.a != 0.0:
                raise WeightError(
                    "cumulative grows linearly at infinity; not representable"
                )
            out.append(Cell(c.lo, INF, POWER, v0, 0.0))
        else:
            out.append(Cell(c.lo, c.hi, AFFINE, v0 - c.a * c.lo, c.a))
    return WeightFunction(out)


@dataclass(frozen=True)
class MonotoneReduction:
    """Monotone-cone problem recast over arbitrary nonnegative inputs.

    Writing f^p(t) = int_t^inf h turns the step problem into the
    iterated-average family at exponents (1/p, q/p) with RHS weight V;
    best constants satisfy C = c**constant_power exactly, and mapped test
    functions preserve the ratio (raised to that power).
    """

    original: InequalitySpec
    spec: InequalitySpec
    constant_power: float

    def map_test_function(self, f: TestFunction) -> TestFunction:
        if f.kind != STEPS:
            raise ValueError("expected a step test function")
        S = _suffix_sums(f.mv)
        p = self.constant_power
        with np.errstate(over="ignore"):
            masses = S[:-1] ** p - S[1:] ** p
        return TestFunction.atoms(f.z, np.maximum(masses, 0.0))

    def map_back(self, h: TestFunction) -> TestFunction:
        if h.kind != ATOMS:
            raise ValueError("expected an atomic test function")
        S = _suffix_sums(h.mv)
        e = 1.0 / self.constant_power
        with np.errstate(over="ignore"):
            incr = S[:-1] ** e - S[1:] ** e
        return TestFunction.steps(h.z, np.maximum(incr, 0.0))


def reduce_monotone(spec: InequalitySpec) -> MonotoneReduction:
    if spec.inequality not in ("5.1", "5.3"):
        raise ValueError(f"reduce_monotone needs 5.1 or 5.3, got {spec.inequality}")
    if math.isinf(spec.p):
        raise WeightError("monotone reduction needs a finite integrability exponent")
    vtilde = cumulative_as_weight(spec.v)
    if spec.inequality == "5.1":
        new_id, new_q, wtilde = "3.1", spec.q / spec.p, spec.w
    else:
        # sup of w * (average)^p equals (sup of w^(1/p) * average)^p, so the
        # sup-form reduction must carry w^p to preserve ratios exactly
        new_id, new_q, wtilde = "3.2", INF, spec.w.powered(spec.p)
    reduced = InequalitySpec(new_id, 1.0 / spec.p, new_q, spec.u, vtilde, wtilde)
    return MonotoneReduction(spec, reduced, spec.p)


@dataclass(frozen=True)
class StieltjesReduction:
    """Kernel-transform problem re-read through the averaging operator.

    Substituting g = h U maps the problem to the iterated-average form
    with RHS weight U^p v; the kernel comparison keeps the value within
    the recorded two-sided factor. The identity battery certifies the
    underlying Fubini computation numerically.
    """

    original: InequalitySpec
    reduced: InequalitySpec | None
    rhs_weight: str
    constant_bounds: tuple[float, float]
    cases: int
    max_residual: float
    ratio_min: float
    ratio_max: float


def fubini_lhs(u: WeightFunction, h: TestFunction, x: float) -> float:
    """int_0^x (int_t^inf h) u dt by adaptive quadrature between jumps."""
    if h.kind != ATOMS:
        raise ValueError("expected an atomic test function")
    z, m = h.zv, h.mv

    def step(t: float) -> float:
        return float(m[z > t].sum())

    cuts = [float(c) for c in z if 0.0 < c < x]
    cuts += [float(b) for b in u.breakpoints() if 0.0 < b < x]
    # pure relative control: the integral can sit far below any fixed
    # absolute tolerance when x is tiny, yet it is strictly positive
    return quad_checked(
        lambda t: step(t) * float(u.eval_density(t)),
        0.0,
        x,
        atol=0.0,
        rtol=1e-11,
        points=sorted(cuts),
    )


def fubini_rhs(U: CumulativeWeight, h: TestFunction, x: float) -> float:
    """int min(U(x), U(s)) h(ds) in closed form."""
    Ux = float(U.value(x))
    Uz = np.asarray(U.value(h.zv), dtype=float)
    return float(np.sum(h.mv * np.minimum(Ux, Uz)))


def kernel_comparison_ratio(U: CumulativeWeight, h: TestFunction, x: float) -> float:
    """U(x) S(hU)(x) over the min-kernel integral; always in [1/2, 1]."""
    Ux = float(U.value(x))
    Uz = np.asarray(U.value(h.zv), dtype=float)
    num = Ux * float(np.sum(h.mv * Uz / (Uz + Ux)))
    den = float(np.sum(h.mv * np.minimum(Ux, Uz)))
    return xdiv(num, den)


def _random_power_weight(rng) -> WeightFunction:
    ncell = int(rng.integers(1, 4))
    knots = np.sort(10.0 ** rng.uniform(-4.0, 4.0, size=ncell - 1))
    edges = [0.0] + [float(k) for k in knots] + [INF]
    pieces = []
    for a, b in zip(edges[:-1], edges[1:]):
        coef = float(10.0 ** rng.uniform(-1.0, 1.0))
        expo = float(rng.uniform(-0.5, 1.5))
        pieces.append((a, b, coef, expo))
    return WeightFunction.piecewise_power(pieces)


def reduce_stieltjes(
    spec: InequalitySpec,
    cases: int = 50,
    seed: int = 101,
    tol: float = 1e-8,
) -> StieltjesReduction:
    if spec.inequality not in ("5.5", "5.7"):
        raise ValueError(f"reduce_stieltjes needs 5.5 or 5.7, got {spec.inequality}")
    rng = np.random.default_rng(seed)
    max_res = 0.0
    rmin, rmax = INF, 0.0
    for k in range(cases):
        u = _random_power_weight(rng)
        U = CumulativeWeight(u)
        nat = int(rng.integers(1, 6))
        z = np.sort(10.0 ** rng.uniform(-6.0, 6.0, size=nat))
        z = np.unique(z)
        m = 10.0 ** rng.uniform(-1.0, 1.0, size=len(z))
        h = TestFunction.atoms(z, m)
        x = float(10.0 ** rng.uniform(-6.0, 6.0))
        lhs = fubini_lhs(u, h, x)
        rhs = fubini_rhs(U, h, x)
        scale = max(abs(lhs), abs(rhs), 1e-300)
        res = abs(lhs - rhs) / scale
        max_res = max(max_res, res)
        if res > tol:
            raise RuntimeError(
                f"Fubini identity residual {res:.3e} above {tol:.1e} "
                f"(case {k}: x={x:.6g}, lhs={lhs:.12g}, rhs={rhs:.12g})"
            )
        ratio = kernel_comparison_ratio(U, h, x)
        rmin, rmax = min(rmin, ratio), max(rmax, ratio)

    reduced = None
    note = "U(t)^p v(t)" if spec.p != 1.0 else "U(t) v(t)"
    if spec.p == 1.0:
        ucells = spec.u.cells
        uconst = (
            len(ucells) == 1
            and ucells[0].kind == POWER
            and ucells[0].b == 0.0
            and ucells[0].shift == 0.0
        )
        vpow = all(c.kind == POWER and c.shift == 0.0 for c in spec.v.cells)
        if uconst and vpow:
            u0 = ucells[0].a
            tilde = [
                Cell(c.lo, c.hi, POWER, u0 * c.a, c.b + 1.0) for c in spec.v.cells
            ]
            new_id = "3.1" if spec.inequality == "5.5" else "3.2"
            reduced = InequalitySpec(
                new_id, 1.0, spec.q, spec.u, WeightFunction(tilde), spec.w
            )
    return StieltjesReduction(
        original=spec,
        reduced=reduced,
        rhs_weight=note,
        constant_bounds=(1.0, 2.0),
        cases=cases,
        max_residual=max_res,
        ratio_min=float(rmin),
        ratio_max=float(rmax),
    )


# -- dispatcher -------------------------------------------------------------


def _exact_sup_estimate(spec, window, n=1025) -> OracleEstimate:
    """p = inf kernel transform: the extremizer is g = 1/v exactly."""
    t = _work_grid(spec, window, n)
    Ut = np.asarray(spec.U.value(t), dtype=float)
    vt = np.asarray(spec.v.eval_density(t), dtype=float)
    wt = np.asarray(spec.w.eval_density(t), dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        A = 1.0 / ((Ut[:, None] + Ut[None, :]) * vt[None, :])
    A = np.nan_to_num(A, nan=0.0, posinf=INF)
    widths = np.diff(t)
    G = np.sum(0.5 * (A[:, :-1] + A[:, 1:]) * widths[None, :], axis=1)
    if math.isinf(spec.q):
        c = float(np.max(wt * G))
    else:
        with np.errstate(over="ignore"):
            c = xpow(_trunc_integral(t, G**spec.q * wt), 1.0 / spec.q)
    return OracleEstimate(
        spec.inequality,
        float(c),
        None,
        stable=True,
        trace=[{"path": "exact-sup", "note": "extremal input 1/v"}],
    )


def estimate_best_constant(
    spec: InequalitySpec,
    *,
    window: tuple[float, float] = DEFAULT_WINDOW,
    seed: int = 0,
    levels=(65, 129, 257),
) -> OracleEstimate:
    """Route to the sharpest available oracle for the spec's regime."""
    ineq, p, q = spec.inequality, spec.p, spec.q
    if (ineq == "3.1" and p == 1.0 and q == 1.0) or (
        ineq == "3.2" and p == 1.0 and math.isinf(q)
    ):
        corner = _corner_31 if ineq == "3.1" else _corner_32
        value, zstar, _ = corner(spec, window)
        tf = TestFunction.atoms([zstar], [1.0])
        c_lo = ratio_value(spec, tf, window=window)
        return OracleEstimate(
            ineq,
            c_lo if math.isfinite(value) else value,
            tf,
            stable=True,
            trace=[{"path": "exact-corner", "value": json_float(value)}],
        )
    if ineq in ("5.1", "5.3"):
        try:
            red = reduce_monotone(spec)
        except (WeightError, ValueError):
            red = None
        if red is not None:
            inner = estimate_best_constant(
                red.spec, window=window, seed=seed, levels=levels
            )
            if inner.tf is None or math.isinf(inner.c_lo):
                c_lo = xpow(inner.c_lo, 1.0 / p)
                return OracleEstimate(
                    ineq, c_lo, None, inner.stable, [{"path": "reduced"}] + inner.trace
                )
            tf = red.map_back(inner.tf)
            c_lo = ratio_value(spec, tf, window=window)
            return OracleEstimate(
                ineq, c_lo, tf, inner.stable, [{"path": "reduced"}] + inner.trace
            )
        return maximize_ratio(spec, levels, window=window, seed=seed)
    if ineq in ("5.5", "5.7") and math.isinf(p):
        return _exact_sup_estimate(spec, window)
    return maximize_ratio(spec, levels, window=window, seed=seed)
