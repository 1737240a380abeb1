"""Weight conditions characterizing iterated Hardy-type inequalities.

Six inequality families are supported, keyed by the identifiers used in
input spec files:

* ``"3.1"`` -- integral form: the q-norm (weight w) of the averaged inner
  operator is bounded by a constant times ``int h v``.
* ``"3.2"`` -- sup form of the same left-hand side (q = inf).
* ``"5.1"`` / ``"5.3"`` -- weighted Hardy inequality on the cone of
  non-increasing functions, integral / sup form.
* ``"5.5"`` / ``"5.7"`` -- Hardy inequality restricted to the quasiconcave
  cone generated by U, integral / sup form.

For each family and each exponent regime there is a single explicit
functional of (p, q, u, v, w), named I1..I6, C1..C6, S1..S8, whose
finiteness is equivalent to the inequality and whose value is two-sided
equivalent to the best constant.  ``compute_condition`` evaluates the
functional for the regime the spec lands in and returns a
``ConditionReport``.

Numerics: everything is evaluated on one merged logarithmic grid over the
window, products of building blocks use kernel matrices, integrals over the
half line get power-law end corrections, and suprema are polished with a
golden-section pass using exact per-point evaluators.  Inner suprema and
essential suprema are taken over the window; integrals extrapolate power
behavior past the window edges.  Divergence therefore shows up either as an
``inf`` value or as growth under window doubling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

from .extreal import INF, conjugate_exponent, xdiv, xpow
from .gridutil import (
    DEFAULT_GRID_POINTS,
    DEFAULT_WINDOW,
    grid_integral,
    grid_integral_rows,
    log_nodes,
    merge_nodes,
    refine_max,
    running_max,
    suffix_max,
)
from .measures import (
    MonotoneEnvelope,
    envelope_of_reciprocal,
    envelope_power,
    stieltjes_integral,
    stieltjes_measure,
)
from .quasiconcave import (
    DiscretizingSequence,
    FundamentalFunction,
    _sup_tail,
    fundamental_function,
    least_majorant,
    phi_exact,
)
from .weights import (
    Clause,
    CumulativeWeight,
    Exponents,
    NotLocallyIntegrableError,
    WeightFunction,
    check_admissible,
    check_nondegenerate,
    reciprocal_envelope,
)

INTEGRAL_FORM_IDS = frozenset({"3.1", "5.1", "5.5"})
SUP_FORM_IDS = frozenset({"3.2", "5.3", "5.7"})
KNOWN_IDS = INTEGRAL_FORM_IDS | SUP_FORM_IDS

_SPEC_KEYS = {"inequality", "p", "q", "u", "v", "w"}


class RegimeError(ValueError):
    """The exponent pair falls outside the characterized regimes."""


def json_float(x: float):
    """JSON-safe scalar: non-finite floats become the strings used in
    reports and CSV output ("inf", "-inf", "nan")."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def parse_float(x) -> float:
    if isinstance(x, str):
        s = x.strip().lower()
        if s in {"inf", "+inf", "infinity"}:
            return INF
        if s == "-inf":
            return -INF
        if s == "nan":
            return math.nan
        return float(x)
    return float(x)


@dataclass(frozen=True)
class InequalitySpec:
    """One inequality instance: family id, exponents, and the three weights."""

    inequality: str
    p: float
    q: float
    u: WeightFunction
    v: WeightFunction
    w: WeightFunction

    def __post_init__(self) -> None:
        if self.inequality not in KNOWN_IDS:
            raise ValueError(
                f"unknown inequality {self.inequality!r}; expected one of "
                f"{sorted(KNOWN_IDS)}"
            )
        p, q = float(self.p), float(self.q)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        if not p > 0.0:
            raise ValueError(f"p must be positive, got {p}")
        if math.isinf(p) and self.inequality not in {"5.5", "5.7"}:
            raise ValueError(
                f"p = inf is only meaningful for 5.5 and 5.7, not {self.inequality}"
            )
        if self.inequality in SUP_FORM_IDS:
            if not math.isinf(q):
                raise ValueError(
                    f"inequality {self.inequality} is a sup form; q must be inf"
                )
        else:
            if not (0.0 < q < INF):
                raise ValueError(
                    f"inequality {self.inequality} needs 0 < q < inf, got {q}"
                )
        self.U  # force the local-integrability check of u up front

    @cached_property
    def U(self) -> CumulativeWeight:
        return CumulativeWeight(self.u)

    @cached_property
    def V(self) -> CumulativeWeight:
        # Lazy: 5.5/5.7 never integrate v, and v = 1/t style weights are
        # legitimate there despite having no finite primitive.
        return CumulativeWeight(self.v)

    @classmethod
    def from_json(cls, data: dict) -> "InequalitySpec":
        if not isinstance(data, dict):
            raise ValueError("spec must be a JSON object")
        unknown = set(data) - _SPEC_KEYS
        if unknown:
            raise ValueError(f"unknown spec fields: {sorted(unknown)}")
        missing = _SPEC_KEYS - set(data) - {"q"}
        if missing:
            raise ValueError(f"missing spec fields: {sorted(missing)}")
        inequality = str(data["inequality"])
        if "q" in data:
            q = parse_float(data["q"])
        elif inequality in SUP_FORM_IDS:
            q = INF
        else:
            raise ValueError("missing spec fields: ['q']")
        return cls(
            inequality=inequality,
            p=parse_float(data["p"]),
            q=q,
            u=WeightFunction.from_json(data["u"]),
            v=WeightFunction.from_json(data["v"]),
            w=WeightFunction.from_json(data["w"]),
        )

    def to_json(self) -> dict:
        return {
            "inequality": self.inequality,
            "p": json_float(self.p),
            "q": json_float(self.q),
            "u": self.u.to_json(),
            "v": self.v.to_json(),
            "w": self.w.to_json(),
        }

    def with_weights(self, u=None, v=None, w=None) -> "InequalitySpec":
        return InequalitySpec(
            inequality=self.inequality,
            p=self.p,
            q=self.q,
            u=u if u is not None else self.u,
            v=v if v is not None else self.v,
            w=w if w is not None else self.w,
        )


@dataclass
class ConditionReport:
    formula: str
    value: float
    regime: str
    error_est: float
    warnings: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "formula": self.formula,
            "value": json_float(self.value),
            "regime": self.regime,
            "error_est": json_float(self.error_est),
            "warnings": list(self.warnings),
        }


def _density_sup_on(w: WeightFunction, a: float, b: float) -> float:
    """sup of the density of w over (a, b); densities are monotone per cell,
    so cell-endpoint values suffice."""
    out = 0.0
    for c in w.cells:
        x, y = max(c.lo, a), min(c.hi, b)
        if y <= x:
            continue
        for t in (x, y):
            if t == 0.0:
                if c.kind == "power" and c.a > 0 and c.b < 0 and c.shift == 0.0:
                    return INF
                out = max(out, c.density(max(t, 1e-300)) if c.kind != "power" else (
                    c.a * c.shift**c.b if c.shift > 0 else (c.a if c.b == 0 else 0.0)
                ))
            elif math.isinf(t):
                if c.kind == "power" and c.a > 0 and c.b > 0:
                    return INF
                if c.kind == "power" and c.a > 0 and c.b == 0:
                    out = max(out, c.a)
            else:
                out = max(out, c.density(t))
    return out


def vprod(*arrays: np.ndarray) -> np.ndarray:
    """Elementwise product under the convention 0 * inf = 0."""
    arrays = [np.asarray(a, dtype=float) for a in arrays]
    with np.errstate(invalid="ignore", over="ignore"):
        out = arrays[0].copy()
        for a in arrays[1:]:
            out = out * a
    zero = np.zeros(out.shape, dtype=bool)
    for a in arrays:
        zero |= a == 0.0
    out[np.isnan(out) & zero] = 0.0
    return out


def vpow(a: np.ndarray, e: float) -> np.ndarray:
    """Elementwise power under the conventions a^0 = 1, 1/0 = inf."""
    a = np.asarray(a, dtype=float)
    if e == 0.0:
        return np.ones_like(a)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        out = np.power(a, e)
    return out


def sequence_norm(terms, rho: float) -> float:
    """l^rho norm of a finite nonnegative sequence (max when rho = inf)."""
    arr = np.asarray(list(terms), dtype=float)
    if arr.size == 0:
        return 0.0
    if np.isnan(arr).any():
        return math.nan
    if math.isinf(rho):
        return float(np.max(arr))
    if np.isinf(arr).any():
        return INF
    with np.errstate(over="ignore"):
        total = float(np.sum(arr**rho))
    return xpow(total, 1.0 / rho)


class EvalContext:
    """Shared grid, kernel matrices, and cached building blocks for one spec.

    All building blocks are arrays over ``nodes`` plus, where noted, an
    exact per-point evaluator used to polish outer suprema.
    """

    def __init__(
        self,
        spec: InequalitySpec,
        window: tuple[float, float] = DEFAULT_WINDOW,
        grid_points: int = DEFAULT_GRID_POINTS,
    ):
        lo, hi = float(window[0]), float(window[1])
        if not (0.0 < lo < hi < INF):
            raise ValueError(f"window must satisfy 0 < lo < hi < inf, got {window}")
        self.spec = spec
        self.window = (lo, hi)
        self.grid_points = int(grid_points)
        self.U = spec.U
        extras = list(spec.u.breakpoints()) + list(spec.v.breakpoints()) + list(
            spec.w.breakpoints()
        )
        self.envelope: MonotoneEnvelope = envelope_of_reciprocal(spec.v)
        extras += list(self.envelope.breakpoints())
        self.nodes = merge_nodes(log_nodes(lo, hi, self.grid_points), extras)
        self.uv = np.asarray(self.U.value(self.nodes), dtype=float)
        self.wv = np.asarray(spec.w.eval_density(self.nodes), dtype=float)
        self.vv = np.asarray(spec.v.eval_density(self.nodes), dtype=float)
        self.env_values = self.envelope.value_array(self.nodes)
        dlogs = np.diff(np.log(self.nodes))
        self.grid_rel_err = float(4.0 * np.max(dlogs) ** 2)
        self._phi_cache: dict = {}
        self._measure_cache: dict = {}
        self._kernel_cache: dict = {}
        self._block_cache: dict = {}
        self._majorant: FundamentalFunction | None = None
        self._dense: np.ndarray | None = None
        self._itnodes: np.ndarray | None = None

    # -- grids -------------------------------------------------------------

    def _extended_grid(self, factor: int) -> np.ndarray:
        """Inner-integral grid reaching a few decades past the window so that
        end-point power extrapolation sees the true asymptotics of integrands
        shaped like (U(t) + U(x))^{-e} even when U(x) sits at a window edge."""
        lo, hi = self.window
        span = math.log10(hi / lo)
        n = max(2, round(factor * self.grid_points * (span + 12.0) / span))
        extras = (
            list(self.spec.u.breakpoints())
            + list(self.spec.v.breakpoints())
            + list(self.spec.w.breakpoints())
        )
        return merge_nodes(log_nodes(lo * 1e-6, hi * 1e6, n), extras)

    @property
    def itnodes(self) -> np.ndarray:
        """Extended grid for vectorised inner integrals."""
        if self._itnodes is None:
            self._itnodes = self._extended_grid(1)
        return self._itnodes

    @property
    def dense_nodes(self) -> np.ndarray:
        """4x refined extended grid used by exact per-point evaluators."""
        if self._dense is None:
            self._dense = self._extended_grid(4)
        return self._dense

    # -- fundamental function phi ------------------------------------------

    def phi(self, r: float) -> FundamentalFunction:
        key = round(float(r), 12)
        if key not in self._phi_cache:
            self._phi_cache[key] = fundamental_function(
                self.spec.w, self.U, r, window=self.window, n=self.grid_points
            )
        return self._phi_cache[key]

    def phi_values(self, r: float) -> np.ndarray:
        return self.phi(r).values_at(self.nodes)

    def phi_point(self, r: float) -> Callable[[float], float]:
        def fn(x: float) -> float:
            return phi_exact(self.spec.w, self.U, r, x, window=self.window)

        return fn

    def majorant(self) -> FundamentalFunction:
        if self._majorant is None:
            self._majorant = least_majorant(
                self.spec.w, self.U, self.spec.p, window=self.window, n=self.grid_points
            )
        return self._majorant

    # -- kernels -------------------------------------------------------------

    def kernel(self, e: float) -> np.ndarray:
        """Matrix K[i, j] = (U(x_i) / (U(x_i) + U(t_j)))^e over the grid."""
        key = round(float(e), 12)
        if key not in self._kernel_cache:
            uv = self.uv
            with np.errstate(divide="ignore", invalid="ignore"):
                ratio = uv[:, None] / (uv[:, None] + uv[None, :])
            ratio = np.nan_to_num(ratio, nan=0.0, posinf=1.0)
            self._kernel_cache[key] = vpow(ratio, e)
        return self._kernel_cache[key]

    # -- measure mu = d(-vbar(t-, inf)^{p*}) ---------------------------------

    def measure(self, pstar: float):
        key = round(float(pstar), 12)
        if key not in self._measure_cache:
            self._measure_cache[key] = stieltjes_measure(
                envelope_power(self.spec.v, pstar)
            )
        return self._measure_cache[key]

    def _u_at_inf_factor(self, xs: np.ndarray, e: float):
        """(lim_t U(t)/(U(t)+U(x)))^e, the kernel value at t = inf."""
        total = self.U.total
        if math.isinf(total):
            return np.ones_like(xs)
        return vpow(total / (total + xs), e)

    def M_values(self, e: float, pstar: float) -> np.ndarray:
        """Moment of mu against the kernel (U(t)/(U(t)+U(x)))^e, including
        the mass escaping to infinity weighted by the kernel limit."""
        key = ("M", round(float(e), 12), round(float(pstar), 12))
        if key not in self._block_cache:
            mu = self.measure(pstar)
            uv = self.uv
            out = mu.mass_at_inf * self._u_at_inf_factor(uv, e)
            for loc, mass in mu.atoms:
                ut = float(self.U.value(loc))
                with np.errstate(divide="ignore", invalid="ignore"):
                    k = np.where(ut + uv > 0, ut / (ut + uv), 0.0)
                out = out + mass * vpow(k, e)
            if mu.ac_segments:
                tn = self.itnodes
                dens = mu.ac_density(tn)
                if np.any(dens > 0):
                    ut = np.asarray(self.U.value(tn), dtype=float)
                    with np.errstate(divide="ignore", invalid="ignore"):
                        base = np.nan_to_num(
                            ut[None, :] / (ut[None, :] + uv[:, None]),
                            nan=0.0,
                            posinf=1.0,
                        )
                    kmat = vpow(base, e)
                    out = out + grid_integral_rows(tn, kmat * dens[None, :])
            self._block_cache[key] = out
        return self._block_cache[key]

    def M_point(self, e: float, pstar: float) -> Callable[[float], float]:
        mu = self.measure(pstar)
        U = self.U

        def fn(x: float) -> float:
            ux = float(U.value(x))

            def kern(t: float) -> float:
                ut = float(U.value(t))
                if math.isinf(ut):
                    base = 1.0
                else:
                    den = ut + ux
                    base = ut / den if den > 0 else 0.0
                return xpow(base, e)

            total = stieltjes_integral(kern, mu, 0.0, INF, include_left=True)
            tail_factor = 1.0
            if not math.isinf(U.total):
                tail_factor = xpow(U.total / (U.total + ux), e)
            return total + mu.mass_at_inf * tail_factor

        return fn

    # -- prefix suprema -------------------------------------------------------

    def P_values(self, p: float) -> np.ndarray:
        """sup over t < x of U(t)^(1/p) * (ess sup of 1/v over (t, inf))."""
        key = ("P", round(float(p), 12))
        if key not in self._block_cache:
            g = vprod(vpow(self.uv, 1.0 / p), self.env_values)
            self._block_cache[key] = running_max(g)
        return self._block_cache[key]

    def P_point(self, p: float) -> Callable[[float], float]:
        vals = self.P_values(p)

        def fn(x: float) -> float:
            i = int(np.searchsorted(self.nodes, x, side="right")) - 1
            best = vals[max(i, 0)]
            local = xpow(float(self.U.value(x)), 1.0 / p) * self.envelope.value(x)
            return max(best, local)

        return fn

    def PV_values(self, p: float) -> np.ndarray:
        """sup over t < x of U(t) * V(t)^(-1/p)."""
        key = ("PV", round(float(p), 12))
        if key not in self._block_cache:
            Vv = np.asarray(self.spec.V.value(self.nodes), dtype=float)
            g = vprod(self.uv, vpow(Vv, -1.0 / p))
            self._block_cache[key] = running_max(g)
        return self._block_cache[key]

    def PV_point(self, p: float) -> Callable[[float], float]:
        vals = self.PV_values(p)

        def fn(x: float) -> float:
            i = int(np.searchsorted(self.nodes, x, side="right")) - 1
            best = vals[max(i, 0)]
            local = float(self.U.value(x)) * xpow(float(self.spec.V.value(x)), -1.0 / p)
            return max(best, local)

        return fn

    def PU_values(self) -> np.ndarray:
        """sup over t < x of U(t) * (ess sup over s > t of 1/(U(s) v(s)))."""
        key = ("PU",)
        if key not in self._block_cache:
            g = vpow(vprod(self.uv, self.vv), -1.0)
            inner = suffix_max(g)
            self._block_cache[key] = running_max(vprod(self.uv, inner))
        return self._block_cache[key]

    def PU_point(self) -> Callable[[float], float]:
        vals = self.PU_values()

        def fn(x: float) -> float:
            i = int(np.searchsorted(self.nodes, x, side="right")) - 1
            return vals[max(i, 0)]

        return fn

    # -- weighted kernel suprema ----------------------------------------------

    def _w_head_sup(self) -> float:
        """sup of the density of w over (0, window lo]."""
        return _density_sup_on(self.spec.w, 0.0, self.window[0])

    def _w_tail_sup(self, e: float) -> float:
        """sup over s beyond the window of w(s) U(s)^(-e)."""
        hi = self.window[1]
        if self.spec.w.behavior_at_inf() is None:
            _, support_hi = self.spec.w.support_bounds()
            if support_hi <= hi:
                return 0.0
            ts = np.geomspace(hi, support_hi, 64)
            ws = np.asarray(self.spec.w.eval_density(ts), dtype=float)
            us = vpow(np.asarray(self.U.value(ts), dtype=float), -e)
            return float(np.max(vprod(ws, us)))
        return _sup_tail(self.spec.w, self.U, e, hi)

    def wsup_values(self, e: float) -> np.ndarray:
        """ess sup over s of w(s) * (U(x)/(U(x)+U(s)))^e, per grid x."""
        key = ("wsup", round(float(e), 12))
        if key not in self._block_cache:
            K = self.kernel(e)
            grid = np.max(vprod(K, self.wv[None, :]), axis=1)
            head = self._w_head_sup()
            tail = vprod(self._w_tail_sup(e) * np.ones_like(self.uv), vpow(self.uv, e))
            self._block_cache[key] = np.maximum(np.maximum(grid, head), tail)
        return self._block_cache[key]

    def wsup_point(self, e: float) -> Callable[[float], float]:
        w = self.spec.w
        U = self.U
        head = self._w_head_sup()
        tail_coef = self._w_tail_sup(e)

        def fn(x: float) -> float:
            ux = float(U.value(x))
            with np.errstate(divide="ignore", invalid="ignore"):
                k = np.where(self.uv + ux > 0, ux / (self.uv + ux), 0.0)
            vals = vprod(self.wv, vpow(k, e))
            i = int(np.argmax(vals))
            lo_b = self.nodes[max(i - 1, 0)]
            hi_b = self.nodes[min(i + 1, len(self.nodes) - 1)]

            def local(s: float) -> float:
                us = float(U.value(s))
                den = us + ux
                base = ux / den if den > 0 else 0.0
                return float(w.eval_density(s)) * xpow(base, e)

            _, ref = refine_max(local, lo_b, hi_b)
            return max(float(vals[i]), ref, head, tail_coef * xpow(ux, e))

        return fn

    # -- integral building blocks for the cone families ------------------------

    def Jv_values(self) -> np.ndarray:
        """int (U(t)/(U(t)+U(x)))^{p'} v(t) V(t)^{-p'} dt."""
        key = ("Jv",)
        if key not in self._block_cache:
            self._block_cache[key] = self._jv_on(self.itnodes, self.uv)
        return self._block_cache[key]

    def _jv_on(self, tnodes: np.ndarray, uxs: np.ndarray) -> np.ndarray:
        pp = conjugate_exponent(self.spec.p)
        ut = np.asarray(self.U.value(tnodes), dtype=float)
        vt = np.asarray(self.spec.v.eval_density(tnodes), dtype=float)
        Vt = np.asarray(self.spec.V.value(tnodes), dtype=float)
        # combine before powering: U/((U + U(x)) V) stays O(1) near both ends
        with np.errstate(divide="ignore", invalid="ignore"):
            core = np.nan_to_num(
                ut[None, :] / ((ut[None, :] + uxs[:, None]) * Vt[None, :]), nan=0.0
            )
        rows = vprod(vpow(core, pp), vt[None, :])
        return grid_integral_rows(tnodes, rows)

    def Jv_point(self) -> Callable[[float], float]:
        def fn(x: float) -> float:
            ux = np.array([float(self.U.value(x))])
            return float(self._jv_on(self.dense_nodes, ux)[0])

        return fn

    def Js_values(self) -> np.ndarray:
        """int v(t)^{1-p'} / (U(t) + U(x))^{p'} dt."""
        key = ("Js",)
        if key not in self._block_cache:
            self._block_cache[key] = self._js_on(self.itnodes, self.uv)
        return self._block_cache[key]

    def _js_on(self, tnodes: np.ndarray, uxs: np.ndarray) -> np.ndarray:
        pp = conjugate_exponent(self.spec.p)
        ut = np.asarray(self.U.value(tnodes), dtype=float)
        vt = np.asarray(self.spec.v.eval_density(tnodes), dtype=float)
        rows = vprod(vpow(ut[None, :] + uxs[:, None], -pp), vpow(vt, 1.0 - pp)[None, :])
        return grid_integral_rows(tnodes, rows)

    def Js_point(self) -> Callable[[float], float]:
        def fn(x: float) -> float:
            ux = np.array([float(self.U.value(x))])
            return float(self._js_on(self.dense_nodes, ux)[0])

        return fn

    def G_values(self) -> np.ndarray:
        """int dt / ((U(t) + U(x)) v(t))."""
        key = ("G",)
        if key not in self._block_cache:
            self._block_cache[key] = self._g_on(self.itnodes, self.uv)
        return self._block_cache[key]

    def _g_on(self, tnodes: np.ndarray, uxs: np.ndarray) -> np.ndarray:
        ut = np.asarray(self.U.value(tnodes), dtype=float)
        vt = np.asarray(self.spec.v.eval_density(tnodes), dtype=float)
        rows = vprod(vpow(ut[None, :] + uxs[:, None], -1.0), vpow(vt, -1.0)[None, :])
        return grid_integral_rows(tnodes, rows)

    def G_point(self) -> Callable[[float], float]:
        def fn(x: float) -> float:
            ux = np.array([float(self.U.value(x))])
            return float(self._g_on(self.dense_nodes, ux)[0])

        return fn

    # -- outer reductions -------------------------------------------------------

    def outer_sup(self, fvals: np.ndarray, point_fn=None) -> float:
        fvals = np.asarray(fvals, dtype=float)
        finite = np.isfinite(fvals)
        if np.any(np.isinf(fvals)):
            return INF
        if not np.any(finite) or np.all(fvals[finite] == 0.0):
            return float(np.max(np.nan_to_num(fvals, nan=0.0)))
        if point_fn is None:
            return float(np.max(fvals[finite]))
        order = np.argsort(fvals)[::-1][:3]
        best = 0.0
        for i in order:
            best = max(best, point_fn(float(self.nodes[i])))
        i0 = int(order[0])
        lo_b = self.nodes[max(i0 - 1, 0)]
        hi_b = self.nodes[min(i0 + 1, len(self.nodes) - 1)]
        _, ref = refine_max(point_fn, lo_b, hi_b)
        return max(best, ref)

    def outer_integral(self, gvals: np.ndarray, sigma: float) -> float:
        """(int g(x) w(x) dx)^(1/sigma) over the half line."""
        integrand = vprod(gvals, self.wv)
        if np.isnan(integrand).any():
            return math.nan
        if np.isinf(integrand).any():
            return INF
        return xpow(grid_integral(self.nodes, integrand), 1.0 / sigma)


# -- warnings ----------------------------------------------------------------


def _tail_vanishes_clause(spec: InequalitySpec) -> Clause:
    """Family-specific analogue of the requirement that the effective dual
    weight's reciprocal envelope vanishes at infinity."""
    if spec.inequality in {"3.1", "3.2"}:
        raise AssertionError("handled by check_nondegenerate directly")
    if spec.inequality in {"5.1", "5.3"}:
        total = INF
        try:
            total = spec.V.total
        except NotLocallyIntegrableError:
            pass
        ok = math.isinf(total)
        return Clause(
            "envelope_vanishes",
            ok,
            True,
            "cumulative weight of v is bounded, so 1/V does not vanish at infinity"
            if not ok
            else f"V is unbounded (total {total})",
        )
    ts = np.array([1e6, 1e9, 1e12])
    uu = np.asarray(spec.U.value(ts), dtype=float)
    vv = np.asarray(spec.v.eval_density(ts), dtype=float)
    vals = vpow(vprod(uu, vv), -1.0)
    ok = bool(vals[-1] <= 1e-2 * max(vals[0], 1e-300) or vals[-1] < 1e-15)
    return Clause(
        "envelope_vanishes",
        ok,
        False,
        f"1/(U v) at t = 1e6, 1e9, 1e12 is {vals[0]:.3g}, {vals[1]:.3g}, {vals[2]:.3g}",
    )


def _gather_warnings(spec: InequalitySpec, r: float | None) -> list[str]:
    """Theorem-hypothesis warnings for a condition report.

    Only the clauses the equivalence statements actually assume surface
    here: admissibility of u, and the family's vanishing-envelope clause
    (1/v at infinity for the iterated family, V-divergence for the
    monotone-cone and Stieltjes families).  The small-t/large-t mass
    clauses of the full non-degeneracy report steer sequence construction
    and stay out of condition reports."""
    out = []
    adm = check_admissible(spec.U)
    out.extend(f"u admissibility: {s}" for s in adm.failures())
    if spec.inequality in {"3.1", "3.2"}:
        rep = check_nondegenerate(spec.w, spec.U, r, spec.v)
        kept = [c for c in rep.clauses if c.name == "envelope_vanishes"]
    else:
        kept = [_tail_vanishes_clause(spec)]
    out.extend(f"non-degeneracy: {c.name}: {c.detail}" for c in kept if not c.ok)
    return out


# -- condition functionals -----------------------------------------------------


def _report(ctx: EvalContext, formula: str, value: float, regime: str, warnings) -> ConditionReport:
    if math.isnan(value):
        err = math.nan
    elif math.isinf(value):
        err = INF
    else:
        err = abs(value) * ctx.grid_rel_err
    return ConditionReport(formula, float(value), regime, err, list(warnings))


def condition_I(
    spec: InequalitySpec,
    window: tuple[float, float] = DEFAULT_WINDOW,
    grid_points: int = DEFAULT_GRID_POINTS,
) -> ConditionReport:
    """Conditions equivalent to the best constant for families 3.1 / 3.2."""
    if spec.inequality not in {"3.1", "3.2"}:
        raise ValueError(f"condition_I expects family 3.1 or 3.2, got {spec.inequality}")
    p, q = spec.p, spec.q
    ctx = EvalContext(spec, window, grid_points)
    if spec.inequality == "3.1":
        ex = Exponents(p, q)
        r = q / p
        warnings = _gather_warnings(spec, r)
        phi_vals = ctx.phi_values(r)
        phi_pt = ctx.phi_point(r)
        if p < 1.0:
            pstar = ex.p_star
            e = pstar / p
            Mv = ctx.M_values(e, pstar)
            M_pt = ctx.M_point(e, pstar)
            if q >= 1.0:
                fvals = vprod(vpow(phi_vals, 1.0 / q), vpow(Mv, 1.0 / pstar))
                value = ctx.outer_sup(
                    fvals,
                    lambda x: xpow(phi_pt(x), 1.0 / q) * xpow(M_pt(x), 1.0 / pstar),
                )
                return _report(ctx, "I1", value, "0 < p < 1, 1 <= q < inf", warnings)
            qs = ex.q_star
            gvals = vprod(vpow(phi_vals, qs), vpow(Mv, qs / pstar))
            value = ctx.outer_integral(gvals, qs)
            return _report(ctx, "I2", value, "0 < p < 1, 0 < q < 1", warnings)
        Pv = ctx.P_values(p)
        P_pt = ctx.P_point(p)
        if q >= 1.0:
            fvals = vprod(vpow(phi_vals, 1.0 / q), vpow(ctx.uv, -1.0 / p), Pv)
            value = ctx.outer_sup(
                fvals,
                lambda x: xpow(phi_pt(x), 1.0 / q)
                * xpow(float(spec.U.value(x)), -1.0 / p)
                * P_pt(x),
            )
            return _report(ctx, "I3", value, "1 <= p < inf, 1 <= q < inf", warnings)
        qs = ex.q_star
        gvals = vprod(vpow(phi_vals, qs), vpow(ctx.uv, -qs / p), vpow(Pv, qs))
        value = ctx.outer_integral(gvals, qs)
        return _report(ctx, "I4", value, "1 <= p < inf, 0 < q < 1", warnings)
    # family 3.2 (q = inf)
    warnings = _gather_warnings(spec, 1.0 / p)
    maj = ctx.majorant()
    warnings += [f"fundamental function: {s}" for s in maj.flags.warnings()]
    Wv = ctx.wsup_values(1.0 / p)
    W_pt = ctx.wsup_point(1.0 / p)
    if p < 1.0:
        pstar = Exponents(p, 1.0).p_star
        e = pstar / p
        Mv = ctx.M_values(e, pstar)
        M_pt = ctx.M_point(e, pstar)
        fvals = vprod(Wv, vpow(Mv, 1.0 / pstar))
        value = ctx.outer_sup(fvals, lambda x: W_pt(x) * xpow(M_pt(x), 1.0 / pstar))
        return _report(ctx, "I5", value, "0 < p < 1, q = inf", warnings)
    Pv = ctx.P_values(p)
    P_pt = ctx.P_point(p)
    fvals = vprod(Wv, vpow(ctx.uv, -1.0 / p), Pv)
    value = ctx.outer_sup(
        fvals,
        lambda x: W_pt(x) * xpow(float(spec.U.value(x)), -1.0 / p) * P_pt(x),
    )
    return _report(ctx, "I6", value, "1 <= p < inf, q = inf", warnings)


def condition_C(
    spec: InequalitySpec,
    window: tuple[float, float] = DEFAULT_WINDOW,
    grid_points: int = DEFAULT_GRID_POINTS,
) -> ConditionReport:
    """Conditions for the monotone-cone families 5.1 / 5.3."""
    if spec.inequality not in {"5.1", "5.3"}:
        raise ValueError(f"condition_C expects family 5.1 or 5.3, got {spec.inequality}")
    p, q = spec.p, spec.q
    if math.isinf(p):
        raise RegimeError("p = inf is not characterized for the monotone cone")
    ctx = EvalContext(spec, window, grid_points)
    r_phi = q if not math.isinf(q) else 1.0
    warnings = _gather_warnings(spec, r_phi)
    if spec.inequality == "5.1":
        phi_vals = ctx.phi_values(q)
        phi_pt = ctx.phi_point(q)
        if p <= 1.0:
            PVv = ctx.PV_values(p)
            PV_pt = ctx.PV_point(p)
            if q >= p:
                fvals = vprod(vpow(phi_vals, 1.0 / q), vpow(ctx.uv, -1.0), PVv)
                value = ctx.outer_sup(
                    fvals,
                    lambda x: xpow(phi_pt(x), 1.0 / q)
                    * xdiv(1.0, float(spec.U.value(x)))
                    * PV_pt(x),
                )
                return _report(ctx, "C1", value, "0 < p <= 1, p <= q < inf", warnings)
            rr = p * q / (p - q)
            gvals = vprod(vpow(phi_vals, rr / p), vpow(ctx.uv, -rr), vpow(PVv, rr))
            value = ctx.outer_integral(gvals, rr)
            return _report(ctx, "C2", value, "0 < p <= 1, 0 < q < p", warnings)
        pp = conjugate_exponent(p)
        Jv = ctx.Jv_values()
        Jv_pt = ctx.Jv_point()
        if q >= p:
            fvals = vprod(vpow(phi_vals, 1.0 / q), vpow(Jv, 1.0 / pp))
            value = ctx.outer_sup(
                fvals, lambda x: xpow(phi_pt(x), 1.0 / q) * xpow(Jv_pt(x), 1.0 / pp)
            )
            return _report(ctx, "C3", value, "1 < p < inf, p <= q < inf", warnings)
        rr = p * q / (p - q)
        gvals = vprod(vpow(phi_vals, rr / p), vpow(Jv, rr / pp))
        value = ctx.outer_integral(gvals, rr)
        return _report(ctx, "C4", value, "1 < p < inf, 0 < q < p", warnings)
    # family 5.3 (q = inf)
    maj = ctx.majorant()
    warnings += [f"fundamental function: {s}" for s in maj.flags.warnings()]
    Wv = ctx.wsup_values(1.0)
    W_pt = ctx.wsup_point(1.0)
    if p <= 1.0:
        PVv = ctx.PV_values(p)
        PV_pt = ctx.PV_point(p)
        fvals = vprod(Wv, vpow(ctx.uv, -1.0), PVv)
        value = ctx.outer_sup(
            fvals, lambda x: W_pt(x) * xdiv(1.0, float(spec.U.value(x))) * PV_pt(x)
        )
        return _report(ctx, "C5", value, "0 < p <= 1, q = inf", warnings)
    pp = conjugate_exponent(p)
    Jv = ctx.Jv_values()
    Jv_pt = ctx.Jv_point()
    fvals = vprod(Wv, vpow(Jv, 1.0 / pp))
    value = ctx.outer_sup(fvals, lambda x: W_pt(x) * xpow(Jv_pt(x), 1.0 / pp))
    return _report(ctx, "C6", value, "1 < p < inf, q = inf", warnings)


def condition_S(
    spec: InequalitySpec,
    window: tuple[float, float] = DEFAULT_WINDOW,
    grid_points: int = DEFAULT_GRID_POINTS,
) -> ConditionReport:
    """Conditions for the quasiconcave-cone families 5.5 / 5.7."""
    if spec.inequality not in {"5.5", "5.7"}:
        raise ValueError(f"condition_S expects family 5.5 or 5.7, got {spec.inequality}")
    p, q = spec.p, spec.q
    if p < 1.0:
        raise RegimeError(
            "no characterization is available for the quasiconcave cone with p < 1"
        )
    ctx = EvalContext(spec, window, grid_points)
    r_phi = q if not math.isinf(q) else 1.0
    warnings = _gather_warnings(spec, r_phi if not math.isinf(p) else None)
    if spec.inequality == "5.5":
        if math.isinf(p):
            Gv = ctx.G_values()
            value = ctx.outer_integral(vpow(Gv, q), q)
            return _report(ctx, "S5", value, "p = inf, 0 < q < inf", warnings)
        phi_vals = ctx.phi_values(q)
        phi_pt = ctx.phi_point(q)
        if p == 1.0:
            PUv = ctx.PU_values()
            PU_pt = ctx.PU_point()
            if q >= 1.0:
                fvals = vprod(vpow(phi_vals, 1.0 / q), vpow(ctx.uv, -1.0), PUv)
                value = ctx.outer_sup(
                    fvals,
                    lambda x: xpow(phi_pt(x), 1.0 / q)
                    * xdiv(1.0, float(spec.U.value(x)))
                    * PU_pt(x),
                )
                return _report(ctx, "S1", value, "p = 1, 1 <= q < inf", warnings)
            qs = Exponents(p, q).q_star
            gvals = vprod(vpow(phi_vals, qs), vpow(ctx.uv, -qs), vpow(PUv, qs))
            value = ctx.outer_integral(gvals, qs)
            return _report(ctx, "S2", value, "p = 1, 0 < q < 1", warnings)
        pp = conjugate_exponent(p)
        Js = ctx.Js_values()
        Js_pt = ctx.Js_point()
        if q >= p:
            fvals = vprod(vpow(phi_vals, 1.0 / q), vpow(Js, 1.0 / pp))
            value = ctx.outer_sup(
                fvals, lambda x: xpow(phi_pt(x), 1.0 / q) * xpow(Js_pt(x), 1.0 / pp)
            )
            return _report(ctx, "S3", value, "1 < p < inf, p <= q < inf", warnings)
        rr = p * q / (p - q)
        gvals = vprod(vpow(phi_vals, rr / p), vpow(Js, rr / pp))
        value = ctx.outer_integral(gvals, rr)
        return _report(ctx, "S4", value, "1 < p < inf, 0 < q < p", warnings)
    # family 5.7 (q = inf)
    if math.isinf(p):
        Gv = ctx.G_values()
        G_pt = ctx.G_point()
        fvals = vprod(ctx.wv, Gv)
        value = ctx.outer_sup(
            fvals, lambda x: float(spec.w.eval_density(x)) * G_pt(x)
        )
        return _report(ctx, "S8", value, "p = inf, q = inf", warnings)
    maj = ctx.majorant()
    warnings += [f"fundamental function: {s}" for s in maj.flags.warnings()]
    Wv = ctx.wsup_values(1.0)
    W_pt = ctx.wsup_point(1.0)
    if p == 1.0:
        PUv = ctx.PU_values()
        PU_pt = ctx.PU_point()
        fvals = vprod(Wv, vpow(ctx.uv, -1.0), PUv)
        value = ctx.outer_sup(
            fvals, lambda x: W_pt(x) * xdiv(1.0, float(spec.U.value(x))) * PU_pt(x)
        )
        return _report(ctx, "S6", value, "p = 1, q = inf", warnings)
    pp = conjugate_exponent(p)
    Js = ctx.Js_values()
    Js_pt = ctx.Js_point()
    fvals = vprod(Wv, vpow(Js, 1.0 / pp))
    value = ctx.outer_sup(fvals, lambda x: W_pt(x) * xpow(Js_pt(x), 1.0 / pp))
    return _report(ctx, "S7", value, "1 < p < inf, q = inf", warnings)


def compute_condition(
    spec: InequalitySpec,
    window: tuple[float, float] = DEFAULT_WINDOW,
    grid_points: int = DEFAULT_GRID_POINTS,
) -> ConditionReport:
    """Evaluate the characterizing functional for the spec's family/regime."""
    if spec.inequality in {"3.1", "3.2"}:
        return condition_I(spec, window, grid_points)
    if spec.inequality in {"5.1", "5.3"}:
        return condition_C(spec, window, grid_points)
    return condition_S(spec, window, grid_points)


# -- local interval quantities and discrete functionals -------------------------


def local_C(spec: InequalitySpec, a: float, b: float) -> float:
    """ess sup of 1/v over (a, b)."""
    return reciprocal_envelope(spec.v, a, b)


def _ramp_nodes(a: float, b: float, n: int = 513) -> np.ndarray:
    """Nodes in (a, b) resolving the vanishing scale at the left endpoint."""
    ramp = np.geomspace(1e-10, 1.0, n)
    ts = a + (b - a) * ramp
    # keep (t, b) nonempty for the trailing envelope sup
    ts[-1] = np.nextafter(b, a)
    return ts


def local_B(spec: InequalitySpec, a: float, b: float, n: int = 513) -> float:
    """Local boundedness quantity on (a, b): a sup for p >= 1 and a dual
    integral for p < 1, both built from U(t) - U(a) and ess sup 1/v on (t, b)."""
    if not (0.0 <= a < b < INF):
        raise ValueError(f"need 0 <= a < b < inf, got ({a}, {b})")
    p = spec.p
    ts = _ramp_nodes(a, b, n)
    du = np.array([spec.u.integrate(a, t) for t in ts])
    vb = np.array([reciprocal_envelope(spec.v, t, b) for t in ts])
    if p >= 1.0:
        vals = vprod(vpow(du, 1.0 / p), vb)
        return float(np.max(vals)) if not np.isinf(vals).any() else INF
    pstar = Exponents(p, 1.0).p_star
    ud = np.asarray(spec.u.eval_density(ts), dtype=float)
    integrand = vprod(vpow(du, pstar), ud, vpow(vb, pstar))
    if np.isinf(integrand).any() or np.isnan(integrand).any():
        return INF
    return xpow(float(np.trapezoid(integrand, ts)), 1.0 / pstar)


def _neighbors(knots, window):
    lo, hi = window
    left = [lo] + list(knots[:-1])
    right = list(knots[1:]) + [hi]
    return left, right


@dataclass
class DiscreteReport:
    formula: str
    value: float
    terms: dict
    warnings: list[str] = field(default_factory=list)


def discrete_A(
    spec: InequalitySpec, seq: DiscretizingSequence, n_local: int = 513
) -> DiscreteReport:
    """Discretized version of the 3.1 condition along a discretizing
    sequence: an l^rho norm of local B terms plus one of local envelope
    terms.  The sequence must have been built for phi with r = q/p."""
    p, q = spec.p, spec.q
    rho = Exponents(p, q).rho
    knots = list(seq.knots)
    left, right = _neighbors(knots, seq.window)
    phi_k = np.asarray(seq.phi_at, dtype=float)
    u_k = np.asarray(seq.u_at, dtype=float)
    t1 = []
    t2 = []
    for i, xk in enumerate(knots):
        b_loc = local_B(spec, left[i], xk, n=n_local)
        t1.append(xpow(phi_k[i], 1.0 / q) * xpow(u_k[i], -1.0 / p) * b_loc)
        t2.append(xpow(phi_k[i], 1.0 / q) * local_C(spec, xk, right[i]))
    value = sequence_norm(t1, rho) + sequence_norm(t2, rho)
    warnings = []
    finite = [x for x in t1 + t2 if math.isfinite(x)]
    if finite and len(knots) >= 3:
        tail_share = sum(sorted(finite)[-2:]) / max(sum(finite), 1e-300)
        if math.isinf(rho):
            tail_share = 0.0
        if tail_share > 0.9:
            warnings.append(
                "discrete sum dominated by two terms; consider a wider window"
            )
    return DiscreteReport(
        "A", float(value), {"B_terms": t1, "C_terms": t2}, warnings
    )


def discrete_D(
    spec: InequalitySpec, seq: DiscretizingSequence, n_local: int = 513
) -> DiscreteReport:
    """Discretized version of the 3.2 condition: sup norms of the same local
    terms, with phi the least majorant (no outer 1/q power since q = inf)."""
    p = spec.p
    knots = list(seq.knots)
    left, right = _neighbors(knots, seq.window)
    phi_k = np.asarray(seq.phi_at, dtype=float)
    u_k = np.asarray(seq.u_at, dtype=float)
    t1 = []
    t2 = []
    for i, xk in enumerate(knots):
        b_loc = local_B(spec, left[i], xk, n=n_local)
        t1.append(phi_k[i] * xpow(u_k[i], -1.0 / p) * b_loc)
        t2.append(phi_k[i] * local_C(spec, xk, right[i]))
    value = sequence_norm(t1, INF) + sequence_norm(t2, INF)
    return DiscreteReport("D", float(value), {"B_terms": t1, "C_terms": t2}, [])


def chain_A(
    spec: InequalitySpec,
    seq: DiscretizingSequence,
    window: tuple[float, float] = DEFAULT_WINDOW,
    grid_points: int = DEFAULT_GRID_POINTS,
) -> dict:
    """The chain of equivalent discrete functionals for 3.1 with p < 1.

    Returns {"A1": .., "A2": .., "A3": .., "A4": .., "A5": ..}; adjacent
    values are two-sided equivalent with absolute constants.
    """
    p, q = spec.p, spec.q
    if not p < 1.0:
        raise ValueError("chain_A needs 0 < p < 1")
    ex = Exponents(p, q)
    pstar = ex.p_star
    rho = ex.rho
    ctx = EvalContext(spec, window, grid_points)
    mu = ctx.measure(pstar)
    env = ctx.envelope
    knots = list(seq.knots)
    left, right = _neighbors(knots, seq.window)
    phi_k = vpow(np.asarray(seq.phi_at, dtype=float), 1.0 / q)
    u_k = np.asarray(seq.u_at, dtype=float)
    U = spec.U
    M_pt = ctx.M_point(pstar / p, pstar)

    a1, a2, a3_first, a3_second, a4_second, a5 = [], [], [], [], [], []
    for i, xk in enumerate(knots):
        pref = phi_k[i] * xpow(u_k[i], -1.0 / p)
        ts = _ramp_nodes(left[i], xk)
        du = np.array([spec.u.integrate(left[i], t) for t in ts])
        ut = np.asarray(U.value(ts), dtype=float)
        ud = np.asarray(spec.u.eval_density(ts), dtype=float)
        vb = env.value_array(ts)
        f1 = vprod(vpow(du, pstar), ud, vpow(vb, pstar))
        f2 = vprod(vpow(ut, pstar), ud, vpow(vb, pstar))
        a1.append(pref * xpow(float(np.trapezoid(f1, ts)), 1.0 / pstar))
        a2.append(pref * xpow(float(np.trapezoid(f2, ts)), 1.0 / pstar))
        mom = stieltjes_integral(
            lambda t: xpow(float(U.value(t)), pstar / p),
            mu,
            left[i],
            xk,
            include_left=True,
            include_right=True,
        )
        a3_first.append(pref * xpow(mom, 1.0 / pstar))
        a3_second.append(phi_k[i] * env.left(xk))
        a4_second.append(
            phi_k[i]
            * xpow(
                mu.interval_mass(xk, right[i], include_left=True, include_right=True),
                1.0 / pstar,
            )
        )
        a5.append(phi_k[i] * xpow(M_pt(xk), 1.0 / pstar))
    return {
        "A1": sequence_norm(a1, rho),
        "A2": sequence_norm(a2, rho),
        "A3": sequence_norm(a3_first, rho) + sequence_norm(a3_second, rho),
        "A4": sequence_norm(a3_first, rho) + sequence_norm(a4_second, rho),
        "A5": sequence_norm(a5, rho),
    }


def chain_B(
    spec: InequalitySpec,
    seq: DiscretizingSequence,
    window: tuple[float, float] = DEFAULT_WINDOW,
    grid_points: int = DEFAULT_GRID_POINTS,
) -> dict:
    """The chain of equivalent discrete functionals for 3.1 with p >= 1."""
    p, q = spec.p, spec.q
    if not p >= 1.0:
        raise ValueError("chain_B needs p >= 1")
    rho = Exponents(p, q).rho
    ctx = EvalContext(spec, window, grid_points)
    env = ctx.envelope
    knots = list(seq.knots)
    left, _ = _neighbors(knots, seq.window)
    phi_k = vpow(np.asarray(seq.phi_at, dtype=float), 1.0 / q)
    u_k = np.asarray(seq.u_at, dtype=float)
    U = spec.U

    b1, b2, b3_second, b4 = [], [], [], []
    for i, xk in enumerate(knots):
        pref = phi_k[i] * xpow(u_k[i], -1.0 / p)
        ts = _ramp_nodes(left[i], xk)
        du = np.array([spec.u.integrate(left[i], t) for t in ts])
        ut = np.asarray(U.value(ts), dtype=float)
        vb = env.value_array(ts)
        b1.append(pref * float(np.max(vprod(vpow(du, 1.0 / p), vb))))
        b2.append(pref * float(np.max(vprod(vpow(ut, 1.0 / p), vb))))
        b3_second.append(phi_k[i] * env.value(xk))
        uk = float(U.value(xk))
        with np.errstate(divide="ignore", invalid="ignore"):
            kern = np.where(ctx.uv + uk > 0, ctx.uv / (ctx.uv + uk), 0.0)
        b4.append(
            phi_k[i] * float(np.max(vprod(vpow(kern, 1.0 / p), ctx.env_values)))
        )
    return {
        "B1": sequence_norm(b1, rho),
        "B2": sequence_norm(b2, rho),
        "B3": sequence_norm(b2, rho) + sequence_norm(b3_second, rho),
        "B4": sequence_norm(b4, rho),
    }
