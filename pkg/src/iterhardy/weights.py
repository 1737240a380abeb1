"""Weights on the half line and their derived objects.

A weight is a nonnegative locally integrable density on (0, inf).  The
canonical representation is a contiguous list of cells, each carrying either a
pure power density c*t^alpha or an affine density a0 + a1*t; piecewise-power
weights and tabulated weights (log-linear or linear interpolation) both reduce
to such cell lists exactly, which keeps primitives (cumulative weights,
integrals, reciprocal envelopes) closed-form.

Tabulated weights vanish outside their abscissa range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .extreal import (
    INF,
    conjugate_exponent,
    rho_exponent,
    star_exponent,
    xdiv,
)


class WeightError(ValueError):
    """Malformed weight description."""


class NotLocallyIntegrableError(WeightError):
    """The density has infinite mass near the origin."""


@dataclass(frozen=True)
class Exponents:
    """Exponent pair (p, q) of an inequality, with derived quantities.

    theta, the right-hand-side exponent, is fixed at 1 for this library.
    """

    p: float
    q: float
    theta: float = 1.0

    def __post_init__(self) -> None:
        if not (self.p > 0.0):
            raise ValueError(f"p must be positive, got {self.p}")
        if not (self.q > 0.0):
            raise ValueError(f"q must be positive, got {self.q}")
        if self.theta != 1.0:
            raise ValueError("only theta = 1 is supported")

    @property
    def p_prime(self) -> float:
        return conjugate_exponent(self.p)

    @property
    def p_star(self) -> float:
        return star_exponent(self.p)

    @property
    def q_star(self) -> float:
        return star_exponent(self.q)

    @property
    def rho(self) -> float:
        return rho_exponent(self.q)


POWER = "power"
AFFINE = "affine"


@dataclass(frozen=True)
class Cell:
    """One density cell on [lo, hi): c*(t+shift)^alpha (kind 'power', params
    (c, alpha), shift >= 0) or a0 + a1*t (kind 'affine', params (a0, a1))."""

    lo: float
    hi: float
    kind: str
    a: float
    b: float
    shift: float = 0.0

    def density(self, t: float) -> float:
        if self.kind == POWER:
            if self.a == 0.0:
                return 0.0
            return self.a * (t + self.shift) ** self.b
        return self.a + self.b * t

    def integral(self, x: float, y: float) -> float:
        """Integral of the density over (x, y), 0 <= x <= y <= inf."""
        if y <= x:
            return 0.0
        if self.kind == AFFINE:
            return self.a * (y - x) + 0.5 * self.b * (y * y - x * x)
        c, e, s = self.a, self.b, self.shift
        if c == 0.0:
            return 0.0
        if e == -1.0:
            if x + s == 0.0 or math.isinf(y):
                return INF
            return c * math.log((y + s) / (x + s))
        g = e + 1.0
        if math.isinf(y):
            hi_part = 0.0 if g < 0 else INF
        else:
            hi_part = (y + s) ** g
        if x + s == 0.0:
            lo_part = 0.0 if g > 0 else INF
        else:
            lo_part = (x + s) ** g
        if math.isinf(hi_part) or math.isinf(lo_part):
            return INF
        return c * (hi_part - lo_part) / g

    def inf_density(self, x: float, y: float) -> float:
        """Essential infimum of the density over (x, y) inside the cell."""
        if self.kind == AFFINE:
            # affine cells always have finite endpoints
            return min(self.a + self.b * x, self.a + self.b * y)
        c, e, s = self.a, self.b, self.shift
        if c == 0.0:
            return 0.0
        if e == 0.0:
            return c
        if e > 0.0:
            return c * (x + s) ** e if x + s > 0 else 0.0
        return c * (y + s) ** e if math.isfinite(y) else 0.0


def _validate_cells(cells: Sequence[Cell]) -> None:
    if not cells:
        raise WeightError("weight needs at least one cell")
    if cells[0].lo != 0.0:
        raise WeightError("cells must start at 0")
    if not math.isinf(cells[-1].hi):
        raise WeightError("cells must extend to +inf")
    for left, right in zip(cells[:-1], cells[1:]):
        if left.hi != right.lo:
            raise WeightError(
                f"cells must be contiguous, got gap at ({left.hi}, {right.lo})"
            )
    for c in cells:
        if not c.lo < c.hi:
            raise WeightError(f"empty cell ({c.lo}, {c.hi})")
        if c.shift < 0 or not math.isfinite(c.shift):
            raise WeightError("cell shift must be finite and nonnegative")
        if c.kind == AFFINE and c.shift != 0.0:
            raise WeightError("shift applies to power cells only")
        if c.kind == POWER and c.a < 0:
            raise WeightError("negative density coefficient")
        if c.kind == AFFINE:
            if math.isinf(c.hi):
                raise WeightError("affine cells must be bounded")
            if c.a + c.b * c.lo < -1e-300 or c.a + c.b * c.hi < -1e-300:
                raise WeightError("affine cell takes negative values")


class WeightFunction:
    """A nonnegative weight on (0, inf), stored as closed-form cells."""

    def __init__(self, cells: Sequence[Cell], source: dict | None = None):
        _validate_cells(cells)
        self.cells: tuple[Cell, ...] = tuple(cells)
        self._edges = np.array([c.lo for c in cells] + [math.inf])
        self._source = source or self.to_json()

    # -- constructors -------------------------------------------------

    @classmethod
    def piecewise_power(cls, pieces: Iterable[tuple]):
        """pieces: (from, to, coefficient, exponent[, shift]) with to = inf on
        the last; the density on a piece is coefficient*(t+shift)^exponent."""
        cells = [Cell(pc[0], pc[1], POWER, pc[2], pc[3], *pc[4:5]) for pc in pieces]
        return cls(cells)

    @classmethod
    def power(cls, coef: float, alpha: float) -> "WeightFunction":
        return cls.piecewise_power([(0.0, INF, coef, alpha)])

    @classmethod
    def constant(cls, value: float = 1.0) -> "WeightFunction":
        return cls.power(value, 0.0)

    @classmethod
    def shifted_power(cls, coef: float, shift: float, alpha: float):
        """coef * (shift + t)^alpha on all of (0, inf)."""
        return cls.piecewise_power([(0.0, INF, coef, alpha, shift)])

    @classmethod
    def two_power(
        cls, c0: float, a0: float, c1: float, a1: float, knot: float = 1.0
    ) -> "WeightFunction":
        """c0*t^a0 below the knot, c1*t^a1 above."""
        return cls.piecewise_power(
            [(0.0, knot, c0, a0), (knot, INF, c1, a1)]
        )

    @classmethod
    def max_power(cls, gamma: float, knot: float = 1.0) -> "WeightFunction":
        """max(1, (t/knot))^gamma type weight: 1 below the knot, power above."""
        return cls.piecewise_power(
            [(0.0, knot, 1.0, 0.0), (knot, INF, knot ** (-gamma), gamma)]
        )

    @classmethod
    def tabulated(
        cls, t: Sequence[float], y: Sequence[float], interp: str = "loglinear"
    ) -> "WeightFunction":
        t = [float(v) for v in t]
        y = [float(v) for v in y]
        if len(t) != len(y) or len(t) < 2:
            raise WeightError("tabulated weight needs matching t/y, length >= 2")
        if any(b <= a for a, b in zip(t[:-1], t[1:])):
            raise WeightError("tabulated abscissae must be strictly increasing")
        if t[0] <= 0:
            raise WeightError("tabulated abscissae must be positive")
        if any(v < 0 for v in y):
            raise WeightError("tabulated values must be nonnegative")
        cells = [Cell(0.0, t[0], POWER, 0.0, 0.0)]
        for (ta, tb, ya, yb) in zip(t[:-1], t[1:], y[:-1], y[1:]):
            if interp == "linear":
                slope = (yb - ya) / (tb - ta)
                cells.append(Cell(ta, tb, AFFINE, ya - slope * ta, slope))
            elif interp == "loglinear":
                if ya <= 0 or yb <= 0:
                    raise WeightError(
                        "loglinear interpolation needs strictly positive samples"
                    )
                s = math.log(yb / ya) / math.log(tb / ta)
                cells.append(Cell(ta, tb, POWER, ya / ta ** s, s))
            else:
                raise WeightError(f"unknown interpolation rule {interp!r}")
        cells.append(Cell(t[-1], INF, POWER, 0.0, 0.0))
        src = {"kind": "tabulated", "t": t, "y": y, "interp": interp}
        return cls(cells, source=src)

    # -- JSON ----------------------------------------------------------

    @classmethod
    def from_json(cls, data: dict) -> "WeightFunction":
        if not isinstance(data, dict) or "kind" not in data:
            raise WeightError("weight description must be an object with 'kind'")
        kind = data["kind"]
        if kind == "piecewise_power":
            extra = set(data) - {"kind", "pieces"}
            if extra:
                raise WeightError(f"unknown weight fields: {sorted(extra)}")
            pieces = data.get("pieces")
            if not isinstance(pieces, list) or not pieces:
                raise WeightError("piecewise_power needs a nonempty 'pieces' list")
            parsed = []
            for pc in pieces:
                extra = set(pc) - {"from", "to", "c", "alpha", "shift"}
                if extra:
                    raise WeightError(f"unknown piece fields: {sorted(extra)}")
                try:
                    lo = float(pc["from"])
                    hi = INF if pc["to"] is None else float(pc["to"])
                    c = float(pc["c"])
                    al = float(pc["alpha"])
                    sh = float(pc.get("shift", 0.0))
                except (KeyError, TypeError) as exc:
                    raise WeightError(f"malformed piece {pc!r}") from exc
                parsed.append((lo, hi, c, al, sh))
            return cls.piecewise_power(parsed)
        if kind == "tabulated":
            extra = set(data) - {"kind", "t", "y", "interp"}
            if extra:
                raise WeightError(f"unknown weight fields: {sorted(extra)}")
            return cls.tabulated(
                data.get("t", []), data.get("y", []), data.get("interp", "loglinear")
            )
        raise WeightError(f"unknown weight kind {kind!r}")

    def to_json(self) -> dict:
        if getattr(self, "_source", None) and self._source.get("kind") == "tabulated":
            return dict(self._source)
        pieces = []
        for c in self.cells:
            if c.kind != POWER:
                pieces.append(
                    {"from": c.lo, "to": None if math.isinf(c.hi) else c.hi,
                     "affine": [c.a, c.b]}
                )
            else:
                piece = {"from": c.lo, "to": None if math.isinf(c.hi) else c.hi,
                         "c": c.a, "alpha": c.b}
                if c.shift != 0.0:
                    piece["shift"] = c.shift
                pieces.append(piece)
        return {"kind": "piecewise_power", "pieces": pieces}

    # -- evaluation ----------------------------------------------------

    def _cell_index(self, t: np.ndarray) -> np.ndarray:
        return np.clip(
            np.searchsorted(self._edges, t, side="right") - 1,
            0,
            len(self.cells) - 1,
        )

    def eval_density(self, t):
        """Pointwise density value(s); t may be a scalar or an array."""
        arr = np.asarray(t, dtype=float)
        if np.any(arr <= 0):
            raise WeightError("density is defined on (0, inf) only")
        idx = self._cell_index(arr)
        out = np.zeros_like(arr)
        for i, c in enumerate(self.cells):
            m = idx == i
            if not m.any():
                continue
            if c.kind == POWER:
                out[m] = c.a * (arr[m] + c.shift) ** c.b if c.a != 0.0 else 0.0
            else:
                out[m] = c.a + c.b * arr[m]
        if np.isscalar(t) or arr.ndim == 0:
            return float(out)
        return out

    __call__ = eval_density

    def integrate(self, a: float = 0.0, b: float = INF) -> float:
        """Closed-form integral of the density over (a, b); may be +inf."""
        if b <= a:
            return 0.0
        total = 0.0
        for c in self.cells:
            lo, hi = max(c.lo, a), min(c.hi, b)
            if hi > lo:
                part = c.integral(lo, hi)
                if math.isinf(part):
                    return INF
                total += part
        return total

    def breakpoints(self) -> list[float]:
        return [c.lo for c in self.cells[1:]]

    def support_bounds(self) -> tuple[float, float]:
        """Smallest closed interval outside which the density vanishes."""
        lo, hi = INF, 0.0
        for c in self.cells:
            nonzero = (c.kind == POWER and c.a != 0.0) or (
                c.kind == AFFINE and (c.a != 0.0 or c.b != 0.0)
            )
            if nonzero:
                lo = min(lo, c.lo)
                hi = max(hi, c.hi)
        if hi == 0.0:
            return (0.0, 0.0)
        return (lo, hi)

    def behavior_near_zero(self) -> tuple[float, float] | None:
        """(coef, expo) with density ~ coef * t^expo as t -> 0+, or None if the
        support starts away from 0."""
        c = self.cells[0]
        if c.kind == POWER:
            if c.a <= 0:
                return None
            if c.shift > 0:
                return (c.a * c.shift**c.b, 0.0)
            return (c.a, c.b)
        if c.a > 0:
            return (c.a, 0.0)
        if c.b > 0:
            return (c.b, 1.0)
        return None

    def behavior_at_inf(self) -> tuple[float, float] | None:
        """(coef, expo) with density ~ coef * t^expo as t -> inf, or None if
        the support is bounded."""
        c = self.cells[-1]
        if c.kind == POWER and c.a > 0:
            return (c.a, c.b)
        return None

    # -- transforms ----------------------------------------------------

    def scaled(self, lam: float) -> "WeightFunction":
        if lam < 0:
            raise WeightError("scale factor must be nonnegative")
        cells = [
            Cell(c.lo, c.hi, c.kind, lam * c.a,
                 lam * c.b if c.kind == AFFINE else c.b, c.shift)
            for c in self.cells
        ]
        return WeightFunction(cells)

    def dilated(self, lam: float) -> "WeightFunction":
        """Pushforward of the weight measure under t -> lam * t."""
        if lam <= 0:
            raise WeightError("dilation factor must be positive")
        cells = []
        for c in self.cells:
            lo, hi = lam * c.lo, lam * c.hi
            if c.kind == POWER:
                cells.append(
                    Cell(lo, hi, POWER, c.a * lam ** (-c.b - 1.0), c.b, lam * c.shift)
                )
            else:
                cells.append(Cell(lo, hi, AFFINE, c.a / lam, c.b / lam ** 2))
        return WeightFunction(cells)

    def powered(self, e: float) -> "WeightFunction":
        """The pointwise power w(t)**e, when it stays piecewise power.

        Affine cells with both coefficients nonzero have no closed power
        form and raise."""
        if e == 1.0:
            return self
        cells = []
        for c in self.cells:
            if c.kind == POWER:
                cells.append(Cell(c.lo, c.hi, POWER, c.a**e, c.b * e, c.shift))
            elif c.b == 0.0:
                cells.append(Cell(c.lo, c.hi, POWER, c.a**e, 0.0))
            elif c.a == 0.0:
                cells.append(Cell(c.lo, c.hi, POWER, c.b**e, e))
            else:
                raise WeightError("affine cell has no closed-form power")
        return WeightFunction(cells)


class CumulativeWeight:
    """U(t) = integral of a weight over (0, t], with closed-form evaluation."""

    def __init__(self, w: WeightFunction):
        self.w = w
        first = w.cells[0]
        if math.isinf(first.integral(0.0, min(first.hi, 1.0))):
            raise NotLocallyIntegrableError(
                "infinite mass near 0: cumulative weight undefined"
            )
        edges = [c.lo for c in w.cells] + [INF]
        cums = [0.0]
        for c in w.cells:
            hi = c.hi if math.isfinite(c.hi) else INF
            part = c.integral(c.lo, hi)
            cums.append(cums[-1] + part)
        self._edges = np.array(edges)
        self._cum = np.array(cums)
        self.total = float(self._cum[-1])

    def value(self, t):
        arr = np.asarray(t, dtype=float)
        scalar = np.isscalar(t) or arr.ndim == 0
        arr = np.atleast_1d(arr)
        if np.any(arr < 0):
            raise WeightError("cumulative weight defined for t >= 0")
        idx = np.clip(
            np.searchsorted(self._edges, arr, side="right") - 1,
            0,
            len(self.w.cells) - 1,
        )
        out = np.empty_like(arr)
        for i, c in enumerate(self.w.cells):
            m = idx == i
            if not m.any():
                continue
            base = self._cum[i]
            ts = arr[m]
            if c.kind == POWER:
                cc, e, s = c.a, c.b, c.shift
                if cc == 0.0:
                    out[m] = base
                elif e == -1.0:
                    out[m] = base + cc * np.log((ts + s) / (c.lo + s))
                else:
                    g = e + 1.0
                    lo_part = (c.lo + s) ** g if c.lo + s > 0 else 0.0
                    out[m] = base + cc * ((ts + s) ** g - lo_part) / g
            else:
                out[m] = base + c.a * (ts - c.lo) + 0.5 * c.b * (ts * ts - c.lo ** 2)
        out[arr == 0.0] = 0.0
        out[np.isinf(arr)] = self.total
        if scalar:
            return float(out[0])
        return out

    __call__ = value

    def tail_behavior(self):
        """How U grows at +inf: ('power', C, beta) meaning U ~ C t^beta,
        ('log', c) meaning U ~ c ln t, or ('bounded', total)."""
        c = self.w.cells[-1]
        if c.kind == POWER and c.a > 0:
            if c.b > -1.0:
                return ("power", c.a / (c.b + 1.0), c.b + 1.0)
            if c.b == -1.0:
                return ("log", c.a)
        return ("bounded", self.total)

    def zero_behavior(self):
        """How U grows at 0+: ('power', C, beta) with U ~ C t^beta, or
        ('delayed', s0) when the density vanishes on (0, s0)."""
        for c in self.w.cells:
            if c.kind == POWER and c.a > 0:
                if c.lo > 0:
                    return ("delayed", c.lo)
                if c.shift > 0:
                    return ("power", c.a * c.shift**c.b, 1.0)
                return ("power", c.a / (c.b + 1.0), c.b + 1.0)
            if c.kind == AFFINE and (c.a > 0 or c.b > 0):
                if c.lo > 0:
                    return ("delayed", c.lo)
                if c.a > 0:
                    return ("power", c.a, 1.0)
                return ("power", 0.5 * c.b, 2.0)
        return ("delayed", INF)


def eval_density(w: WeightFunction, t):
    return w.eval_density(t)


def integrate(w: WeightFunction, a: float = 0.0, b: float = INF) -> float:
    return w.integrate(a, b)


def cumulative(u: WeightFunction) -> CumulativeWeight:
    """U(t) = int_0^t u; raises NotLocallyIntegrableError on infinite mass at 0."""
    return CumulativeWeight(u)


def calligraphic_u(U: CumulativeWeight, x: float, t):
    """Saturation ratio U(x) / (U(t) + U(x)), in [0, 1].

    Symmetric complement: calligraphic_u(U, x, t) + calligraphic_u(U, t, x) = 1
    whenever U(x) + U(t) > 0; by convention 0/0 = 0, and values at infinite
    arguments are the one-sided monotone limits.
    """
    ux = U.value(x)
    ut = U.value(t)
    if np.isscalar(ut):
        if math.isinf(ux):
            return 0.0 if math.isinf(ut) else 1.0
        if math.isinf(ut):
            return 0.0
        den = ut + ux
        return ux / den if den > 0.0 else 0.0
    if math.isinf(ux):
        return np.where(np.isinf(ut), 0.0, 1.0)
    den = ut + ux
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(den > 0, ux / den, 0.0)
    return np.where(np.isinf(ut), 0.0, out)


def reciprocal_envelope(v: WeightFunction, a: float, b: float = INF) -> float:
    """ess sup of 1/v over (a, b): the reciprocal of the essential infimum of
    the density; +inf when the density vanishes on a subinterval."""
    if b <= a:
        raise WeightError(f"empty interval ({a}, {b})")
    inf_val = INF
    for c in v.cells:
        lo, hi = max(c.lo, a), min(c.hi, b)
        if hi > lo:
            inf_val = min(inf_val, c.inf_density(lo, hi))
    return xdiv(1.0, inf_val)


@dataclass(frozen=True)
class Clause:
    name: str
    ok: bool
    definite: bool
    detail: str


@dataclass(frozen=True)
class AdmissibilityReport:
    ok: bool
    clauses: tuple[Clause, ...]

    def failures(self) -> list[str]:
        return [c.detail for c in self.clauses if not c.ok]


def check_admissible(U: CumulativeWeight) -> AdmissibilityReport:
    """Checks that U is continuous, strictly increasing, U(0+) = 0 and
    U(inf) = inf (via tail analysis of the closed-form cells)."""
    clauses = []
    clauses.append(
        Clause("zero_at_origin", True, True, "U(0+) = 0 by local integrability")
    )
    flat: list[str] = []
    for c in U.w.cells:
        zero = (c.kind == POWER and c.a == 0.0) or (
            c.kind == AFFINE and c.a == 0.0 and c.b == 0.0
        )
        if zero:
            flat.append(f"({c.lo:g}, {c.hi:g})")
    clauses.append(
        Clause(
            "strictly_increasing",
            not flat,
            True,
            "density positive on every cell"
            if not flat
            else f"density vanishes on {', '.join(flat)}",
        )
    )
    first = U.zero_behavior()
    positive = first[0] != "delayed"
    clauses.append(
        Clause(
            "positive",
            positive,
            True,
            "U(t) > 0 for all t > 0"
            if positive
            else f"U vanishes up to t = {first[1]:g}",
        )
    )
    tail = U.tail_behavior()
    unbounded = tail[0] in ("power", "log")
    clauses.append(
        Clause(
            "unbounded",
            unbounded,
            True,
            f"U grows like the tail analysis {tail}"
            if unbounded
            else f"U(inf) = {tail[1]:g} is finite",
        )
    )
    return AdmissibilityReport(all(c.ok for c in clauses), tuple(clauses))


@dataclass(frozen=True)
class NondegeneracyReport:
    nondegenerate: bool
    clauses: tuple[Clause, ...]

    def warnings(self) -> list[str]:
        return [f"{c.name}: {c.detail}" for c in self.clauses if not c.ok]


def _numeric_divergence(sample) -> bool:
    """Heuristic: truncated integrals keep growing -> treated as divergent."""
    a, b, c = sample
    return c > 2.0 * b - a + 1e-12 or (c > 1e12)


def check_nondegenerate(
    w: WeightFunction, U: CumulativeWeight, r: float, v: WeightFunction
) -> NondegeneracyReport:
    """Checks the non-degeneracy clauses for the measure w(t) dt relative to
    U^r, plus the vanishing of the reciprocal envelope of v at infinity:

    (i)   int w(s) ds / (U(s)^r + U(t)^r) < inf for t > 0,
    (ii)  int_(0,1) w / U^r = inf,
    (iii) int_(1,inf) w = inf,
    (iv)  ess sup of 1/v over (t, inf) tends to 0.
    """
    clauses = []
    tail_w = w.behavior_at_inf()
    tail_u = U.tail_behavior()
    # (i): small-t part is int_0^1 w (finite by construction); the tail part
    # needs w / U^r integrable at infinity.
    if tail_w is None:
        clauses.append(Clause("finite_at_interior", True, True, "w has bounded support"))
    elif tail_u[0] == "power":
        crit = tail_w[1] - r * tail_u[2]
        ok = crit < -1.0
        clauses.append(
            Clause(
                "finite_at_interior",
                ok,
                True,
                f"tail exponent of w/U^r is {crit:g}",
            )
        )
    elif tail_u[0] == "bounded":
        ok = tail_w[1] < -1.0
        clauses.append(
            Clause(
                "finite_at_interior",
                ok,
                True,
                f"U bounded; tail exponent of w is {tail_w[1]:g}",
            )
        )
    else:
        vals = []
        for hi in (1e6, 1e9, 1e12):
            ts = np.geomspace(1.0, hi, 400)
            ww = w.eval_density(ts)
            uu = np.maximum(U.value(ts), 1e-300) ** r
            vals.append(float(np.trapezoid(ww / uu, ts)))
        ok = not _numeric_divergence(vals)
        clauses.append(
            Clause("finite_at_interior", ok, False, f"truncated integrals {vals}")
        )
    # (ii): divergent mass of w / U^r near 0.
    near_w = w.behavior_near_zero()
    near_u = U.zero_behavior()
    if near_w is None:
        clauses.append(
            Clause("divergent_small_t_mass", False, True, "w vanishes near 0")
        )
    elif near_u[0] == "delayed":
        clauses.append(
            Clause(
                "divergent_small_t_mass",
                True,
                True,
                "U vanishes on an initial interval where w has mass",
            )
        )
    else:
        crit = near_w[1] - r * near_u[2]
        ok = crit <= -1.0
        clauses.append(
            Clause(
                "divergent_small_t_mass",
                ok,
                True,
                f"near-zero exponent of w/U^r is {crit:g}",
            )
        )
    # (iii): infinite tail mass of w.
    if tail_w is None:
        clauses.append(Clause("infinite_tail_mass", False, True, "w has bounded support"))
    else:
        ok = tail_w[1] >= -1.0
        clauses.append(
            Clause(
                "infinite_tail_mass",
                ok,
                True,
                f"tail exponent of w is {tail_w[1]:g}",
            )
        )
    # (iv): reciprocal envelope of v vanishes at infinity.
    tail_cell = v.cells[-1]
    if tail_cell.kind == POWER and tail_cell.a > 0 and tail_cell.b > 0:
        clauses.append(
            Clause("envelope_vanishes", True, True, "v grows at infinity")
        )
    else:
        lim = xdiv(1.0, tail_cell.inf_density(max(tail_cell.lo, 1.0), INF))
        clauses.append(
            Clause(
                "envelope_vanishes",
                lim == 0.0,
                True,
                "reciprocal envelope vanishes at infinity"
                if lim == 0.0
                else f"reciprocal envelope limit not zero (limit {lim:g})",
            )
        )
    return NondegeneracyReport(all(c.ok for c in clauses), tuple(clauses))
