"""Piecewise power weights: construction, closed-form calculus, transforms."""

import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from iterhardy.extreal import INF
from iterhardy.weights import (
    Cell,
    CumulativeWeight,
    Exponents,
    WeightError,
    WeightFunction,
    calligraphic_u,
    check_admissible,
    check_nondegenerate,
    reciprocal_envelope,
)

from conftest import assert_close, random_piecewise_weight


class TestConstruction:
    def test_gap_rejected(self):
        with pytest.raises(WeightError, match="contiguous"):
            WeightFunction(
                [
                    Cell(0.0, 1.0, "power", 1.0, 0.0),
                    Cell(2.0, INF, "power", 1.0, 0.0),
                ]
            )

    def test_must_start_at_zero(self):
        with pytest.raises(WeightError, match="start at 0"):
            WeightFunction([Cell(1.0, INF, "power", 1.0, 0.0)])

    def test_must_reach_infinity(self):
        with pytest.raises(WeightError, match="extend"):
            WeightFunction([Cell(0.0, 1.0, "power", 1.0, 0.0)])

    def test_negative_coefficient_rejected(self):
        with pytest.raises(WeightError, match="negative"):
            WeightFunction.power(-1.0, 0.0)

    def test_negative_shift_rejected(self):
        with pytest.raises(WeightError, match="shift"):
            WeightFunction([Cell(0.0, INF, "power", 1.0, -2.0, shift=-1.0)])

    def test_unbounded_affine_rejected(self):
        with pytest.raises(WeightError, match="affine"):
            WeightFunction([Cell(0.0, INF, "affine", 1.0, 1.0)])


class TestDensityAndIntegral:
    def test_power_density(self):
        w = WeightFunction.power(3.0, 2.0)
        assert w.eval_density(2.0) == 12.0
        np.testing.assert_allclose(
            w.eval_density(np.array([1.0, 2.0])), [3.0, 12.0]
        )

    def test_shifted_power_density(self):
        w = WeightFunction.shifted_power(1.0, 1.0, -2.0)
        assert_close(w.eval_density(1.0), 0.25)
        assert_close(w.eval_density(3.0), 1.0 / 16.0)
        with pytest.raises(WeightError, match="defined on"):
            w.eval_density(0.0)

    def test_two_power_integral(self):
        # t on (0,1), t^(-1.5) after: total = 1/2 + 2
        w = WeightFunction.two_power(1.0, 1.0, 1.0, -1.5)
        assert_close(w.integrate(0.0, INF), 2.5)
        assert_close(w.integrate(0.0, 1.0), 0.5)
        assert_close(w.integrate(1.0, 4.0), 2.0 * (1.0 - 0.5))

    def test_max_power_integral(self):
        # max(1, t)^2 over (0, 2): 1 + 7/3
        v = WeightFunction.max_power(2.0)
        assert_close(v.integrate(0.0, 2.0), 1.0 + 7.0 / 3.0)

    def test_shifted_power_integral(self):
        # (1+t)^(-2) integrates to 1
        w = WeightFunction.shifted_power(1.0, 1.0, -2.0)
        assert_close(w.integrate(0.0, INF), 1.0)
        assert_close(w.integrate(1.0, 3.0), 0.5 - 0.25)

    def test_log_case_integral(self):
        # exponent -1 over (a, b): log(b/a); divergent to infinity
        w = WeightFunction.piecewise_power(
            ((0.0, 1.0, 1.0, 0.0), (1.0, INF, 1.0, -1.0))
        )
        assert_close(w.integrate(1.0, math.e), 1.0)
        assert w.integrate(1.0, INF) == INF

    def test_divergent_head(self):
        w = WeightFunction.power(1.0, -1.5)
        assert w.integrate(0.0, 1.0) == INF
        assert_close(w.integrate(1.0, INF), 2.0)

    @given(st.integers(min_value=0, max_value=2**32 - 1))
    def test_integral_additivity(self, seed):
        rng = np.random.default_rng(seed)
        w = random_piecewise_weight(rng)
        a, m, b = sorted(10.0 ** rng.uniform(-4, 4, size=3))
        total = w.integrate(a, b)
        parts = w.integrate(a, m) + w.integrate(m, b)
        assert_close(parts, total, rel=1e-12)

    def test_quad_agreement(self):
        from scipy.integrate import quad

        w = WeightFunction.piecewise_power(
            ((0.0, 2.0, 0.5, 0.7), (2.0, 5.0, 1.0, -0.3), (5.0, INF, 2.0, -2.1))
        )
        for a, b in ((0.1, 1.5), (1.0, 4.0), (3.0, 40.0)):
            num, _ = quad(w.eval_density, a, b, points=[2.0, 5.0], limit=200)
            assert_close(w.integrate(a, b), num, rel=1e-9)


class TestTransforms:
    @given(st.integers(min_value=0, max_value=2**32 - 1))
    def test_scaled_is_linear(self, seed):
        rng = np.random.default_rng(seed)
        w = random_piecewise_weight(rng)
        lam = float(10.0 ** rng.uniform(-1, 1))
        a, b = sorted(10.0 ** rng.uniform(-3, 3, size=2))
        assert_close(
            w.scaled(lam).integrate(a, b), lam * w.integrate(a, b), rel=1e-12
        )

    @given(st.integers(min_value=0, max_value=2**32 - 1))
    def test_dilated_pushforward(self, seed):
        rng = np.random.default_rng(seed)
        w = random_piecewise_weight(rng)
        lam = float(10.0 ** rng.uniform(-1, 1))
        a, b = sorted(10.0 ** rng.uniform(-3, 3, size=2))
        assert_close(
            w.dilated(lam).integrate(lam * a, lam * b),
            w.integrate(a, b),
            rel=1e-12,
        )

    def test_powered_pointwise(self):
        w = WeightFunction.two_power(2.0, 1.0, 2.0, -1.5)
        w2 = w.powered(2.0)
        for t in (0.3, 1.0, 7.0):
            assert_close(w2.eval_density(t), w.eval_density(t) ** 2)

    def test_powered_shifted_rejected_only_for_true_affine(self):
        aff = WeightFunction(
            [Cell(0.0, 1.0, "affine", 1.0, 1.0), Cell(1.0, INF, "power", 2.0, 0.0)]
        )
        with pytest.raises(WeightError):
            aff.powered(2.0)


class TestJsonRoundTrip:
    def test_schema(self):
        w = WeightFunction.shifted_power(1.0, 1.0, -2.0)
        data = w.to_json()
        assert data["kind"] == "piecewise_power"
        piece = data["pieces"][0]
        assert piece["from"] == 0.0 and piece["to"] is None
        assert piece["shift"] == 1.0

    @given(st.integers(min_value=0, max_value=2**32 - 1))
    def test_round_trip(self, seed):
        rng = np.random.default_rng(seed)
        w = random_piecewise_weight(rng)
        back = WeightFunction.from_json(json.loads(json.dumps(w.to_json())))
        ts = 10.0 ** rng.uniform(-4, 4, size=16)
        np.testing.assert_allclose(back.eval_density(ts), w.eval_density(ts))

    def test_missing_field_rejected(self):
        with pytest.raises(WeightError):
            WeightFunction.from_json({"kind": "piecewise_power"})


class TestCumulative:
    def test_linear(self):
        U = CumulativeWeight(WeightFunction.constant(1.0))
        assert_close(float(U.value(3.0)), 3.0)
        assert float(U.value(0.0)) == 0.0

    def test_monotone_and_vectorized(self):
        U = CumulativeWeight(WeightFunction.two_power(1.0, 1.0, 1.0, -3.0))
        ts = np.geomspace(1e-6, 1e6, 200)
        vals = np.asarray(U.value(ts), dtype=float)
        assert np.all(np.diff(vals) >= 0)
        assert_close(vals[-1], 0.5 + 0.5, rel=1e-6)

    def test_calligraphic_kernel(self):
        U = CumulativeWeight(WeightFunction.constant(1.0))
        # U(x)/(U(t)+U(x)) = x/(t+x)
        assert_close(calligraphic_u(U, 2.0, 2.0), 0.5)
        assert_close(calligraphic_u(U, 1.0, 3.0), 0.25)
        vals = calligraphic_u(U, 2.0, np.array([1.0, 2.0, 6.0]))
        np.testing.assert_allclose(vals, [2.0 / 3.0, 0.5, 0.25])

    @given(st.integers(min_value=0, max_value=2**32 - 1))
    def test_kernel_bounded_by_one(self, seed):
        rng = np.random.default_rng(seed)
        u = random_piecewise_weight(rng)
        U = CumulativeWeight(u)
        x = float(10.0 ** rng.uniform(-4, 4))
        ts = 10.0 ** rng.uniform(-5, 5, size=32)
        vals = np.asarray(calligraphic_u(U, x, ts), dtype=float)
        assert np.all(vals >= 0.0) and np.all(vals <= 1.0)


class TestEnvelope:
    def test_already_monotone(self, v_quadratic):
        assert_close(reciprocal_envelope(v_quadratic, 0.5), 1.0)
        assert_close(reciprocal_envelope(v_quadratic, 2.0), 0.25)
        assert_close(reciprocal_envelope(v_quadratic, 2.0, 3.0), 0.25)

    def test_interior_sup(self):
        # v dips to its minimum at t = 1: 1/v peaks there
        v = WeightFunction.two_power(1.0, -1.0, 1.0, 1.0)
        assert_close(reciprocal_envelope(v, 0.5, 2.0), 1.0)
        assert_close(reciprocal_envelope(v, 2.0, 4.0), 0.5)

    def test_empty_interval_rejected(self):
        v = WeightFunction.constant(1.0)
        with pytest.raises(WeightError, match="empty"):
            reciprocal_envelope(v, 2.0, 2.0)


class TestAdmissibility:
    def test_constant_density_admissible(self, one):
        rep = check_admissible(CumulativeWeight(one))
        assert rep.ok and rep.failures() == []

    def test_bounded_cumulative_fails(self):
        u = WeightFunction.two_power(1.0, 0.0, 1.0, -2.0)
        rep = check_admissible(CumulativeWeight(u))
        assert not rep.ok
        assert any("finite" in f for f in rep.failures())

    def test_vanishing_head_fails(self):
        u = WeightFunction.piecewise_power(
            ((0.0, 1.0, 0.0, 0.0), (1.0, INF, 1.0, 0.0))
        )
        rep = check_admissible(CumulativeWeight(u))
        assert not rep.ok
        assert any("vanishes" in f for f in rep.failures())


class TestNondegeneracy:
    def test_constant_v_flags_envelope(self, one, w_peaked):
        U = CumulativeWeight(one)
        rep = check_nondegenerate(w_peaked, U, 2.0, one)
        clause = {c.name: c for c in rep.clauses}["envelope_vanishes"]
        assert not clause.ok
        assert "limit not zero" in clause.detail

    def test_growing_v_passes_envelope(self, one, w_peaked, v_quadratic):
        U = CumulativeWeight(one)
        rep = check_nondegenerate(w_peaked, U, 2.0, v_quadratic)
        clause = {c.name: c for c in rep.clauses}["envelope_vanishes"]
        assert clause.ok


class TestExponents:
    def test_star_and_rho(self):
        ex = Exponents(0.5, 0.25)
        assert_close(ex.p_star, 1.0)
        assert_close(ex.rho, 1.0 / 3.0)
        assert Exponents(0.5, 1.0).rho == INF

    def test_conjugate(self):
        assert_close(Exponents(4.0, 1.0).p_prime, 4.0 / 3.0)
