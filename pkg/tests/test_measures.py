"""Monotone envelopes, their Stieltjes measures, integration by parts."""

import math

import numpy as np
import pytest

from iterhardy.extreal import INF
from iterhardy.measures import (
    EnvelopeError,
    MonotoneTestFunction,
    SmoothFunction,
    envelope_of_reciprocal,
    envelope_power,
    integration_by_parts_check,
    stieltjes_integral,
    stieltjes_measure,
)
from iterhardy.weights import WeightFunction

from conftest import assert_close


class TestEnvelope:
    def test_monotone_reciprocal(self, v_quadratic):
        g = envelope_of_reciprocal(v_quadratic)
        assert_close(g.value(0.5), 1.0)
        assert_close(g.value(2.0), 0.25)
        assert g.value_at_end() == 0.0
        ts = np.geomspace(1e-4, 1e4, 100)
        vals = g.value_array(ts)
        assert np.all(np.diff(vals) <= 1e-15)

    def test_flattens_increasing_part(self):
        # 1/v = t on (0,1), 1/t after; the sup over (t, inf) is min(1, 1/t)
        v = WeightFunction.two_power(1.0, -1.0, 1.0, 1.0)
        g = envelope_of_reciprocal(v)
        assert_close(g.value(0.25), 1.0)
        assert_close(g.value(4.0), 0.25)

    def test_truncated_domain(self, v_quadratic):
        g = envelope_of_reciprocal(v_quadratic, b=10.0)
        assert_close(g.value(2.0), 0.25)
        assert g.domain_hi == 10.0

    def test_infinite_envelope_detected(self):
        v = WeightFunction.piecewise_power(
            ((0.0, 1.0, 2.0, 0.0), (1.0, INF, 0.0, 0.0))
        )
        g = envelope_of_reciprocal(v)
        assert not g.is_finite()
        with pytest.raises(EnvelopeError, match="infinite"):
            stieltjes_measure(g)

    def test_power_transform(self, v_quadratic):
        g = envelope_power(v_quadratic, 0.5)
        assert_close(g.value(4.0), 0.25)
        assert_close(g.value(0.5), 1.0)


class TestStieltjesMeasure:
    def test_pure_jump(self):
        v = WeightFunction.two_power(1.0, 0.0, 4.0, 0.0)
        mu = stieltjes_measure(envelope_of_reciprocal(v))
        assert mu.atoms == ((1.0, 0.75),)
        assert_close(mu.mass_at_inf, 0.25)
        assert_close(mu.total_mass(), 0.75)
        assert_close(stieltjes_integral(lambda t: t, mu), 0.75)

    def test_absolutely_continuous(self, v_quadratic):
        mu = stieltjes_measure(envelope_of_reciprocal(v_quadratic))
        assert mu.atoms == ()
        assert_close(mu.total_mass(), 1.0)
        # d(-t^(-2)) = 2 t^(-3) dt on (1, inf): int t dmu = 2
        got = stieltjes_integral(lambda t: t, mu, 1.0, INF)
        assert_close(got, 2.0, rel=1e-7)

    def test_interval_masses(self, v_quadratic):
        mu = stieltjes_measure(envelope_of_reciprocal(v_quadratic))
        assert_close(mu.interval_mass(1.0, 2.0), 1.0 - 0.25)
        assert_close(mu.interval_mass(2.0, INF), 0.25)
        assert mu.interval_mass(0.1, 0.5) == 0.0

    def test_mixed(self):
        # 1/v = 1 on (0,1), drops to 1/2 then decays as t^(-2)/2
        v = WeightFunction.piecewise_power(
            ((0.0, 1.0, 1.0, 0.0), (1.0, INF, 2.0, 2.0))
        )
        mu = stieltjes_measure(envelope_of_reciprocal(v))
        assert len(mu.atoms) == 1
        loc, mass = mu.atoms[0]
        assert_close(loc, 1.0)
        assert_close(mass, 0.5)
        assert_close(mu.total_mass(), 1.0)
        got = stieltjes_integral(lambda t: 1.0, mu, 0.0, INF)
        assert_close(got, 1.0, rel=1e-7)


class TestIntegrationByParts:
    def test_smooth_only(self):
        f = MonotoneTestFunction(lambda t: t * t, lambda t: 2.0 * t)
        g = SmoothFunction(math.sin, math.cos)
        assert integration_by_parts_check(f, g, 0.5, 3.0) < 1e-9

    def test_with_jumps(self):
        f = MonotoneTestFunction(
            lambda t: t, lambda t: 1.0, jumps=((1.0, 0.5), (2.0, 1.5))
        )
        g = SmoothFunction(lambda t: 1.0 / (1.0 + t), lambda t: -((1.0 + t) ** -2))
        assert integration_by_parts_check(f, g, 0.25, 4.0) < 1e-9

    def test_jump_at_left_endpoint_counts(self):
        f = MonotoneTestFunction(lambda t: 0.0, lambda t: 0.0, jumps=((1.0, 2.0),))
        g = SmoothFunction(lambda t: t, lambda t: 1.0)
        # the interval is [alpha, beta): the jump at alpha belongs to it
        assert integration_by_parts_check(f, g, 1.0, 2.0) < 1e-9

    def test_monotone_values(self):
        f = MonotoneTestFunction(lambda t: t, lambda t: 1.0, jumps=((1.0, 3.0),))
        assert_close(f.value(1.0), 4.0)
        assert_close(f.left(1.0), 1.0)
        assert_close(f.value(0.5), 0.5)
