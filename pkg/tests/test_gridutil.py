"""Grid construction, scan/refine search, checked quadrature."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from iterhardy.extreal import INF
from iterhardy.gridutil import (
    QuadratureError,
    bisect_crossing,
    grid_integral,
    grid_integral_rows,
    log_nodes,
    merge_nodes,
    power_end_corrections,
    quad_checked,
    refine_max,
    running_max,
    scan_and_refine,
    suffix_max,
    trap_weights,
)

from conftest import assert_close


class TestNodes:
    def test_log_nodes_endpoints(self):
        nodes = log_nodes(1e-3, 1e3, 31)
        assert nodes[0] == pytest.approx(1e-3)
        assert nodes[-1] == pytest.approx(1e3)
        assert np.all(np.diff(nodes) > 0)
        steps = nodes[1:] / nodes[:-1]
        np.testing.assert_allclose(steps, steps[0], rtol=1e-9)

    def test_log_nodes_rejects_bad_window(self):
        with pytest.raises(ValueError):
            log_nodes(1.0, 1.0, 5)
        with pytest.raises(ValueError):
            log_nodes(0.0, 1.0, 5)

    def test_trap_weights_sum(self):
        nodes = log_nodes(0.5, 32.0, 77)
        assert_close(float(trap_weights(nodes).sum()), 31.5, rel=1e-12)

    def test_trap_weights_linear_exact(self):
        nodes = np.array([0.0, 1.0, 3.0, 7.0])
        vals = 2.0 * nodes + 1.0
        # trapezoid is exact on piecewise-linear integrands
        assert_close(float((trap_weights(nodes) * vals).sum()), 49.0 + 7.0)

    def test_merge_nodes_keeps_window(self):
        nodes = log_nodes(1.0, 100.0, 5)
        merged = merge_nodes(nodes, [0.5, 7.0, 7.0, 250.0, INF])
        assert merged[0] == 1.0 and merged[-1] == 100.0
        assert 7.0 in merged
        assert np.all(np.diff(merged) > 0)

    def test_running_and_suffix_max(self):
        a = np.array([3.0, 1.0, 4.0, 1.0, 5.0])
        np.testing.assert_allclose(running_max(a), [3, 3, 4, 4, 5])
        np.testing.assert_allclose(suffix_max(a), [5, 5, 5, 5, 5])
        b = np.array([5.0, 4.0, 6.0, 2.0, 1.0])
        np.testing.assert_allclose(suffix_max(b), [6, 6, 6, 2, 1])


class TestSearch:
    def test_refine_max_unimodal(self):
        # t * exp(-t) peaks at t = 1 with value 1/e
        x, f = refine_max(lambda t: t * math.exp(-t), 0.1, 10.0)
        assert_close(x, 1.0, rel=1e-6)
        assert_close(f, math.exp(-1.0), rel=1e-9)

    def test_refine_max_endpoint(self):
        x, f = refine_max(lambda t: -t, 1.0, 2.0)
        assert_close(x, 1.0)
        assert_close(f, -1.0)

    def test_scan_and_refine(self):
        fn = lambda t: t * math.exp(-t)
        nodes = log_nodes(1e-2, 1e2, 41)
        vals = np.array([fn(t) for t in nodes])
        x, f = scan_and_refine(fn, nodes, vals)
        assert_close(f, math.exp(-1.0), rel=1e-9)

    def test_bisect_crossing_increasing(self):
        x = bisect_crossing(lambda t: t * t, 9.0, 0.1, 100.0, increasing=True)
        assert_close(x, 3.0, rel=1e-10)

    def test_bisect_crossing_decreasing(self):
        x = bisect_crossing(lambda t: 1.0 / t, 0.25, 0.1, 100.0, increasing=False)
        assert_close(x, 4.0, rel=1e-10)


class TestQuadChecked:
    def test_smooth(self):
        assert_close(quad_checked(math.exp, 0.0, 1.0), math.e - 1.0, rel=1e-9)

    def test_semi_infinite(self):
        got = quad_checked(lambda t: math.exp(-t), 0.0, INF)
        assert_close(got, 1.0, rel=1e-8)

    def test_respects_breakpoints(self):
        fn = lambda t: 1.0 if t < 1.0 else 0.0
        assert_close(quad_checked(fn, 0.0, 2.0, points=[1.0]), 1.0, rel=1e-9)

    def test_empty_interval(self):
        assert quad_checked(math.exp, 1.0, 1.0) == 0.0

    @given(st.floats(min_value=-0.9, max_value=2.0))
    def test_power_integrals(self, alpha):
        got = quad_checked(lambda t: t**alpha, 0.5, 2.0)
        want = (2.0 ** (alpha + 1) - 0.5 ** (alpha + 1)) / (alpha + 1) \
            if alpha != -1.0 else math.log(4.0)
        assert_close(got, want, rel=1e-7)


class TestGridIntegral:
    def test_power_end_corrections(self):
        nodes = log_nodes(1.0, 1e6, 200)
        head, tail = power_end_corrections(nodes, nodes**-2.0)
        # head continues t^-2 over (0, 1): divergent; tail adds ~1e-6
        assert head == INF
        assert_close(tail, 1e-6, rel=1e-9)

    def test_integrable_head_correction(self):
        nodes = log_nodes(1e-6, 1.0, 200)
        head, tail = power_end_corrections(nodes, nodes**-0.5)
        assert_close(head, 2.0 * 1e-3, rel=1e-9)
        # extrapolating t^(-1/2) past the right edge diverges
        assert tail == INF

    def test_full_integral(self):
        # int_0^inf t^(-1/2) (1+t)^(-1) dt = pi
        nodes = log_nodes(1e-10, 1e10, 4001)
        vals = nodes**-0.5 / (1.0 + nodes)
        assert_close(grid_integral(nodes, vals), math.pi, rel=1e-4)

    def test_nonfinite_values_give_inf(self):
        nodes = log_nodes(0.1, 10.0, 5)
        vals = np.array([1.0, INF, 1.0, 1.0, 1.0])
        assert grid_integral(nodes, vals) == INF

    def test_rows_match_scalar(self):
        nodes = log_nodes(1e-4, 1e4, 301)
        rows = np.stack([nodes**-0.5 / (1 + nodes), np.exp(-nodes)])
        got = grid_integral_rows(nodes, rows)
        for k in range(2):
            assert_close(got[k], grid_integral(nodes, rows[k]), rel=1e-12)
