"""Brute-force best-constant oracles and problem reductions."""

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iterhardy.conditions import InequalitySpec, RegimeError
from iterhardy.extreal import INF
from iterhardy.oracle import (
    TestFunction,
    cumulative_as_weight,
    estimate_best_constant,
    exact_kernel_constant,
    fubini_lhs,
    fubini_rhs,
    kernel_comparison_ratio,
    lhs_value,
    maximize_ratio,
    ratio_value,
    reduce_monotone,
    reduce_stieltjes,
    rhs_value,
)
from iterhardy.weights import CumulativeWeight, WeightError, WeightFunction

from conftest import assert_close

# imported dataclass, not a test case
TestFunction.__test__ = False

ONE = WeightFunction.constant(1.0)
U_LIN = CumulativeWeight(ONE)
CORNER = InequalitySpec(
    "3.1", 1.0, 1.0, ONE, ONE, WeightFunction.shifted_power(1.0, 1.0, -2.0)
)


def load_spec(name):
    with open(f"specs/{name}.json") as fh:
        return InequalitySpec.from_json(json.load(fh))


class TestTestFunction:
    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="kind"):
            TestFunction("bumps", (1.0,), (1.0,))

    def test_unsorted_locations(self):
        with pytest.raises(ValueError, match="increasing"):
            TestFunction.atoms([2.0, 1.0], [1.0, 1.0])

    def test_negative_mass(self):
        with pytest.raises(ValueError, match="mass"):
            TestFunction.atoms([1.0], [-1.0])

    def test_nonpositive_location(self):
        with pytest.raises(ValueError, match="positive"):
            TestFunction.atoms([0.0], [1.0])

    def test_cells_mass_count(self):
        with pytest.raises(ValueError, match="expected 2 masses"):
            TestFunction.cells([1.0, 2.0, 4.0], [1.0])
        tf = TestFunction.cells([1.0, 2.0, 4.0], [1.0, 0.5])
        assert tf.kind == "cells"

    def test_cells_json_keeps_last_edge(self):
        tf = TestFunction.cells([1.0, 2.0, 4.0], [1.0, 0.5])
        data = tf.to_json()
        assert data[-1] == {"z": 4.0, "m": 0.0}


class TestCornerClosedForm:
    @pytest.mark.parametrize("z", [0.5, 1.0, 2.0, 10.0])
    def test_single_atom_ratio(self, z):
        # Phi(z) = z log(1 + 1/z) for the averaging corner
        tf = TestFunction.atoms([z], [1.0])
        assert_close(ratio_value(CORNER, tf), z * math.log1p(1.0 / z), rel=1e-3)

    def test_exact_constant(self):
        value, phi = exact_kernel_constant(CORNER)
        assert_close(value, 1.0, rel=1e-3)
        assert_close(phi(2.0), 2.0 * math.log(1.5), rel=1e-6)

    def test_oracle_never_exceeds_exact(self):
        value, _ = exact_kernel_constant(CORNER)
        est = maximize_ratio(CORNER, levels=(33, 65), seed=3)
        assert est.c_lo <= value * (1.0 + 1e-3)
        assert est.c_lo >= 0.95 * value

    def test_off_corner_rejected(self):
        with pytest.raises(RegimeError):
            exact_kernel_constant(load_spec("r1"))

    def test_sup_form_corner(self):
        spec = InequalitySpec("3.2", 1.0, INF, ONE, ONE, CORNER.w)
        value, _ = exact_kernel_constant(spec)
        assert math.isfinite(value) and value > 0
        est = maximize_ratio(spec, levels=(33, 65), seed=3)
        assert est.c_lo <= value * (1.0 + 1e-3)


class TestRatioProperties:
    @given(st.integers(min_value=0, max_value=2**32 - 1))
    @settings(max_examples=15)
    def test_mass_scaling_invariance(self, seed):
        rng = np.random.default_rng(seed)
        spec = load_spec("r1")
        nz = int(rng.integers(1, 5))
        z = np.unique(np.sort(10.0 ** rng.uniform(-5, 5, size=nz)))
        m = 10.0 ** rng.uniform(-1, 1, size=len(z))
        tf = TestFunction.atoms(z, m)
        lam = float(10.0 ** rng.uniform(-2, 2))
        scaled = TestFunction.atoms(z, lam * m)
        r1, r2 = ratio_value(spec, tf), ratio_value(spec, scaled)
        assert_close(r2, r1, rel=1e-9)

    def test_lhs_rhs_split(self):
        tf = TestFunction.atoms([1.0], [2.0])
        lhs = lhs_value(CORNER, tf)
        rhs = rhs_value(CORNER, tf)
        assert_close(rhs, 2.0)
        assert_close(lhs / rhs, ratio_value(CORNER, tf), rel=1e-12)

    def test_oracle_dominates_single_atoms(self):
        spec = load_spec("r1")
        est = maximize_ratio(spec, levels=(33, 65), seed=0)
        for z in (0.1, 1.0, 10.0):
            single = ratio_value(spec, TestFunction.atoms([z], [1.0]))
            assert est.c_lo >= single * (1.0 - 1e-9)


class TestFubini:
    def test_hand_case(self):
        h = TestFunction.atoms([1.0, 3.0], [2.0, 1.0])
        assert_close(fubini_lhs(ONE, h, 2.0), 4.0, rel=1e-10)
        assert_close(fubini_rhs(U_LIN, h, 2.0), 4.0)
        assert_close(kernel_comparison_ratio(U_LIN, h, 2.0), 2.533333 / 4.0, rel=1e-5)

    @given(st.integers(min_value=0, max_value=2**32 - 1))
    @settings(max_examples=20)
    def test_kernel_ratio_bracket(self, seed):
        rng = np.random.default_rng(seed)
        z = np.unique(np.sort(10.0 ** rng.uniform(-4, 4, size=int(rng.integers(1, 6)))))
        m = 10.0 ** rng.uniform(-1, 1, size=len(z))
        h = TestFunction.atoms(z, m)
        x = float(10.0 ** rng.uniform(-4, 4))
        r = kernel_comparison_ratio(U_LIN, h, x)
        assert 0.5 - 1e-12 <= r <= 1.0 + 1e-12


class TestMonotoneReduction:
    def test_ratio_exact(self):
        spec = load_spec("r4")
        red = reduce_monotone(spec)
        assert red.spec.inequality == "3.1"
        assert_close(red.spec.p, 1.0 / spec.p)
        rng = np.random.default_rng(7)
        for _ in range(8):
            z = np.unique(np.sort(10.0 ** rng.uniform(-5, 5, size=int(rng.integers(1, 5)))))
            m = 10.0 ** rng.uniform(-1, 1, size=len(z))
            f = TestFunction.steps(z, m)
            r_orig = ratio_value(spec, f)
            r_red = ratio_value(red.spec, red.map_test_function(f))
            assert_close(r_red, r_orig**spec.p, rel=1e-12)

    def test_sup_form_carries_powered_weight(self):
        spec = load_spec("r4")
        spec53 = InequalitySpec("5.3", spec.p, INF, spec.u, spec.v, spec.w)
        red = reduce_monotone(spec53)
        assert red.spec.inequality == "3.2"
        assert math.isinf(red.spec.q)
        want = spec.w.powered(spec.p)
        for t in (0.3, 1.0, 7.0):
            assert_close(red.spec.w.eval_density(t), want.eval_density(t))

    def test_map_round_trip(self):
        red = reduce_monotone(load_spec("r4"))
        f = TestFunction.steps([0.5, 2.0, 8.0], [1.0, 0.25, 0.5])
        back = red.map_back(red.map_test_function(f))
        np.testing.assert_allclose(back.mv, f.mv, rtol=1e-12)

    def test_rejects_other_families(self):
        with pytest.raises(ValueError):
            reduce_monotone(load_spec("r1"))

    def test_spec_blocks_infinite_p_outside_stieltjes(self):
        spec = load_spec("r4")
        with pytest.raises(ValueError, match="5.5 and 5.7"):
            InequalitySpec("5.1", INF, 2.0, spec.u, spec.v, spec.w)


class TestStieltjesReduction:
    def test_identity_battery(self):
        red = reduce_stieltjes(load_spec("r5"), cases=10)
        assert red.max_residual < 1e-8
        assert 0.5 <= red.ratio_min <= red.ratio_max <= 1.0
        assert red.constant_bounds == (1.0, 2.0)
        assert red.reduced is None  # p != 1 has no exact closed-form reduction

    def test_p_one_power_weights_reduce(self):
        spec = InequalitySpec(
            "5.5", 1.0, 2.0, ONE, WeightFunction.power(3.0, 2.0), load_spec("r4").w
        )
        red = reduce_stieltjes(spec, cases=3)
        assert red.reduced is not None
        assert red.reduced.inequality == "3.1"
        # RHS weight becomes U v = t * 3 t^2
        assert_close(red.reduced.v.eval_density(2.0), 3.0 * 2.0**3)

    def test_rejects_other_families(self):
        with pytest.raises(ValueError):
            reduce_stieltjes(load_spec("r1"))


class TestCumulativeAsWeight:
    def test_constant(self):
        V = cumulative_as_weight(ONE)
        assert_close(V.eval_density(5.0), 5.0)

    def test_pure_power(self):
        V = cumulative_as_weight(WeightFunction.power(3.0, 2.0))
        assert_close(V.eval_density(2.0), 8.0)

    def test_power_head_with_trailing_zero(self):
        v = WeightFunction.piecewise_power(
            ((0.0, 1.0, 2.0, 0.5), (1.0, INF, 0.0, 0.0))
        )
        V = cumulative_as_weight(v)
        assert_close(V.eval_density(0.25), v.integrate(0.0, 0.25))
        assert_close(V.eval_density(7.0), v.integrate(0.0, 1.0))

    def test_growing_tail_rejected(self):
        v = WeightFunction.two_power(1.0, 0.0, 1.0, 1.0)
        with pytest.raises(WeightError, match="cumulative"):
            cumulative_as_weight(v)


class TestEstimateRouting:
    def test_corner_path(self):
        est = estimate_best_constant(CORNER, levels=(33, 65))
        assert est.stable
        assert est.trace and est.trace[0]["path"] == "exact-corner"
        assert_close(est.c_lo, 1.0, rel=2e-2)

    def test_monotone_path_reduces(self):
        est = estimate_best_constant(load_spec("r4"), levels=(33, 65))
        assert est.trace and est.trace[0]["path"] == "reduced"
        assert est.c_lo > 0 and math.isfinite(est.c_lo)
        assert est.tf is not None and est.tf.kind == "steps"

    def test_sup_exponent_kernel(self):
        spec = load_spec("r5")
        sup_spec = InequalitySpec("5.5", INF, 2.0, spec.u, spec.v, spec.w)
        est = estimate_best_constant(sup_spec)
        assert est.stable and est.c_lo > 0

    def test_certificate_reproduces_bound(self):
        spec = load_spec("r1")
        est = maximize_ratio(spec, levels=(33, 65), seed=0)
        assert est.tf is not None
        assert_close(ratio_value(spec, est.tf), est.c_lo, rel=1e-6)
