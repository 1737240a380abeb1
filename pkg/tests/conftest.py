"""Shared fixtures and hypothesis settings for the test suite."""

import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from iterhardy.weights import WeightFunction

settings.register_profile(
    "suite",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")

INF = math.inf


@pytest.fixture(scope="session")
def one():
    return WeightFunction.constant(1.0)


@pytest.fixture(scope="session")
def v_quadratic():
    """max(1, t)^2: constant head, quadratic tail."""
    return WeightFunction.piecewise_power(
        ((0.0, 1.0, 1.0, 0.0), (1.0, INF, 1.0, 2.0))
    )


@pytest.fixture(scope="session")
def w_peaked():
    """t on (0, 1), t^(-1.5) after: integrable with a peak at 1."""
    return WeightFunction.piecewise_power(
        ((0.0, 1.0, 1.0, 1.0), (1.0, INF, 1.0, -1.5))
    )


def assert_close(got, want, rel=1e-9, abs_=0.0):
    assert math.isfinite(got), f"got {got}, want {want}"
    assert abs(got - want) <= abs_ + rel * abs(want), (
        f"got {got!r}, want {want!r} (rel err "
        f"{abs(got - want) / max(abs(want), 1e-300):.3e})"
    )


def random_piecewise_weight(rng, max_cells=3, alpha_range=(-0.5, 1.5)):
    """Locally integrable piecewise power weight with a convergent head."""
    ncell = int(rng.integers(1, max_cells + 1))
    knots = np.sort(10.0 ** rng.uniform(-3.0, 3.0, size=ncell - 1))
    edges = [0.0] + [float(k) for k in np.unique(knots)] + [INF]
    pieces = []
    for a, b in zip(edges[:-1], edges[1:]):
        coef = float(10.0 ** rng.uniform(-1.0, 1.0))
        expo = float(rng.uniform(*alpha_range))
        pieces.append((a, b, coef, expo))
    return WeightFunction.piecewise_power(pieces)
