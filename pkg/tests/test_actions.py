import math

import numpy as np
import pytest

from adiabatic_qp import (
    AdiabaticProblem,
    SlowPotential,
    contour_actions,
    epsilon_from_family,
    real_decomposition,
    tunneling_actions,
)
from adiabatic_qp.errors import DegenerateGeometryError
from geometries import random_geometries
from oracles.values import FREE_COS_ACTION, KP5_ACTIONS


def test_free_cos_action(free_cos):
    acts = tunneling_actions(free_cos, real_decomposition(free_cos))
    assert acts.actions[0] == pytest.approx(FREE_COS_ACTION, rel=1e-12)


def test_kp5_actions(kp5):
    acts = tunneling_actions(kp5, real_decomposition(kp5))
    np.testing.assert_allclose(acts.actions, KP5_ACTIONS, rtol=1e-10)
    assert all(e < 1e-12 for e in acts.errors)


@pytest.mark.parametrize("fixture", ["free_cos", "kp5"])
def test_contour_agrees_with_collapsed_route(request, fixture):
    pr = request.getfixturevalue(fixture)
    dec = real_decomposition(pr)
    acts = tunneling_actions(pr, dec)
    for s, (c, leftover) in zip(acts.actions, contour_actions(pr, dec)):
        assert abs(c - s) <= 1e-6 * s
        assert abs(leftover) < 1e-6


def test_coefficient_product_identity(kp5):
    eps = epsilon_from_family(10)
    acts = tunneling_actions(kp5.with_epsilon(eps), real_decomposition(kp5))
    t = acts.coefficients
    assert all(0 < x < 1 for x in t)
    assert acts.product == pytest.approx(math.exp(-acts.log_inverse_product), rel=1e-12)
    assert acts.log_inverse_product == pytest.approx(sum(acts.actions) / (2 * eps), rel=1e-14)
    assert acts.asymptotic_exponent == pytest.approx(
        sum(acts.actions) / (4 * math.pi))


def test_actions_positive_on_random_geometries():
    count = 0
    for pr, dec in random_geometries(seed=5, count=6):
        if not dec.gaps:
            continue
        acts = tunneling_actions(pr, dec)
        assert all(s > 0 for s in acts.actions)
        count += 1
    assert count > 0


def test_no_gap_is_degenerate(kp):
    pr = AdiabaticProblem(kp, SlowPotential.cosine(0.8), 8.0)
    with pytest.raises(DegenerateGeometryError):
        tunneling_actions(pr, real_decomposition(pr))
