import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from adiabatic_qp import (
    AdiabaticProblem,
    NearBranchPointWarning,
    PotentialSpec,
    SlowPotential,
    check_H4,
    complex_momentum,
    epsilon_from_family,
    locate_branch_points,
    real_decomposition,
)
from adiabatic_qp.errors import InvalidInputError
from oracles.values import KP1_PHI, KP5_PHI

from conftest import wrap


def test_kp5_decomposition(kp5):
    dec = real_decomposition(kp5)
    assert dec.kind == "regular"
    ends = [x for iv in dec.intervals for x in iv]
    np.testing.assert_allclose(ends, KP5_PHI, atol=1e-10)
    assert dec.interval_indices == (1, 1)
    assert dec.band_numbers == (1, 1)
    assert dec.gap_numbers == (1, 0)
    assert dec.gaps[-1][1] == pytest.approx(dec.intervals[0][0] + 2 * math.pi)
    assert dec.h4.all


def test_free_cos_decomposition(free_cos):
    dec = real_decomposition(free_cos)
    np.testing.assert_allclose(dec.intervals[0], (math.pi / 3, 5 * math.pi / 3), atol=1e-12)
    assert dec.interval_indices == (0,)
    assert not dec.h4.b


def test_band_circle_without_crossings(kp):
    dec = real_decomposition(AdiabaticProblem(kp, SlowPotential.cosine(0.8), 8.0))
    assert dec.kind == "band-circle"
    assert not dec.h4.b


def test_h4_report(kp):
    rep = check_H4(AdiabaticProblem(kp, SlowPotential.cosine(5.0), 8.0), (7.5, 8.5))
    assert rep.all and len(rep.entries) == 9
    rep = check_H4(AdiabaticProblem(kp, SlowPotential.cosine(0.8), 8.0), (7.5, 8.5))
    assert rep.c and not rep.b


def _cos_roots(level, height):
    # cos z = level, 0 <= Re z < 2 pi, |Im z| <= height
    r = np.arccos(complex(level))
    out = []
    for z in (r, -r, r + 2 * np.pi, -r + 2 * np.pi):
        if 0 <= z.real < 2 * np.pi - 1e-12 and abs(z.imag) <= height:
            if all(abs(z - o) > 1e-9 for o in out):
                out.append(z)
    return sorted(out, key=lambda z: (z.real, z.imag))


@pytest.mark.parametrize("amp, energy", [(1.0, 5.0), (5.0, 8.0), (3.0, 9.0)])
def test_branch_points_match_arccos(kp, amp, energy):
    pr = AdiabaticProblem(kp, SlowPotential.cosine(amp), energy)
    found = sorted((b.location for b in locate_branch_points(pr)), key=lambda z: (z.real, z.imag))
    expected = []
    for l, e in pr.open_edges():
        expected += _cos_roots((energy - e) / amp, pr.strip_height)
    expected.sort(key=lambda z: (z.real, z.imag))
    assert len(found) == len(expected)
    np.testing.assert_allclose(found, expected, atol=1e-9)
    assert all(b.simple for b in pr.branch_points)


def test_kp_cos_real_branch_points(kp):
    pr = AdiabaticProblem(kp, SlowPotential.cosine(1.0), 5.0)
    np.testing.assert_allclose(sorted(b.location.real for b in pr.branch_points), KP1_PHI, atol=1e-10)


def test_strip_height_lowered_below_complex_branch_points(kp):
    pr = AdiabaticProblem(kp, SlowPotential.cosine(3.0), 9.0)
    assert pr.strip_height <= pr.slow.strip_height
    assert all(abs(b.location.imag) < pr.strip_height or b.location.imag == 0 for b in pr.branch_points)


def test_epsilon_family_is_decreasing():
    eps = [epsilon_from_family(n) for n in (5, 10, 20, 40)]
    assert np.all(np.diff(eps) < 0)
    assert eps[0] == pytest.approx(2 * math.pi / (5 + (1 + math.sqrt(5)) / 2))


@settings(max_examples=30, deadline=None)
@given(x=st.floats(0.0, 2 * math.pi), y=st.floats(-0.45, 0.45),
       sign=st.sampled_from([1, -1]), sheet=st.integers(-3, 3))
def test_all_branches_solve_the_dispersion_relation(kp5, x, y, sign, sheet):
    z = complex(x, y)
    if kp5.distance_to_branch_points(np.array([z]))[0] < 1e-3:
        return
    k = complex_momentum(kp5, z, (sign, sheet))
    main = complex_momentum(kp5, z)
    assert k == pytest.approx(sign * main + 2 * math.pi * sheet)
    d = kp5.discriminant_at(z)
    assert abs(np.cos(k) - d / 2) < 1e-8 * max(1.0, abs(d))


@settings(max_examples=20, deadline=None)
@given(x=st.floats(0.0, 2 * math.pi), y=st.floats(0.01, 0.45))
def test_main_sheet_reflection(kp5, x, y):
    if abs(kp5.slow(complex(x, y)).imag) < 1e-6:
        return  # E - W real: both sides read it as E + i0
    up = complex_momentum(kp5, complex(x, y))
    down = complex_momentum(kp5, complex(x, -y))
    assert down == pytest.approx(np.conj(up), abs=1e-9)


def test_complex_momentum_outside_strip(kp5):
    with pytest.raises(InvalidInputError):
        complex_momentum(kp5, 1.0 + 2j)
    with pytest.raises(InvalidInputError):
        complex_momentum(kp5, 1.0, (2, 0))


def test_near_branch_point_warns(kp5):
    with pytest.warns(NearBranchPointWarning):
        complex_momentum(kp5, KP5_PHI[0] + 1e-8)


def test_slow_potential_range():
    w = SlowPotential(((1, 1.0, 0.0), (2, 0.0, 0.5)))
    grid = np.linspace(0, 2 * np.pi, 20001)
    vals = np.cos(grid) + 0.5 * np.sin(2 * grid)
    assert w.w_minus == pytest.approx(vals.min(), abs=1e-7)
    assert w.w_plus == pytest.approx(vals.max(), abs=1e-7)
    crit = [z for z, _ in w.critical_points()]
    assert all(abs(-math.sin(z) + math.cos(2 * z)) < 1e-9 for z in crit)


def test_slow_potential_rejects_bad_input():
    with pytest.raises(InvalidInputError):
        SlowPotential(((1.5, 1.0, 0.0),))
    with pytest.raises(InvalidInputError):
        SlowPotential(((1, 1.0, 0.0),), strip_height=0.0)


def test_crossings_are_preimages_of_edges(kp5):
    dec = real_decomposition(kp5)
    for (a, b), n in zip(dec.intervals, dec.band_numbers):
        ea, eb = kp5.local_energy(a).real, kp5.local_energy(b).real
        edges = {kp5.bands.edge(2 * n - 1), kp5.bands.edge(2 * n)}
        assert min(abs(ea - e) for e in edges) < 1e-9
        assert min(abs(eb - e) for e in edges) < 1e-9
    assert abs(wrap(dec.intervals[0][0] - KP5_PHI[0])) < 1e-10
