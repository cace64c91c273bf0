import math

import numpy as np
import pytest

from adiabatic_qp import trace_stokes_lines
from adiabatic_qp.errors import UnsupportedOrderError
from adiabatic_qp.geometry import BranchPoint
from adiabatic_qp.stokes import level_residual


def _origin(problem, x):
    return min(problem.branch_points, key=lambda b: abs(b.location - x))


@pytest.fixture(scope="module")
def free_lines(free_cos):
    return trace_stokes_lines(free_cos, _origin(free_cos, math.pi / 3))


def test_three_lines_at_equal_angles(free_lines):
    angles = sorted(l.initial_angle for l in free_lines)
    gaps = np.diff(angles + [angles[0] + 2 * math.pi])
    np.testing.assert_allclose(gaps, 2 * math.pi / 3, atol=math.radians(2))
    chords = sorted(float(np.angle(l.points[1] - l.points[0])) for l in free_lines)
    np.testing.assert_allclose(np.diff(chords + [chords[0] + 2 * math.pi]), 2 * math.pi / 3, atol=math.radians(2))


def test_real_line_runs_to_the_other_branch_point(free_lines):
    real = [l for l in free_lines if l.direction == "real"]
    assert len(real) == 1
    line = real[0]
    assert line.stop_reason == "reached branch point"
    assert abs(line.points[-1] - 5 * math.pi / 3) < 0.01
    assert np.all(np.abs(line.points.imag) < 1e-9)
    assert np.all(line.points.real >= math.pi / 3 - 1e-12)


def test_complex_lines_are_conjugate(free_lines):
    up = [l for l in free_lines if l.direction == "upward"]
    down = [l for l in free_lines if l.direction == "downward"]
    assert len(up) == len(down) == 1
    up, down = up[0], down[0]
    assert up.stop_reason == down.stop_reason == "left strip"
    n = min(len(up.points), len(down.points))
    np.testing.assert_allclose(up.points[:n], np.conj(down.points[:n]), atol=1e-6)
    assert up.monotone_height and down.monotone_height


def test_level_set_residual(free_cos, free_lines):
    for line in free_lines:
        assert line.residual < 1e-9
        assert np.max(np.abs(level_residual(free_cos, line))) < 1e-6


def test_kp5_lines_stay_on_level_set(kp5):
    for bp in kp5.branch_points[:2]:
        lines = trace_stokes_lines(kp5, bp)
        assert len(lines) == 3
        for line in lines:
            assert np.max(np.abs(level_residual(kp5, line))) < 1e-6


def test_non_simple_origin_is_rejected(free_cos):
    bp = BranchPoint(complex(math.pi / 3), 1, 0.0, False)
    with pytest.raises(UnsupportedOrderError):
        trace_stokes_lines(free_cos, bp)
