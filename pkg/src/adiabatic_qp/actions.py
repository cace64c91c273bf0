"""Tunneling actions across the real gaps of the decomposition.

The primary route integrates 2 |Im kappa| over the real gap segment, with the
square-root endpoint behaviour removed by zeta = phi -+ u^2. The cross-check
integrates kappa around a rectangle enclosing the gap, with kappa continued
along the contour.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .continuation import Tracker, raw_momentum
from .errors import AccuracyError, DegenerateGeometryError, InconsistencyError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ActionSet:
    actions: tuple
    errors: tuple
    epsilon: float = None

    @property
    def coefficients(self):
        """t_j = exp(-S_j / 2 eps)."""
        if self.epsilon is None:
            return None
        return tuple(math.exp(-s / (2.0 * self.epsilon)) for s in self.actions)

    @property
    def log_inverse_product(self):
        """ln(1/T) = sum S_j / 2 eps, without underflow."""
        if self.epsilon is None:
            return None
        return math.fsum(self.actions) / (2.0 * self.epsilon)

    @property
    def product(self):
        t = self.coefficients
        if t is None:
            return None
        return math.prod(t)

    @property
    def asymptotic_exponent(self):
        """sum S_j / 4 pi."""
        return math.fsum(self.actions) / (4.0 * math.pi)

    def with_epsilon(self, epsilon):
        return ActionSet(self.actions, self.errors, epsilon)


def _gap_abs_im(problem, z):
    d = problem.discriminant_at(np.asarray(z, dtype=float).astype(complex)).real
    return np.arccosh(np.maximum(np.abs(d) / 2.0, 1.0))


def _half_integral(problem, a, c, sgn, n):
    # int over [a, c] (or [c, a]) of |Im kappa|, with zeta = a + sgn u^2
    length = abs(c - a)
    x, w = np.polynomial.legendre.leggauss(n)
    umax = math.sqrt(length)
    u = 0.5 * umax * (x + 1.0)
    wu = 0.5 * umax * w
    z = a + sgn * u * u
    return float(np.sum(wu * 2.0 * u * _gap_abs_im(problem, z)))


def collapsed_action(problem, a, b, tol=1e-13, max_nodes=2048):
    """2 * int_a^b |Im kappa| with both endpoints treated as square-root points.

    Returns (value, error estimate). The gap segment may be unrolled past 2 pi.
    """
    c = 0.5 * (a + b)
    prev = None
    n = 16
    while n <= max_nodes:
        val = 2.0 * (_half_integral(problem, a, c, 1.0, n) + _half_integral(problem, b, c, -1.0, n))
        if prev is not None:
            err = abs(val - prev)
            if err <= tol * max(1.0, abs(val)):
                return val, err
        prev = val
        n *= 2
    raise AccuracyError(f"gap quadrature on [{a:.6g}, {b:.6g}] did not converge with {max_nodes} nodes (last change {err:.3g})")


def tunneling_actions(problem, decomposition, tol=1e-13):
    """S_j for every gap of a regular decomposition."""
    if decomposition.kind != "regular" or not decomposition.gaps:
        raise DegenerateGeometryError("tunneling actions need a decomposition with at least one gap")
    vals, errs = [], []
    for j, (a, b) in enumerate(decomposition.gaps):
        s, e = collapsed_action(problem, a, b, tol)
        if not s > 0:
            raise InconsistencyError(f"action S_{j + 1} = {s!r} is not positive")
        vals.append(s)
        errs.append(e)
    return ActionSet(tuple(vals), tuple(errs), problem.epsilon)


def _side_nodes(z0, z1, panel, order):
    n = max(1, int(math.ceil(abs(z1 - z0) / panel)))
    x, w = np.polynomial.legendre.leggauss(order)
    zs, ws = [], []
    for k in range(n):
        a = z0 + (z1 - z0) * k / n
        b = z0 + (z1 - z0) * (k + 1) / n
        zs.append(0.5 * (a + b) + 0.5 * (b - a) * x)
        ws.append(0.5 * (b - a) * w)
    return np.concatenate(zs), np.concatenate(ws)


def contour_action(problem, a, b, left_margin, right_margin, height, order=24):
    """|Re(i * loop integral of kappa)| around [a - left_margin, b + right_margin] x [-height, height].

    Returns (value, imaginary leftover, closure error of the continued branch).
    """
    xa, xb = a - left_margin, b + right_margin
    corners = [complex(xa, 0.0), complex(xa, -height), complex(xb, -height),
               complex(xb, height), complex(xa, height), complex(xa, 0.0)]
    panel = 0.5 * min(height, left_margin, right_margin)
    nodes, weights = [], []
    for z0, z1 in zip(corners[:-1], corners[1:]):
        zs, ws = _side_nodes(z0, z1, panel, order)
        nodes.append(zs)
        weights.append(ws)
    nodes = np.concatenate(nodes)
    weights = np.concatenate(weights)
    k0 = complex(raw_momentum(problem, np.array([corners[0]]))[0])
    tr = Tracker(problem, corners[0], k0)
    vals = tr.run(nodes)
    back = tr.advance(corners[-1])
    closure = abs(back - k0)
    loop = complex(np.sum(weights * vals))
    s = 1j * loop
    return abs(s.real), s.imag, closure


def contour_actions(problem, decomposition, height=None):
    """Rectangle-contour values of S_j, one per gap."""
    if decomposition.kind != "regular":
        raise DegenerateGeometryError("contour actions need a regular decomposition")
    h = height or min(0.5 * problem.strip_height, 0.25)
    ivs = list(decomposition.intervals)
    out = []
    for j, (a, b) in enumerate(decomposition.gaps):
        la, lb = ivs[j]
        na, nb = ivs[(j + 1) % len(ivs)]
        ml = min(0.25 * (lb - la), 0.1)
        mr = min(0.25 * (nb - na), 0.1)
        val, leftover, closure = contour_action(problem, a, b, ml, mr, h)
        if closure > 1e-8:
            raise InconsistencyError(f"branch does not close around gap {j + 1} (mismatch {closure:.3g})")
        out.append((val, leftover))
    return out
