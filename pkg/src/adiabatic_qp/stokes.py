"""Stokes lines: level curves Im int_{zeta0}^{zeta} (kappa - kappa(zeta0)) = 0 from a branch point."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .continuation import Tracker, nearest_candidate, raw_momentum
from .errors import ContinuationError, InvalidInputError, UnsupportedOrderError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class StokesLine:
    origin: object
    points: np.ndarray
    direction: str          # 'upward', 'downward' or 'real'
    initial_angle: float
    residual: float         # max |Im integral| over the nodes
    stop_reason: str
    monotone_height: bool   # Im zeta monotone along the line
    max_drift: float        # max |Re zeta - Re zeta0|
    kappa1: complex = None  # branch value at the first node after the origin

    @property
    def truncated(self):
        return self.stop_reason == "corrector divergence"


def _local_coefficient(problem, z0, k0, rho=1e-8):
    a = complex(raw_momentum(problem, np.array([z0 + rho]))[0])
    best = nearest_candidate(a, k0)[0]
    return (best - k0) / math.sqrt(rho)


def _start_angles(c):
    out = []
    for m in range(-3, 4):
        t = (2.0 / 3.0) * (m * math.pi - math.atan2(c.imag, c.real))
        t = math.atan2(math.sin(t), math.cos(t))
        if all(abs(math.atan2(math.sin(t - u), math.cos(t - u))) > 1e-6 for u in out):
            out.append(t)
    return sorted(out)


def _gauss(n):
    return np.polynomial.legendre.leggauss(n)


class _Line:
    def __init__(self, problem, z0, k0, c, theta, r0):
        self.problem = problem
        self.z0, self.k0 = z0, k0
        z1 = z0 + r0 * complex(math.cos(theta), math.sin(theta))
        self.root = math.sqrt(r0) * complex(math.cos(theta / 2), math.sin(theta / 2))
        self.c = c
        for _ in range(6):
            integral, k1 = self._first_piece(z1)
            res = integral.imag
            if abs(res) < 1e-13:
                break
            d = k1 - k0
            z1 = z1 - 1j * res * d.conjugate() / abs(d) ** 2
        self.integral = integral.real + 0j
        self.residuals = [0.0, integral.imag]
        self.kappa1 = k1
        self.tracker = Tracker(problem, z1, k1)
        # the second history point seeds the linear predictor along the ray
        zh = z0 + 0.5 * (z1 - z0)
        kh = self._near_origin(zh)
        self.tracker.hist = [(zh, kh), (z1, k1)]
        d = k1 - k0
        self.orient = 1.0 if (d.conjugate() * complex(math.cos(theta), -math.sin(theta))).real > 0 else -1.0
        self.points = [z0, z1]

    def _near_origin(self, z):
        u = np.sqrt(complex(z - self.z0) / (self.root ** 2)) if z != self.z0 else 0.0
        guess = self.k0 + self.c * self.root * u
        a = complex(raw_momentum(self.problem, np.array([z]))[0])
        return nearest_candidate(a, guess)[0]

    def _first_piece(self, z1):
        # zeta = z0 + u^2 (z1 - z0) removes the square-root behaviour at the origin
        x, w = _gauss(10)
        u = 0.5 * (x + 1.0)
        wu = 0.5 * w
        zs = self.z0 + u * u * (z1 - self.z0)
        a = raw_momentum(self.problem, zs)
        vals = []
        rt = np.sqrt(complex(z1 - self.z0))
        # align sqrt(z1 - z0) with the branch used for c
        if abs(rt - self.root * abs(rt) / abs(self.root)) > abs(rt):
            rt = -rt
        for ui, ai in zip(u, a):
            vals.append(nearest_candidate(complex(ai), self.k0 + self.c * rt * ui)[0])
        vals = np.asarray(vals)
        integral = np.sum(wu * (vals - self.k0) * 2.0 * u * (z1 - self.z0))
        a1 = complex(raw_momentum(self.problem, np.array([z1]))[0])
        k1 = nearest_candidate(a1, self.k0 + self.c * rt)[0]
        return complex(integral), k1

    def field(self, k):
        d = k - self.k0
        return self.orient * d.conjugate() / abs(d)

    def _trial(self, zs):
        tr = Tracker(self.problem, *self.tracker.hist[0])
        tr.hist = list(self.tracker.hist)
        return tr, np.array([tr.advance(z) for z in zs])

    def step(self, h, tol=1e-10):
        z, k = self.tracker.point, self.tracker.value
        f1 = self.field(k)
        zp = z + h * f1
        _, kp = self._trial([zp])
        zn = z + 0.5 * h * (f1 + self.field(kp[0]))
        x, w = _gauss(6)
        for _ in range(6):
            nodes = 0.5 * (z + zn) + 0.5 * (zn - z) * x
            tr, vals = self._trial(list(nodes) + [zn])
            seg = complex(np.sum(0.5 * w * (vals[:-1] - self.k0)) * (zn - z))
            res = (self.integral + seg).imag
            if abs(res) < tol:
                self.tracker = tr
                self.integral += seg
                self.points.append(zn)
                self.residuals.append(res)
                return True
            d = vals[-1] - self.k0
            zn = zn - 1j * res * d.conjugate() / abs(d) ** 2
        return False


def level_residual(problem, line):
    """Recompute Im int (kappa - kappa(zeta0)) at every node of a traced line.

    Uses a fresh continuation from the first node; the chord from the origin
    is integrated with zeta = zeta0 + u^2 (zeta1 - zeta0) walking inwards.
    """
    pts = line.points
    z0, z1 = pts[0], pts[1]
    a0 = complex(raw_momentum(problem, np.array([z0]))[0])
    k0 = math.pi * round(a0.real / math.pi)
    x, w = _gauss(12)
    u = 0.5 * (x + 1.0)
    order = np.argsort(-u)
    tr = Tracker(problem, z1, line.kappa1)
    vals = np.empty(len(u), dtype=complex)
    for i in order:
        vals[i] = tr.advance(z0 + u[i] ** 2 * (z1 - z0))
    total = complex(np.sum(0.5 * w * (vals - k0) * 2.0 * u * (z1 - z0)))
    out = [0.0, total.imag]
    x, w = _gauss(8)
    tr = Tracker(problem, z1, line.kappa1)
    for a, b in zip(pts[1:-1], pts[2:]):
        nodes = 0.5 * (a + b) + 0.5 * (b - a) * x
        v = np.array([tr.advance(z) for z in nodes])
        tr.advance(b)
        total += np.sum(0.5 * w * (v - k0)) * (b - a)
        out.append(total.imag)
    return np.asarray(out)


def trace_stokes_lines(problem, origin, height=None, arc_budget=4 * math.pi, h_max=0.02, stop_distance=5e-3):
    """The three Stokes lines leaving a simple branch point."""
    if not origin.simple:
        raise UnsupportedOrderError(f"branch point {origin.location} is not simple")
    ystop = problem.strip_height if height is None else float(height)
    z0 = complex(origin.location)
    a0 = complex(raw_momentum(problem, np.array([z0]))[0])
    k0 = math.pi * round(a0.real / math.pi)
    c = _local_coefficient(problem, z0, k0)
    if abs(c) < 1e-8:
        raise UnsupportedOrderError(f"no square-root behaviour at {z0}")
    others = [complex(b.location) + s for b in problem.branch_points for s in (-TWO_PI, 0.0, TWO_PI)
              if abs(complex(b.location) + s - z0) > 1e-9]
    lines = []
    for theta in _start_angles(c):
        line = _Line(problem, z0, k0, c, theta, 2e-3)
        arc, h, reason = 0.0, 2e-3, None
        while reason is None:
            zc = line.tracker.point
            near = min([abs(zc - o) for o in others], default=np.inf)
            if near < stop_distance:
                reason = "reached branch point"
                break
            hh = min(h, max(0.25 * near, 1e-4))
            try:
                ok = line.step(hh)
            except ContinuationError:
                ok = False
            if not ok:
                h *= 0.5
                if h < 1e-6:
                    reason = "corrector divergence"
                continue
            arc += hh
            h = min(h_max, 1.5 * h)
            zn = line.points[-1]
            if abs(zn.imag) > ystop:
                reason = "left strip"
            elif arc > arc_budget:
                reason = "arc budget"
            elif abs(zn.real - z0.real) > TWO_PI:
                reason = "left period"
        pts = np.asarray(line.points)
        ims = pts.imag - z0.imag
        if np.max(np.abs(ims)) < 1e-9:
            label = "real"
        else:
            label = "upward" if ims[np.argmax(np.abs(ims))] > 0 else "downward"
        dim = np.diff(pts.imag)
        mono = bool(np.all(dim >= -1e-12) or np.all(dim <= 1e-12))
        lines.append(StokesLine(origin, pts, label, theta, float(np.max(np.abs(line.residuals))), reason,
                                mono, float(np.max(np.abs(pts.real - z0.real))), line.kappa1))
    if len(lines) != 3:
        raise InvalidInputError(f"expected 3 Stokes directions, found {len(lines)}")
    return lines


def intersections(line_a, line_b, skip=2):
    """Crossing points of two polylines (ignoring the first `skip` segments near a shared origin)."""
    out = []
    pa, pb = line_a.points, line_b.points
    for i in range(skip, len(pa) - 1):
        a0, a1 = pa[i], pa[i + 1]
        for j in range(skip, len(pb) - 1):
            b0, b1 = pb[j], pb[j + 1]
            da, db = a1 - a0, b1 - b0
            den = (da.conjugate() * db).imag
            if den == 0:
                continue
            t = ((b0 - a0).conjugate() * db).imag / den
            s = ((b0 - a0).conjugate() * da).imag / den
            if 0 <= t <= 1 and 0 <= s <= 1:
                out.append(a0 + t * da)
    return out
