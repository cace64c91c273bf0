"""Step-by-step analytic continuation of the complex momentum.

At every point the two values +-arccos(D/2) are known modulo 2 pi; the
continued value is the candidate nearest a linear extrapolation of the last
two accepted values. Steps whose choice is not clear-cut are subdivided.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import ContinuationError

TWO_PI = 2.0 * math.pi
MAX_DEPTH = 14


def raw_momentum(problem, zs):
    """Principal arccos(D(E - W(z))/2) at complex points."""
    zs = np.asarray(zs, dtype=complex)
    return np.arccos(problem.discriminant_at(zs) / 2.0)


def nearest_candidate(a, target):
    """The value in {+-a + 2 pi m} closest to `target`, and the runner-up gap."""
    cp = a + TWO_PI * round((target - a).real / TWO_PI)
    cm = -a + TWO_PI * round((target + a).real / TWO_PI)
    dp, dm = abs(cp - target), abs(cm - target)
    return (cp, dp, cm, dm) if dp <= dm else (cm, dm, cp, dp)


def _predict(hist, z):
    if len(hist) == 1:
        return hist[-1][1]
    (z1, k1), (z2, k2) = hist[-2], hist[-1]
    dz = z2 - z1
    if dz == 0:
        return k2
    return k2 + (k2 - k1) * ((z - z2) / dz)


class Tracker:
    """Continues one branch of kappa along successive points."""

    def __init__(self, problem, z0, kappa0, strict=0.3):
        self.problem = problem
        self.hist = [(complex(z0), complex(kappa0))]
        self.strict = strict
        self.refinements = 0

    @property
    def value(self):
        return self.hist[-1][1]

    @property
    def point(self):
        return self.hist[-1][0]

    def _accept(self, z, k):
        self.hist.append((z, k))
        if len(self.hist) > 2:
            del self.hist[0]
        return k

    def advance(self, z, a=None, depth=0):
        z = complex(z)
        if a is None:
            a = complex(raw_momentum(self.problem, np.array([z]))[0])
        pred = _predict(self.hist, z)
        best, dbest, other, _ = nearest_candidate(a, pred)
        sep = abs(best - other)
        step = abs(best - self.value)
        if sep < 1e-6 or (dbest <= self.strict * sep and step <= 0.5):
            return self._accept(z, best)
        if depth >= MAX_DEPTH:
            raise ContinuationError(
                f"branch choice ambiguous near z={z:.12g} (candidates {best:.6g}, {other:.6g})")
        self.refinements += 1
        z_old = self.point
        subs = z_old + (z - z_old) * np.array([0.25, 0.5, 0.75])
        for zs, as_ in zip(subs, raw_momentum(self.problem, subs)):
            self.advance(zs, complex(as_), depth + 1)
        return self.advance(z, a, depth + 1)

    def run(self, zs):
        zs = np.asarray(zs, dtype=complex)
        out = np.empty(zs.shape, dtype=complex)
        raws = raw_momentum(self.problem, zs)
        for i, (z, a) in enumerate(zip(zs, raws)):
            if i == 0 and z == self.point:
                out[i] = self.value
                continue
            out[i] = self.advance(z, complex(a))
        return out


def continue_along(problem, zs, kappa0, strict=0.3):
    """Values of the branch equal to kappa0 at zs[0], continued along zs."""
    zs = np.asarray(zs, dtype=complex)
    tr = Tracker(problem, zs[0], kappa0, strict)
    return tr.run(zs)


def polyline(vertices, spacing):
    """Sample a polyline with points no farther apart than `spacing`."""
    vertices = [complex(v) for v in vertices]
    pts = [vertices[0]]
    for a, b in zip(vertices[:-1], vertices[1:]):
        n = max(1, int(math.ceil(abs(b - a) / spacing)))
        pts.extend(a + (b - a) * np.arange(1, n + 1) / n)
    return np.asarray(pts, dtype=complex)
