"""Slow-variable geometry at a fixed energy.

The slow potential W is a real trigonometric polynomial of period 2 pi. For
the energy E the function E - W(zeta) is compared with the band structure of
the fast potential: this gives the complex momentum, its branch points, the
band/gap decomposition of the real period, and the H4 checks.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.optimize import brentq

from .errors import (
    DegenerateGeometryError,
    InconsistencyError,
    InvalidInputError,
    NearBranchPointWarning,
    UnsupportedOrderError,
)
from .periodic import band_edges, discriminant, main_branch

TWO_PI = 2.0 * math.pi
GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0
MAX_ORDER = 8


def epsilon_from_family(n):
    """2 pi / (n + golden ratio): eps / 2 pi is irrational by construction."""
    return TWO_PI / (n + GOLDEN)


# ── slow potential ──────────────────────────────────────────────────────────

@dataclass(frozen=True)
class SlowPotential:
    """W(zeta) = sum a_n cos(n zeta) + b_n sin(n zeta), coefficients (n, a_n, b_n).

    `strip_height` is the user cap on the half-width of the analyticity strip.
    """
    coefficients: tuple
    strip_height: float = 0.5
    w_minus: float = field(init=False, repr=False, compare=False)
    w_plus: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        coefs = {}
        for n, a, b in self.coefficients:
            if int(n) != n or n < 0:
                raise InvalidInputError(f"coefficients: harmonic index {n!r} must be a non-negative integer")
            a, b = float(a), float(b)
            if not (math.isfinite(a) and math.isfinite(b)):
                raise InvalidInputError("coefficients: must be finite reals")
            pa, pb = coefs.get(int(n), (0.0, 0.0))
            coefs[int(n)] = (pa + a, pb + (b if n > 0 else 0.0))
        object.__setattr__(self, "coefficients",
                           tuple((n, a, b) for n, (a, b) in sorted(coefs.items())))
        if not (self.strip_height > 0 and math.isfinite(self.strip_height)):
            raise InvalidInputError("strip_height: must be positive")
        if self.is_constant:
            lo = hi = float(self(0.0))
        else:
            crit = [z for z, _ in self.critical_points()]
            grid = np.linspace(0.0, TWO_PI, 4097)
            vals = np.concatenate([self(grid).real, self(np.array(crit, dtype=float)).real])
            lo, hi = float(vals.min()), float(vals.max())
        object.__setattr__(self, "w_minus", lo)
        object.__setattr__(self, "w_plus", hi)

    @classmethod
    def cosine(cls, amplitude=1.0, strip_height=0.5):
        return cls(((1, amplitude, 0.0),), strip_height)

    @property
    def degree(self):
        return max([n for n, a, b in self.coefficients if n > 0 and (a or b)], default=0)

    @property
    def is_constant(self):
        return self.degree == 0

    def derivative(self, z, order=0):
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        shift = order * math.pi / 2.0
        for n, a, b in self.coefficients:
            if n == 0:
                if order == 0:
                    out = out + a
                continue
            f = float(n) ** order
            out = out + f * (a * np.cos(n * z + shift) + b * np.sin(n * z + shift))
        return out

    def __call__(self, z):
        z = np.asarray(z)
        out = self.derivative(z, 0)
        if not np.iscomplexobj(z):
            out = out.real
        return out[()] if out.ndim == 0 else out

    def scale(self, order=0):
        return sum((abs(a) + abs(b)) * float(n) ** order for n, a, b in self.coefficients if n > 0)

    def _poly(self, coefs, const):
        # sum a cos(n z) + b sin(n z) + const as a polynomial in w = exp(i z), times w^d
        d = max([n for n, _, _ in coefs], default=0)
        p = np.zeros(2 * d + 1, dtype=complex)  # p[k] multiplies w^k
        p[d] += const
        for n, a, b in coefs:
            if n == 0:
                p[d] += a
                continue
            p[d + n] += (a - 1j * b) / 2.0
            p[d - n] += (a + 1j * b) / 2.0
        return p

    def level_roots(self, level):
        """All complex zeta in [0, 2 pi) x i R with W(zeta) = level (companion matrix)."""
        const = sum(a for n, a, _ in self.coefficients if n == 0)
        p = self._poly([c for c in self.coefficients if c[0] > 0], const - level)
        if self.is_constant:
            return np.array([], dtype=complex)
        w = np.roots(p[::-1])
        w = w[np.abs(w) > 0]
        z = -1j * np.log(w)
        z = np.where(z.real < 0, z + TWO_PI, z)
        return z

    def critical_points(self, tol=1e-8):
        """Real critical points on [0, 2 pi) with their order (first non-vanishing derivative)."""
        if self.is_constant:
            return []
        dcoefs = [(n, n * b, -n * a) for n, a, b in self.coefficients if n > 0]
        p = self._poly(dcoefs, 0.0)
        w = np.roots(p[::-1])
        w = w[np.abs(np.abs(w) - 1.0) < 1e-4]
        angles = np.sort(np.mod(np.angle(w), TWO_PI))
        clusters = []
        for t in angles:
            if clusters and abs(t - clusters[-1][-1]) < 1e-3:
                clusters[-1].append(t)
            else:
                clusters.append([t])
        if len(clusters) > 1 and (clusters[0][0] + TWO_PI - clusters[-1][-1]) < 1e-3:
            clusters[0] = [t - TWO_PI for t in clusters.pop()] + clusters[0]
        out = []
        for cl in clusters:
            z = float(np.mean(cl))
            k = len(cl)
            # polish on the first derivative that has a simple zero here
            for _ in range(60):
                f = self.derivative(z, k).real
                g = self.derivative(z, k + 1).real
                if g == 0:
                    break
                dz = f / g
                z -= dz
                if abs(dz) < 1e-15:
                    break
            order = None
            for j in range(2, MAX_ORDER + 2):
                if abs(self.derivative(z, j).real) > tol * max(1.0, self.scale(j)):
                    order = j
                    break
            if order is None or order > MAX_ORDER:
                raise UnsupportedOrderError(f"critical point at zeta={z:.12g} has order above {MAX_ORDER}")
            out.append((float(z % TWO_PI), order))
        # a point of the unit circle test may pick up near-circle roots that are not real zeros
        out = [(z, o) for z, o in out if abs(self.derivative(z, 1).real) <= 1e-7 * max(1.0, self.scale(1))]
        return sorted(out)

    def to_mapping(self):
        return {"coefficients": [list(c) for c in self.coefficients], "strip_height": self.strip_height}


# ── problem ─────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class BranchPoint:
    location: complex
    edge_index: int
    edge: float
    simple: bool

    @property
    def is_real(self):
        return self.location.imag == 0.0


class AdiabaticProblem:
    """Fast potential, slow potential and energy (epsilon optional)."""

    def __init__(self, fast, slow, energy, epsilon=None, bands=None, steps_per_unit=None):
        self.fast = fast
        self.slow = slow
        self.energy = float(energy)
        if not math.isfinite(self.energy):
            raise InvalidInputError("energy must be finite")
        if epsilon is not None and not (epsilon > 0):
            raise InvalidInputError("epsilon must be positive")
        self.epsilon = epsilon
        self.steps_per_unit = steps_per_unit
        lo, hi = self.required_window()
        if bands is None or bands.window[0] > lo or bands.window[1] < hi:
            bands = band_edges(fast, (lo, hi), steps_per_unit=steps_per_unit)
        self.bands = bands

    def required_window(self):
        cap = self.slow.strip_height
        x = np.linspace(0.0, TWO_PI, 1025)
        reach = float(np.max(np.abs(self.slow(x + 1j * cap) - self.slow.w_minus))) if not self.slow.is_constant else 0.0
        return (self.energy - self.slow.w_plus - reach - 1.0, self.energy - self.slow.w_minus + reach + 1.0)

    def with_energy(self, energy):
        return AdiabaticProblem(self.fast, self.slow, energy, self.epsilon, self.bands, self.steps_per_unit)

    def with_epsilon(self, epsilon):
        return AdiabaticProblem(self.fast, self.slow, self.energy, epsilon, self.bands, self.steps_per_unit)

    @property
    def w_range(self):
        """The set E - W(R) as an interval."""
        return (self.energy - self.slow.w_plus, self.energy - self.slow.w_minus)

    def local_energy(self, z):
        return self.energy - self.slow(z)

    def discriminant_at(self, z):
        return discriminant(self.fast, self.local_energy(np.asarray(z, dtype=complex)), self.steps_per_unit)

    def open_edges(self):
        """(index, value) of edges that bound open gaps."""
        out = []
        for i, e in enumerate(self.bands.edges):
            l = self.bands.index_of(i)
            if l == 1 or self.bands.gap_is_open(l // 2):
                out.append((l, e))
        return out

    @cached_property
    def _all_branch_points(self):
        return _branch_points(self, self.slow.strip_height)

    @cached_property
    def strip_height(self):
        """Y: the cap, lowered below any non-real branch point."""
        cap = self.slow.strip_height
        ims = [abs(b.location.imag) for b in self._all_branch_points if b.location.imag != 0.0]
        return min(cap, 0.9 * min(ims)) if ims else cap

    @cached_property
    def branch_points(self):
        y = self.strip_height
        return [b for b in self._all_branch_points if abs(b.location.imag) <= y]

    def distance_to_branch_points(self, z):
        pts = np.array([b.location for b in self.branch_points], dtype=complex)
        z = np.asarray(z, dtype=complex)
        if pts.size == 0:
            return np.full(z.shape, np.inf)
        # periodic copies
        d = np.full(z.shape, np.inf)
        for shift in (-TWO_PI, 0.0, TWO_PI, 2 * TWO_PI, -2 * TWO_PI):
            dd = np.min(np.abs(z[..., None] - (pts + shift)), axis=-1)
            d = np.minimum(d, dd)
        return d


# ── branch points ───────────────────────────────────────────────────────────

def _winding(fun, corners, max_pts=1 << 15):
    """Winding number of fun around 0 along the closed polygon `corners`."""
    n = 32
    while True:
        total = 0.0
        ok = True
        minabs = np.inf
        for a, b in zip(corners, corners[1:] + corners[:1]):
            t = np.linspace(0.0, 1.0, n + 1)
            v = fun(a + (b - a) * t)
            minabs = min(minabs, float(np.min(np.abs(v))))
            d = np.angle(v[1:] / v[:-1])
            if np.max(np.abs(d)) > 0.5:
                ok = False
                break
            total += float(np.sum(d))
        if ok:
            return int(round(total / TWO_PI)), minabs
        n *= 2
        if n > max_pts:
            raise InconsistencyError("argument-principle sampling did not resolve the boundary phase")


def _newton_roots(fun, dfun, x0, x1, height, count, seeds_x=16, seeds_y=12):
    found = []
    for sx, sy in ((seeds_x, seeds_y), (4 * seeds_x, 4 * seeds_y)):
        xs = np.linspace(x0, x1, sx + 2)[1:-1]
        ys = np.linspace(-height, height, sy + 2)[1:-1]
        z = (xs[:, None] + 1j * ys[None, :]).ravel()
        live = np.ones(z.shape, dtype=bool)
        with np.errstate(all="ignore"):
            # stray seeds may run off to large |Im z|; they are filtered below
            for _ in range(80):
                if not live.any():
                    break
                zl = z[live]
                g = dfun(zl)
                ok = np.isfinite(g) & (g != 0)
                dz = np.zeros_like(zl)
                dz[ok] = fun(zl[ok]) / g[ok]
                z[live] = zl - dz
                idx = np.nonzero(live)[0]
                live[idx[~ok | ~np.isfinite(dz) | (np.abs(dz) < 1e-15 * np.maximum(1.0, np.abs(zl)))]] = False
        keep = (z.real >= x0 - 1e-12) & (z.real < x1 - 1e-12) & (np.abs(z.imag) <= height + 1e-12)
        keep &= np.isfinite(z)
        z = z[keep]
        with np.errstate(all="ignore"):
            z = z[np.abs(fun(z)) <= 1e-9]
        for r in z:
            if all(abs(r - q) > 1e-7 for q in found):
                found.append(complex(r))
        if len(found) >= count:
            break
    return found


def _branch_points(problem, height):
    slow = problem.slow
    if slow.is_constant:
        return []
    strips = max(4, 4 * slow.degree)
    out = []
    for l, e in problem.open_edges():
        level = problem.energy - e

        def fun(z, level=level):
            return slow.derivative(z, 0) - level

        def dfun(z):
            return slow.derivative(z, 1)

        # shift the cell so that no root sits on a vertical side
        for trial in range(12):
            x0 = 0.0137 * trial
            xs = x0 + TWO_PI * np.arange(strips + 1) / strips
            h = height * (1.0 - 0.0011 * trial)
            counts = []
            bad = False
            for a, b in zip(xs[:-1], xs[1:]):
                corners = [complex(a, -h), complex(b, -h), complex(b, h), complex(a, h)]
                c, minabs = _winding(fun, corners)
                if minabs < 1e-6 * max(1.0, abs(level)):
                    bad = True
                    break
                counts.append(c)
            if not bad:
                break
        else:
            raise InconsistencyError(f"could not place counting rectangles for edge E_{l}")
        for (a, b), c in zip(zip(xs[:-1], xs[1:]), counts):
            if c == 0:
                continue
            roots = _newton_roots(fun, dfun, a, b, h, c)
            mult = []
            for r in roots:
                m = 1
                while m < MAX_ORDER and abs(slow.derivative(r, m)) <= 1e-8 * max(1.0, slow.scale(m)):
                    m += 1
                mult.append(m)
            if sum(mult) != c:
                raise InconsistencyError(
                    f"edge E_{l}: argument principle counts {c} roots in [{a:.6g},{b:.6g}], polishing found {sum(mult)}")
            for r, m in zip(roots, mult):
                if abs(r.imag) < 1e-12:
                    r = complex(r.real, 0.0)
                out.append(BranchPoint(complex(r.real % TWO_PI, r.imag), l, e, m == 1))
    out.sort(key=lambda b: (b.location.real, b.location.imag))
    return out


def locate_branch_points(problem):
    """Solutions of W(zeta) = E - E_l in the strip |Im| <= Y, 0 <= Re < 2 pi."""
    return list(problem.branch_points)


# ── complex momentum ────────────────────────────────────────────────────────

def main_sheet(problem, z):
    """kappa_p(zeta) = k_p(E - W(zeta)), reflected for Im(E - W) < 0."""
    z = np.asarray(z, dtype=complex)
    ell = problem.local_energy(z)
    flat = ell.ravel()
    out = np.empty(flat.shape, dtype=complex)
    real = np.abs(flat.imag) <= 1e-14 * np.maximum(1.0, np.abs(flat))
    if np.any(real):
        out[real] = main_branch(problem.fast, problem.bands, flat[real].real, problem.steps_per_unit)
    for i in np.nonzero(~real)[0]:
        e = flat[i]
        if e.imag > 0:
            out[i] = main_branch(problem.fast, problem.bands, np.array([e]), problem.steps_per_unit)[0]
        else:
            out[i] = np.conj(main_branch(problem.fast, problem.bands, np.array([np.conj(e)]),
                                         problem.steps_per_unit)[0])
    return out.reshape(ell.shape)


def complex_momentum(problem, zeta, branch=(1, 0)):
    """Branch sign * kappa_p(zeta) + 2 pi sheet of kappa(zeta) = k(E - W(zeta))."""
    sign, sheet = branch
    if sign not in (1, -1) or int(sheet) != sheet:
        raise InvalidInputError(f"branch must be (+-1, integer), got {branch!r}")
    zeta = complex(zeta)
    if abs(zeta.imag) > problem.strip_height + 1e-12:
        raise InvalidInputError(f"zeta={zeta!r} outside the strip |Im| <= {problem.strip_height:.6g}")
    if problem.distance_to_branch_points(np.array([zeta]))[0] < 1e-6:
        warnings.warn(f"zeta={zeta!r} is within 1e-6 of a branch point; reduced accuracy",
                      NearBranchPointWarning, stacklevel=2)
    return sign * complex(main_sheet(problem, np.array([zeta]))[0]) + TWO_PI * sheet


# ── decomposition ───────────────────────────────────────────────────────────

@dataclass(frozen=True)
class H4Flags:
    a: bool
    b: bool
    c: bool
    witnesses: tuple = ()

    @property
    def all(self):
        return self.a and self.b and self.c

    def to_mapping(self):
        return {"H4a": self.a, "H4b": self.b, "H4c": self.c, "witnesses": list(self.witnesses)}


@dataclass(frozen=True)
class IsoEnergyDecomposition:
    """Bands B_j = [phi_j^-, phi_j^+] and gaps G_j = (phi_j^+, phi_{j+1}^-) on one period.

    kind is 'regular', 'band-circle' (no crossings, E - W inside a band) or
    'gap-circle'. Gap endpoints are unrolled so that G_N ends at phi_1^- + 2 pi.
    """
    energy: float
    kind: str
    intervals: tuple
    gaps: tuple
    band_numbers: tuple
    gap_numbers: tuple
    extrema: tuple
    interval_indices: tuple
    gap_real_parts: tuple
    h4: H4Flags
    period_sign: int = 1
    period_shift: int = 0

    @property
    def count(self):
        return len(self.intervals)

    def gap_order_sums(self):
        """sum over extrema in G_j of (order - 1)."""
        return tuple(sum(o - 1 for _, o in ex) for ex in self.extrema)

    def rows(self):
        return [(j + 1, a, b, self.interval_indices[j]) for j, (a, b) in enumerate(self.intervals)]


def real_crossings(problem):
    """Real zeta in [0, 2 pi) where E - W(zeta) hits an edge bounding an open gap."""
    slow = problem.slow
    if slow.is_constant:
        return []
    crit = slow.critical_points()
    lo, hi = problem.w_range
    out = []
    for l, e in problem.open_edges():
        if not (lo - 1e-12 <= e <= hi + 1e-12):
            continue
        level = problem.energy - e
        for z, _ in crit:
            if abs(slow(z) - level) < 1e-9:
                raise DegenerateGeometryError(
                    f"E - W touches edge E_{l} tangentially at zeta={z:.12g}", where=z)
        # W is monotone between consecutive critical points
        knots = [z for z, _ in crit] + [crit[0][0] + TWO_PI]
        for a, b in zip(knots[:-1], knots[1:]):
            fa, fb = slow(a) - level, slow(b) - level
            if fa * fb < 0:
                r = brentq(lambda z: slow(z) - level, a, b, xtol=1e-15, rtol=8.9e-16)
                out.append((r % TWO_PI, l))
    out.sort()
    return out


def _bands_meeting_range(problem):
    lo, hi = problem.w_range
    return [n for n, a, b in problem.bands.bands() if a <= hi and b >= lo]


def _resolved_bands(problem, n):
    """A band structure wide enough to see both gaps next to band n."""
    bs = problem.bands
    lo, hi = bs.window
    span = max(hi - lo, 1.0)
    while not bs.gap_known(n):
        hi += span
        span *= 2.0
        bs = band_edges(problem.fast, (lo, hi), steps_per_unit=problem.steps_per_unit)
    return bs


def _h4c(problem):
    bad = [n for n in _bands_meeting_range(problem) if not _resolved_bands(problem, n).is_isolated(n)]
    return not bad, [f"band {n} not isolated" for n in bad]


def real_decomposition(problem):
    """Decompose the real period into preimages of bands and gaps."""
    from .indices import interval_indices

    crossings = real_crossings(problem)
    h4c, wit_c = _h4c(problem)
    if not crossings:
        kind, n = problem.bands.locate(problem.local_energy(0.0).real)
        wit = wit_c + [f"no crossings: E - W stays in {kind} {n}"]
        if kind == "band":
            return IsoEnergyDecomposition(problem.energy, "band-circle", ((0.0, TWO_PI),), (), (n,), (),
                                          (), (0,), (), H4Flags(True, False, h4c, tuple(wit)))
        return IsoEnergyDecomposition(problem.energy, "gap-circle", (), ((0.0, TWO_PI),), (), (n,),
                                      (tuple(problem.slow.critical_points()),), (), (),
                                      H4Flags(True, False, h4c, tuple(wit)))
    xs = [z for z, _ in crossings]
    arcs = []
    for i, a in enumerate(xs):
        b = xs[i + 1] if i + 1 < len(xs) else xs[0] + TWO_PI
        kind, n = problem.bands.locate(float(problem.local_energy(0.5 * (a + b) % TWO_PI).real))
        arcs.append((a, b, kind, n))
    for (a0, b0, k0, _), (a1, b1, k1, _) in zip(arcs, arcs[1:] + arcs[:1]):
        if k0 == k1:
            raise InconsistencyError(f"two {k0} arcs meet at zeta={b0 % TWO_PI:.12g}")
    band_arcs = [(a, b, n) for a, b, k, n in arcs if k == "band"]
    gap_arcs = {round(a, 12): (a, b, n) for a, b, k, n in arcs if k == "gap"}
    order = sorted(range(len(band_arcs)), key=lambda i: band_arcs[i][0])
    intervals = [(band_arcs[i][0], band_arcs[i][1]) for i in order]
    p, info = interval_indices(problem, intervals)
    start = 0
    nz = [j for j, v in enumerate(p) if v != 0]
    if nz:
        start = nz[0]
    intervals = intervals[start:] + [(a + TWO_PI, b + TWO_PI) for a, b in intervals[:start]]
    p = list(p[start:]) + list(p[:start])
    sign = 1 if not nz or p[0] > 0 else -1
    p = tuple(sign * v for v in p)
    band_numbers = []
    for a, b in intervals:
        band_numbers.append(problem.bands.locate(float(problem.local_energy(0.5 * (a + b) % TWO_PI).real))[1])
    gaps, gap_numbers, extrema = [], [], []
    crit = problem.slow.critical_points()
    for j, (a, b) in enumerate(intervals):
        nxt = intervals[j + 1][0] if j + 1 < len(intervals) else intervals[0][0] + TWO_PI
        gaps.append((b, nxt))
        gap_numbers.append(problem.bands.locate(float(problem.local_energy(0.5 * (b + nxt) % TWO_PI).real))[1])
        ex = []
        for z, o in crit:
            for shift in (0.0, TWO_PI, 2 * TWO_PI):
                if b < z + shift < nxt:
                    ex.append((z + shift, o))
        extrema.append(tuple(sorted(ex)))
    # Re kappa on each gap, after the sign flip and a shift putting the gap before B_1 at 0 or pi
    sg, sh = info["period_sign"], info["period_shift"]
    ends = info["right_values"][start:] + [sg * v + sh * TWO_PI for v in info["right_values"][:start]]
    reals = [sign * v for v in ends]
    base = sign * (info["left_values"][start])
    offset = TWO_PI * math.floor(base / TWO_PI + 0.25)
    reals = tuple(r - offset for r in reals)
    h4b = any(v != 0 for v in p)
    wit = list(wit_c)
    if not h4b:
        wit.append("all interval indices vanish")
    return IsoEnergyDecomposition(
        energy=problem.energy,
        kind="regular",
        intervals=tuple(intervals),
        gaps=tuple(gaps),
        band_numbers=tuple(band_numbers),
        gap_numbers=tuple(gap_numbers),
        extrema=tuple(extrema),
        interval_indices=p,
        gap_real_parts=tuple(float(r) for r in reals),
        h4=H4Flags(True, h4b, h4c, tuple(wit)),
        period_sign=info["period_sign"],
        period_shift=sign * info["period_shift"],
    )


@dataclass(frozen=True)
class H4Report:
    interval: tuple
    entries: tuple  # (E, H4Flags)

    @property
    def a(self):
        return all(f.a for _, f in self.entries)

    @property
    def b(self):
        return all(f.b for _, f in self.entries)

    @property
    def c(self):
        return all(f.c for _, f in self.entries)

    @property
    def all(self):
        return self.a and self.b and self.c

    def to_mapping(self):
        return {
            "interval": list(self.interval),
            "H4a": self.a, "H4b": self.b, "H4c": self.c,
            "samples": [dict(energy=e, **f.to_mapping()) for e, f in self.entries],
        }


def check_H4(problem, interval, samples=9):
    """H4 flags at evenly spaced energies of `interval`; report only."""
    lo, hi = interval
    energies = np.linspace(lo, hi, samples) if samples > 1 else np.array([0.5 * (lo + hi)])
    entries = []
    for e in energies:
        pr = problem.with_energy(float(e))
        try:
            flags = real_decomposition(pr).h4
        except DegenerateGeometryError as exc:
            h4c, wit = _h4c(pr)
            flags = H4Flags(False, False, h4c, tuple(wit + [str(exc)]))
        entries.append((float(e), flags))
    return H4Report((float(lo), float(hi)), tuple(entries))
