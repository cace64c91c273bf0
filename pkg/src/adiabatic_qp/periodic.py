"""Floquet analysis of -psi'' + V(x) psi = E psi with a 1-periodic real V.

Two potential representations are supported: piecewise-constant segments
(propagated exactly, segment by segment) and trigonometric polynomials
(propagated with a fourth-order Magnus scheme). Both accept complex energies.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import (
    DegenerateMultiplierError,
    InvalidInputError,
    ResourceLimitError,
    WindowExhaustedError,
)

PIECEWISE = "piecewise-constant"
TRIG = "trigonometric-polynomial"

MAX_STEPS = 10_000_000
DEFAULT_STEPS_PER_UNIT = 256
EDGE_SNAP = 1e-12


# ── potentials ──────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class PotentialSpec:
    """Fast potential of period 1.

    segments: ((length, value), ...) laid out from x=0, lengths summing to 1.
    coefficients: ((n, a_n, b_n), ...) for sum a_n cos(2 pi n x) + b_n sin(2 pi n x);
    n=0 entries give the constant term.
    """
    kind: str
    segments: tuple = ()
    coefficients: tuple = ()

    def __post_init__(self):
        if self.kind == PIECEWISE:
            segs = tuple((float(l), float(v)) for l, v in self.segments)
            if not segs:
                raise InvalidInputError("segments: empty")
            for l, v in segs:
                if not (math.isfinite(l) and l > 0):
                    raise InvalidInputError(f"segments: length {l!r} must be positive")
                if not math.isfinite(v):
                    raise InvalidInputError(f"segments: value {v!r} must be finite and real")
            total = math.fsum(l for l, _ in segs)
            if abs(total - 1.0) > 1e-12:
                raise InvalidInputError(f"segments: lengths sum to {total!r}, expected 1")
            object.__setattr__(self, "segments", segs)
            object.__setattr__(self, "coefficients", ())
        elif self.kind == TRIG:
            coefs = []
            for n, a, b in self.coefficients:
                if int(n) != n or n < 0:
                    raise InvalidInputError(f"coefficients: harmonic index {n!r} must be a non-negative integer")
                a, b = float(a), float(b)
                if not (math.isfinite(a) and math.isfinite(b)):
                    raise InvalidInputError("coefficients: must be finite reals")
                coefs.append((int(n), a, b))
            object.__setattr__(self, "coefficients", tuple(coefs))
            object.__setattr__(self, "segments", ())
        else:
            raise InvalidInputError(f"kind: unknown potential kind {self.kind!r}")

    @classmethod
    def piecewise(cls, segments):
        return cls(PIECEWISE, segments=tuple(segments))

    @classmethod
    def trigonometric(cls, coefficients):
        return cls(TRIG, coefficients=tuple(coefficients))

    @classmethod
    def free(cls):
        return cls.piecewise([(1.0, 0.0)])

    @classmethod
    def kronig_penney(cls, height, width=0.5):
        """Barrier of the given height on [0, width), zero on the rest."""
        return cls.piecewise([(width, height), (1.0 - width, 0.0)])

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == PIECEWISE:
            frac = x - np.floor(x)
            bounds = np.cumsum([l for l, _ in self.segments])
            idx = np.minimum(np.searchsorted(bounds, frac, side="right"), len(self.segments) - 1)
            return np.asarray([v for _, v in self.segments])[idx]
        out = np.zeros_like(x)
        for n, a, b in self.coefficients:
            out = out + a * np.cos(2 * np.pi * n * x) + b * np.sin(2 * np.pi * n * x)
        return out

    def lower_bound(self):
        """A value not exceeding min V."""
        if self.kind == PIECEWISE:
            return min(v for _, v in self.segments)
        const = sum(a for n, a, _ in self.coefficients if n == 0)
        return const - sum(abs(a) + abs(b) for n, a, b in self.coefficients if n > 0)

    def to_mapping(self):
        if self.kind == PIECEWISE:
            return {"kind": self.kind, "segments": [list(s) for s in self.segments]}
        return {"kind": self.kind, "coefficients": [list(c) for c in self.coefficients]}


# ── propagators ─────────────────────────────────────────────────────────────

def _segment_matrices(energies, value, length):
    """Exact propagator over a constant stretch; entire in the energy."""
    q2 = energies - value
    q = np.sqrt(q2)
    c = np.cos(q * length)
    s = length * np.sinc(q * length / np.pi)
    m = np.empty(q2.shape + (2, 2), dtype=complex)
    m[..., 0, 0] = c
    m[..., 0, 1] = s
    m[..., 1, 0] = -q2 * s
    m[..., 1, 1] = c
    return m


def _expm_traceless(om):
    # exp of a traceless 2x2 matrix: cosh(s) I + sinh(s)/s * om, s^2 = -det(om)
    s2 = om[..., 0, 0] * om[..., 0, 0] + om[..., 0, 1] * om[..., 1, 0]
    s = np.sqrt(s2)
    ch = np.cosh(s)
    sh = np.sinc(1j * s / np.pi)  # sinh(s)/s
    out = om * sh[..., None, None]
    out[..., 0, 0] += ch
    out[..., 1, 1] += ch
    return out


_G = 0.5 / math.sqrt(3.0)


def _ordered_product(mats):
    # mats[-1] @ ... @ mats[0] by pairwise reduction along axis 0
    while mats.shape[0] > 1:
        if mats.shape[0] % 2:
            eye = np.broadcast_to(np.eye(2, dtype=complex), mats.shape[1:])
            mats = np.concatenate([mats, eye[None]], axis=0)
        mats = mats[1::2] @ mats[0::2]
    return mats[0]


def _magnus(potential, energies, x0, x1, steps_per_unit, batch=1 << 18):
    span = x1 - x0
    steps = max(1, int(math.ceil(abs(span) * steps_per_unit)))
    if steps > MAX_STEPS:
        raise ResourceLimitError(f"propagation needs {steps} steps (limit {MAX_STEPS})")
    h = span / steps
    xa = x0 + h * np.arange(steps)
    v1 = potential(xa + h * (0.5 - _G))
    v2 = potential(xa + h * (0.5 + _G))
    k = math.sqrt(3.0) / 12.0 * h * h

    def step_matrices(i0, i1):
        # A(x) = [[0, 1], [V - E, 0]]; commutator [A2, A1] = diag(d1 - d2, d2 - d1)
        shape = (i1 - i0,) + (1,) * energies.ndim
        d1 = v1[i0:i1].reshape(shape) - energies
        d2 = v2[i0:i1].reshape(shape) - energies
        om = np.empty(d1.shape + (2, 2), dtype=complex)
        om[..., 0, 0] = k * (d1 - d2)
        om[..., 1, 1] = -om[..., 0, 0]
        om[..., 0, 1] = h
        om[..., 1, 0] = 0.5 * h * (d1 + d2)
        return _expm_traceless(om)

    chunk = max(1, batch // max(1, energies.size))
    out = np.broadcast_to(np.eye(2, dtype=complex), energies.shape + (2, 2)).copy()
    for i0 in range(0, steps, chunk):
        i1 = min(steps, i0 + chunk)
        out = _ordered_product(step_matrices(i0, i1)) @ out
    return out


def _piecewise(potential, energies, x0, x1):
    bounds = np.concatenate([[0.0], np.cumsum([l for l, _ in potential.segments])])
    bounds[-1] = 1.0
    values = [v for _, v in potential.segments]
    pieces = []
    cell = math.floor(x0)
    x = x0
    while x < x1:
        local = x - cell
        k = int(np.searchsorted(bounds, local, side="right")) - 1
        if k >= len(values):
            cell += 1
            continue
        end = min(cell + bounds[k + 1], x1)
        if end > x:
            pieces.append((values[k], end - x))
        x = end
        if x >= cell + 1.0:
            cell += 1
        if len(pieces) > MAX_STEPS:
            raise ResourceLimitError(f"propagation needs more than {MAX_STEPS} segments")
    out = np.broadcast_to(np.eye(2, dtype=complex), energies.shape + (2, 2)).copy()
    for value, length in pieces:
        out = _segment_matrices(energies, value, length) @ out
    return out


def propagate(potential, energies, x_span=(0.0, 1.0), steps_per_unit=None):
    """Stack of transfer matrices for an array of (complex) energies."""
    energies = np.asarray(energies, dtype=complex)
    if not np.all(np.isfinite(energies)):
        raise InvalidInputError("energy must be finite")
    x0, x1 = float(x_span[0]), float(x_span[1])
    if not (math.isfinite(x0) and math.isfinite(x1)):
        raise InvalidInputError("x_span endpoints must be finite")
    if x1 < x0:
        return np.linalg.inv(propagate(potential, energies, (x1, x0), steps_per_unit))
    if potential.kind == PIECEWISE:
        return _piecewise(potential, energies, x0, x1)
    return _magnus(potential, energies, x0, x1, steps_per_unit or DEFAULT_STEPS_PER_UNIT)


def period_matrices(potential, energies, steps_per_unit=None):
    return propagate(potential, energies, (0.0, 1.0), steps_per_unit)


@dataclass(frozen=True)
class TransferMatrix:
    entries: np.ndarray
    energy: complex
    interval: tuple

    @property
    def det(self):
        m = self.entries
        return m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]

    @property
    def trace(self):
        return self.entries[0, 0] + self.entries[1, 1]


def transfer_matrix(potential, energy, x_span=(0.0, 1.0), steps_per_unit=None):
    """Fundamental matrix: columns are (psi, psi') for data (1,0) and (0,1)."""
    energy = complex(energy)
    m = propagate(potential, np.asarray(energy), x_span, steps_per_unit)
    if energy.imag == 0.0:
        m = m.real
    return TransferMatrix(m, energy, (float(x_span[0]), float(x_span[1])))


def discriminant(potential, energy, steps_per_unit=None):
    """Trace of the period map; real array (or float) for real input."""
    e = np.asarray(energy)
    m = period_matrices(potential, e, steps_per_unit)
    d = m[..., 0, 0] + m[..., 1, 1]
    if not np.iscomplexobj(e):
        d = d.real
    return d[()] if d.ndim == 0 else d


# ── band structure ──────────────────────────────────────────────────────────

def edge_sign(index):
    """Sign of D at the absolute edge index l (1-based): +2 for l = 0, 1 mod 4."""
    return 1.0 if index % 4 in (0, 1) else -1.0


@dataclass(frozen=True)
class BandStructure:
    """Edges E_l found inside `window`; `n_below` edges lie under it."""
    window: tuple
    edges: tuple
    n_below: int
    edge_discriminants: tuple = ()
    closed_gaps: frozenset = frozenset()
    flags: tuple = ()

    def index_of(self, i):
        return self.n_below + i + 1

    def edge(self, index):
        i = index - self.n_below - 1
        if not 0 <= i < len(self.edges):
            raise WindowExhaustedError(f"edge E_{index} is outside the window {self.window}")
        return self.edges[i]

    def has_edge(self, index):
        return 0 <= index - self.n_below - 1 < len(self.edges)

    def count_below(self, energy):
        """Number of edges <= energy (absolute), or raise outside the window."""
        lo, hi = self.window
        if energy < lo:
            if self.n_below == 0:
                return 0
            raise WindowExhaustedError(f"energy {energy!r} below window {self.window}")
        if energy > hi:
            raise WindowExhaustedError(f"energy {energy!r} above window {self.window}")
        return self.n_below + int(np.searchsorted(self.edges, energy, side="right"))

    def locate(self, energy):
        """('band', n) or ('gap', n); band edges count as band points."""
        count = self.count_below(energy)
        if count % 2 == 1:
            return "band", (count + 1) // 2
        # right on the upper edge of a band counts as band
        if self.edges:
            j = int(np.argmin(np.abs(np.asarray(self.edges) - energy)))
            if abs(self.edges[j] - energy) <= EDGE_SNAP * max(1.0, abs(energy)):
                l = self.index_of(j)
                return "band", (l + 1) // 2
        return "gap", count // 2

    def gap_is_open(self, n):
        """Gap n lies between E_{2n} and E_{2n+1}; gap 0 is the half-line below E_1."""
        if n == 0:
            return True
        return n not in self.closed_gaps

    def gap_known(self, n):
        return n == 0 or (self.has_edge(2 * n) and self.has_edge(2 * n + 1))

    def is_isolated(self, n):
        """Band n with both flanking gaps resolved and open."""
        return all(self.gap_known(g) and self.gap_is_open(g) for g in (n - 1, n))

    def bands(self):
        """[(n, lo, hi)] for bands meeting the window, clipped to it."""
        lo, hi = self.window
        ns = []
        if self.n_below % 2 == 1:
            ns.append((self.n_below + 1) // 2)
        for i in range(len(self.edges)):
            l = self.index_of(i)
            if l % 2 == 1:
                ns.append((l + 1) // 2)
        out = []
        for n in ns:
            a = self.edge(2 * n - 1) if self.has_edge(2 * n - 1) else lo
            b = self.edge(2 * n) if self.has_edge(2 * n) else hi
            out.append((n, a, b))
        return out

    def gaps(self):
        """[(n, lo, hi, open)] for gaps with both edges inside the window."""
        out = []
        if self.n_below == 0 and self.edges:
            out.append((0, -math.inf, self.edges[0], True))
        for i, _ in enumerate(self.edges):
            l = self.index_of(i)
            if l % 2 == 0 and self.has_edge(l + 1):
                n = l // 2
                out.append((n, self.edge(l), self.edge(l + 1), self.gap_is_open(n)))
        return out

    def rows(self):
        """CSV rows (edge_index, E_l, D(E_l), gap_open).

        gap_open refers to gap l // 2 between two bands; it is False for E_1.
        """
        out = []
        for i, e in enumerate(self.edges):
            l = self.index_of(i)
            out.append((l, e, self.edge_discriminants[i] if self.edge_discriminants else float("nan"),
                        l >= 2 and self.gap_is_open(l // 2)))
        return out


def _dedupe(values, tol):
    out = []
    for v in sorted(values):
        if not out or v - out[-1] > tol:
            out.append(v)
    return out


def band_edges(potential, window, *, step=0.02, closed_gap_tol=1e-8, xtol=1e-13,
               steps_per_unit=None):
    """Locate the band edges inside `window`.

    The scan always starts below min V so that absolute edge indices are known.
    Simple roots of D -+ 2 come from sign changes; local maxima of |D| are
    refined separately to catch closed and very narrow gaps.
    """
    lo, hi = float(window[0]), float(window[1])
    if not (math.isfinite(lo) and math.isfinite(hi) and hi > lo):
        raise InvalidInputError(f"window must be a finite interval, got {window!r}")
    start = min(lo, potential.lower_bound() - 1.0)
    npts = int(math.ceil((hi - start) / step)) + 1
    grid = np.linspace(start, hi, max(npts, 3))
    dgrid = discriminant(potential, grid, steps_per_unit)

    def dfun(e):
        return float(discriminant(potential, float(e), steps_per_unit))

    def slope(e):
        # complex-step derivative; D is real-analytic in E
        return float(discriminant(potential, complex(e, 1e-20), steps_per_unit).imag) * 1e20

    simple = []
    for target in (2.0, -2.0):
        f = dgrid - target
        simple += [float(e) for e in grid[f == 0.0]]
        for i in np.nonzero(np.sign(f[:-1]) * np.sign(f[1:]) < 0)[0]:
            r = brentq(lambda e: dfun(e) - target, grid[i], grid[i + 1], xtol=xtol, rtol=8.9e-16)
            simple.append(r)

    absd = np.abs(dgrid)
    peaks = [i for i in range(1, len(grid) - 1)
             if absd[i] >= absd[i - 1] and absd[i] >= absd[i + 1] and absd[i] > 1.0]
    doubles = []
    flags = []
    for i in peaks:
        a, b = grid[i - 1], grid[i + 1]
        sa, sb = slope(a), slope(b)
        if sa * sb < 0:
            epk = brentq(slope, a, b, xtol=xtol, rtol=8.9e-16)
        else:
            res = minimize_scalar(lambda e: -abs(dfun(e)), bounds=(a, b),
                                  method="bounded", options={"xatol": 1e-12})
            epk = float(res.x)
        dpk = dfun(epk)
        margin = abs(dpk) - 2.0
        target = math.copysign(2.0, dpk)
        if abs(margin) <= closed_gap_tol:
            doubles.append(epk)
        elif margin > closed_gap_tol:
            if margin < 100 * closed_gap_tol:
                flags.append(f"narrow gap at E={epk:.12g} (|D|-2={margin:.3g})")
            for a, b in ((grid[i - 1], epk), (epk, grid[i + 1])):
                fa, fb = dfun(a) - target, dfun(b) - target
                if fa * fb < 0:
                    simple.append(brentq(lambda e: dfun(e) - target, a, b, xtol=xtol, rtol=8.9e-16))
    # roots closer than this to a closed gap are roundoff echoes of the double root
    simple = [r for r in simple if all(abs(r - d) > 1e-6 for d in doubles)]
    simple = _dedupe(simple, 1e-9)
    doubles = _dedupe(doubles, 1e-6)
    allroots = sorted([(r, 1) for r in simple] + [(d, 2) for d in doubles])

    edges_abs = []
    closed = set()
    for value, mult in allroots:
        if mult == 2:
            l = len(edges_abs) + 1
            closed.add(l // 2)
            edges_abs += [value, value]
        else:
            edges_abs.append(value)
    dvals = [dfun(e) for e in edges_abs]
    for l, d in enumerate(dvals, start=1):
        if abs(d - 2.0 * edge_sign(l)) > 1e-6:
            flags.append(f"edge E_{l}={edges_abs[l - 1]:.12g} has D={d:.12g}, expected {2 * edge_sign(l):+g}")

    inside = [(l, e, d) for l, (e, d) in enumerate(zip(edges_abs, dvals), start=1) if lo <= e <= hi]
    n_below = sum(1 for e in edges_abs if e < lo)
    return BandStructure(
        window=(lo, hi),
        edges=tuple(e for _, e, _ in inside),
        n_below=n_below,
        edge_discriminants=tuple(d for _, _, d in inside),
        closed_gaps=frozenset(closed),
        flags=tuple(flags),
    )


# ── quasi-momentum ──────────────────────────────────────────────────────────

@dataclass(frozen=True)
class QuasiMomentumValue:
    """Branch value sign * k_p + 2 pi sheet at `energy`."""
    value: complex
    sheet: int
    sign: int
    energy: complex
    main: complex = field(default=0j, repr=False)

    @property
    def multiplier(self):
        return np.exp(1j * self.value)

    def branch(self, sign, sheet):
        v = sign * self.main + 2 * np.pi * sheet
        return QuasiMomentumValue(v, sheet, sign, self.energy, self.main)


def _main_real(potential, bands, energies, steps_per_unit=None):
    energies = np.asarray(energies, dtype=float)
    flat = energies.ravel()
    d = np.atleast_1d(discriminant(potential, flat, steps_per_unit))
    out = np.empty(flat.shape, dtype=complex)
    for i, (e, dv) in enumerate(zip(flat, d)):
        kind, n = bands.locate(float(e))
        if kind == "band":
            a = math.acos(min(1.0, max(-1.0, dv / 2.0)))
            out[i] = math.pi * (n - 1) + a if n % 2 == 1 else math.pi * n - a
        else:
            out[i] = math.pi * n + 1j * math.acosh(max(1.0, abs(dv) / 2.0))
    return out.reshape(energies.shape)


def main_branch(potential, bands, energies, steps_per_unit=None):
    """Vectorized k_p for energies in the closed upper half-plane."""
    e = np.asarray(energies)
    if not np.iscomplexobj(e) or np.all(e.imag == 0):
        return _main_real(potential, bands, e.real, steps_per_unit)
    flat = e.ravel()
    out = np.array([quasi_momentum_main(potential, bands, z, steps_per_unit).value for z in flat])
    return out.reshape(e.shape)


def _vertical_continuation(potential, bands, energy, steps_per_unit=None):
    x, y = energy.real, energy.imag
    start = complex(_main_real(potential, bands, np.array([x]), steps_per_unit)[0])
    for npts in (64, 256, 1024, 4096):
        ts = np.linspace(0.0, 1.0, npts)
        path = x + 1j * y * ts
        a = np.arccos(discriminant(potential, path, steps_per_unit) / 2.0)
        # Im k > 0 in the open upper half-plane fixes the sign; continuity fixes the sheet
        a = np.where(a.imag < 0, -a, a)
        vals = [start]
        ok = True
        for i in range(1, npts):
            if i >= 2:
                pred = 2 * vals[-1].real - vals[-2].real
            else:
                pred = vals[-1].real
            m = round((pred - a[i].real) / (2 * np.pi))
            v = a[i] + 2 * np.pi * m
            if abs(v.real - vals[-1].real) > 0.5:
                ok = False
                break
            vals.append(complex(v))
        if ok:
            return vals[-1]
    raise InvalidInputError(f"could not continue k_p to energy {energy!r}")


def quasi_momentum_main(potential, bands, energy, steps_per_unit=None):
    """Main branch k_p(E): Re k_p on band n runs over [pi(n-1), pi n].

    Real energies are read as E + i0. Complex energies must lie in the upper
    half-plane; the value is obtained by continuing vertically from Re E.
    """
    energy = complex(energy)
    if not (math.isfinite(energy.real) and math.isfinite(energy.imag)):
        raise InvalidInputError("energy must be finite")
    if energy.imag < 0:
        raise InvalidInputError("quasi_momentum_main expects Im E >= 0")
    if energy.imag == 0:
        v = complex(_main_real(potential, bands, np.array([energy.real]), steps_per_unit)[0])
    else:
        v = _vertical_continuation(potential, bands, energy, steps_per_unit)
    return QuasiMomentumValue(v, 0, 1, energy, v)


# ── Bloch solutions ─────────────────────────────────────────────────────────

def bloch_solution(potential, energy, x, bands=None, companion=False, steps_per_unit=None):
    """Bloch solution psi with psi(x+1) = lambda psi(x), normalized by psi(1) = 1.

    lambda = exp(i k_p(E)); `companion=True` gives the solution for 1/lambda.
    Returns (values at x, lambda).
    """
    energy = float(energy)
    if bands is None:
        bands = band_edges(potential, (energy - 1.0, energy + 1.0), steps_per_unit=steps_per_unit)
    k = quasi_momentum_main(potential, bands, energy, steps_per_unit).value
    lam = np.exp(1j * k)
    if companion:
        lam = 1.0 / lam
    if abs(lam - 1.0 / lam) < 1e-8:
        raise DegenerateMultiplierError(f"energy {energy!r} is a band edge; multipliers coincide")
    m = transfer_matrix(potential, energy, (0.0, 1.0), steps_per_unit).entries
    a, b, c, d = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
    v1 = np.array([b, lam - a])
    v2 = np.array([lam - d, c])
    v = v1 if np.linalg.norm(v1) >= np.linalg.norm(v2) else v2
    if abs(v[0]) < 1e-14 * np.linalg.norm(v):
        raise DegenerateMultiplierError("psi(0) = 0: the normalized Bloch solution has a pole here")
    # psi(1) = lam psi(0) = 1
    v = v / (lam * v[0])
    if abs(lam.imag) < 1e-15 and np.all(np.isreal(m)):
        v = v.real
        lam = lam.real
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    vals = np.empty(xs.shape, dtype=complex)
    for i, xi in enumerate(xs):
        cell = math.floor(xi)
        frac = xi - cell
        t = transfer_matrix(potential, energy, (0.0, frac), steps_per_unit).entries
        vals[i] = (lam ** cell) * (t[0, 0] * v[0] + t[0, 1] * v[1])
    if np.isrealobj(v):
        vals = vals.real
    return (vals if np.ndim(x) else vals[0]), lam
