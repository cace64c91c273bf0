"""Integer indices of the complex momentum.

Interval indices p_j measure how far kappa moves along a band interval (in
units of pi). A period is a curve from zeta0 to zeta0 + 2 pi with a branch of
kappa; its signature and index (sigma, m) satisfy kappa_end = sigma kappa_start
+ 2 pi m. They are computed twice: by continuation along the curve and by the
alternating sum over the values Re kappa takes where the curve meets the
preimage of the spectral gaps.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .continuation import Tracker, continue_along, polyline
from .errors import (
    ContinuationError,
    DegenerateGeometryError,
    InconsistencyError,
    InvalidInputError,
)
from .geometry import main_sheet

TWO_PI = 2.0 * math.pi
RESIDUAL_GATE = 0.01


# ── interval indices ────────────────────────────────────────────────────────

def _round_index(value, what):
    r = round(value)
    if abs(value - r) >= RESIDUAL_GATE:
        raise ContinuationError(f"{what}: {value:.6g} is not within {RESIDUAL_GATE} of an integer")
    return int(r)


def interval_indices(problem, intervals, spacing=0.02):
    """p_j for consecutive band intervals, using one branch of kappa for all of them.

    The branch is continued along the real axis inside each interval and
    through the upper half-strip over each gap, so it is the boundary value
    of a single function analytic above the real axis. Returns (p, info) where
    info holds kappa at both ends of each interval and the period relation
    kappa(zeta + 2 pi) = sign kappa(zeta) + 2 pi shift of that branch.
    """
    n = len(intervals)
    if n == 0:
        return [], {"left_values": [], "right_values": [], "period_sign": 1, "period_shift": 0}
    y = problem.strip_height
    h = min(0.5 * y, 0.25)
    ivs = list(intervals) + [(intervals[0][0] + TWO_PI, intervals[0][1] + TWO_PI)]
    mids = [0.5 * (a + b) for a, b in ivs]
    k0 = complex(main_sheet(problem, np.array([mids[0]]))[0])
    tracker = Tracker(problem, mids[0], k0)
    lefts, rights, p = [], [], []
    for j in range(n):
        a, b = ivs[j]
        a2, b2 = ivs[j + 1]
        here = tracker.value
        if abs(here.imag) > 1e-8:
            raise InconsistencyError(f"kappa is not real inside band interval {j + 1}")
        right = continue_along(problem, polyline([mids[j], b], spacing), here)[-1]
        left = continue_along(problem, polyline([mids[j], a], spacing), here)[-1]
        lefts.append(left.real)
        rights.append(right.real)
        p.append(_round_index((right.real - left.real) / math.pi, f"interval {j + 1}"))
        d1 = min(0.25 * (b - a), 0.1)
        d2 = min(0.25 * (b2 - a2), 0.1)
        path = polyline([mids[j], b - d1, b - d1 + 1j * h, a2 + d2 + 1j * h, a2 + d2, mids[j + 1]], spacing)
        tracker.run(path)
    end = tracker.value
    res, sigma, shift = _fit(end, k0)[0]
    if res > 1e-6:
        raise InconsistencyError(f"upper-strip branch does not close up after one period (residual {res:.3g})")
    return p, {"left_values": lefts, "right_values": rights, "period_sign": sigma, "period_shift": shift}


def interval_index(problem, decomposition, j):
    """p_j (1-based) recomputed by continuation, in the decomposition's sign convention."""
    if not 1 <= j <= decomposition.count:
        raise InvalidInputError(f"interval {j} out of range 1..{decomposition.count}")
    if decomposition.kind != "regular":
        return 0
    p, _ = interval_indices(problem, decomposition.intervals)
    nz = [v for v in p if v]
    sign = 1 if not nz or nz[0] > 0 else -1
    return sign * p[j - 1]


# ── periods ─────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class PeriodIndex:
    sigma: int
    shift: int
    residual: float = 0.0

    def __iter__(self):
        return iter((self.sigma, self.shift))


@dataclass(frozen=True)
class Crossing:
    position: float      # fractional sample index along the curve
    point: complex
    gap: int             # spectral gap number of E - W at the crossing
    real_part: float     # Re kappa there


@dataclass(frozen=True)
class PeriodCurve:
    """Samples from zeta0 to zeta0 + 2 pi and the branch value at zeta0.

    `reflected` compares the end value with -conj(kappa(zeta0)) instead of
    kappa(zeta0) (zeta0 must then be real).
    """
    samples: np.ndarray = field(repr=False)
    seed: complex
    reflected: bool = False
    crossings: tuple = ()
    values: np.ndarray = field(default=None, repr=False)

    @property
    def start(self):
        return complex(self.samples[0])

    def reversed(self):
        """The same curve run from zeta0 + 2 pi back to zeta0 (shifted by -2 pi)."""
        s = self.samples[::-1] - TWO_PI
        return PeriodCurve(np.ascontiguousarray(s), self.seed, self.reflected)


def make_period_curve(problem, vertices, spacing=0.01, seed=None, reflected=False, clearance=1e-4):
    """Sampled polyline from vertices[0] to vertices[0] + 2 pi (the last vertex is forced)."""
    vertices = [complex(v) for v in vertices]
    vertices[-1] = vertices[0] + TWO_PI
    samples = polyline(vertices, spacing)
    samples[-1] = samples[0] + TWO_PI
    if np.max(np.abs(samples.imag)) > problem.strip_height + 1e-12:
        raise InvalidInputError("period curve leaves the strip")
    dmin = float(np.min(problem.distance_to_branch_points(samples)))
    if dmin <= clearance:
        raise InvalidInputError(f"period curve passes within {dmin:.3g} of a branch point")
    if reflected and samples[0].imag != 0.0:
        raise InvalidInputError("a reflected period must start on the real axis")
    if seed is None:
        seed = complex(main_sheet(problem, samples[:1])[0])
    return PeriodCurve(samples, complex(seed), reflected)


def _continue_curve(problem, curve):
    tr = Tracker(problem, curve.samples[0], curve.seed)
    return tr.run(curve.samples)


def _fit(end, target):
    best = []
    for sigma in (1, -1):
        mf = (end - sigma * target) / TWO_PI
        m = int(round(mf.real))
        res = abs(end - sigma * target - TWO_PI * m)
        best.append((res, sigma, m))
    best.sort()
    return best


def period_index_bruteforce(problem, curve, tol=1e-3):
    """(sigma, m) from continuing kappa along the samples and comparing the ends."""
    target_of = (lambda k: -np.conj(k)) if curve.reflected else (lambda k: k)
    samples = curve.samples
    for attempt in range(2):
        vals = continue_along(problem, samples, curve.seed)
        fits = _fit(vals[-1], target_of(curve.seed))
        (r0, s0, m0), (r1, _, _) = fits
        if r0 < tol and r1 >= tol:
            return PeriodIndex(s0, m0, r0)
        samples = polyline(list(samples[::8]) + [samples[-1]], 0.25 * float(np.max(np.abs(np.diff(samples)))))
        samples[-1] = samples[0] + TWO_PI
    raise ContinuationError(
        f"period index fit failed: best residual {r0:.3g} (sigma={s0}, m={m0}), runner-up residual {r1:.3g}")


def crossing_records(problem, curve, values=None):
    """Points where the curve meets (E - W)^(-1)(gaps), with Re kappa there.

    This set contains the real gap segments and the complex curves through
    the real extrema lying in gaps, on which E - W stays real.
    """
    z = curve.samples
    if values is None:
        values = _continue_curve(problem, curve)
    im = -np.asarray(problem.slow(z)).imag
    out = []
    scale = max(1.0, problem.slow.scale())
    for i in range(len(z) - 1):
        a, b = im[i], im[i + 1]
        if i > 0 and a == 0.0:
            continue  # handled when it was the right end
        if a * b > 0 or (a == 0.0 and i == 0):
            continue
        za, zb = z[i], z[i + 1]
        if b == 0.0:
            if i + 1 == len(z) - 1:
                continue
            c = im[i + 2]
            if a * c >= 0:
                continue
            t = 1.0
        else:
            t = brentq(lambda s: float(-problem.slow(za + s * (zb - za)).imag), 0.0, 1.0, xtol=1e-15)
        zc = za + t * (zb - za)
        ell = float((problem.energy - problem.slow(zc)).real)
        kind, gap = problem.bands.locate(ell)
        if kind != "gap":
            continue
        tr = Tracker(problem, z[i - 1] if i > 0 else za, values[i - 1] if i > 0 else values[i])
        if i > 0:
            tr.advance(za)
        kc = tr.advance(zc)
        out.append(Crossing(i + t, complex(zc), gap, float(kc.real)))
    return tuple(out)


def period_index_formula(crossings, n=None):
    """sigma = (-1)^n, m = (r_n - r_{n-1} + ... + (-1)^(n-1) r_1) / pi."""
    r = [c.real_part if isinstance(c, Crossing) else float(c) for c in crossings]
    if n is None:
        n = len(r)
    if n != len(r):
        raise InvalidInputError(f"crossing count {n} does not match {len(r)} values")
    total = 0
    for k, v in enumerate(r, start=1):
        q = v / math.pi
        if abs(q - round(q)) > 1e-6:
            raise InvalidInputError(f"crossing value r_{k}={v!r} is not a multiple of pi")
        total += (-1) ** (n - k) * int(round(q))
    return PeriodIndex((-1) ** n, total)


def period_with_records(problem, curve):
    vals = _continue_curve(problem, curve)
    recs = crossing_records(problem, curve, vals)
    return PeriodCurve(curve.samples, curve.seed, curve.reflected, recs, vals)


def random_period_curve(problem, rng, vertices=4, spacing=0.01, clearance=0.05, attempts=200):
    """A random polyline period in the strip, clear of branch points and real extrema."""
    y = problem.strip_height
    crit = np.array([z for z, _ in problem.slow.critical_points()], dtype=float)
    for _ in range(attempts):
        x0 = rng.uniform(0.0, TWO_PI)
        y0 = rng.choice([-1.0, 1.0]) * rng.uniform(0.15, 0.85) * y
        z0 = complex(x0, y0)
        if abs(problem.slow(z0).imag) < 1e-3:
            continue
        xs = x0 + rng.uniform(-0.3, TWO_PI + 0.3, size=vertices)
        if rng.uniform() < 0.7:
            xs = np.sort(xs)
        ys = rng.uniform(-0.85, 0.85, size=vertices) * y
        verts = [z0] + [complex(a, b) for a, b in zip(xs, ys)] + [z0 + TWO_PI]
        samples = polyline(verts, spacing)
        if float(np.min(problem.distance_to_branch_points(samples))) <= clearance:
            continue
        if crit.size:
            re = samples.real[:, None]
            d = np.abs(((re - crit[None, :] + np.pi) % TWO_PI) - np.pi)
            near = np.hypot(d, samples.imag[:, None])
            if float(np.min(near)) <= clearance:
                continue
        return make_period_curve(problem, verts, spacing)
    raise InvalidInputError("could not draw an admissible random period curve")


# ── Fourier indices ─────────────────────────────────────────────────────────

@dataclass(frozen=True)
class FourierIndices:
    interval_indices: tuple
    order_sums: tuple
    offsets: tuple          # 1 + running sum of the gap order sums
    lambda_plus: tuple
    lambda_minus: tuple
    beta_plus: tuple
    beta_minus: tuple
    P_plus: int
    P_minus: int
    Q_plus: int
    Q_minus: int
    crossing_count: int
    parity_ok: bool
    bruteforce: dict = field(default_factory=dict)

    @property
    def formula_values(self):
        return {"P_plus": self.P_plus, "P_minus": self.P_minus,
                "Q_plus": self.Q_plus, "Q_minus": self.Q_minus}

    @property
    def agreement(self):
        """Per index: does the formula value equal the continued m on its curve?"""
        return {k: self.bruteforce[k].shift == v for k, v in self.formula_values.items() if k in self.bruteforce}

    def to_mapping(self):
        out = {
            "interval_indices": list(self.interval_indices), "order_sums": list(self.order_sums),
            "offsets": list(self.offsets),
            "lambda_plus": list(self.lambda_plus), "lambda_minus": list(self.lambda_minus),
            "beta_plus": list(self.beta_plus), "beta_minus": list(self.beta_minus),
            "P_plus": self.P_plus, "P_minus": self.P_minus,
            "Q_plus": self.Q_plus, "Q_minus": self.Q_minus,
            "crossing_count": self.crossing_count, "parity_ok": self.parity_ok,
        }
        if self.bruteforce:
            out["bruteforce"] = {k: {"sigma": v.sigma, "shift": v.shift} for k, v in self.bruteforce.items()}
            out["oracle_agreement"] = self.agreement
        return out


def parity_relations(P_plus, P_minus, Q_plus, Q_minus, n):
    if n % 2 == 0:
        return Q_minus == Q_plus + 1 and Q_minus == P_minus + 1 and Q_minus == P_plus
    return Q_plus == Q_minus + 1 and P_minus == Q_plus and P_plus + 1 == Q_plus


def index_tables(p, order_sums):
    """Alternation tables and the four Fourier indices from p_j and the per-gap order sums."""
    nn = len(p)
    N = []
    acc = 1
    for j in range(nn):
        N.append(acc)
        acc += order_sums[j]
    par = [(-1) ** s for s in order_sums]
    lam_p = [(1 + par[0]) // 2] + [(-1) ** N[j] * (-1 + par[j]) // 2 for j in range(1, nn)]
    lam_m = [(-1 + par[0]) // 2] + lam_p[1:]
    beta_p = [(-1 + par[0]) // 2] + lam_p[1:]
    beta_m = [(1 + par[0]) // 2] + lam_p[1:]
    n = N[-1]
    partial = np.cumsum(p).tolist()

    def combo(coef):
        return (-1) ** n * sum(int(s) * c for s, c in zip(partial, coef))

    return {
        "N": tuple(N), "lambda_plus": tuple(lam_p), "lambda_minus": tuple(lam_m),
        "beta_plus": tuple(beta_p), "beta_minus": tuple(beta_m), "n": n,
        "P_plus": combo(lam_p), "P_minus": combo(lam_m),
        "Q_plus": combo(beta_p), "Q_minus": combo(beta_m),
    }


def canonical_curves(problem, decomposition, clearance=0.05):
    """Upper and lower horizontal periods at Im = +-Y/2, starting mid B_1."""
    a, b = decomposition.intervals[0]
    z0 = 0.5 * (a + b)
    h = 0.5 * problem.strip_height
    if h <= clearance:
        raise InvalidInputError(f"strip too thin ({problem.strip_height:.3g}) for the canonical periods")
    out = {}
    for name, sgn, refl in (("P_plus", 1, False), ("P_minus", -1, False),
                            ("Q_plus", 1, True), ("Q_minus", -1, True)):
        verts = [z0, z0 + 1j * sgn * h, z0 + TWO_PI + 1j * sgn * h, z0 + TWO_PI]
        out[name] = make_period_curve(problem, verts, 0.01, reflected=refl, clearance=clearance)
    return out


def fourier_indices(problem, decomposition, bruteforce=True):
    """P_+-, Q_+- from the alternation tables; optionally continued along the canonical curves."""
    if decomposition.kind != "regular":
        raise DegenerateGeometryError("Fourier indices need a band/gap decomposition with crossings")
    if decomposition.interval_indices[0] != 1:
        raise DegenerateGeometryError("Fourier indices need p_1 = 1 (some band interval crossing a band)")
    sums = decomposition.gap_order_sums()
    t = index_tables(decomposition.interval_indices, sums)
    ok = parity_relations(t["P_plus"], t["P_minus"], t["Q_plus"], t["Q_minus"], t["n"])
    if not ok:
        raise InconsistencyError(f"parity relations fail for n={t['n']}: {t}")
    bf = {}
    if bruteforce:
        for name, curve in canonical_curves(problem, decomposition).items():
            bf[name] = period_index_bruteforce(problem, curve)
    return FourierIndices(
        interval_indices=tuple(decomposition.interval_indices), order_sums=tuple(sums), offsets=t["N"],
        lambda_plus=t["lambda_plus"], lambda_minus=t["lambda_minus"],
        beta_plus=t["beta_plus"], beta_minus=t["beta_minus"],
        P_plus=t["P_plus"], P_minus=t["P_minus"], Q_plus=t["Q_plus"], Q_minus=t["Q_minus"],
        crossing_count=t["n"], parity_ok=ok, bruteforce=bf,
    )
