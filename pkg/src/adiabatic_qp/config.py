"""Run configuration: one YAML document, validated into a RunConfig.

Schema (all keys optional except `fast`)::

    fast:   {kind: piecewise-constant, segments: [[length, value], ...]}
            {kind: trigonometric-polynomial, coefficients: [[n, a, b], ...]}
            {kind: kronig-penney, height: 10, width: 0.5}
            {kind: free}
    slow:   {coefficients: [[n, a, b], ...], strip_height: 0.5}
    energy: {value: E, window: [lo, hi], grid: [E1, E2, ...]}
    epsilon: {n: [5, 10, 20, 40]}
    trajectory: {samples: 8, slow_periods: 200, rule: midpoint, length: null}
    tolerances: {action: 1e-13, closed_gap: 1e-8, edge_xtol: 1e-13, bracket: [0.7, 1.3]}
    output: out
    seed: 0
    jobs: 1
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field, replace

import yaml

from .cocycle import CELL_RULES, MIN_SAMPLES
from .errors import ConfigError, InvalidInputError
from .geometry import SlowPotential
from .periodic import PIECEWISE, TRIG, PotentialSpec

FAST_KINDS = (PIECEWISE, TRIG, "kronig-penney", "free")

DEFAULT_TOLERANCES = {"action": 1e-13, "closed_gap": 1e-8, "edge_xtol": 1e-13, "bracket": [0.7, 1.3]}
DEFAULT_TRAJECTORY = {"samples": MIN_SAMPLES, "slow_periods": 200, "rule": "midpoint", "length": None}


def _num(value, where, positive=False):
    if isinstance(value, str):
        # YAML 1.1 reads 1e-13 (no dot) as a string
        try:
            value = float(value)
        except ValueError:
            pass
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(where, f"expected a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(where, "must be finite")
    if positive and not value > 0:
        raise ConfigError(where, f"must be positive, got {value!r}")
    return value


def _int(value, where, minimum=None):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(where, f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(where, f"must be at least {minimum}, got {value}")
    return value


def _mapping(value, where):
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise ConfigError(where, f"expected a mapping, got {type(value).__name__}")
    return value


def _unknown(section, allowed, where):
    extra = sorted(set(section) - set(allowed))
    if extra:
        raise ConfigError(f"{where}.{extra[0]}" if where else extra[0], "unknown key")


def _triples(value, where):
    if not isinstance(value, list) or not value:
        raise ConfigError(where, "expected a non-empty list of [n, a, b]")
    out = []
    for i, c in enumerate(value):
        if not isinstance(c, list) or len(c) != 3:
            raise ConfigError(f"{where}[{i}]", "expected [n, a, b]")
        out.append([_int(c[0], f"{where}[{i}][0]", 0), _num(c[1], f"{where}[{i}][1]"),
                    _num(c[2], f"{where}[{i}][2]")])
    return out


def _fast(section):
    sec = _mapping(section, "fast")
    kind = sec.get("kind")
    if kind not in FAST_KINDS:
        raise ConfigError("fast.kind", f"expected one of {FAST_KINDS}, got {kind!r}")
    if kind == PIECEWISE:
        _unknown(sec, ("kind", "segments"), "fast")
        segs = sec.get("segments")
        if not isinstance(segs, list) or not segs:
            raise ConfigError("fast.segments", "expected a non-empty list of [length, value]")
        out = []
        for i, s in enumerate(segs):
            if not isinstance(s, list) or len(s) != 2:
                raise ConfigError(f"fast.segments[{i}]", "expected [length, value]")
            out.append([_num(s[0], f"fast.segments[{i}][0]", True), _num(s[1], f"fast.segments[{i}][1]")])
        total = math.fsum(l for l, _ in out)
        if abs(total - 1.0) > 1e-12:
            raise ConfigError("fast.segments", f"lengths sum to {total!r}, expected 1")
        return {"kind": kind, "segments": out}
    if kind == TRIG:
        _unknown(sec, ("kind", "coefficients"), "fast")
        return {"kind": kind, "coefficients": _triples(sec.get("coefficients"), "fast.coefficients")}
    if kind == "kronig-penney":
        _unknown(sec, ("kind", "height", "width"), "fast")
        width = _num(sec.get("width", 0.5), "fast.width", True)
        if width >= 1:
            raise ConfigError("fast.width", "must be below 1")
        return {"kind": kind, "height": _num(sec.get("height"), "fast.height"), "width": width}
    _unknown(sec, ("kind",), "fast")
    return {"kind": kind}


def _slow(section):
    sec = _mapping(section, "slow")
    _unknown(sec, ("coefficients", "strip_height"), "slow")
    coefs = _triples(sec["coefficients"], "slow.coefficients") if "coefficients" in sec else [[0, 0.0, 0.0]]
    return {"coefficients": coefs, "strip_height": _num(sec.get("strip_height", 0.5), "slow.strip_height", True)}


def _energy(section):
    sec = _mapping(section, "energy")
    _unknown(sec, ("value", "window", "grid"), "energy")
    out = {"value": None, "window": None, "grid": None}
    if sec.get("value") is not None:
        out["value"] = _num(sec["value"], "energy.value")
    if sec.get("window") is not None:
        w = sec["window"]
        if not isinstance(w, list) or len(w) != 2:
            raise ConfigError("energy.window", "expected [lo, hi]")
        lo, hi = _num(w[0], "energy.window[0]"), _num(w[1], "energy.window[1]")
        if not lo < hi:
            raise ConfigError("energy.window", f"lo must be below hi, got [{lo}, {hi}]")
        out["window"] = [lo, hi]
    if sec.get("grid") is not None:
        g = sec["grid"]
        if not isinstance(g, list) or not g:
            raise ConfigError("energy.grid", "expected a non-empty list")
        out["grid"] = [_num(e, f"energy.grid[{i}]") for i, e in enumerate(g)]
    return out


@dataclass(frozen=True)
class RunConfig:
    fast: dict
    slow: dict = field(default_factory=lambda: {"coefficients": [[0, 0.0, 0.0]], "strip_height": 0.5})
    energy: dict = field(default_factory=lambda: {"value": None, "window": None, "grid": None})
    epsilon_n: tuple = ()
    trajectory: dict = field(default_factory=lambda: dict(DEFAULT_TRAJECTORY))
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    output: str = "out"
    seed: int = 0
    jobs: int = 1

    @classmethod
    def from_mapping(cls, data):
        data = _mapping(data, "")
        _unknown(data, ("fast", "slow", "energy", "epsilon", "trajectory", "tolerances", "output", "seed", "jobs"), "")
        if "fast" not in data:
            raise ConfigError("fast", "missing")
        eps = _mapping(data.get("epsilon"), "epsilon")
        _unknown(eps, ("n",), "epsilon")
        ns = eps.get("n", [])
        if not isinstance(ns, list):
            raise ConfigError("epsilon.n", "expected a list of integers")
        ns = [_int(n, f"epsilon.n[{i}]", 1) for i, n in enumerate(ns)]
        if ns != sorted(set(ns)):
            raise ConfigError("epsilon.n", "must be strictly increasing (decreasing epsilon)")
        tr = dict(DEFAULT_TRAJECTORY)
        sec = _mapping(data.get("trajectory"), "trajectory")
        _unknown(sec, tuple(DEFAULT_TRAJECTORY), "trajectory")
        tr.update(sec)
        tr["samples"] = _int(tr["samples"], "trajectory.samples", MIN_SAMPLES)
        tr["slow_periods"] = _int(tr["slow_periods"], "trajectory.slow_periods", 50)
        if tr["rule"] not in CELL_RULES:
            raise ConfigError("trajectory.rule", f"expected one of {CELL_RULES}, got {tr['rule']!r}")
        if tr["length"] is not None:
            tr["length"] = _int(tr["length"], "trajectory.length", 1)
        tol = dict(DEFAULT_TOLERANCES)
        sec = _mapping(data.get("tolerances"), "tolerances")
        _unknown(sec, tuple(DEFAULT_TOLERANCES), "tolerances")
        tol.update(sec)
        for k in ("action", "closed_gap", "edge_xtol"):
            tol[k] = _num(tol[k], f"tolerances.{k}", True)
        br = tol["bracket"]
        if not isinstance(br, list) or len(br) != 2:
            raise ConfigError("tolerances.bracket", "expected [lo, hi]")
        tol["bracket"] = [_num(br[0], "tolerances.bracket[0]", True), _num(br[1], "tolerances.bracket[1]", True)]
        if not tol["bracket"][0] < 1.0 < tol["bracket"][1]:
            raise ConfigError("tolerances.bracket", "must enclose 1")
        out = data.get("output", "out")
        if not isinstance(out, str) or not out:
            raise ConfigError("output", "expected a directory name")
        return cls(
            fast=_fast(data["fast"]), slow=_slow(data.get("slow")), energy=_energy(data.get("energy")),
            epsilon_n=tuple(ns), trajectory=tr, tolerances=tol, output=out,
            seed=_int(data.get("seed", 0), "seed", 0), jobs=_int(data.get("jobs", 1), "jobs", 1),
        )

    def to_mapping(self):
        return {
            "fast": self.fast, "slow": self.slow, "energy": self.energy,
            "epsilon": {"n": list(self.epsilon_n)}, "trajectory": self.trajectory,
            "tolerances": self.tolerances, "output": self.output, "seed": self.seed, "jobs": self.jobs,
        }

    def dump(self):
        return yaml.safe_dump(self.to_mapping(), sort_keys=True, default_flow_style=None)

    def digest(self):
        """sha256 of the canonical JSON form; output dir and jobs do not affect results."""
        m = self.to_mapping()
        m.pop("output")
        m.pop("jobs")
        return hashlib.sha256(json.dumps(m, sort_keys=True).encode()).hexdigest()

    def override(self, **kw):
        kw = {k: v for k, v in kw.items() if v is not None}
        if not kw:
            return self
        m = self.to_mapping()
        m.update(kw)
        return RunConfig.from_mapping(m)

    def fast_potential(self):
        f = self.fast
        try:
            if f["kind"] == PIECEWISE:
                return PotentialSpec.piecewise([tuple(s) for s in f["segments"]])
            if f["kind"] == TRIG:
                return PotentialSpec.trigonometric([tuple(c) for c in f["coefficients"]])
            if f["kind"] == "kronig-penney":
                return PotentialSpec.kronig_penney(f["height"], f["width"])
            return PotentialSpec.free()
        except InvalidInputError as exc:
            raise ConfigError("fast", str(exc)) from exc

    def slow_potential(self):
        try:
            return SlowPotential(tuple(tuple(c) for c in self.slow["coefficients"]), self.slow["strip_height"])
        except InvalidInputError as exc:
            raise ConfigError("slow", str(exc)) from exc

    def require(self, key):
        """energy.value / energy.window / energy.grid, or a ConfigError naming it."""
        v = self.energy.get(key)
        if v is None:
            raise ConfigError(f"energy.{key}", "required by this command")
        return v


def parse_config(text):
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"line {mark.line + 1}, column {mark.column + 1}" if mark else "document"
        raise ConfigError(where, f"YAML syntax error: {getattr(exc, 'problem', exc)}") from exc
    return RunConfig.from_mapping(data)


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError("--config", f"cannot read {path}: {exc.strerror}") from exc
    return parse_config(text)


def with_output(config, output):
    return replace(config, output=output) if output else config
