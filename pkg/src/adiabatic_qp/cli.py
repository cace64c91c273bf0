"""Command line entry point: adiabatic-qp <command> --config run.yaml [--out DIR] [--seed N] [--jobs N]."""
from __future__ import annotations

import argparse
import math
import sys
import warnings

from .actions import contour_actions, tunneling_actions
from .cocycle import schrodinger_lyapunov, verify_lyapunov_asymptotics
from .config import load_config
from .errors import AdiabaticError, InvalidInputError, UnsupportedOrderError
from .geometry import AdiabaticProblem, check_H4, epsilon_from_family, real_decomposition
from .indices import fourier_indices
from .io.output import Writer, bands_script, geometry_script, verify_script
from .periodic import band_edges
from .stokes import trace_stokes_lines

COMMANDS = ("bands", "geometry", "actions", "indices", "lyapunov", "verify")


def _problem(cfg, energy=None, epsilon=None):
    e = cfg.require("value") if energy is None else energy
    return AdiabaticProblem(cfg.fast_potential(), cfg.slow_potential(), e, epsilon=epsilon)


def _decomposition(problem):
    dec = real_decomposition(problem)
    if dec.kind != "regular":
        lo, hi = problem.w_range
        raise InvalidInputError(
            f"energy.value: E - W(R) = [{lo:.6g}, {hi:.6g}] crosses no edge of an open gap ({dec.kind}); "
            "a band/gap decomposition is required")
    return dec


def run_bands(cfg, out):
    window = cfg.require("window")
    bs = band_edges(cfg.fast_potential(), window, closed_gap_tol=cfg.tolerances["closed_gap"],
                    xtol=cfg.tolerances["edge_xtol"])
    out.table("bands.csv", "bands.v1", bs.rows())
    gaps = [{"n": n, "lo": lo, "hi": hi, "open": ok} for n, lo, hi, ok in bs.gaps() if n > 0]
    out.json("gaps.json", "gaps.v1", {
        "window": list(bs.window), "edges_below_window": bs.n_below, "gaps": gaps,
        "closed_gaps": sorted(bs.closed_gaps), "flags": list(bs.flags),
        "bands": [{"n": n, "lo": lo, "hi": hi, "isolated": bs.is_isolated(n)} for n, lo, hi in bs.bands()],
    })
    out.script("bands.gp", bands_script("bands.csv"))
    return bs


def _epsilon(cfg):
    return epsilon_from_family(cfg.epsilon_n[0]) if cfg.epsilon_n else None


def _coefficients(acts):
    return acts.coefficients or (float("nan"),) * len(acts.actions)


def run_geometry(cfg, out):
    pr = _problem(cfg, epsilon=_epsilon(cfg))
    dec = _decomposition(pr)
    acts = tunneling_actions(pr, dec, cfg.tolerances["action"]) if dec.gaps else None
    t = _coefficients(acts) if acts else ()
    rows = []
    for j, (a, b) in enumerate(dec.intervals):
        s = acts.actions[j] if acts else float("nan")
        rows.append((j + 1, a, b, dec.interval_indices[j], s, t[j] if acts else float("nan")))
    out.table("decomposition.csv", "decomposition.v1", rows)
    srows = []
    for k, bp in enumerate(b for b in pr.branch_points if 0.0 <= b.location.real < 2 * math.pi):
        try:
            lines = trace_stokes_lines(pr, bp)
        except UnsupportedOrderError:
            continue
        for i, line in enumerate(lines):
            srows += [(k, i, line.direction, z.real, z.imag) for z in line.points]
    out.table("stokes.csv", "stokes.v1", srows)
    interval = cfg.energy["window"] or [pr.energy, pr.energy]
    report = check_H4(pr, interval, samples=9 if interval[0] < interval[1] else 1)
    out.json("geometry.json", "geometry.v1", {
        "energy": pr.energy, "epsilon": pr.epsilon, "strip_height": pr.strip_height,
        "intervals": [list(iv) for iv in dec.intervals], "gaps": [list(g) for g in dec.gaps],
        "interval_indices": list(dec.interval_indices), "band_numbers": list(dec.band_numbers), "gap_numbers": list(dec.gap_numbers),
        "extrema": [[list(e) for e in ex] for ex in dec.extrema],
        "h4": dec.h4.to_mapping(), "h4_report": report.to_mapping(),
        "actions": list(acts.actions) if acts else [],
        "branch_points": [[b.location.real, b.location.imag, b.edge_index] for b in pr.branch_points],
    })
    out.script("geometry.gp", geometry_script("decomposition.csv", "stokes.csv", f"E = {pr.energy:g}"))
    return dec


def run_actions(cfg, out):
    pr = _problem(cfg, epsilon=_epsilon(cfg))
    dec = _decomposition(pr)
    acts = tunneling_actions(pr, dec, cfg.tolerances["action"])
    contour = contour_actions(pr, dec)
    t = _coefficients(acts)
    rows = [(j + 1, a, b, acts.actions[j], acts.errors[j], contour[j][0], t[j])
            for j, (a, b) in enumerate(dec.gaps)]
    out.table("actions.csv", "actions.v1", rows)
    out.json("actions.json", "actions.v1", {
        "energy": pr.energy, "epsilon": pr.epsilon, "S": list(acts.actions),
        "sum_S_over_4pi": acts.asymptotic_exponent, "log_inverse_T": acts.log_inverse_product,
        "T": acts.product,
    })
    return acts


def run_indices(cfg, out):
    pr = _problem(cfg)
    dec = _decomposition(pr)
    payload = {"energy": pr.energy, "interval_indices": list(dec.interval_indices), "period_sign": dec.period_sign,
               "period_shift": dec.period_shift, "gap_real_parts": list(dec.gap_real_parts)}
    if dec.interval_indices[0] == 1:
        fi = fourier_indices(pr, dec, bruteforce=True)
        payload.update(fi.to_mapping())
    else:
        payload["fourier"] = "not computed: needs p_1 = 1"
    out.json("indices.json", "indices.v1", payload)
    return payload


def run_lyapunov(cfg, out):
    tr = cfg.trajectory
    rows, runs = [], []
    if cfg.epsilon_n:
        settings = [(n, epsilon_from_family(n)) for n in cfg.epsilon_n]
    else:
        settings = [(0, None)]
    base = _problem(cfg)
    for k, (n, eps) in enumerate(settings):
        pr = base.with_epsilon(eps) if eps else base
        est = schrodinger_lyapunov(pr, length=tr["length"], samples=tr["samples"], slow_periods=tr["slow_periods"],
                                   seed=cfg.seed + k, rule=tr["rule"], jobs=cfg.jobs)
        rows.append((pr.energy, eps if eps else float("nan"), n, est.value, est.stderr, est.steps, est.converged))
        runs.append(est.to_mapping())
    out.table("lyapunov.csv", "lyapunov.v1", rows)
    out.json("lyapunov.json", "lyapunov.v1", {"runs": runs})
    return rows


def run_verify(cfg, out):
    grid = cfg.require("grid")
    if not cfg.epsilon_n:
        raise InvalidInputError("epsilon.n: required by verify")
    tr = cfg.trajectory
    tab = verify_lyapunov_asymptotics(
        cfg.fast_potential(), cfg.slow_potential(), grid, cfg.epsilon_n, samples=tr["samples"],
        slow_periods=tr["slow_periods"], seed=cfg.seed, rule=tr["rule"], jobs=cfg.jobs,
        bracket=tuple(cfg.tolerances["bracket"]))
    out.table("verify.csv", "verify.v1", [r.as_tuple() for r in tab.rows])
    s = dict(tab.summary)
    s["rows"] = [{"E": r.energy, "family_n": r.family_n, "note": r.note, "identity_error": r.identity_error} for r in tab.rows]
    s["pass"] = {"positivity": s["positive"], "trend": s["monotone_trend"], "bracket": s["in_bracket"],
                 "upper_bound": s["upper_bound_ok"]}
    out.json("verify_summary.json", "verify.v1", s)
    out.script("verify.gp", verify_script("verify.csv"))
    return tab


RUNNERS = {"bands": run_bands, "geometry": run_geometry, "actions": run_actions,
           "indices": run_indices, "lyapunov": run_lyapunov, "verify": run_verify}


def build_parser():
    p = argparse.ArgumentParser(prog="adiabatic-qp", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, metavar="PATH", help="YAML run configuration")
    p.add_argument("--out", metavar="DIR", help="output directory (overrides config 'output')")
    p.add_argument("--seed", type=int, metavar="N", help="random seed (overrides config)")
    p.add_argument("--jobs", type=int, metavar="N", help="worker processes (overrides config)")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config).override(output=args.out, seed=args.seed, jobs=args.jobs)
        out = Writer(cfg.output, cfg)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            RUNNERS[args.command](cfg, out)
    except AdiabaticError as exc:
        print(f"adiabatic-qp {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"adiabatic-qp {args.command}: {exc}", file=sys.stderr)
        return 1
    for path in out.written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
