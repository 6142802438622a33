"""Command-line front end: ``alphacoh {curve,state,negativity,verify}``.

Exit codes: 0 success, 1 convergence/property failure, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig
from .errors import AlphaCohError, SingularPError
from .fock import FockVector, cat_state, coherent_vector, fock_state, mean_photon, squeezed_vacuum
from .measures import MEASURES, alpha_coherence_multi, coherence_curve
from .pdist import negativity, parse_density
from .verify import SUITES

CSV_HEADER = ("family,param,mean_photon,N_used,residual_tail,branch_count,"
              "upper_bound,C_rel,C_l1,status")
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def fmt(x: float) -> str:
    return f"{x:.12g}"


def round12(obj):
    """Round every float in a JSON-like tree to 12 significant digits."""
    if isinstance(obj, float):
        return float(fmt(obj))
    if isinstance(obj, dict):
        return {k: round12(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round12(v) for v in obj]
    return obj


# --------------------------------------------------------------------------
# configuration


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("configuration (flags override --config)")
    g.add_argument("--config", type=Path, help="JSON run configuration")
    g.add_argument("--n-max", type=int)
    g.add_argument("--grid-points", type=int)
    g.add_argument("--margin", type=float)
    g.add_argument("--refine-iters", type=int)
    g.add_argument("--tol-deg", type=float)
    g.add_argument("--tol-cluster", type=float)
    g.add_argument("--k-orbit", type=int)
    g.add_argument("--n-schedule", help="comma separated, e.g. 2,4,8,16,32,64")
    g.add_argument("--tol-tail", type=float)
    g.add_argument("--tol-conv", type=float)
    g.add_argument("--branch-budget", type=int)
    g.add_argument("--L", dest="quad_L", type=float, help="P-grid half width")
    g.add_argument("--h", dest="quad_h", type=float, help="P-grid spacing")
    g.add_argument("--jobs", type=int, help="worker processes for curve points")


def build_config(args) -> RunConfig:
    try:
        base = RunConfig.load(args.config) if args.config else RunConfig()
    except FileNotFoundError as exc:
        raise UsageError(f"config file not found: {exc.filename}") from exc
    except (ValueError, TypeError, json.JSONDecodeError) as exc:
        raise UsageError(f"bad config file: {exc}") from exc

    def pick(**kw):
        return {k: v for k, v in kw.items() if v is not None}

    schedule = pick(tol_tail=args.tol_tail, tol_conv=args.tol_conv,
                    branch_budget=args.branch_budget)
    if args.n_schedule:
        try:
            schedule["n_schedule"] = tuple(int(x) for x in args.n_schedule.split(","))
        except ValueError as exc:
            raise UsageError(f"bad --n-schedule: {args.n_schedule!r}") from exc
    try:
        return base.with_overrides(
            n_max=args.n_max,
            search=pick(grid_points=args.grid_points, margin=args.margin,
                        refine_iters=args.refine_iters, tol_deg=args.tol_deg,
                        tol_cluster=args.tol_cluster, k_orbit=args.k_orbit),
            schedule=schedule,
            quadrature=pick(L=args.quad_L, h=args.quad_h),
            workers=args.jobs,
        )
    except (ValueError, TypeError) as exc:
        raise UsageError(str(exc)) from exc


# --------------------------------------------------------------------------
# state specs


def parse_state(spec: str, n_max: int) -> FockVector:
    """``coherent:re,im``, ``cat-even:a``, ``cat-odd:a``, ``fock:n``, ``squeezed:r,theta``, ``file:path``."""
    kind, sep, arg = spec.partition(":")
    if not sep:
        raise UsageError(f"state spec {spec!r} lacks ':'")
    try:
        if kind == "file":
            with open(arg) as fh:
                return FockVector.from_json(json.load(fh))
        nums = [float(x) for x in arg.split(",")] if arg else []
        if kind == "coherent":
            re, im = (nums + [0.0])[:2]
            return coherent_vector(complex(re, im), n_max)
        if kind in ("cat-even", "cat-odd"):
            (a,) = nums
            return cat_state(a, kind[4:], n_max)
        if kind == "fock":
            (n,) = nums
            if n != int(n):
                raise ValueError("photon number must be an integer")
            return fock_state(int(n), n_max)
        if kind == "squeezed":
            r, theta = (nums + [0.0])[:2]
            return squeezed_vacuum(r, theta, n_max)
    except FileNotFoundError as exc:
        raise UsageError(f"state file not found: {arg}") from exc
    except (ValueError, TypeError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot parse state spec {spec!r}: {exc}") from exc
    raise UsageError(f"unknown state kind {kind!r}")


# --------------------------------------------------------------------------
# commands


def cmd_curve(args) -> int:
    config = build_config(args)
    if args.steps < 1:
        raise UsageError("--steps must be >= 1")
    params = np.linspace(args.min, args.max, args.steps)
    family = args.family.replace("-", "_")
    out = open(args.out, "w") if args.out else sys.stdout
    measure = args.measure
    all_ok = True
    try:
        out.write(CSV_HEADER + "\n")
        if args.strict:
            # one point at a time so a failure leaves a partial file behind
            chunks = [[p] for p in params]
            workers = 1
        else:
            chunks = [list(params)]
            workers = config.workers
        for chunk in chunks:
            try:
                rows = coherence_curve(family, chunk, config.n_max, config.schedule,
                                       config.search, workers)
            except ValueError as exc:
                raise UsageError(str(exc)) from exc
            for row in rows:
                rep = row.reports[measure]
                rel, l1 = row.reports["rel_entropy"], row.reports["l1"]
                out.write(",".join([
                    args.family, fmt(row.param), fmt(row.mean_photon), str(rep.N_used),
                    fmt(rep.residual_tail), str(rep.branch_count),
                    str(rel.upper_bound_flag or l1.upper_bound_flag).lower(),
                    fmt(rel.value), fmt(l1.value), rep.status,
                ]) + "\n")
                out.flush()
                if not rep.converged:
                    all_ok = False
                    if args.strict:
                        return EXIT_FAIL
    finally:
        if args.out:
            out.close()
    if args.gnuplot:
        write_gnuplot(args.gnuplot, args.out or "curve.csv", args.family)
    return EXIT_OK if all_ok else EXIT_FAIL


def write_gnuplot(path, csv_path, family: str) -> None:
    Path(path).write_text(
        "set datafile separator ','\n"
        "set key autotitle columnhead\n"
        f"set title '{family}'\n"
        "set multiplot layout 1,2\n"
        "set xlabel 'parameter'; set ylabel 'C_rel (nats)'\n"
        f"plot '{csv_path}' using 2:8 with linespoints\n"
        "set xlabel 'mean photon number'\n"
        f"plot '{csv_path}' using 3:8 with linespoints\n"
        "unset multiplot\n"
    )


def cmd_state(args) -> int:
    config = build_config(args)
    psi = parse_state(args.spec, config.n_max)
    reports = alpha_coherence_multi(psi, MEASURES, config.schedule, config.search)
    rep = reports[args.measure]
    out = rep.to_json(dump_decomposition=args.dump_decomposition)
    out["spec"] = args.spec
    out["mean_photon"] = mean_photon(psi)
    out["C_rel"] = reports["rel_entropy"].value
    out["C_l1"] = reports["l1"].value
    if args.dump_state:
        Path(args.dump_state).write_text(json.dumps(psi.to_json()))
    print(json.dumps(round12(out), indent=2))
    return EXIT_OK if rep.converged else EXIT_FAIL


def cmd_negativity(args) -> int:
    config = build_config(args)
    L, h = config.quadrature.L, config.quadrature.h
    try:
        p = parse_density(args.spec, L, h)
    except SingularPError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as exc:
        raise UsageError(str(exc)) from exc
    rep = negativity(p)
    out = rep.to_json()
    out["spec"] = args.spec
    status = EXIT_OK
    if args.refine:
        fine = negativity(p.with_quadrature(h=p.h / 2)).value
        wide = negativity(p.with_quadrature(L=p.L + 1)).value
        ref = max(rep.value, 1e-300)
        change = max(abs(fine - rep.value), abs(wide - rep.value)) / ref if rep.value else (
            0.0 if fine == 0 and wide == 0 else float("inf"))
        out["refinement"] = {"h_half": fine, "L_plus_1": wide, "relative_change": change,
                             "stable": change < 0.02}
        if change >= 0.02:
            status = EXIT_FAIL
    if args.write_grid:
        p.save_csv(args.write_grid)
    print(json.dumps(round12(out), indent=2))
    return status


def cmd_verify(args) -> int:
    config = build_config(args)
    names = list(SUITES) if args.suite == "all" else [args.suite]
    ok = True
    for name in names:
        print(f"[{name}]")
        for check in SUITES[name](config):
            print("  " + check.line())
            ok &= check.passed
    print("ALL PASS" if ok else "FAILURES")
    return EXIT_OK if ok else EXIT_FAIL


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="alphacoh", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("curve", help="coherence curve of a state family as CSV")
    p.add_argument("--family", required=True,
                   choices=["cat-even", "cat-odd", "fock", "squeezed"])
    p.add_argument("--min", type=float, required=True)
    p.add_argument("--max", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--measure", choices=MEASURES, default="rel_entropy",
                   help="measure whose convergence drives N_used/status")
    p.add_argument("--out", help="CSV path (default stdout)")
    p.add_argument("--gnuplot", help="also write a gnuplot script here")
    p.add_argument("--strict", action="store_true",
                   help="stop at the first NOT_CONVERGED row")
    _add_config_flags(p)
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("state", help="alpha-coherence report of one state as JSON")
    p.add_argument("spec")
    p.add_argument("--measure", choices=MEASURES, default="rel_entropy")
    p.add_argument("--dump-decomposition", action="store_true")
    p.add_argument("--dump-state", help="write the Fock amplitudes as JSON")
    _add_config_flags(p)
    p.set_defaults(func=cmd_state)

    p = sub.add_parser("negativity", help="negative volume of a regular P density")
    p.add_argument("spec", help="thermal:nbar | dthermal:nbar,re,im | pat:nbar | grid:path")
    p.add_argument("--refine", action="store_true", help="check stability under h/2, L+1")
    p.add_argument("--write-grid", help="write the sampled density as a grid CSV")
    _add_config_flags(p)
    p.set_defaults(func=cmd_negativity)

    p = sub.add_parser("verify", help="run property / oracle suites")
    p.add_argument("suite", choices=sorted(SUITES) + ["all"])
    _add_config_flags(p)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AlphaCohError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
