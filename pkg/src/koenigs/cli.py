"""Command-line front end.

Every subcommand emits either a JSON envelope ``{command, config, result}``
(validating against the shipped schema) or a CSV table; CSV written to a file
gets a JSON twin with the full config echo next to it.  Identical arguments
and seed produce byte-identical output files: floats print with 17
significant digits, keys are sorted, and no timestamps are embedded.

Exit codes: 0 success, 2 validation error, 3 numeric non-convergence.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import dynamics as dyn
from .capacity import (NonConvergenceError, capacity_closed_form,
                       capacity_estimate_energy, capacity_estimate_leja,
                       kn_capacity_experiment)
from .domains import (CertificateError, CircleSlitDomain, ComplementOfCompact,
                      DomainSpec, HalfPlane, Sector, Strip,
                      TranslatedUnionComplement)
from .geometry import ClosedDisc, CompactSet, FinitePoints, Segment
from .hardy import (construct_prescribed_domain, default_geometric_grid,
                    hardy_estimate, koenigs_lower_bound_experiment)
from .measures import alpha_coefficients
from .wos import WosConfig, ZeroHitError, omega_scan

SEED_ENV_VAR = "KOENIGS_SEED"


def _fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV_VAR)
    if env is not None:
        return int(env)
    return 0


def _base_set_for(tag: str) -> CompactSet:
    if tag == "disc":
        return CompactSet((ClosedDisc(0j, 0.25),))
    if tag == "hseg":
        return CompactSet((Segment(-0.25 + 0j, 0.25 + 0j),))
    if tag == "vseg":
        return CompactSet((Segment(-0.25j, 0.25j),))
    if tag == "point":
        return CompactSet((FinitePoints((0j,)),))
    raise ValueError(f"unknown base-set tag {tag!r}")


def _domain_from_args(args) -> DomainSpec:
    if getattr(args, "domain_file", None):
        with open(args.domain_file) as handle:
            return DomainSpec.from_dict(json.load(handle))
    tag = args.domain
    if tag == "sector":
        vertex = complex(args.vertex_re, args.vertex_im)
        return DomainSpec(Sector(args.theta, vertex, args.bisector))
    if tag == "half-plane":
        return DomainSpec(HalfPlane(args.angle, args.offset))
    if tag == "strip":
        return DomainSpec(Strip(args.height))
    if tag == "complement-disc":
        disc = ClosedDisc(complex(args.center_re, args.center_im), args.radius)
        return DomainSpec(ComplementOfCompact(CompactSet((disc,))))
    if tag == "circle-slit":
        radii = tuple(float(r) for r in args.radii.split(","))
        return DomainSpec(CircleSlitDomain(radii, args.exponent))
    if tag == "translated-union":
        return DomainSpec(TranslatedUnionComplement(_base_set_for(args.e),
                                                    shift=args.shift))
    raise ValueError(f"unknown domain {tag!r}")


def _add_output_args(sub):
    sub.add_argument("--format", choices=("json", "csv"), default="json")
    sub.add_argument("--out", type=Path, default=None)
    sub.add_argument("--seed", type=int, default=None,
                     help=f"defaults to ${SEED_ENV_VAR} or 0; flag wins")
    sub.add_argument("--workers", type=int, default=1,
                     help="sampling parallelism hint; results are "
                          "reduction-order independent of it")


def _add_domain_args(sub):
    sub.add_argument("--domain", choices=("sector", "half-plane", "strip",
                                          "complement-disc", "circle-slit",
                                          "translated-union"))
    sub.add_argument("--domain-file", type=Path, default=None)
    sub.add_argument("--theta", type=float, default=math.pi / 2)
    sub.add_argument("--vertex-re", type=float, default=0.0)
    sub.add_argument("--vertex-im", type=float, default=0.0)
    sub.add_argument("--bisector", type=float, default=0.0)
    sub.add_argument("--angle", type=float, default=0.0)
    sub.add_argument("--offset", type=float, default=-1.0)
    sub.add_argument("--height", type=float, default=2.0)
    sub.add_argument("--center-re", type=float, default=2.0)
    sub.add_argument("--center-im", type=float, default=0.0)
    sub.add_argument("--radius", type=float, default=0.25)
    sub.add_argument("--radii", type=str, default="2.0")
    sub.add_argument("--exponent", type=float, default=0.25)
    sub.add_argument("--e", choices=("disc", "hseg", "vseg", "point"),
                     default="disc")
    sub.add_argument("--shift", type=float, default=1.0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="koenigs",
        description="capacity, harmonic measure, Hardy numbers, and disc "
                    "dynamics for planar domains")
    subs = parser.add_subparsers(dest="command", required=True)

    cap = subs.add_parser("capacity", help="logarithmic capacity of a set")
    cap.add_argument("--shape", choices=("interval", "disc", "points"),
                     required=True)
    cap.add_argument("--length", type=float, default=1.0)
    cap.add_argument("--radius", type=float, default=0.25)
    cap.add_argument("--points", type=str, default="0,0",
                     help="comma list re:im;re:im for the points shape")
    cap.add_argument("--method", choices=("closed-form", "leja", "energy"),
                     default="closed-form")
    cap.add_argument("--k", type=int, default=64)
    cap.add_argument("--grid-size", type=int, default=512)
    _add_output_args(cap)
    cap.set_defaults(handler=_run_capacity)

    eq = subs.add_parser("eq-measure", help="equilibrium measure of a set")
    eq.add_argument("--shape", choices=("interval", "disc"), required=True)
    eq.add_argument("--length", type=float, default=1.0)
    eq.add_argument("--radius", type=float, default=0.25)
    eq.add_argument("--grid-size", type=int, default=512)
    _add_output_args(eq)
    eq.set_defaults(handler=_run_eq_measure)

    al = subs.add_parser("alpha", help="unit-cell masses of the interval "
                                       "equilibrium measure")
    al.add_argument("--n", type=int, required=True)
    _add_output_args(al)
    al.set_defaults(handler=_run_alpha)

    harm = subs.add_parser("harmonic", help="outer harmonic measure scan")
    _add_domain_args(harm)
    harm.add_argument("--r", type=str, required=True,
                      help="comma list of radii, strictly increasing")
    harm.add_argument("--samples", type=int, default=100_000)
    harm.add_argument("--epsilon", type=float, default=None)
    harm.add_argument("--max-steps", type=int, default=100_000)
    _add_output_args(harm)
    harm.set_defaults(handler=_run_harmonic)

    hd = subs.add_parser("hardy", help="Hardy-number estimate of a domain")
    _add_domain_args(hd)
    hd.add_argument("--rmax", type=float, default=1.0e4)
    hd.add_argument("--grid-points", type=int, default=7)
    hd.add_argument("--r", type=str, default=None,
                    help="explicit comma list of radii (overrides --rmax)")
    hd.add_argument("--samples", type=int, default=100_000)
    hd.add_argument("--max-steps", type=int, default=100_000)
    _add_output_args(hd)
    hd.set_defaults(handler=_run_hardy)

    cd = subs.add_parser("construct-domain",
                         help="circle-slit domain with prescribed decay")
    cd.add_argument("--p", type=float, required=True)
    cd.add_argument("--levels", type=int, default=3)
    cd.add_argument("--samples", type=int, default=50_000)
    cd.add_argument("--root-tol", type=float, default=0.01)
    cd.add_argument("--max-steps", type=int, default=100_000)
    _add_output_args(cd)
    cd.set_defaults(handler=_run_construct)

    t12 = subs.add_parser("verify-thm12",
                          help="capacity of translated unions against n/4")
    t12.add_argument("--e", choices=("disc", "hseg", "vseg", "point"),
                     default="disc")
    t12.add_argument("--n", type=str, default="4,16,64")
    _add_output_args(t12)
    t12.set_defaults(handler=_run_thm12)

    t11 = subs.add_parser("verify-thm11",
                          help="Hardy lower bound for integer-translate "
                               "complements")
    t11.add_argument("--e", choices=("disc", "hseg", "vseg"), default="disc")
    t11.add_argument("--rmax", type=float, default=1.0e4)
    t11.add_argument("--grid-points", type=int, default=7)
    t11.add_argument("--samples", type=int, default=100_000)
    t11.add_argument("--max-steps", type=int, default=100_000)
    _add_output_args(t11)
    t11.set_defaults(handler=_run_thm11)

    dy = subs.add_parser("dynamics", help="orbit and classification of a "
                                          "model self-map")
    dy.add_argument("--model", choices=("strip", "half-plane", "sector"),
                    required=True)
    dy.add_argument("--lam", type=float, default=math.e)
    dy.add_argument("--theta", type=float, default=math.pi / 2)
    dy.add_argument("--z0-re", type=float, default=0.0)
    dy.add_argument("--z0-im", type=float, default=0.0)
    dy.add_argument("--iters", type=int, default=400)
    _add_output_args(dy)
    dy.set_defaults(handler=_run_dynamics)

    return parser


# ---------------------------------------------------------------------------
# handlers: each returns (config, result, csv_header, csv_rows)


def _run_capacity(args, seed):
    config = {"shape": args.shape, "method": args.method, "seed": seed,
              "format": args.format, "workers": args.workers}
    if args.shape == "interval":
        config["length"] = args.length
        compact = CompactSet((Segment(0j, complex(args.length)),))
    elif args.shape == "disc":
        config["radius"] = args.radius
        compact = CompactSet((ClosedDisc(0j, args.radius),))
    else:
        pts = tuple(complex(*map(float, tok.split(":")))
                    for tok in args.points.split(";"))
        config["points"] = args.points
        compact = CompactSet((FinitePoints(pts),))
    if args.method == "closed-form":
        if args.shape == "interval":
            est = capacity_closed_form("interval", length=args.length)
        elif args.shape == "disc":
            est = capacity_closed_form("disc", radius=args.radius)
        else:
            est = capacity_closed_form("points")
    elif args.method == "leja":
        config["k"] = args.k
        est = capacity_estimate_leja(compact, args.k)
    else:
        config["grid_size"] = args.grid_size
        est = capacity_estimate_energy(compact, args.grid_size).estimate
    result = {"capacity": est.value, "method": est.method,
              "points_used": est.points_used}
    header = ["capacity", "method", "points_used"]
    rows = [[est.value, est.method, est.points_used]]
    return config, result, header, rows


def _run_eq_measure(args, seed):
    config = {"shape": args.shape, "grid_size": args.grid_size, "seed": seed,
              "format": args.format, "workers": args.workers}
    if args.shape == "interval":
        config["length"] = args.length
        compact = CompactSet((Segment(0j, complex(args.length)),))
    else:
        config["radius"] = args.radius
        compact = CompactSet((ClosedDisc(0j, args.radius),))
    solved = capacity_estimate_energy(compact, args.grid_size)
    result = dict(solved.measure.to_dict())
    result["capacity"] = solved.estimate.value
    header = ["re", "im", "w"]
    rows = [[a["re"], a["im"], a["w"]] for a in result["atoms"]]
    return config, result, header, rows


def _run_alpha(args, seed):
    config = {"n": args.n, "seed": seed, "format": args.format,
              "workers": args.workers}
    coeffs = alpha_coefficients(args.n)
    result = {"n": args.n, "values": coeffs.values.tolist()}
    header = ["j", "alpha"]
    rows = [[j + 1, v] for j, v in enumerate(coeffs.values)]
    return config, result, header, rows


def _wos_config(args, seed) -> WosConfig:
    return WosConfig(samples=args.samples,
                     epsilon=getattr(args, "epsilon", None),
                     max_steps=args.max_steps, seed=seed)


def _run_harmonic(args, seed):
    domain = _domain_from_args(args)
    grid = [float(tok) for tok in args.r.split(",")]
    config = {"domain": domain.to_dict(), "r_grid": grid,
              "samples": args.samples, "max_steps": args.max_steps,
              "epsilon": args.epsilon, "seed": seed, "format": args.format,
              "workers": args.workers}
    rows = omega_scan(domain, grid, _wos_config(args, seed))
    result = [{"R": r["R"], "mean": r["mean"], "ci95": r["ci95"],
               "truncated": r["truncated"]} for r in rows]
    header = ["R", "mean", "ci95", "truncated"]
    table = [[r["R"], r["mean"], r["ci95"], r["truncated"]] for r in result]
    return config, result, header, table


def _hardy_payload(estimate) -> dict:
    return {"slope": estimate.slope, "verdict": estimate.verdict,
            "dispersion": estimate.dispersion,
            "fit_window": list(estimate.fit_window),
            "window_slopes": list(estimate.window_slopes),
            "per_point": [dict(row) for row in estimate.per_point]}


def _run_hardy(args, seed):
    domain = _domain_from_args(args)
    if args.r:
        grid = [float(tok) for tok in args.r.split(",")]
    else:
        half = isinstance(domain.family, TranslatedUnionComplement)
        grid = default_geometric_grid(args.rmax, args.grid_points,
                                      half_integer=half)
    config = {"domain": domain.to_dict(), "r_grid": grid,
              "samples": args.samples, "max_steps": args.max_steps,
              "seed": seed, "format": args.format, "workers": args.workers}
    estimate = hardy_estimate(domain, grid, _wos_config(args, seed))
    result = _hardy_payload(estimate)
    header = ["R", "neg_log_omega", "log_R", "stage_hits", "ci95"]
    rows = [[r["R"], r["neg_log_omega"], r["log_R"], r["stage_hits"], r["ci95"]]
            for r in result["per_point"]]
    return config, result, header, rows


def _run_construct(args, seed):
    config = {"p": args.p, "levels": args.levels, "samples": args.samples,
              "root_tol": args.root_tol, "max_steps": args.max_steps,
              "seed": seed, "format": args.format, "workers": args.workers}
    built = construct_prescribed_domain(args.p, args.levels,
                                        _wos_config(args, seed),
                                        root_tol=args.root_tol)
    result = {"p": built.p, "radii": list(built.radii),
              "root_residuals": list(built.root_residuals),
              "domain": built.domain.to_dict()}
    header = ["level", "radius", "root_residual"]
    rows = [[i + 1, r, built.root_residuals[i - 1] if i >= 1 else 0.0]
            for i, r in enumerate(built.radii)]
    return config, result, header, rows


def _run_thm12(args, seed):
    n_list = [int(tok) for tok in args.n.split(",")]
    config = {"e": args.e, "n_list": n_list, "seed": seed,
              "format": args.format, "workers": args.workers,
              "tolerances_note": "estimator tolerances are engineering "
                                 "choices; the limit statement is exact"}
    rows = kn_capacity_experiment(_base_set_for(args.e), n_list)
    result = [{k: row[k] for k in
               ("n", "cap_kn", "cap_interval", "ratio", "scaled_error", "flag")}
              for row in rows]
    header = ["n", "cap_kn", "cap_interval", "ratio", "scaled_error"]
    table = [[r["n"], r["cap_kn"], r["cap_interval"], r["ratio"],
              r["scaled_error"]] for r in result]
    return config, result, header, table


def _run_thm11(args, seed):
    grid = default_geometric_grid(args.rmax, args.grid_points,
                                  half_integer=True)
    config = {"e": args.e, "r_grid": grid, "samples": args.samples,
              "max_steps": args.max_steps, "seed": seed,
              "format": args.format, "workers": args.workers}
    outcome = koenigs_lower_bound_experiment(_base_set_for(args.e),
                                             _wos_config(args, seed),
                                             r_grid=grid)
    result = _hardy_payload(outcome["estimate"])
    result["affine_shift"] = outcome["affine_shift"]
    result["base_point_unshifted"] = outcome["base_point_unshifted"]
    header = ["R", "neg_log_omega", "log_R", "stage_hits", "ci95"]
    rows = [[r["R"], r["neg_log_omega"], r["log_R"], r["stage_hits"], r["ci95"]]
            for r in result["per_point"]]
    return config, result, header, rows


def _run_dynamics(args, seed):
    config = {"model": args.model, "lam": args.lam, "theta": args.theta,
              "z0": [args.z0_re, args.z0_im], "iters": args.iters,
              "seed": seed, "format": args.format, "workers": args.workers}
    if args.model == "strip":
        model = dyn.strip_model(args.lam)
    elif args.model == "half-plane":
        model = dyn.halfplane_model()
    else:
        model = dyn.sector_model(args.theta)
    phi = dyn.model_self_map(model)
    z0 = complex(args.z0_re, args.z0_im)
    report = dyn.iterate_orbit(phi, z0, args.iters)
    classification = dyn.classify_orbit(report)
    cap = min(report.points.size, 10_000)
    orbit = [{"n": k, "re": float(report.points[k].real),
              "im": float(report.points[k].imag),
              "rho_step": (float(report.pseudo_hyperbolic_steps[k])
                           if k < report.pseudo_hyperbolic_steps.size else 0.0)}
             for k in range(cap)]
    result = {"classification": classification, "orbit": orbit,
              "dw_estimate": [report.dw_estimate.real, report.dw_estimate.imag],
              "derivative_estimate": report.derivative_estimate}
    header = ["n", "re", "im", "rho_step"]
    rows = [[o["n"], o["re"], o["im"], o["rho_step"]] for o in orbit]
    return config, result, header, rows


# ---------------------------------------------------------------------------
# output plumbing


def _csv_text(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def _json_text(command, config, result) -> str:
    def default(obj):
        if isinstance(obj, (np.floating, np.integer)):
            return obj.item()
        if isinstance(obj, np.ndarray):
            return obj.tolist()
        raise TypeError(f"not JSON serializable: {type(obj)}")

    envelope = {"command": command, "config": config, "result": result}
    return json.dumps(envelope, sort_keys=True, indent=2, default=default) + "\n"


def emit(command, config, result, header, rows, args) -> None:
    json_text = _json_text(command, config, result)
    if args.format == "json":
        if args.out:
            args.out.write_text(json_text)
        else:
            sys.stdout.write(json_text)
        return
    csv_text = _csv_text(header, rows)
    if args.out:
        args.out.write_text(csv_text)
        args.out.with_suffix(".json").write_text(json_text)
    else:
        sys.stdout.write(csv_text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    seed = _resolve_seed(args)
    try:
        config, result, header, rows = args.handler(args, seed)
    except NonConvergenceError as exc:
        print(f"non-convergence: {exc}", file=sys.stderr)
        return 3
    except (ZeroHitError, RuntimeError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    except (ValueError, CertificateError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    emit(args.command, config, result, header, rows, args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
