"""Command-line front end: ``projrw <command> [options]``.

Exit codes: 0 success, 1 a check failed, 2 invalid input, 3 numerical failure.
Every command validates its inputs before doing any numerical work, so a
GeometryError raised afterwards is reported as a numerical failure.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import io
from .cosmology import (FRIEDMANN_TOL, einstein_residual, friedmann_state, history_table,
                        reinterpret, rw_normal_form, solve_friedmann)
from .errors import GeometryError
from .frame import DEFORMED, check_patch, deformation_factor
from .geodesics import CLASSES, compare_geodesics, init_geodesic
from .oracle import SUITE, OracleConfig, SamplePlan, run_suite
from .types import CosmologyParams, SpacetimePoint

EXIT_OK, EXIT_CHECK, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3

# names accepted by --only besides the suite's own check names
ONLY_ALIASES = {"theorem2": "reinterpretation", "connections": "oracle", "einstein": "curvature",
                "solver": "friedmann", "negatives": "negative"}


class InputError(Exception):
    pass


def _floats(text: str, n: int | None = None) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise InputError(f"expected comma-separated numbers, got {text!r}") from None
    if n is not None and len(vals) != n:
        raise InputError(f"expected {n} comma-separated numbers, got {text!r}")
    return vals


def _kappa(value: float):
    return int(value) if float(value).is_integer() else value


def _params(args, s: float = 0.0) -> CosmologyParams:
    return CosmologyParams(kappa=_kappa(args.kappa), G=args.G, M=args.M, s=s)


def _s_list(args) -> list[float]:
    vals = _floats(args.s)
    if not vals:
        raise InputError("--s needs at least one value")
    return vals


def _emit(args, text: str) -> None:
    if args.out:
        io.write_text(args.out, text)
    else:
        sys.stdout.write(text)


def _stanzas_csv(stanzas, columns, tag_columns=("s",)) -> str:
    """One header; each stanza's rows carry its tag values in front."""
    lines = [",".join(tuple(tag_columns) + tuple(columns))]
    for tags, table in stanzas:
        prefix = [io._fmt(t) for t in tags]
        n = len(table[columns[0]])
        for i in range(n):
            lines.append(",".join(prefix + [io._fmt(table[c][i]) for c in columns]))
    return "\n".join(lines) + "\n"


def _warn_negative_density(s, rho_tilde) -> None:
    rho_tilde = np.atleast_1d(rho_tilde)
    if np.any(rho_tilde < 0):
        print(f"warning: s={s:g}: rho_tilde < 0 (energy condition violated) at "
              f"{int(np.sum(rho_tilde < 0))} sample(s)", file=sys.stderr)


# --- commands ----------------------------------------------------------------

def cmd_evolve(args) -> int:
    s_vals = _s_list(args)
    base = _params(args)
    for s in s_vals:
        _params(args, s)
        deformation_factor(s, args.R0, eps=1e-6)
    friedmann_state(args.t0, args.R0, base)
    if not args.t1 > args.t0:
        raise InputError("--t1 must exceed --t0")
    yield_validated()

    out = []
    for s in s_vals:
        hist = solve_friedmann(_params(args, s), args.R0, (args.t0, args.t1), tol=args.ode_tol)
        table = history_table(hist, printed=args.printed)
        _warn_negative_density(s, table["rho_tilde"])
        if hist.status != "complete":
            print(f"note: s={s:g}: history ended early ({hist.status}) at t={hist.t[-1]:.6g}",
                  file=sys.stderr)
        out.append((s, hist.status, table))
    if args.format == "csv":
        text = _stanzas_csv([((s,), tab) for s, _, tab in out], io.HISTORY_COLUMNS)
    else:
        text = io.dumps_json({"params": base.as_dict(), "R0": args.R0,
                              "histories": [{"s": s, "status": st, "columns": tab}
                                            for s, st, tab in out]})
    _emit(args, text)
    return EXIT_OK


def cmd_reinterpret(args) -> int:
    s_vals = _s_list(args)
    R_vals = _floats(args.R)
    states = [friedmann_state(0.0, R, _params(args)) for R in R_vals]
    for s in s_vals:
        for st in states:
            deformation_factor(s, st.R, eps=1e-6)
    yield_validated()

    cols = {k: [] for k in ("s", "R", "rho", "lambda_tilde", "rho_tilde", "u_tilde_factor",
                            "residual")}
    for s in s_vals:
        params = _params(args, s)
        for st in states:
            r = reinterpret(st, params, printed=args.printed, tol=FRIEDMANN_TOL)
            res = einstein_residual(st, params, DEFORMED, printed=args.printed)
            for k, v in (("s", s), ("R", st.R), ("rho", r.rho), ("lambda_tilde", r.lambda_tilde),
                         ("rho_tilde", r.rho_tilde), ("u_tilde_factor", r.u_tilde_factor),
                         ("residual", float(np.abs(res).max()))):
                cols[k].append(v)
        _warn_negative_density(s, cols["rho_tilde"][-len(states):])
    if args.format == "csv":
        text = io.table_to_csv(cols)
    else:
        text = io.dumps_json({"params": _params(args).as_dict(), "printed": args.printed,
                              "columns": cols})
    _emit(args, text)
    return EXIT_OK


def cmd_normal_form(args) -> int:
    s_vals = _s_list(args)
    for s in s_vals:
        _params(args, s)
    friedmann_state(args.t0, args.R0, _params(args))
    if not args.t1 > args.t0:
        raise InputError("--t1 must exceed --t0")
    # R(t) does not depend on s, so one background serves the whole sweep
    hist = solve_friedmann(_params(args), args.R0, (args.t0, args.t1), tol=args.ode_tol)
    for s in s_vals:
        w = 1.0 - s * hist.R**2
        if np.any(w <= 0):
            t_bad = hist.t[np.argmax(w <= 0)]
            raise InputError(f"s={s:g}: 1 - s R^2 must stay positive; it fails by t={t_bad:.6g}")
    yield_validated()

    stanzas, worst = [], 0.0
    for s in s_vals:
        nf = rw_normal_form(hist, s)
        cert = nf.certify()
        worst = max(worst, cert)
        print(f"s={s:g} certify={cert:.3e} tol={args.tol:g} {'PASS' if cert <= args.tol else 'FAIL'}",
              file=sys.stderr)
        stanzas.append((s, cert, nf.table))
    cols = ("t", "t_tilde", "R", "R_tilde")
    if args.format == "csv":
        text = _stanzas_csv([((s,), tab) for s, _, tab in stanzas], cols)
    else:
        text = io.dumps_json({"params": _params(args).as_dict(), "R0": args.R0,
                              "normal_forms": [{"s": s, "certify": c, "columns": tab}
                                               for s, c, tab in stanzas]})
    _emit(args, text)
    return EXIT_OK if worst <= args.tol else EXIT_CHECK


def cmd_geodesic_compare(args) -> int:
    s_vals = _s_list(args)
    point = _floats(args.point, 3)
    p = SpacetimePoint(args.t0, *point)
    base = _params(args)
    check_patch(p.spatial, base.kappa, eps=1e-6)
    st = friedmann_state(args.t0, args.R0, base)
    if args.dir is None:
        direction = [1.0, 0.0, 0.0] if args.causal_class == "null" else [0.0, 0.0, 0.0]
        if args.causal_class == "spacelike":
            direction = [2.0, 0.0, 0.0]
    else:
        direction = _floats(args.dir, 3)
    if not args.lambda_max > 0:
        raise InputError("--lambda-max must be positive")
    inits = []
    for s in s_vals:
        params = _params(args, s)
        deformation_factor(s, st.R, eps=1e-6)
        inits.append((s, params, init_geodesic(p, direction, args.causal_class, "standard",
                                               st, params)))
    yield_validated()

    worst, summary, stanzas = 0.0, [], []
    for s, params, init in inits:
        cmp = compare_geodesics(init, st, params, args.lambda_max, args.ode_tol)
        worst = max(worst, cmp.distance)
        ok = cmp.distance <= args.tol
        print(f"s={s:g} class={args.causal_class} distance={cmp.distance:.3e} "
              f"tol={args.tol:g} {'PASS' if ok else 'FAIL'}")
        summary.append({"s": s, "distance": cmp.distance, "passed": ok})
        stanzas.append((s, cmp))
    if args.out:
        if args.format == "csv":
            parts = []
            for s, cmp in stanzas:
                for k, path in enumerate((cmp.standard, cmp.other)):
                    parts.append(((s, k), io.path_to_table(path)))
            text = _stanzas_csv(parts, io.PATH_COLUMNS, tag_columns=("s", "deformed"))
        else:
            text = io.dumps_json({
                "params": base.as_dict(), "summary": summary,
                "paths": [{"s": s, "standard": io._jsonable(_path_dict(cmp.standard)),
                           "deformed": io._jsonable(_path_dict(cmp.other))}
                          for s, cmp in stanzas]})
        io.write_text(args.out, text)
    return EXIT_OK if worst <= args.tol else EXIT_CHECK


def _path_dict(path):
    return {"metric_tag": path.metric_tag, "causal_class": path.causal_class, "s": path.s,
            **io.path_to_table(path)}


def cmd_verify(args) -> int:
    only = None
    if args.only:
        names = [ONLY_ALIASES.get(n.strip(), n.strip()) for n in args.only.split(",")]
        unknown = [n for n in names if n not in SUITE]
        if unknown:
            raise InputError(f"unknown check(s) {unknown}; choose from {sorted(SUITE)}")
        only = tuple(names)
    try:
        config = OracleConfig(fd_step=args.fd_step)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    yield_validated()

    report = run_suite(config, SamplePlan(seed=args.seed, only=only))
    print(report.to_text())
    if args.out:
        if args.format == "json":
            text = report.to_json() + "\n"
        else:
            lines = ["check,samples,skipped,worst,passed"]
            lines += [f"{c.name},{c.samples},{c.skipped},{io._fmt(c.worst)},{int(c.passed)}"
                      for c in report.checks]
            text = "\n".join(lines) + "\n"
        io.write_text(args.out, text)
    return EXIT_OK if report.passed else EXIT_CHECK


# --- plumbing ----------------------------------------------------------------

_phase = {"validated": False}


def yield_validated() -> None:
    """Mark the end of input validation for the running command."""
    _phase["validated"] = True


def _common(p, tol_default, tol_help):
    p.add_argument("--kappa", type=float, default=0.0, help="spatial curvature sign: -1, 0 or 1")
    p.add_argument("--M", type=float, default=2.0 / 9.0, help="dust mass parameter")
    p.add_argument("--G", type=float, default=1.0)
    p.add_argument("--s", default="0", help="deformation parameter(s), comma separated")
    p.add_argument("--out", default=None, help="output file (default: standard output)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--tol", type=float, default=tol_default, help=tol_help)
    p.add_argument("--ode-tol", type=float, default=1e-10, help="integrator relative tolerance")
    p.add_argument("--seed", type=int, default=42, help="accepted for uniformity; unused here")
    p.add_argument("--printed", action="store_true",
                   help="use the printed-variant Lambda~ and rho~ formulas")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="projrw", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evolve", help="solve the Friedmann equations and tabulate Lambda~, rho~")
    _common(p, 1e-10, "unused")
    p.add_argument("--R0", type=float, default=1.0)
    p.add_argument("--t0", type=float, default=1.0)
    p.add_argument("--t1", type=float, default=10.0)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("reinterpret", help="dust-plus-Lambda content of the deformed metric")
    _common(p, 1e-9, "unused")
    p.add_argument("--R", default="1", help="scale factor value(s), comma separated")
    p.set_defaults(func=cmd_reinterpret)

    p = sub.add_parser("normal-form", help="coordinates bringing the deformed metric to RW form")
    _common(p, 1e-8, "certification tolerance")
    p.add_argument("--R0", type=float, default=1.0)
    p.add_argument("--t0", type=float, default=1.0)
    p.add_argument("--t1", type=float, default=10.0)
    p.set_defaults(func=cmd_normal_form)

    p = sub.add_parser("geodesic-compare", help="standard vs deformed geodesic through one ray")
    _common(p, 1e-5, "largest acceptable path distance")
    p.add_argument("--R0", type=float, default=1.0, help="scale factor at the initial time")
    p.add_argument("--t0", type=float, default=1.0)
    p.add_argument("--point", default="0,0,0", help="initial spatial point x,y,z")
    p.add_argument("--class", dest="causal_class", choices=CLASSES, default="timelike")
    p.add_argument("--dir", default=None, help="initial spatial direction x,y,z")
    p.add_argument("--lambda-max", type=float, default=1.0)
    p.set_defaults(func=cmd_geodesic_compare)

    p = sub.add_parser("verify", help="run the cross-check suite")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--fd-step", type=float, default=1e-6)
    p.add_argument("--only", default=None, help=f"comma list from {sorted(SUITE)}")
    p.add_argument("--out", default=None, help="write the JSON report here")
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    _phase["validated"] = False
    try:
        return args.func(args)
    except (InputError, GeometryError) as exc:
        code = EXIT_NUMERIC if _phase["validated"] else EXIT_INPUT
        print(f"error: {exc}", file=sys.stderr)
        return code
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
