"""Command-line entry point (``orthotrig``)."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys

import numpy as np

from . import approx, extremal, harness, kernels
from .exceptions import CapacityError, DomainError, NumericRangeError, PreconditionError
from .fourier import ClassSpec, QuadratureSpec, TrigPoly
from .psi import PsiSpec, mu

_PSI_KEYS = ("alpha", "r", "gamma", "K")


def _exponent(text: str) -> float:
    return math.inf if text.strip().lower() in ("inf", "infinity") else float(text)


def _add_psi_args(ap: argparse.ArgumentParser) -> None:
    g = ap.add_argument_group("weight function")
    g.add_argument("--family", choices=("exp_power", "exp_power_log", "power_law"))
    for key in _PSI_KEYS:
        g.add_argument(f"--{key}", type=float)


def _add_config_args(ap: argparse.ArgumentParser) -> None:
    ap.add_argument("--config", help="JSON experiment config; flags below override it")
    _add_psi_args(ap)
    ap.add_argument("--beta", type=float)
    ap.add_argument("--p", type=_exponent)
    ap.add_argument("--s", type=_exponent)
    ap.add_argument("--n-min", type=int)
    ap.add_argument("--n-max", type=int)
    ap.add_argument("--n-step", type=int)
    ap.add_argument("--swaps", type=int)
    ap.add_argument("--rel-tol", type=float, help="quadrature relative tolerance")
    ap.add_argument("--output", help="write the report here instead of stdout")
    ap.add_argument("--format", choices=("csv", "json"))


def _psi_from_args(args, base: dict | None = None) -> PsiSpec:
    cfg = dict(base or {"family": "exp_power", "alpha": 2.0, "r": 0.5, "gamma": 0.0})
    if args.family and args.family != cfg.get("family"):
        cfg = {"family": args.family}
    for key in _PSI_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    family = cfg["family"]
    allowed = {"exp_power": ("alpha", "r", "gamma"), "exp_power_log": ("alpha", "r", "K"),
               "power_law": ("r",)}[family]
    return PsiSpec.from_config({k: v for k, v in cfg.items() if k == "family" or k in allowed})


def build_config(args, mode: str) -> harness.ExperimentConfig:
    data = {}
    if args.config:
        with open(args.config) as fh:
            data = json.load(fh)
    data["psi"] = _psi_from_args(args, data.get("psi")).to_config()
    data["mode"] = mode
    for key in ("beta", "p", "s", "swaps"):
        value = getattr(args, key)
        if value is not None:
            data[key] = value
    lo, hi, step = (list(data.get("n_range", [9, 24, 1])) + [1])[:3]
    lo = args.n_min if args.n_min is not None else lo
    hi = args.n_max if args.n_max is not None else hi
    step = args.n_step if args.n_step is not None else step
    data["n_range"] = [lo, hi, step]
    if args.rel_tol is not None:
        data["quad"] = {**data.get("quad", {}), "rel_tol": args.rel_tol}
    out = dict(data.get("output") or {})
    if args.output is not None:
        out["path"] = args.output
    if args.format is not None:
        out["format"] = args.format
    data["output"] = out
    return harness.ExperimentConfig.from_dict(data)


def _write(report, cfg: harness.ExperimentConfig) -> None:
    if cfg.output_path:
        harness.emit(report, cfg.output_path, cfg.output_format)
    elif cfg.output_format == "json":
        json.dump(report.to_dict(), sys.stdout, indent=1)
        sys.stdout.write("\n")
    else:
        harness.write_csv(report, sys.stdout)


# -- subcommands ----------------------------------------------------------------------


def cmd_psi_info(args) -> int:
    psi = _psi_from_args(args)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(("t", "psi", "eta", "eta_gap", "mu"))
    for t in range(args.t_min, args.t_max + 1):
        c = mu(psi, t)
        writer.writerow((t, "%.17g" % float(psi(t)), "%.17g" % c.eta, "%.17g" % c.eta_gap,
                         "%.17g" % c.mu))
    return 0


def cmd_kernel_eval(args) -> int:
    if args.kind == "vp":
        handle = kernels.vallee_poussin(args.m)
    else:
        handle = kernels.dirichlet_beta(args.m, args.beta)
    out = {"kind": handle.kind, "params": list(handle.params)}
    if args.t:
        out["values"] = [[t, float(handle(t))] for t in args.t]
    if args.kind == "vp":
        check = kernels.kernel_l1_check(args.m, QuadratureSpec(rel_tol=args.rel_tol))
        out.update(l1_norm=check.norm, bound=kernels.THREE_PI, holds=check.holds)
        ok = check.holds
    else:
        grid = np.linspace(math.pi / args.grid, math.pi, args.grid)
        ok = kernels.dirichlet_bound_check(args.m, args.beta, grid)
        out.update(grid_points=args.grid, bound_holds=ok)
    json.dump(out, sys.stdout, indent=1)
    sys.stdout.write("\n")
    return 0 if ok else 1


def cmd_extremal_build(args) -> int:
    psi = _psi_from_args(args)
    if args.kind == "fstar-pn":
        cls = ClassSpec(psi, args.beta, args.p)
        consts = extremal.build_constants(cls, args.n_min if args.n_min else args.n)
        poly = extremal.build_fstar_pn(cls, args.n, consts)
    elif args.kind == "fstar-m":
        poly = extremal.build_fstar_m(psi, args.n)
    else:
        poly = extremal.build_fdoublestar_m(args.n)
    text = json.dumps(poly.to_dict())
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def cmd_approx(args) -> int:
    with open(args.poly) as fh:
        f = TrigPoly.from_dict(json.load(fh))
    quad = QuadratureSpec(rel_tol=args.rel_tol)
    if args.method == "exact":
        res = approx.best_orthogonal_exact(f, args.m, args.s, quad)
    else:
        res = approx.best_orthogonal_greedy(f, args.m, args.s, quad, args.swaps)
    json.dump({"value": res.value, "gamma": list(res.gamma.members), "method": res.method},
              sys.stdout)
    sys.stdout.write("\n")
    return 0


def cmd_verify(args) -> int:
    cfg = build_config(args, args.mode)
    report = harness.verify(cfg)
    _write(report, cfg)
    return 0 if report.all_chain_ok() else 1


def cmd_sweep(args) -> int:
    cfg = build_config(args, args.mode)
    table = harness.sweep_corollary(cfg)
    _write(table, cfg)
    print(json.dumps(table.summary), file=sys.stderr)
    ok = table.report.all_chain_ok() and table.bounded()
    return 0 if ok else 1


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="orthotrig", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("psi-info", help="eta, eta - t and mu on an integer range")
    _add_psi_args(p)
    p.add_argument("--t-min", type=int, default=1)
    p.add_argument("--t-max", type=int, default=24)
    p.set_defaults(func=cmd_psi_info)

    p = sub.add_parser("kernel-eval", help="kernel values and norm checks")
    p.add_argument("--kind", choices=("vp", "dirichlet"), default="vp")
    p.add_argument("--m", type=int, required=True, help="order m of V_m or k of D_k")
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--t", type=float, nargs="*")
    p.add_argument("--grid", type=int, default=10_000)
    p.add_argument("--rel-tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_kernel_eval)

    p = sub.add_parser("extremal-build", help="emit an extremal polynomial as JSON")
    p.add_argument("--kind", choices=("fstar-pn", "fstar-m", "fdoublestar-m"), default="fstar-pn")
    _add_psi_args(p)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--n-min", type=int, help="where the constants a, b are taken (default n)")
    p.add_argument("--output")
    p.set_defaults(func=cmd_extremal_build)

    p = sub.add_parser("approx", help="best orthogonal approximation of a JSON polynomial")
    p.add_argument("poly", help='file holding {"coeffs": [[k, re, im], ...]}')
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--s", type=_exponent, default=math.inf)
    p.add_argument("--method", choices=("exact", "greedy"), default="greedy")
    p.add_argument("--swaps", type=int)
    p.add_argument("--rel-tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_approx)

    p = sub.add_parser("verify", help="per-n report of a two-sided bound")
    p.add_argument("--mode", choices=("theorem1", "theorem2", "theorem3"), required=True)
    _add_config_args(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="ratio table against the asymptotic order")
    p.add_argument("--mode", choices=("corollary1", "corollary2"), required=True)
    _add_config_args(p)
    p.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (DomainError, PreconditionError, CapacityError, NumericRangeError, OSError) as exc:
        print(f"orthotrig: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
