"""Command-line surface: evaluate, classify, compare engines, apply
transforms, emit verification reports.

Exit-code contract (CI consumes `compare` directly):
    0  success
    2  usage / parse error
    3  domain error (message names the module error)
    4  verification discrepancy (a pairwise engine disagreement above
       --tol, or a failed `verify` check)

Data rows go to stdout (CSV by default, JSON with --format json);
diagnostics go to stderr. CSV numbers carry 17 significant digits so
doubles round-trip; JSON uses native doubles. Output is deterministic for
fixed flags: no wall clock, and randomized checks take an explicit
--seed. Environment overrides: HEUNKIT_TOL (default comparison/series
tolerance) and HEUNKIT_MAXTERMS (default truncation order).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__, asymptotics, integralform, recurrence, series3trf, transforms
from .errors import HeunkitError
from .hyper2f1 import gauss_2f1
from .params import Normalization, RootKind, default_normalization, indicial_roots, make_params

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_VERIFY = 4


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def _emit(rows: list[dict], fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(rows, indent=None, separators=(",", ":")))
        return
    if not rows:
        return
    cols = list(rows[0].keys())
    print(",".join(cols))
    for row in rows:
        print(",".join(_fmt(row[c]) for c in cols))


@dataclass(frozen=True)
class RunConfig:
    """Validated knobs shared by the data-producing subcommands."""

    xs: tuple[float, ...]
    fmt: str
    tol: float
    max_terms: int

    @staticmethod
    def from_args(args) -> "RunConfig":
        xs: list[float] = list(args.x or [])
        if getattr(args, "x_grid", None):
            try:
                lo_s, hi_s, n_s = args.x_grid.split(":")
                lo, hi, n = float(lo_s), float(hi_s), int(n_s)
            except ValueError as exc:
                raise UsageError(f"--x-grid wants lo:hi:count, got {args.x_grid!r}") from exc
            if n < 2 or not hi > lo:
                raise UsageError("--x-grid needs count >= 2 and hi > lo")
            xs.extend(np.linspace(lo, hi, n).tolist())
        if not xs:
            raise UsageError("no evaluation points: pass --x or --x-grid")
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise UsageError("evaluation points must be strictly increasing")
        tol = args.tol if args.tol is not None else float(os.environ.get("HEUNKIT_TOL", "1e-8"))
        max_terms = (
            args.max_terms
            if args.max_terms is not None
            else int(os.environ.get("HEUNKIT_MAXTERMS", "400"))
        )
        if max_terms < 1:
            raise UsageError("--max-terms must be positive")
        return RunConfig(xs=tuple(xs), fmt=args.format, tol=tol, max_terms=max_terms)


class UsageError(Exception):
    pass


def _params_from(args):
    return make_params(args.a, args.q, args.alpha, args.beta, args.gamma, args.delta)


def _root_from(args, p):
    first, second = indicial_roots(p)
    return second if args.lambda_kind == "second" else first


def _add_param_flags(sp, region_only: bool = False) -> None:
    sp.add_argument("--a", type=float, required=True, help="singularity location (nonzero)")
    if region_only:
        return
    sp.add_argument("--q", type=float, required=True, help="accessory parameter")
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--beta", type=float, required=True)
    sp.add_argument("--gamma", type=float, required=True)
    sp.add_argument("--delta", type=float, required=True)
    sp.add_argument(
        "--lambda-kind",
        choices=("first", "second"),
        default="first",
        help="indicial root: first (exponent 0) or second (exponent 1-gamma)",
    )


def _add_common_flags(sp) -> None:
    sp.add_argument("--x", type=float, action="append", help="evaluation point (repeatable)")
    sp.add_argument("--x-grid", help="lo:hi:count equispaced grid")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--tol", type=float, default=None, help="tolerance (env HEUNKIT_TOL)")
    sp.add_argument(
        "--max-terms",
        type=int,
        default=None,
        help="series truncation order (env HEUNKIT_MAXTERMS)",
    )


def _engine_value(engine: str, p, root, c0, x: float, cfg: RunConfig, depth: int) -> tuple[float, float]:
    """(value, tail indicator) for one engine at one point."""
    if engine == "recurrence":
        series = recurrence.build_series(p, root, c0, cfg.max_terms)
        ev = recurrence.eval_series(series, x)
        return ev.value, ev.tail
    if engine == "trf3":
        res = series3trf.build_3trf_infinite(
            p, root, c0, M=min(cfg.max_terms, 60), I_max=max(60, depth), x=x
        )
        return res.value, res.tail_estimate
    if engine == "integral":
        total = 0.0
        last = 0.0
        for n in range(depth + 1):
            last = integralform.eval_subintegral_infinite_structural(p, root, c0, n, x, I_max=48)
            total += last
        return total, abs(last)
    raise UsageError(f"unknown engine {engine!r}")


def cmd_eval(args) -> int:
    cfg = RunConfig.from_args(args)
    p = _params_from(args)
    root = _root_from(args, p)
    c0 = default_normalization(root, p)
    rows = []
    for x in cfg.xs:
        value, tail = _engine_value(args.engine, p, root, c0, x, cfg, depth=2)
        in_region = asymptotics.classify_region(p.a, x).contains_x
        rows.append({"x": x, "value": value, "tail_estimate": tail, "in_region": in_region})
    _emit(rows, cfg.fmt)
    return EXIT_OK


def cmd_region(args) -> int:
    cfg = RunConfig.from_args(args)
    rows = []
    for x in cfg.xs:
        rep = asymptotics.classify_region(args.a, x)
        rows.append(
            {
                "x": x,
                "a_branch": rep.a_branch.name,
                "intervals": (
                    "no solution"
                    if not rep.intervals
                    else ";".join(f"{_fmt(lo)}..{_fmt(hi)}" for lo, hi in rep.intervals)
                ),
                "contains_x": rep.contains_x,
            }
        )
    _emit(rows, cfg.fmt)
    return EXIT_OK


def cmd_compare(args) -> int:
    cfg = RunConfig.from_args(args)
    p = _params_from(args)
    root = _root_from(args, p)
    c0 = default_normalization(root, p)
    engines = [e.strip() for e in args.engines.split(",") if e.strip()]
    if len(engines) < 2:
        raise UsageError("--engines needs at least two of recurrence,trf3,integral")
    rows = []
    worst = 0.0
    for x in cfg.xs:
        if not asymptotics.classify_region(p.a, x).contains_x:
            raise HeunkitError(f"OutsideRegion: x = {x} not in the convergence region for a = {p.a}")
        row: dict = {"x": x}
        values = {}
        for e in engines:
            values[e], _ = _engine_value(e, p, root, c0, x, cfg, args.depth)
            row[e] = values[e]
        scale = max(abs(v) for v in values.values())
        disc = 0.0
        names = list(values)
        for i in range(len(names)):
            for j in range(i + 1, len(names)):
                disc = max(disc, abs(values[names[i]] - values[names[j]]) / max(scale, 1e-300))
        row["max_rel_discrepancy"] = disc
        worst = max(worst, disc)
        rows.append(row)
    _emit(rows, cfg.fmt)
    if worst > cfg.tol:
        print(f"discrepancy {worst:.3e} exceeds tol {cfg.tol:.3e}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_transform(args) -> int:
    cfg = RunConfig.from_args(args)
    p = _params_from(args)
    registry = transforms.builtin_registry()
    if args.registry:
        with open(args.registry, encoding="utf-8") as fh:
            registry.update(transforms.parse_registry(fh.read()))
    if args.id not in registry:
        raise UsageError(f"unknown transform id {args.id!r}; have {sorted(registry)}")
    t = registry[args.id]
    engine = transforms.Engine.TRF3 if args.engine == "trf3" else transforms.Engine.RECURRENCE
    rows = []
    for x in cfg.xs:
        pm, xi = transforms.mapped_point(t, p, x)
        in_region = asymptotics.classify_region(pm.a, xi).contains_x
        row = {"x": x, "xi": xi, "mapped_a": pm.a, "in_mapped_region": in_region}
        row["value"] = (
            transforms.apply_transform(t, p, x, engine, N=cfg.max_terms) if in_region else float("nan")
        )
        rows.append(row)
    _emit(rows, cfg.fmt)
    return EXIT_OK


def cmd_verify(args) -> int:
    rng = np.random.default_rng(args.seed)
    checks: list[tuple[str, bool, str]] = []

    def record(name: str, ok: bool, detail: str) -> None:
        checks.append((name, ok, detail))

    # regrouped-sum identity against the recurrence
    worst = 0.0
    for _ in range(10):
        p = make_params(
            a=float(rng.uniform(0.6, 3.0)),
            q=float(rng.uniform(-2, 2)),
            alpha=float(rng.uniform(0.3, 2.5)),
            beta=float(rng.uniform(0.3, 2.5)),
            gamma=float(rng.uniform(0.4, 2.5)),
            delta=float(rng.uniform(0.3, 2.5)),
        )
        root = indicial_roots(p)[0]
        c0 = Normalization(1.0)
        series = recurrence.build_series(p, root, c0, 10)
        for k in range(9):
            got = series3trf.coefficient_of_order(p, root, c0, k)
            want = series.coeffs[k]
            worst = max(worst, abs(got - want) / max(abs(want), 1e-300))
    record("regrouped-coefficients", worst < 1e-10, f"max rel err {worst:.2e}")

    # region table rows vs raw inequality
    mism = 0
    for _ in range(2000):
        a = float(rng.uniform(-6, 6))
        x = float(rng.uniform(-6, 6))
        if a == 0.0:
            continue
        rep = asymptotics.classify_region(a, x)
        raw = abs(asymptotics.convergence_factor(a, x)) < 1.0
        mism += rep.contains_x != raw
    record("region-membership", mism == 0, f"{mism} mismatches / 2000")

    # Beta kernel identity and ladder kernel identity
    p = make_params(1.7, 0.8, -2.0, 1.3, 0.9, 1.1)
    root = indicial_roots(p)[0]
    kcfg = integralform.KernelEvalConfig()
    lhs, rhs = integralform.beta_kernel_identity_check(1, 2, p, root, kcfg, j=3)
    record("beta-kernel", abs(lhs - rhs) <= 1e-12 * abs(rhs), f"|lhs-rhs| = {abs(lhs - rhs):.2e}")
    kq = integralform.kernel_value_quadrature(
        1, 0, -0.3, p, root, kcfg, series3trf.Variant.POLY_S, cap_l=3
    )
    kd = integralform.kernel_value_direct(1, 0, -0.3, p, root, series3trf.Variant.POLY_S, cap_l=3)
    record("ladder-kernel", abs(kq - kd) <= 1e-8 * max(abs(kd), 1e-12), f"|quad-direct| = {abs(kq - kd):.2e}")

    # integral sub-term vs regrouped block
    pi = make_params(1.7, 0.8, 0.8, 1.3, 0.9, 1.1)
    c0 = Normalization(1.0)
    y1_int = integralform.eval_subintegral_infinite_structural(pi, root, c0, 1, 0.25, I_max=40)
    y1_ser = series3trf.build_3trf_infinite(pi, root, c0, M=1, I_max=60, x=0.25, early_stop_tol=0).partials[1]
    rel = abs(y1_int - y1_ser) / max(abs(y1_ser), 1e-300)
    record("subintegral-block", rel < 1e-8, f"rel err {rel:.2e}")

    # transform residual on a terminated instance, plus asymptotic composition
    reg = transforms.builtin_registry()
    t = reg["delta-flip"]
    pt = make_params(3.0, 0.4, 1.1 - 1.0 - 2.0, 1.3, 0.8, 1.1)  # mapped alpha' = -2
    rep = transforms.residual_verify(t, pt, [0.05, 0.1, 0.15], N=240, tol=1e-8)
    record("transform-residual", rep.passed, f"max residual {rep.max_residual:.2e}")
    t3 = reg["swap-0-1"]
    ok = True
    detail = ""
    for x in (0.7, 0.8, 0.9):
        a_m = t3.mapped_values(pt)["a"]
        xi = t3.variable(pt, x)
        want = 1.0 / (
            1.0 - (-(xi**2) / a_m + (1.0 + a_m) / a_m * xi)
        )
        got = transforms.transform_asymptotic(t3, pt, x, transforms.AsymptoticBranch.INFINITE)
        if abs(got - want) > 1e-12 * abs(want):
            ok = False
            detail = f"x={x}: {got} vs {want}"
    record("asymptotic-composition", ok, detail or "3 points match")

    failed = [c for c in checks if not c[1]]
    for name, okk, detail in checks:
        print(f"{'PASS' if okk else 'FAIL'} {name}: {detail}")
    return EXIT_VERIFY if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="heunkit",
        description="Local solutions of the general Heun equation, cross-verified engines.",
    )
    ap.add_argument("--version", action="version", version=f"heunkit {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("eval", help="evaluate a local solution on points")
    _add_param_flags(sp)
    _add_common_flags(sp)
    sp.add_argument("--engine", choices=("recurrence", "trf3"), default="recurrence")
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("region", help="convergence-region row and membership")
    _add_param_flags(sp, region_only=True)
    _add_common_flags(sp)
    sp.set_defaults(func=cmd_region)

    sp = sub.add_parser("compare", help="cross-engine discrepancy table (CI hook)")
    _add_param_flags(sp)
    _add_common_flags(sp)
    sp.add_argument(
        "--engines",
        default="recurrence,trf3",
        help="comma list from recurrence,trf3,integral",
    )
    sp.add_argument("--depth", type=int, default=2, help="integral engine block depth (<= 2)")
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("transform", help="apply a registered local-solution transform")
    _add_param_flags(sp)
    _add_common_flags(sp)
    sp.add_argument("--id", required=True, help="transform id (see transforms registry)")
    sp.add_argument("--engine", choices=("recurrence", "trf3"), default="recurrence")
    sp.add_argument("--registry", help="extra registry file to load")
    sp.set_defaults(func=cmd_transform)

    sp = sub.add_parser("verify", help="desk-scale self-checks, one PASS/FAIL line each")
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_verify)

    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except HeunkitError as exc:
        print(f"domain error [{type(exc).__name__}]: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
