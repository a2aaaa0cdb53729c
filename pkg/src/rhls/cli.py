"""Command-line driver: ``rhls <subcommand> [options]``.

Every subcommand prints one JSON report (fixed key order) and exits with
0 on pass, 1 on a failed verification, 2 on usage errors, 3 on inadmissible
parameters and 4 on quadrature non-convergence.  ``sweep`` writes CSV.
"""
from __future__ import annotations

import argparse
import csv
from dataclasses import dataclass, field, fields
from fractions import Fraction
import io
import json
import math
import sys
import time

import numpy as np

from .errors import NotAdmissible, NotConverged, RHLSError
from .indices import conformal_indices, derive_exponents
from .quadrature import QuadratureConfig

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_INADMISSIBLE, EXIT_NOT_CONVERGED = 0, 1, 2, 3, 4
DEFAULT_TOL = {"indices": 1e-12, "kernel-check": 1e-12, "invariance": 1e-6}
ACCEPTANCE_TOL = 1e-3


@dataclass
class RunSpec:
    subcommand: str
    n: int = 2
    alpha: object = 3
    beta: object = 0
    p: object = None
    tol: float | None = None
    seed: int = 0
    overrides: dict = field(default_factory=dict)
    output_path: str | None = None
    timing: bool = False
    extra: dict = field(default_factory=dict)

    def tolerance(self) -> float:
        if self.tol is not None:
            return self.tol
        return DEFAULT_TOL.get(self.subcommand, ACCEPTANCE_TOL)

    def quadrature(self) -> QuadratureConfig:
        return apply_overrides(QuadratureConfig(), self.overrides)


@dataclass
class VerificationReport:
    task: str
    params: dict
    values: dict
    error_estimates: dict
    tolerance: float
    passed: bool
    wall_time_ms: int | None = None

    def to_json(self) -> str:
        body = {"task": self.task, "params": self.params, "values": self.values,
                "error_estimates": self.error_estimates, "tolerance": self.tolerance,
                "pass": self.passed, "wall_time_ms": self.wall_time_ms}
        return json.dumps(_plain(body), indent=2)


def _plain(x):
    if isinstance(x, dict):
        return {k: _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x


def parse_number(text: str):
    """'3' -> int, '2/3' -> Fraction, '0.6667' -> float."""
    text = text.strip()
    try:
        return int(text)
    except ValueError:
        pass
    if "/" in text:
        return Fraction(text)
    return float(text)


def apply_overrides(cfg: QuadratureConfig, overrides: dict) -> QuadratureConfig:
    types = {f.name: type(getattr(cfg, f.name)) for f in fields(cfg)}
    kw = {}
    for key, raw in overrides.items():
        if key not in types:
            raise KeyError(f"unknown configuration key {key!r}")
        typ = types[key]
        kw[key] = None if raw in ("None", "none") else (typ(float(raw)) if typ in (int, float) else raw)
    return cfg.with_(**kw)


def parse_overrides(items) -> dict:
    out = {}
    for item in items or ():
        if "=" in item:
            k, v = item.split("=", 1)
            out[k.strip()] = v.strip()
        else:
            with open(item) as fh:
                for line in fh:
                    line = line.split("#", 1)[0].strip()
                    if line:
                        k, v = line.split("=", 1)
                        out[k.strip()] = v.strip()
    return out


# ---------------------------------------------------------------------------
# tasks

def _params(spec: RunSpec) -> dict:
    d = {"n": spec.n, "alpha": spec.alpha, "beta": spec.beta}
    if spec.p is not None:
        d["p"] = spec.p
    return d


def task_indices(spec: RunSpec):
    if spec.p is None:
        es = conformal_indices(spec.n, spec.alpha, spec.beta)
    else:
        es = derive_exponents(spec.n, spec.alpha, spec.beta, spec.p)
    vals = {k: float(getattr(es, k)) for k in ("p", "p_prime", "q", "q_prime", "theta", "k")}
    res = {k: float(v) for k, v in es.residuals().items()}
    ok = all(abs(v) <= spec.tolerance() for v in res.values())
    return vals, res, ok


def task_kernel_check(spec: RunSpec):
    from .checks import inversion_identity_sweep, sign_law_sweep
    rng = np.random.default_rng(spec.seed)
    count = int(spec.extra.get("samples", 1000))
    inv = inversion_identity_sweep(spec.n, count, rng)
    sign = sign_law_sweep(spec.n, float(spec.alpha), count, rng)
    vals = {"samples": count, "sign_mismatches": sign["mismatches"],
            "sign_regimes": sign["regimes"]}
    errs = {**inv, "sphere_root_error": sign["root_error"]}
    ok = (sign["mismatches"] == 0 and all(v <= spec.tolerance() for v in inv.values())
          and sign["root_error"] <= 1e-8)
    return vals, errs, ok


def task_invariance(spec: RunSpec):
    from .checks import scaling_invariance
    es = conformal_indices(spec.n, spec.alpha, spec.beta) if spec.p is None else \
        derive_exponents(spec.n, spec.alpha, spec.beta, spec.p)
    out = scaling_invariance(es, spec.quadrature())
    errs = {f"{name}_{kind}": v for name, d in out.items() for kind, v in d.items()}
    return {"lambdas": [0.25, 1.0, 4.0]}, errs, max(errs.values()) <= spec.tolerance()


def task_el_residual(spec: RunSpec):
    from .extremals import Bubble, default_radii, el_residual
    from .checks import el_negative_control
    es = conformal_indices(spec.n, spec.alpha, spec.beta)
    cfg = spec.quadrature()
    dev = el_residual(Bubble(spec.n, float(es.alpha)), es, default_radii(), cfg)
    neg = el_residual(el_negative_control(spec.n, float(es.alpha)), es, default_radii(), cfg)
    vals = {"bubble_deviation": dev, "control_deviation": neg}
    return vals, {"bubble_deviation": dev}, dev <= spec.tolerance() and neg > 1e-2


def task_pohozaev(spec: RunSpec):
    from .extremals import make_solution_pair, pohozaev_check, pohozaev_exponent_residual
    es = conformal_indices(spec.n, spec.alpha, spec.beta)
    pair = make_solution_pair(spec.n, es.alpha, es.beta, 1.0, spec.quadrature())
    lhs, rhs, gap = pohozaev_check(pair)
    expo = pohozaev_exponent_residual(es)
    vals = {"lhs": lhs, "rhs": rhs, "calibration": pair.calibration,
            "trace_amplitude": pair.trace_amplitude, "trace_exponent": pair.trace_exponent}
    expo_ok = expo == 0 if es.exact else abs(expo) <= 1e-12
    return vals, {"relative_gap": gap, "exponent_residual": float(expo)}, \
        gap <= spec.tolerance() and expo_ok


def task_sharp_constant(spec: RunSpec):
    from .sharpconst import golden, sharp_constant
    res = sharp_constant(spec.n, spec.alpha, spec.beta, spec.quadrature())
    vals = {"ball_value": res.ball_formula_value, "direct_value": res.direct_value}
    errs = {"relative_gap": res.relative_gap, "error_budget": res.error_budget}
    try:
        g = golden(spec.n, spec.alpha, spec.beta)
        vals["golden_ball_value"] = g["ball_value"]
        errs["golden_gap"] = abs(res.ball_formula_value / g["ball_value"] - 1)
    except KeyError:
        pass
    return vals, errs, res.relative_gap <= spec.tolerance()


def task_optimize(spec: RunSpec):
    from .sharpconst import TrialFamilySpec, c_star_ball, infimum_search
    m = int(spec.extra.get("m", 3))
    fam = TrialFamilySpec(m=m, seed=spec.seed, start=(0.2, -0.2, 0.1, 0.0, 0.0)[:m])
    cfg = spec.quadrature()
    best, info = infimum_search(spec.n, spec.alpha, spec.beta, fam, cfg)
    cstar = c_star_ball(spec.n, spec.alpha, spec.beta, cfg)
    gap = best / cstar - 1
    vals = {"best_ratio": best, "c_star": cstar, "d": info["d"], "eps": info["eps"],
            "restart_values": info["restarts"]}
    amp = max((abs(e) for e in info["eps"]), default=0.0)
    return vals, {"relative_gap": abs(gap), "max_amplitude": amp}, \
        gap >= -spec.tolerance() and abs(gap) <= spec.tolerance()


def task_rearrange_demo(spec: RunSpec):
    from .rearrange import fixture_corpus, symmetrization_ratio_check
    es = conformal_indices(2, spec.alpha, spec.beta)
    vals, worst = {}, -math.inf
    for name, prof in fixture_corpus(spec.seed):
        a, b = symmetrization_ratio_check(prof, es, spec.quadrature())
        vals[name] = {"ratio_f": a, "ratio_fstar": b}
        worst = max(worst, b - a)
    return vals, {"max_excess": worst}, worst <= spec.tolerance()


TASKS = {
    "indices": task_indices,
    "kernel-check": task_kernel_check,
    "invariance": task_invariance,
    "el-residual": task_el_residual,
    "pohozaev": task_pohozaev,
    "sharp-constant": task_sharp_constant,
    "optimize": task_optimize,
    "rearrange-demo": task_rearrange_demo,
}


def run(spec: RunSpec) -> tuple:
    """Execute one task; returns (report, exit code)."""
    t0 = time.perf_counter()
    # the admissibility gate runs before any numerics
    if spec.p is not None:
        derive_exponents(spec.n, spec.alpha, spec.beta, spec.p)
    elif spec.subcommand != "kernel-check":
        conformal_indices(spec.n if spec.subcommand != "rearrange-demo" else 2, spec.alpha, spec.beta)
    vals, errs, ok = TASKS[spec.subcommand](spec)
    wall = int(round(1000 * (time.perf_counter() - t0))) if spec.timing else None
    rep = VerificationReport(spec.subcommand, _params(spec), vals, errs, spec.tolerance(), bool(ok), wall)
    return rep, EXIT_PASS if ok else EXIT_FAIL


SWEEP_COLUMNS = ("n", "alpha", "beta", "c_star_ball", "c_star_direct", "gap", "el_deviation",
                 "pohozaev_residual", "error")


def sweep_rows(n: int, alphas, betas, cfg: QuadratureConfig | None = None, *, with_pair=True):
    """One row per (alpha, beta) in grid order; failures are recorded, not raised."""
    from .extremals import Bubble, default_radii, el_residual, make_solution_pair, pohozaev_check
    from .sharpconst import c_star_ball, c_star_direct
    for alpha in alphas:
        for beta in betas:
            row = {"n": n, "alpha": alpha, "beta": beta}
            try:
                es = conformal_indices(n, alpha, beta)
            except NotAdmissible as exc:
                row["error"] = f"inadmissible: {exc.condition}"
                yield row
                continue
            try:
                ball = c_star_ball(n, alpha, beta, cfg)
                direct = c_star_direct(n, alpha, beta, cfg)
                row.update(c_star_ball=ball, c_star_direct=direct, gap=abs(ball - direct) / ball)
                row["el_deviation"] = el_residual(Bubble(n, float(es.alpha)), es, default_radii(), cfg)
                if with_pair:
                    row["pohozaev_residual"] = pohozaev_check(
                        make_solution_pair(n, es.alpha, es.beta, 1.0, cfg))[2]
            except RHLSError as exc:
                row["error"] = f"{type(exc).__name__}: {exc}"
            yield row


def write_sweep(rows, out) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for row in rows:
        w.writerow([_csv_cell(row.get(c, "")) for c in SWEEP_COLUMNS])


def _csv_cell(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, float):
        return repr(v)
    return v


# ---------------------------------------------------------------------------
# argument parsing

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=2)
    common.add_argument("--alpha", type=parse_number, default=3)
    common.add_argument("--beta", type=parse_number, default=0)
    common.add_argument("--p", type=parse_number, default=None)
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None)
    common.add_argument("--config", action="append", default=[],
                        help="key=value quadrature override, or a file of such lines")
    common.add_argument("--timing", action="store_true", help="record wall time in the report")
    parser = argparse.ArgumentParser(prog="rhls", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in TASKS:
        sp = sub.add_parser(name, parents=[common])
        if name == "kernel-check":
            sp.add_argument("--samples", type=int, default=1000)
        if name == "optimize":
            sp.add_argument("--m", type=int, default=3)
    sw = sub.add_parser("sweep", parents=[common])
    sw.add_argument("--alphas", default="2.5,3,4")
    sw.add_argument("--betas", default="0,0.1")
    sw.add_argument("--no-pair", action="store_true", help="skip the Pohozaev column")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_PASS
    try:
        overrides = parse_overrides(args.config)
        spec = RunSpec(args.subcommand, args.n, args.alpha, args.beta, args.p, args.tol, args.seed,
                       overrides, args.out, args.timing,
                       {k: getattr(args, k) for k in ("samples", "m") if hasattr(args, k)})
        spec.quadrature()
    except (KeyError, ValueError, OSError) as exc:
        print(f"rhls: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    if args.subcommand == "sweep":
        try:
            alphas = [parse_number(a) for a in args.alphas.split(",")]
            betas = [parse_number(b) for b in args.betas.split(",")]
        except ValueError as exc:
            print(f"rhls: usage error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        buf = io.StringIO()
        write_sweep(sweep_rows(args.n, alphas, betas, spec.quadrature(), with_pair=not args.no_pair), buf)
        _emit(buf.getvalue(), args.out)
        return EXIT_PASS

    try:
        rep, code = run(spec)
    except NotAdmissible as exc:
        _emit(json.dumps({"task": args.subcommand, "error": "NotAdmissible",
                          "condition": exc.condition, "detail": str(exc)}, indent=2), args.out)
        return EXIT_INADMISSIBLE
    except NotConverged as exc:
        _emit(json.dumps({"task": args.subcommand, "error": "NotConverged", "detail": str(exc),
                          "best_value": exc.value, "error_estimate": exc.error_estimate},
                         indent=2), args.out)
        return EXIT_NOT_CONVERGED
    _emit(rep.to_json(), args.out)
    return code


def _emit(text: str, path):
    if not text.endswith("\n"):
        text += "\n"
    sys.stdout.write(text)
    if path:
        with open(path, "w") as fh:
            fh.write(text)


def main_exit():  # console-script entry point
    sys.exit(main())


if __name__ == "__main__":  # pragma: no cover
    main_exit()
