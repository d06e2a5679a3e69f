"""Command-line front end.

    hmfsum verify-sf1 --source j --C 6.3831853 --X 1 2
    hmfsum verify-partition --X 0.5 1 2 5
    hmfsum verify-riesz --source delta --X 10 20 --rho 2 3
    hmfsum lseries-eval --source delta --s 2 2+5i
    hmfsum asymptotic-scan --source delta --rho 2 --X 10 20 40 80 160
    hmfsum selftest

Every command writes one record per parameter combination, as CSV (default)
or as a JSON array, with the fixed columns in :data:`COLUMNS`.  Exit status
is 0 when every record passes, 1 on a failed tolerance or a numerical
non-convergence, and 2 on a violated hypothesis or unreadable input.
"""

from __future__ import annotations

import argparse
import csv
import itertools
import json
import math
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import config
from .errors import ConvergenceError, DomainError, HypothesisError, TruncationError
from .lseries import (
    PhiFamily,
    PsiFamily,
    laplace_phi,
    laplace_psi,
    lseries_psi_continued,
    lseries_psi_direct,
    nonhol_integral,
    nonhol_integral_transformed,
)
from .modforms import (
    FormalPowerSeries,
    delta_source,
    j_coefficients,
    j_source,
    load_source,
    partition_numbers,
    partition_source,
    series_eta_product,
    tau_coefficients,
)
from .quadrature import ContourSpec, integrate_finite, integrate_semi_infinite
from .specfun import bessel_k, kummer_m, log_gamma
from .summation import (
    SF1Params,
    SlowTailWarning,
    asymptotic_scan,
    riesz_lhs,
    riesz_main_term,
    verify_partition,
    verify_riesz,
    verify_sf1,
)


COLUMNS = (
    "command",
    "source",
    "X",
    "C",
    "rho",
    "epsilon",
    "eps",
    "s",
    "lhs_re",
    "lhs_im",
    "rhs_re",
    "rhs_im",
    "abs_residual",
    "rel_residual",
    "n_max",
    "tail_bound",
    "pass",
    "detail",
)


@dataclass
class RunConfig:
    command: str
    source: str = "delta"
    X: list = field(default_factory=list)
    C: list = field(default_factory=list)
    rho: list = field(default_factory=lambda: [config.RIESZ_RHO])
    epsilon: float = config.RIESZ_EPSILON
    eps: float = config.PARTITION_EPS
    s: list = field(default_factory=list)
    T: float | None = None
    tol: float | None = None
    n_max: int | None = None
    n_max_cap: int | None = None
    taper: bool = True
    output: str = "csv"
    threads: int = 1


def resolve_source(name: str):
    """partition | delta | j | file:<path>"""
    if name == "partition":
        return partition_source()
    if name == "delta":
        return delta_source()
    if name == "j":
        return j_source()
    if name.startswith("file:"):
        return load_source(name[5:])
    raise HypothesisError(f"unknown source {name!r}; expected partition, delta, j or file:<path>")


def parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}")


def _format_s(s) -> str:
    s = complex(s)
    return f"{s.real!r}{s.imag:+}i"


def _record(command, source, report=None, **cols):
    rec = {c: "" for c in COLUMNS}
    rec["command"] = command
    rec["source"] = source
    if report is not None:
        rec.update(
            lhs_re=report.lhs.real,
            lhs_im=report.lhs.imag,
            rhs_re=report.rhs.real,
            rhs_im=report.rhs.imag,
            abs_residual=report.abs_residual,
            rel_residual=report.rel_residual,
            n_max=report.n_max_rhs,
            tail_bound=report.tail_bound_lhs + report.tail_bound_rhs,
            **{"pass": report.passed},
        )
    rec.update(cols)
    return rec


# ------------------------------------------------------------- validation


def validate(cfg: RunConfig, f):
    """Check parameter ranges before any work is dispatched."""
    if cfg.command in ("verify-sf1", "verify-partition", "verify-riesz", "asymptotic-scan"):
        if not cfg.X:
            raise HypothesisError(f"{cfg.command}: at least one --X is required")
        if any(not x > 0.0 for x in cfg.X):
            raise HypothesisError("X must be positive")
    if cfg.command == "verify-sf1":
        if not cfg.C:
            raise HypothesisError("verify-sf1: at least one --C is required")
        for c in cfg.C:
            PhiFamily(c, f.level_N).check_source(f)
    if cfg.command == "verify-partition" and not cfg.eps > 0.0:
        raise HypothesisError("the shift eps must be positive")
    if cfg.command in ("verify-riesz", "asymptotic-scan", "lseries-eval"):
        if not f.is_cusp_form or f.weight_k.denominator != 1 or int(f.weight_k) % 2 or f.weight_k < 2:
            raise HypothesisError(f"{cfg.command} needs a holomorphic cusp form of even weight k >= 2")
    if cfg.command in ("verify-riesz", "asymptotic-scan"):
        if any(not r > 1.0 for r in cfg.rho):
            raise HypothesisError("rho must exceed 1")
    if cfg.command == "verify-riesz":
        k = float(f.weight_k)
        if not 0.0 < cfg.epsilon < min(1.0, 0.5 * (k - 1.0)) or cfg.epsilon > 0.5:
            raise HypothesisError("epsilon must lie in (0, min(1, (k-1)/2)) and not exceed 1/2")
    if cfg.command == "lseries-eval" and not cfg.s:
        raise HypothesisError("lseries-eval: at least one --s is required")


# ------------------------------------------------------------- commands


def _map(threads, fn, items):
    items = list(items)
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def _guarded(fn):
    """Run fn, turning a TruncationError into its attached report."""

    def wrapped(item):
        try:
            return fn(item), None
        except TruncationError as exc:
            if exc.report is None:
                raise
            return exc.report, str(exc)

    return wrapped


def _cmd_sf1(cfg, f):
    tol = config.SF1_TOL if cfg.tol is None else cfg.tol
    grid = list(itertools.product(cfg.C, cfg.X))

    def one(cx):
        return verify_sf1(f, SF1Params(*cx), tol=tol, n_max=cfg.n_max, n_max_cap=cfg.n_max_cap)

    out = []
    for (c, x), (rep, note) in zip(grid, _map(cfg.threads, _guarded(one), grid)):
        rec = _record(cfg.command, cfg.source, rep, X=x, C=c)
        if note:
            rec["pass"] = False
            rec["detail"] = note
        out.append(rec)
    return out


def _cmd_partition(cfg, f):
    tol = config.SF1_TOL if cfg.tol is None else cfg.tol
    n_max = 300 if cfg.n_max is None else cfg.n_max

    def one(x):
        return verify_partition(x, cfg.eps, n_max, tol)

    out = []
    for x, rep in zip(cfg.X, _map(cfg.threads, one, cfg.X)):
        detail = (
            f"extra_factor_rhs={rep.extras['extra_factor_rhs']!r};"
            f"extra_factor_rel_residual={rep.extras['extra_factor_rel_residual']!r};"
            f"consistent_variant={rep.extras['consistent_variant']}"
        )
        out.append(_record(cfg.command, "partition", rep, X=x, C=rep.params["C"], eps=cfg.eps, detail=detail))
    return out


def _cmd_riesz(cfg, f):
    tol = config.RIESZ_TOL if cfg.tol is None else cfg.tol
    grid = list(itertools.product(cfg.X, cfg.rho))

    def one(xr):
        x, r = xr
        spec = ContourSpec(epsilon=cfg.epsilon, T=cfg.T, rho=r)
        return verify_riesz(f, x, spec, tol=tol, n_max=cfg.n_max, taper=cfg.taper)

    # The rate-based bound is reported in the tail_bound column instead.
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SlowTailWarning)
        reports = _map(cfg.threads, one, grid)
    out = []
    for (x, r), rep in zip(grid, reports):
        detail = (
            f"main_term={rep.extras['main_term'].real!r};"
            f"tail_estimate={rep.extras['tail_estimate']!r};"
            f"quad_error={rep.extras['quad_error']!r};taper={cfg.taper};"
            f"kummer_constant={rep.extras['kummer_constant']!r}"
        )
        out.append(_record(cfg.command, cfg.source, rep, X=x, rho=r, epsilon=cfg.epsilon, detail=detail))
    return out


def _cmd_lseries(cfg, f):
    """Direct value (tapered series in the strip) against the continued value."""
    tol = config.FE_TOL if cfg.tol is None else cfg.tol
    k = int(f.weight_k)

    def one(s):
        cont = lseries_psi_continued(f, s)
        if 0.0 < s.real < 0.5 * (k - 1):
            direct = lseries_psi_direct(f, s, cfg.n_max, taper=cfg.taper)
            lhs, n_used, tail = direct.value, direct.n_used, direct.tail_estimate
        else:
            lhs, n_used, tail = cont.value, cont.n_used, cont.tail_estimate
        return lhs, cont.value, n_used, tail + cont.tail_estimate

    out = []
    for s, (lhs, rhs, n_used, tail) in zip(cfg.s, _map(cfg.threads, one, cfg.s)):
        abs_res = abs(lhs - rhs)
        rel = abs_res / max(abs(lhs), abs(rhs), 1e-300)
        in_strip = 0.0 < s.real < 0.5 * (k - 1)
        out.append(
            _record(
                cfg.command,
                cfg.source,
                s=_format_s(s),
                lhs_re=lhs.real,
                lhs_im=lhs.imag,
                rhs_re=rhs.real,
                rhs_im=rhs.imag,
                abs_residual=abs_res,
                rel_residual=rel,
                n_max=n_used,
                tail_bound=tail,
                detail="route=direct_vs_continued" if in_strip else "route=continued_only",
                **{"pass": bool(rel <= tol)},
            )
        )
    return out


def _cmd_scan(cfg, f):
    out = []
    main = riesz_main_term(f)
    for r in cfg.rho:
        scan = asymptotic_scan(f, r, cfg.X)
        prev = math.inf
        for x, res in scan.points:
            lhs = riesz_lhs(f, x, r)
            ok = res < prev and scan.slope <= 0.0
            prev = res
            out.append(
                _record(
                    cfg.command,
                    cfg.source,
                    X=x,
                    rho=r,
                    lhs_re=lhs.real,
                    lhs_im=lhs.imag,
                    rhs_re=main.real,
                    rhs_im=main.imag,
                    abs_residual=res,
                    rel_residual=res / max(abs(lhs), abs(main), 1e-300),
                    detail=f"slope={scan.slope!r}",
                    **{"pass": bool(ok)},
                )
            )
    return out


# ------------------------------------------------------------- selftest


def _rel(a, b):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b)) / np.maximum(np.abs(np.asarray(b)), 1e-300)))


def selftest_checks():
    """(name, measured error, tolerance) for each oracle check."""
    checks = []
    z = np.array([0.3 + 0.2j, 2.5 - 7.0j, 11.0 + 40.0j, -3.7 + 1.0j])
    lhs = log_gamma(z + 1.0)
    rhs = log_gamma(z) + np.log(z)
    err = float(np.max(np.abs(np.exp(1j * (lhs - rhs).imag) - 1.0) + np.abs((lhs - rhs).real)))
    checks.append(("gamma recurrence", err, 1e-12))

    x = np.geomspace(0.01, 200.0, 60)
    worst = 0.0
    for nu in (0.5, 1.0, 3.0, 5.5, 9.0):
        left = bessel_k(nu + 1.0, x, scaled=True)
        right = bessel_k(nu - 1.0, x, scaled=True) + 2.0 * nu / x * bessel_k(nu, x, scaled=True)
        worst = max(worst, _rel(left, right))
    checks.append(("Bessel K recurrence", worst, 1e-12))
    closed = np.sqrt(np.pi / (2.0 * x)) * np.exp(-x)
    checks.append(("K_{1/2} and K_{-1/2} closed form", max(_rel(bessel_k(0.5, x), closed), _rel(bessel_k(-0.5, x), closed)), 1e-13))

    worst = 0.0
    for a, b, zz in itertools.product((0.5, 1.5, 3.0, 5.5), (1.0, 2.5, 12.0), (0.1, 1.0, 5.0)):
        left = kummer_m(a, b, zz)
        right = np.exp(zz) * kummer_m(b - a, b, -zz)
        worst = max(worst, _rel(left, right))
    checks.append(("Kummer transformation", worst, 1e-10))

    phi = PhiFamily(1.1, 1)
    worst = 0.0
    for s, n in itertools.product((0.0, 1.0, 2.5), (0, 1, 3)):
        quad = integrate_semi_infinite(lambda t: phi(t) * t ** (s - 1.0) * np.exp(-2.0 * np.pi * n * t), 1e-14).value
        worst = max(worst, abs(quad - laplace_phi(phi, s, n)))
    checks.append(("phi Laplace transform vs quadrature", worst, 1e-10))

    worst = 0.0
    for s, n in itertools.product((1.5 + 0.0j, 2.0 + 5.0j, 4.0 + 0.0j), (1, 2, 4)):
        psi = PsiFamily(s, 12)
        quad = integrate_finite(lambda t: psi(t) * np.exp(-2.0 * np.pi * n * t), 0.0, 1.0, 1e-14).value
        worst = max(worst, abs(quad - laplace_psi(psi, n)))
    checks.append(("psi Laplace transform vs quadrature", worst, 1e-10))

    worst = 0.0
    for k, n in itertools.product((0, -1, -2), (1, 2, 5)):
        left = nonhol_integral(k, n, phi).value
        right = nonhol_integral_transformed(k, n, phi).value
        worst = max(worst, abs(left - right))
    checks.append(("incomplete-Gamma identity", worst, 1e-9))

    p = partition_numbers(200)
    series = series_eta_product(-1, 200)
    checks.append(("partition recurrence vs product", 0.0 if list(series) == p else 1.0, 0.0))
    prod = FormalPowerSeries(p) * series_eta_product(1, 200)
    checks.append(("p(n) series times eta product", 0.0 if prod == FormalPowerSeries.one(200) else 1.0, 0.0))

    tau = tau_coefficients(6)
    ok = tau[1] == 1 and tau[2] == -24 and tau[6] == tau[2] * tau[3]
    checks.append(("tau values and multiplicativity", 0.0 if ok else 1.0, 0.0))
    jc = j_coefficients(1)
    checks.append(("j coefficients", 0.0 if tuple(jc[:3]) == (1, 744, 196884) else 1.0, 0.0))

    d = delta_source()
    direct = lseries_psi_direct(d, 2.0).value
    cont = lseries_psi_continued(d, 2.0).value
    checks.append(("functional equation for Delta at s = 2", abs(direct - cont) / abs(cont), config.FE_TOL))
    return checks


def _cmd_selftest(cfg, f):
    out = []
    if f is not None:
        ok = f.check_growth(f.growth_check_to)
        out.append(_record(cfg.command, cfg.source, detail="source growth bound", **{"pass": bool(ok)}))
    for name, err, tol in selftest_checks():
        out.append(
            _record(cfg.command, cfg.source if f is not None else "", abs_residual=err, detail=name, **{"pass": bool(err <= tol)})
        )
    return out


_DISPATCH = {
    "verify-sf1": _cmd_sf1,
    "verify-partition": _cmd_partition,
    "verify-riesz": _cmd_riesz,
    "lseries-eval": _cmd_lseries,
    "asymptotic-scan": _cmd_scan,
    "selftest": _cmd_selftest,
}


# ------------------------------------------------------------- driver


def write_records(records, output: str, stream):
    if output == "json":
        json.dump(records, stream, indent=1)
        stream.write("\n")
        return
    writer = csv.DictWriter(stream, fieldnames=COLUMNS, lineterminator="\n")
    writer.writeheader()
    for rec in records:
        writer.writerow(rec)


def run(cfg: RunConfig, stream=None, err_stream=None) -> int:
    """Execute one command; returns the exit status."""
    stream = sys.stdout if stream is None else stream
    err_stream = sys.stderr if err_stream is None else err_stream
    try:
        if cfg.command == "selftest" and cfg.source == "":
            f = None
        else:
            f = resolve_source(cfg.source)
        if f is not None:
            validate(cfg, f)
        records = _DISPATCH[cfg.command](cfg, f)
    except (HypothesisError, DomainError) as exc:
        print(f"hypothesis violated: {exc}", file=err_stream)
        return 2
    except ConvergenceError as exc:
        print(f"no convergence: {exc}", file=err_stream)
        return 1
    write_records(records, cfg.output, stream)
    if cfg.command == "selftest":
        for rec in records:
            print(f"{'PASS' if rec['pass'] else 'FAIL'}  {rec['detail']}", file=err_stream)
    return 0 if all(rec["pass"] for rec in records) else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", choices=("csv", "json"), default="csv")
    common.add_argument("--threads", type=int, default=None, help=f"worker count (default ${config.THREADS_ENV} or 1)")
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--n-max", type=int, default=None)

    parser = argparse.ArgumentParser(prog="hmfsum", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-sf1", parents=[common], help="Bessel-kernel summation formula")
    p.add_argument("--source", default="delta")
    p.add_argument("--C", type=float, nargs="+", required=True)
    p.add_argument("--X", type=float, nargs="+", required=True)
    p.add_argument("--n-max-cap", type=int, default=None)

    p = sub.add_parser("verify-partition", parents=[common], help="partition-number case")
    p.add_argument("--X", type=float, nargs="+", required=True)
    p.add_argument("--eps", type=float, default=config.PARTITION_EPS)

    p = sub.add_parser("verify-riesz", parents=[common], help="Riesz-mean formula")
    p.add_argument("--source", default="delta")
    p.add_argument("--X", type=float, nargs="+", required=True)
    p.add_argument("--rho", type=float, nargs="+", default=[config.RIESZ_RHO])
    p.add_argument("--epsilon", type=float, default=config.RIESZ_EPSILON)
    p.add_argument("--T", type=float, default=None)
    p.add_argument("--no-taper", action="store_true", help="cut the n-sum sharply")

    p = sub.add_parser("lseries-eval", parents=[common], help="L-series at the psi test functions")
    p.add_argument("--source", default="delta")
    p.add_argument("--s", type=parse_complex, nargs="+", required=True)
    p.add_argument("--no-taper", action="store_true")

    p = sub.add_parser("asymptotic-scan", parents=[common], help="residual of the Riesz mean against its main term")
    p.add_argument("--source", default="delta")
    p.add_argument("--rho", type=float, nargs="+", default=[config.RIESZ_RHO])
    p.add_argument("--X", type=float, nargs="+", required=True)

    p = sub.add_parser("selftest", parents=[common], help="oracle suite")
    p.add_argument("--source", default="", help="optionally load and check a coefficient source")
    return parser


def config_from_args(args) -> RunConfig:
    threads = args.threads if args.threads is not None else config.default_threads()
    if threads < 1:
        raise HypothesisError("--threads must be at least 1")
    cfg = RunConfig(command=args.command, output=args.output, threads=threads, tol=args.tol, n_max=args.n_max)
    for name in ("source", "X", "C", "rho", "epsilon", "eps", "s", "T", "n_max_cap"):
        if hasattr(args, name):
            setattr(cfg, name, getattr(args, name))
    if getattr(args, "no_taper", False):
        cfg.taper = False
    if cfg.command == "verify-partition":
        cfg.source = "partition"
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
    except HypothesisError as exc:
        print(f"hypothesis violated: {exc}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
