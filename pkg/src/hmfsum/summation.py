"""Verifiers for the Bessel-kernel summation formula, its partition-number
specialisation, and the Riesz-mean formula with contour remainder.

Every verifier computes the two sides of an identity by separate code paths
and returns a :class:`SummationReport`.
"""

from __future__ import annotations

import cmath
import functools
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import config
from .errors import DomainError, HypothesisError, TruncationError
from .lseries import (
    PhiFamily,
    compensated_sum,
    log_tail_sum,
    lseries_psi_continued,
    smooth_taper,
)
from .modforms import CoefficientSource, partition_source
from .quadrature import ContourSpec, integrate_finite, integrate_vertical_line
from .specfun import (
    calibrate_kummer_tail_constant,
    kummer_m,
    log_bessel_k,
    log_bessel_k_bound,
    log_gamma,
)

REL_FLOOR = 1e-300


class SlowTailWarning(UserWarning):
    """The rate-based tail bound of an n-sum exceeds the requested tolerance."""


@dataclass(frozen=True)
class SummationReport:
    lhs: complex
    rhs: complex
    abs_residual: float
    rel_residual: float
    n_max_lhs: int
    n_max_rhs: int
    tail_bound_lhs: float
    tail_bound_rhs: float
    params: dict
    passed: bool
    extras: dict = field(default_factory=dict)

    @classmethod
    def build(cls, lhs, rhs, tol, n_max_lhs, n_max_rhs, tail_lhs, tail_rhs, params, extras=None):
        lhs = complex(lhs)
        rhs = complex(rhs)
        abs_res = abs(lhs - rhs)
        rel_res = abs_res / max(abs(lhs), abs(rhs), REL_FLOOR)
        return cls(
            lhs=lhs,
            rhs=rhs,
            abs_residual=float(abs_res),
            rel_residual=float(rel_res),
            n_max_lhs=int(n_max_lhs),
            n_max_rhs=int(n_max_rhs),
            tail_bound_lhs=float(tail_lhs),
            tail_bound_rhs=float(tail_rhs),
            params=dict(params),
            passed=bool(rel_res <= tol),
            extras=dict(extras or {}),
        )


@dataclass(frozen=True)
class SF1Params:
    C: float
    X: float

    def __post_init__(self):
        if not self.X > 0.0:
            raise HypothesisError("X must be positive")
        if not self.C > 0.0:
            raise HypothesisError("C must be positive")

    def D(self, n, N: int):
        return self.C + 2.0 * math.pi * np.asarray(n, dtype=float) / math.sqrt(N)

    def check(self, f: CoefficientSource):
        PhiFamily(self.C, f.level_N).check_source(f)


def _sum_log_terms(logs, phases):
    if logs.size == 0:
        return 0j
    return compensated_sum(phases * np.exp(logs))


def _minus_ell_logs(f: CoefficientSource, p: SF1Params):
    """log of (m!/l!) (4 pi sqrt(C)/sqrt(N))^l for l = 0..m, m = -k."""
    m = -int(f.weight_k)
    base = math.log(4.0 * math.pi * math.sqrt(p.C) / math.sqrt(f.level_N))
    return [math.lgamma(m + 1.0) - math.lgamma(ell + 1.0) + ell * base for ell in range(m + 1)]


# ----------------------------------------------------------- SF1 sides


def sf1_lhs(f: CoefficientSource, p: SF1Params, n_max: int) -> complex:
    """Kernel side: sum c+(n) K_0(2 sqrt(D_n (C + sqrt(N) X))) plus the c- double sum."""
    p.check(f)
    N = f.level_N
    rx = p.C + math.sqrt(N) * p.X
    n, logc, sign = f.log_terms(n_max)
    total = 0j
    if n.size:
        x = 2.0 * np.sqrt(p.D(n, N) * rx)
        total += _sum_log_terms(logc + log_bessel_k(0, x), sign)
    if not f.is_weakly_holomorphic:
        nm, logm, signm = f.log_terms(n_max, minus=True)
        if nm.size:
            dn = p.D(nm, N)
            x = 2.0 * np.sqrt(dn * rx)
            grow = 0.5 * math.log(1.0 + math.sqrt(N) * p.X / p.C)
            for ell, lc in enumerate(_minus_ell_logs(f, p)):
                logs = lc + ell * grow + logm + ell * (np.log(nm) - 0.5 * np.log(dn)) + log_bessel_k(ell, x)
                total += _sum_log_terms(logs, signm)
    return total


def sf1_rhs(f: CoefficientSource, p: SF1Params, n_max: int) -> complex:
    """Partner side: i^k C^{k/2} sum d+(n) (sqrt(N) X + D_n)^{-k/2} K_k(2 sqrt(C (D_n + sqrt(N) X))) plus the d- double sum."""
    p.check(f)
    N = f.level_N
    k = f.weight_k
    kf = float(k)
    shift = math.sqrt(N) * p.X
    phase = cmath.exp(0.5j * math.pi * kf) * f.fricke_multiplier
    log_pref = 0.5 * kf * math.log(p.C)
    n, logc, sign = f.log_terms(n_max)
    total = 0j
    if n.size:
        w = p.D(n, N) + shift
        y = 2.0 * np.sqrt(p.C * w)
        total += _sum_log_terms(log_pref + logc - 0.5 * kf * np.log(w) + log_bessel_k(k, y), sign)
    if not f.is_weakly_holomorphic:
        nm, logm, signm = f.log_terms(n_max, minus=True)
        if nm.size:
            w = p.D(nm, N) + shift
            y = 2.0 * np.sqrt(p.C * w)
            for ell, lc in enumerate(_minus_ell_logs(f, p)):
                logs = log_pref + lc + logm + ell * np.log(nm) - 0.5 * (ell + kf) * np.log(w)
                total += _sum_log_terms(logs + log_bessel_k(ell + k, y), signm)
    return phase * total


def _minus_tail_log(f, p, first, kernel):
    """log of the c- tail bound: B n^deg times the l-sum of kernel bounds."""
    ells = _minus_ell_logs(f, p)

    def log_term(n):
        parts = np.stack([lc + kernel(ell, n) for ell, lc in enumerate(ells)])
        peak = parts.max(axis=0)
        return f.log_minus_B + f.minus_degree * np.log(n) + peak + np.log(np.exp(parts - peak).sum(axis=0))

    return log_tail_sum(log_term, first)


def sf1_tail_bounds(f: CoefficientSource, p: SF1Params, n_max: int) -> tuple[float, float]:
    """Bounds on the omitted terms n > n_max of both sides.

    Coefficients are bounded by A e^{C_f sqrt n} (and B n^deg for c-),
    the Bessel functions by the explicit majorant of
    :func:`log_bessel_k_bound`; only indices on the source's support count.
    """
    N = f.level_N
    kf = float(f.weight_k)
    rx = p.C + math.sqrt(N) * p.X
    shift = math.sqrt(N) * p.X
    start = int(f.support(n_max + 1, n_max + f.support_modulus)[0])
    mod = f.support_modulus

    def lhs_log(n):
        x = 2.0 * np.sqrt(p.D(n, N) * rx)
        return f.log_growth_A + f.growth_C_f * np.sqrt(n) + log_bessel_k_bound(0, x)

    def rhs_log(n):
        w = p.D(n, N) + shift
        y = 2.0 * np.sqrt(p.C * w)
        return (
            math.log(abs(f.fricke_multiplier))
            + f.log_growth_A
            + f.growth_C_f * np.sqrt(n)
            + 0.5 * kf * (math.log(p.C) - np.log(w))
            + log_bessel_k_bound(f.weight_k, y)
        )

    tl = log_tail_sum(lhs_log, start, mod)
    tr = log_tail_sum(rhs_log, start, mod)
    if not f.is_weakly_holomorphic:
        grow = 0.5 * math.log(1.0 + shift / p.C)

        def lhs_kernel(ell, n):
            dn = p.D(n, N)
            x = 2.0 * np.sqrt(dn * rx)
            return ell * grow + ell * (np.log(n) - 0.5 * np.log(dn)) + log_bessel_k_bound(ell, x)

        def rhs_kernel(ell, n):
            w = p.D(n, N) + shift
            y = 2.0 * np.sqrt(p.C * w)
            return (
                0.5 * kf * math.log(p.C)
                + ell * np.log(n)
                - 0.5 * (ell + kf) * np.log(w)
                + log_bessel_k_bound(ell + f.weight_k, y)
            )

        tl = np.logaddexp(tl, _minus_tail_log(f, p, n_max + 1, lhs_kernel))
        tr = np.logaddexp(tr, math.log(abs(f.fricke_multiplier)) + _minus_tail_log(f, p, n_max + 1, rhs_kernel))
    return _exp_or_inf(tl), _exp_or_inf(tr)


def _exp_or_inf(log_value):
    return math.exp(log_value) if log_value < 709.0 else math.inf


def verify_sf1(
    f: CoefficientSource,
    p: SF1Params,
    tol: float = config.SF1_TOL,
    n_max: int | None = None,
    n_max_cap: int | None = None,
) -> SummationReport:
    """Check the Bessel-kernel summation formula for one (C, X).

    Without ``n_max`` the truncation doubles from 64 until both tail bounds
    are below tol/4 relative to the larger side.  If the cap is reached
    first, :class:`TruncationError` is raised with the report at the cap
    attached.
    """
    p.check(f)
    cap = config.SF1_N_MAX_CAP if n_max_cap is None else int(n_max_cap)
    if f.n_cap is not None:
        cap = min(cap, f.n_cap)
    params = {"C": p.C, "X": p.X, "source": f.name}

    def report_at(m):
        lhs = sf1_lhs(f, p, m)
        rhs = sf1_rhs(f, p, m)
        tl, tr = sf1_tail_bounds(f, p, m)
        return SummationReport.build(lhs, rhs, tol, m, m, tl, tr, params)

    if n_max is not None:
        return report_at(int(n_max))
    m = min(64, cap)
    while True:
        rep = report_at(m)
        scale = max(abs(rep.lhs), abs(rep.rhs), REL_FLOOR)
        if max(rep.tail_bound_lhs, rep.tail_bound_rhs) <= 0.25 * tol * scale:
            return rep
        if m >= cap:
            raise TruncationError(
                f"tail bounds {rep.tail_bound_lhs:.3e}, {rep.tail_bound_rhs:.3e} still exceed "
                f"tol/4 relative at the cap n_max = {cap}",
                report=rep,
            )
        m = min(2 * m, cap)


# --------------------------------------------------------- partitions


def partition_constant(eps: float) -> float:
    """C = pi/12 + eps, the smallest admissible constant plus the shift."""
    if not eps > 0.0:
        raise HypothesisError("the partition shift eps must be positive")
    return math.pi / 12.0 + eps


def partition_rhs_general(X: float, eps: float, n_max: int) -> float:
    """(sqrt(pi)/2) C^{-1/2} sum_{n<=n_max} p(n) exp(-2 sqrt(C (24X + 2 pi n + eps)))."""
    from .modforms import partition_numbers

    C = partition_constant(eps)
    p = partition_numbers(n_max)
    n = np.arange(n_max + 1, dtype=float)
    logs = np.array([math.log(v) for v in p]) - 2.0 * np.sqrt(C * (24.0 * X + 2.0 * math.pi * n + eps))
    return 0.5 * math.sqrt(math.pi / C) * math.fsum(np.exp(logs))


def partition_rhs_extra_factor(X: float, eps: float, n_max: int) -> float:
    """The right side with the extra factor (24X + 2 pi n + eps)^{-1/2}."""
    from .modforms import partition_numbers

    C = partition_constant(eps)
    p = partition_numbers(n_max)
    n = np.arange(n_max + 1, dtype=float)
    w = 24.0 * X + 2.0 * math.pi * n + eps
    logs = np.array([math.log(v) for v in p]) - 0.5 * np.log(w) - 2.0 * np.sqrt(C * w)
    return 0.5 * math.sqrt(math.pi / C) * math.fsum(np.exp(logs))


def verify_partition(
    X: float,
    eps: float = config.PARTITION_EPS,
    n_max: int = 300,
    tol: float = config.SF1_TOL,
) -> SummationReport:
    """Partition-number case of the Bessel-kernel formula.

    ``n_max`` bounds the partition index n (source index 24n - 1).  Both
    sides come from the generic formula with f = 1/eta(24z); the report's
    extras also give the residual of the variant carrying the extra factor
    (24X + 2 pi n + eps)^{-1/2}, and say which variant satisfies the
    identity.
    """
    f = partition_source()
    p = SF1Params(partition_constant(eps), X)
    m = 24 * n_max - 1
    lhs = sf1_lhs(f, p, m)
    rhs = sf1_rhs(f, p, m)
    tl, tr = sf1_tail_bounds(f, p, m)
    extra = partition_rhs_extra_factor(X, eps, n_max)
    extra_rel = abs(lhs - extra) / max(abs(lhs), abs(extra), REL_FLOOR)
    rep = SummationReport.build(
        lhs,
        rhs,
        tol,
        n_max,
        n_max,
        tl,
        tr,
        {"C": p.C, "X": X, "eps": eps, "source": f.name},
    )
    better = "general" if rep.rel_residual < extra_rel else "extra_factor"
    extras = {"extra_factor_rhs": extra, "extra_factor_rel_residual": float(extra_rel), "consistent_variant": better}
    return SummationReport(**{**rep.__dict__, "extras": extras})


# ----------------------------------------------------------- Riesz means


def _require_riesz_source(f: CoefficientSource):
    if not f.is_cusp_form or f.weight_k.denominator != 1 or int(f.weight_k) % 2 or f.weight_k < 2:
        raise DomainError("Riesz formula needs a holomorphic cusp form of even weight k >= 2")


def riesz_lhs(f: CoefficientSource, X: float, rho: float) -> complex:
    """sum_{1 <= n < X/(2 pi)} d(n) e^{-2 pi n} (2 pi n)^{-(k-1)/2} (1 - 2 pi n/X)^rho."""
    _require_riesz_source(f)
    if not X > 0.0:
        raise DomainError("riesz_lhs: X must be positive")
    if not rho > 1.0:
        raise HypothesisError("rho must exceed 1")
    k = float(f.weight_k)
    top = math.ceil(X / (2.0 * math.pi)) - 1
    if top < 1:
        return 0j
    n, logc, sign = f.log_terms(top, n_min=1)
    n = n[2.0 * math.pi * n < X]
    if n.size == 0:
        return 0j
    sign = sign[: n.size] * f.fricke_multiplier
    z = 2.0 * math.pi * n
    logs = logc[: n.size] - z - 0.5 * (k - 1.0) * np.log(z) + rho * np.log1p(-z / X)
    return _sum_log_terms(logs, sign)


def riesz_main_term(f: CoefficientSource) -> complex:
    """i^{-k} N^{k/2-1} L_f(psi_{(k-1)/2}), always through the Fricke side."""
    _require_riesz_source(f)
    k = float(f.weight_k)
    val = lseries_psi_continued(f, 0.5 * (k - 1.0)).value
    return cmath.exp(-0.5j * math.pi * k) * f.level_N ** (0.5 * k - 1.0) * val


@dataclass(frozen=True)
class RemainderValue:
    value: complex
    n_used: int
    quad_error: float
    tail_estimate: float
    tail_bound: float


def contour_height(n: int) -> float:
    """Default truncation height of the n-th contour integral."""
    return config.RIESZ_T_SLOPE * math.sqrt(2.0 * math.pi * n) + config.RIESZ_T_OFFSET


@functools.lru_cache(maxsize=2048)
def _kummer_line(n: int, k: int, eps: float, h: float, count: int):
    """log(e^{-z} M((k-1)/2 + s, k, z)) at s = -eps + i h j, j < count, z = 2 pi n."""
    t = h * np.arange(count)
    out = kummer_m(0.5 * (k - 1) - eps + 1j * t, k, 2.0 * math.pi * n, scaled=True, log=True)
    out.setflags(write=False)
    return out


@functools.lru_cache(maxsize=8192)
def _kummer_point(n: int, k: int, s: complex) -> complex:
    return complex(kummer_m(0.5 * (k - 1) + s, k, 2.0 * math.pi * n, scaled=True, log=True))


def _remainder_integrand(n, k, X, rho, eps, h):
    log_x = math.log(X)

    def g(s):
        s = np.asarray(s, dtype=complex)
        if s.size > 8 and abs(s[0].imag) == 0.0 and abs(s[1].imag - h) < 1e-12:
            lk = _kummer_line(n, k, eps, h, s.size)
        else:
            lk = np.array([_kummer_point(n, k, complex(v)) for v in s.ravel()]).reshape(s.shape)
        logs = s * log_x + log_gamma(0.5 * (k + 1) - s) + log_gamma(s) - log_gamma(s + rho + 1.0) + lk
        return np.exp(logs)

    return g


def _line_integral(n, k, X, spec: ContourSpec):
    h = 1.0 / spec.nodes_per_unit
    T = spec.T if spec.T is not None else contour_height(n)
    local = ContourSpec(spec.epsilon, T, spec.rho, spec.nodes_per_unit)
    g = _remainder_integrand(n, k, X, spec.rho, spec.epsilon, h)
    return integrate_vertical_line(g, local, conj_symmetric=True)


@functools.lru_cache(maxsize=32)
def _gamma_ratio_integral(k: int, rho: float, eps: float) -> float:
    """(1/2 pi) times the integral over the line Re s = -eps of
    |Gamma((k+1)/2 - s) Gamma(s) / (Gamma(s+rho+1) Gamma((k-1)/2 + s))|.

    The integrand behaves like |t|^{2 eps - rho}; the part beyond |t| = 400
    is added from that power law, with the constant fitted at t = 400.
    """
    def mag(t):
        s = -eps + 1j * np.asarray(t)
        return np.exp(
            (log_gamma(0.5 * (k + 1) - s) + log_gamma(s) - log_gamma(s + rho + 1.0) - log_gamma(0.5 * (k - 1) + s)).real
        )

    body = integrate_finite(mag, 0.0, 400.0, 1e-10).value
    p = 2.0 * eps - rho
    edge = float(mag(np.array([400.0]))[0])
    tail = edge * 400.0 / (-p - 1.0) if p < -1.0 else math.inf
    return 2.0 * (body + tail) / (2.0 * math.pi)


def riesz_tail_bound(f: CoefficientSource, X: float, spec: ContourSpec, n_max: int, eps2: float = None) -> float:
    """Rate-based bound on the omitted n > n_max terms of the remainder sum.

    |c(n)| <= A' n^{(k-1)/2 + eps2} with A' fitted on the materialized range,
    |e^{-z} M(a, k, z)| <= C z^{a_r - k + eps2} / |Gamma(a)| from the Kummer
    growth majorant, and the remaining Gamma ratio integrated once.  The
    terms then decay like n^{-1 - eps + 2 eps2}.
    """
    eps2 = config.KUMMER_TAIL_EPS if eps2 is None else eps2
    k = int(f.weight_k)
    a_r = 0.5 * (k - 1) - spec.epsilon
    n, logc, _ = f.log_terms(n_max, n_min=1)
    if n.size == 0:
        return 0.0
    log_a = float(np.max(logc - (0.5 * (k - 1) + eps2) * np.log(n)))
    # For n > n_max the argument 2 pi n exceeds k - a_r - eps2, where the
    # majorant is the pure power C e^z z^p.
    log_c = math.log(calibrate_kummer_tail_constant(a_r, float(k), eps2))
    p_exp = a_r - k + eps2
    rate = 0.5 * (k - 1) + eps2 + p_exp
    if rate >= -1.0:
        return math.inf
    log_j = math.log(_gamma_ratio_integral(k, spec.rho, spec.epsilon))
    pref = math.lgamma(spec.rho + 1.0) - math.lgamma(k) + (0.5 * k - 1.0) * math.log(f.level_N)
    m = float(n_max)
    log_sum = (rate + 1.0) * math.log(m) - math.log(-(rate + 1.0))
    total = pref + log_a + log_c + log_j + p_exp * math.log(2.0 * math.pi) - spec.epsilon * math.log(X) + log_sum
    return _exp_or_inf(total)


def riesz_remainder_details(
    f: CoefficientSource,
    X: float,
    spec: ContourSpec = ContourSpec(),
    n_max: int | None = None,
    taper: bool = True,
    threads: int = 1,
    tol: float = config.RIESZ_TOL,
) -> RemainderValue:
    """Contour remainder of the Riesz formula, with its error budget.

    Gamma(rho+1) N^{k/2-1} i^{-k} / Gamma(k) times the sum over n of c(n)
    times (1/(2 pi i)) times the integral over Re s = -eps of
    X^s Gamma((k+1)/2 - s) Gamma(s) / Gamma(s+rho+1) e^{-2 pi n} M((k-1)/2 + s, k, 2 pi n).

    The n-sum is weighted by smooth_taper(n / n_max) unless ``taper`` is
    False.  Per-n integrals may run on ``threads`` workers; they are reduced
    in ascending n with a correctly rounded sum, so the value does not depend
    on the worker count.
    """
    _require_riesz_source(f)
    k = int(f.weight_k)
    if not spec.epsilon < min(1.0, 0.5 * (k - 1)):
        raise HypothesisError("epsilon must lie in (0, min(1, (k-1)/2))")
    if not X > 0.0:
        raise DomainError("riesz_remainder: X must be positive")
    n_max = config.RIESZ_N_MAX if n_max is None else int(n_max)
    n, logc, sign = f.log_terms(n_max, n_min=1)
    ns = [int(v) for v in n]

    def one(m):
        return _line_integral(m, k, X, spec)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, ns))
    else:
        results = [one(m) for m in ns]
    vals = np.array([r.value for r in results], dtype=float)
    errs = np.array([r.abs_error_estimate for r in results], dtype=float)
    coeff = sign * np.exp(logc)
    pref = (
        math.exp(math.lgamma(spec.rho + 1.0) - math.lgamma(k))
        * f.level_N ** (0.5 * k - 1.0)
        * cmath.exp(-0.5j * math.pi * k)
    )
    if taper:
        w = smooth_taper(n / n_max)
        value = pref * compensated_sum(coeff * vals * w)
        half = n_max // 2
        sel = n <= half
        coarse = pref * compensated_sum(coeff[sel] * vals[sel] * smooth_taper(n[sel] / half))
        estimate = abs(value - coarse)
    else:
        w = np.ones(n.size)
        value = pref * compensated_sum(coeff * vals)
        estimate = math.nan
    quad = abs(pref) * math.fsum(np.abs(coeff) * w * errs)
    bound = riesz_tail_bound(f, X, spec, n_max)
    return RemainderValue(complex(value), n_max, float(quad), float(estimate), float(bound))


def riesz_remainder(f, X, spec: ContourSpec = ContourSpec(), n_max=None, **kwargs) -> complex:
    """Value of the contour remainder (see :func:`riesz_remainder_details`)."""
    return riesz_remainder_details(f, X, spec, n_max, **kwargs).value


def verify_riesz(
    f: CoefficientSource,
    X: float,
    spec: ContourSpec = ContourSpec(),
    tol: float = config.RIESZ_TOL,
    n_max: int | None = None,
    taper: bool = True,
    threads: int = 1,
) -> SummationReport:
    """Check riesz_lhs(X) = main term + contour remainder.

    Passes when the relative residual is at most ``tol``.  The report
    carries the rate-based n-tail bound as ``tail_bound_rhs``; the smooth
    cut-off's a-posteriori estimate and the quadrature error sit in
    ``extras``.  A :class:`SlowTailWarning` is issued when the rate-based
    bound exceeds the tolerance.
    """
    lhs = riesz_lhs(f, X, spec.rho)
    main = riesz_main_term(f)
    rem = riesz_remainder_details(f, X, spec, n_max, taper=taper, threads=threads, tol=tol)
    rhs = main + rem.value
    scale = max(abs(lhs), abs(rhs), REL_FLOOR)
    if not rem.tail_bound <= tol * scale:
        warnings.warn(
            f"rate-based n-tail bound {rem.tail_bound:.3e} exceeds tol * scale = {tol * scale:.3e}",
            SlowTailWarning,
            stacklevel=2,
        )
    n_lhs = max(0, math.ceil(X / (2.0 * math.pi)) - 1)
    params = {"X": X, "rho": spec.rho, "epsilon": spec.epsilon, "T": spec.T, "source": f.name}
    extras = {
        "main_term": main,
        "remainder": rem.value,
        "tail_estimate": rem.tail_estimate,
        "quad_error": rem.quad_error,
        "taper": taper,
        "kummer_constant": calibrate_kummer_tail_constant(
            0.5 * (float(f.weight_k) - 1.0) - spec.epsilon, float(f.weight_k), config.KUMMER_TAIL_EPS
        ),
    }
    return SummationReport.build(lhs, rhs, tol, n_lhs, rem.n_used, 0.0, rem.tail_bound, params, extras)


@dataclass(frozen=True)
class ScanResult:
    points: list
    slope: float


def asymptotic_scan(f: CoefficientSource, rho: float, X_grid) -> ScanResult:
    """residual(X) = |riesz_lhs(X) - main term| on an increasing grid, and
    the least-squares slope of log residual against log X."""
    grid = [float(x) for x in X_grid]
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise DomainError("asymptotic_scan: X_grid must be strictly increasing")
    main = riesz_main_term(f)
    points = [(x, float(abs(riesz_lhs(f, x, rho) - main))) for x in grid]
    positive = [(x, r) for x, r in points if r > 0.0]
    if len(positive) >= 2:
        lx = np.log([x for x, _ in positive])
        lr = np.log([r for _, r in positive])
        slope = float(np.polyfit(lx, lr, 1)[0])
    else:
        slope = 0.0
    return ScanResult(points, slope)
