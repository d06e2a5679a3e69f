"""L-series of a coefficient source evaluated at the two test-function
families and the functional equation linking the psi-family to the
Fricke partner.

phi family:  phi(x) = exp(-C (sqrt(N) x + 1/(sqrt(N) x))),  phi_s(x) = phi(x) x^{s-1}.
psi family:  psi_s(t) = (1-t)^{s-1} t^{k-s-1} / Gamma(s) on (0, 1).
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np

from . import config
from .errors import DomainError, HypothesisError
from .modforms import CoefficientSource
from .quadrature import integrate_semi_infinite
from .specfun import (
    incomplete_gamma_elem,
    kummer_m,
    log_bessel_k,
    log_bessel_k_bound,
    log_gamma,
)


class Route(enum.Enum):
    DIRECT = "direct"
    FRICKE_CONTINUED = "fricke_continued"


@dataclass(frozen=True)
class LSeriesValue:
    value: complex
    n_used: int
    tail_estimate: float
    route: Route


@dataclass(frozen=True)
class PhiFamily:
    C: float
    level_N: int = 1

    def __post_init__(self):
        if not self.C > 0.0:
            raise DomainError("PhiFamily: C must be positive")
        if int(self.level_N) != self.level_N or self.level_N < 1:
            raise DomainError("PhiFamily: level must be a positive integer")

    def threshold(self, f: CoefficientSource) -> float:
        root_n = math.sqrt(self.level_N)
        return max(f.growth_C_f ** 2 * root_n / (8.0 * math.pi), 2.0 * math.pi * f.n0 / root_n)

    def check_source(self, f: CoefficientSource):
        """Raise HypothesisError unless C > max(C_f^2 sqrt(N)/(8 pi), 2 pi n0/sqrt(N))."""
        if f.level_N != self.level_N:
            raise HypothesisError(f"test function has level {self.level_N}, source has level {f.level_N}")
        bound = self.threshold(f)
        if not self.C > bound:
            raise HypothesisError(
                f"C must exceed max(C_f^2 sqrt(N)/(8 pi), 2 pi n0/sqrt(N)) = {bound:.12g}; got C = {self.C}"
            )

    def __call__(self, x):
        r = math.sqrt(self.level_N)
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", over="ignore", under="ignore"):
            return np.exp(-self.C * (r * x + 1.0 / (r * x)))


@dataclass(frozen=True)
class PsiFamily:
    s: complex
    weight_k: int

    def __post_init__(self):
        if int(self.weight_k) != self.weight_k or self.weight_k < 2 or self.weight_k % 2:
            raise DomainError("PsiFamily: weight must be an even positive integer")
        object.__setattr__(self, "s", complex(self.s))

    @property
    def in_strip(self) -> bool:
        return 0.0 < self.s.real < (self.weight_k - 1) / 2.0

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        inside = (t > 0.0) & (t < 1.0)
        tt = np.where(inside, t, 0.5)
        val = np.exp(
            (self.s - 1.0) * np.log1p(-tt) + (self.weight_k - self.s - 1.0) * np.log(tt) - log_gamma(self.s)
        )
        return np.where(inside, val, 0.0)


def smooth_taper(x):
    """C-infinity cut-off: 1 on [0, 1/2], 0 on [1, inf), smooth in between."""
    x = np.asarray(x, dtype=float)
    y = np.clip(2.0 * x - 1.0, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        fa = np.where(y < 1.0, np.exp(-1.0 / np.where(y < 1.0, 1.0 - y, 1.0)), 0.0)
        fb = np.where(y > 0.0, np.exp(-1.0 / np.where(y > 0.0, y, 1.0)), 0.0)
    return fa / (fa + fb)


def compensated_sum(values) -> complex:
    """Correctly rounded sum of the real and imaginary parts, order-independent."""
    values = np.asarray(values)
    if np.iscomplexobj(values):
        return complex(math.fsum(values.real), math.fsum(values.imag))
    return complex(math.fsum(values), 0.0)


def log_tail_sum(log_term, first: int, modulus: int = 1, max_index: int = 10 ** 10) -> float:
    """log of sum over n >= first (step ``modulus``) of exp(log_term(n)).

    Chunks of doubling length are added until the terms have fallen more
    than e^{80} below the running total and are decreasing; the remaining
    terms (which decay at least like e^{-b sqrt(n)} under the hypotheses of
    every caller) are then negligible.  Returns +inf if ``max_index`` is
    reached first, or if a term bound is +inf or NaN.
    """
    total = -math.inf
    start = int(first)
    chunk = 1024
    while start <= max_index:
        n = np.arange(start, start + chunk * modulus, modulus, dtype=np.int64)
        lt = np.asarray(log_term(n.astype(float)), dtype=float)
        peak = float(lt.max())
        if peak == -math.inf:
            # A zero growth constant: every omitted term is bounded by 0.
            return float(total)
        total = np.logaddexp(total, peak + math.log(np.exp(lt - peak).sum()))
        if lt[-1] < total - 80.0 and lt[-1] < lt[0]:
            return float(total)
        start = int(n[-1]) + modulus
        chunk = min(2 * chunk, 1 << 20)
    return math.inf


# ------------------------------------------------------------ phi family


def log_laplace_phi(phi: PhiFamily, s: float, n):
    """log of the Laplace transform of phi_s at 2 pi n (see laplace_phi)."""
    r = math.sqrt(phi.level_N)
    n = np.asarray(n, dtype=float)
    a = phi.C * r + 2.0 * math.pi * n
    if np.any(a <= 0.0):
        raise DomainError("laplace_phi: need C sqrt(N) + 2 pi n > 0")
    x = 2.0 * np.sqrt(phi.C * (phi.C + 2.0 * math.pi * n / r))
    return math.log(2.0) + 0.5 * s * np.log((phi.C / r) / a) + log_bessel_k(s, x)


def _check_real_order(s):
    if isinstance(s, complex) and s.imag != 0.0:
        raise DomainError("laplace_phi: s must be real")
    return float(s.real if isinstance(s, complex) else s)


def laplace_phi(phi: PhiFamily, s: float, n):
    """Closed-form Laplace transform of phi_s at 2 pi n.

    2 ((C/sqrt N)/(C sqrt N + 2 pi n))^{s/2} K_s(2 sqrt(C (C + 2 pi n/sqrt N))),
    for real s in (1/2)Z (the orders the Bessel routine supports).
    """
    s = _check_real_order(s)
    out = np.exp(log_laplace_phi(phi, s, n))
    return out.item() if out.ndim == 0 else out


def _log_laplace_phi_bound(phi, s, n):
    r = math.sqrt(phi.level_N)
    a = phi.C * r + 2.0 * math.pi * n
    x = 2.0 * np.sqrt(phi.C * (phi.C + 2.0 * math.pi * n / r))
    return math.log(2.0) + 0.5 * s * np.log((phi.C / r) / a) + log_bessel_k_bound(s, x)


def _nonhol_kernel_log(m: int, n: int, phi: PhiFamily, s: float, y):
    """log of Gamma(1+m, 4 pi n y) e^{2 pi n y} phi(y) y^{s-1}."""
    r = math.sqrt(phi.level_N)
    y = np.asarray(y, dtype=float)
    return (
        incomplete_gamma_elem(m, 4.0 * math.pi * n * y, log=True)
        + 2.0 * math.pi * n * y
        - phi.C * (r * y + 1.0 / (r * y))
        + (s - 1.0) * np.log(y)
    )


def nonhol_integral(k: int, n: int, phi: PhiFamily, s: float = 1.0, tol: float = 1e-13):
    """Integral over (0, inf) of Gamma(1-k, 4 pi n y) e^{2 pi n y} phi_s(y) dy, k in -N_0."""
    if int(k) != k or k > 0:
        raise DomainError("nonhol_integral: k must be a non-positive integer")
    m = -int(k)

    def integrand(y):
        with np.errstate(divide="ignore", over="ignore", under="ignore", invalid="ignore"):
            return np.exp(_nonhol_kernel_log(m, n, phi, s, y))

    return integrate_semi_infinite(integrand, tol, scale=1.0 / math.sqrt(phi.level_N))


def nonhol_integral_transformed(k: int, n: int, phi: PhiFamily, tol: float = 1e-13):
    """(4 pi n)^{1-k} times the integral over t > 0 of
    (L phi_{2-k})(2 pi n (2t+1)) / (1+t)^k.

    Equals :func:`nonhol_integral` at s = 1; the inner transform uses the
    Bessel closed form, the outer integral the exp-sinh rule.
    """
    if int(k) != k or k > 0:
        raise DomainError("nonhol_integral_transformed: k must be a non-positive integer")
    k = int(k)

    def integrand(t):
        # Beyond t = 1e12 the transform is below exp(-1e6); skip those nodes.
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        ok = t < 1e12
        out[ok] = np.exp(log_laplace_phi(phi, 2.0 - k, n * (2.0 * t[ok] + 1.0)) - k * np.log1p(t[ok]))
        return out

    res = integrate_semi_infinite(integrand, tol)
    factor = (4.0 * math.pi * n) ** (1 - k)
    return type(res)(factor * res.value, factor * res.abs_error_estimate, res.nodes_used)


def lseries_phi(f: CoefficientSource, phi: PhiFamily, s: float, n_max: int) -> LSeriesValue:
    """L_f(phi_s) = L^1 + L^2 truncated at n_max.

    L^1 = sum c+(n) (L phi_s)(2 pi n) with the Bessel closed form; L^2 sums
    c-(n) times the quadrature of Gamma(1-k, 4 pi n y) e^{2 pi n y} phi_s(y).
    The tail estimate bounds the omitted terms by A e^{C_f sqrt n} against
    the Bessel majorant (and, for c-, by B n^deg against a Laplace majorant
    of the incomplete-Gamma kernel).
    """
    s = _check_real_order(s)
    phi.check_source(f)
    n, logc, sign = f.log_terms(n_max)
    terms = sign * np.exp(logc + log_laplace_phi(phi, s, n)) if n.size else np.zeros(0)
    value = compensated_sum(terms)
    modulus = f.support_modulus
    start = f.support(n_max + 1, n_max + modulus)[0]
    log_tail = log_tail_sum(
        lambda m: f.log_growth_A + f.growth_C_f * np.sqrt(m) + _log_laplace_phi_bound(phi, s, m),
        start,
        modulus,
    )
    tail = math.exp(log_tail) if log_tail < 700 else math.inf

    if not f.is_weakly_holomorphic:
        kk = f.k
        m_order = -int(kk)
        nm, logcm, signm = f.log_terms(n_max, minus=True)
        parts = [
            sg * math.exp(lc) * nonhol_integral(int(kk), int(nn), phi, s).value
            for nn, lc, sg in zip(nm, logcm, signm)
        ]
        value += compensated_sum(np.array(parts, dtype=complex)) if parts else 0.0
        # Gamma(1+m, x) e^{x/2} <= m! 4^{m+1}/3 e^{-x/4}, so each omitted
        # integral is at most that constant times (L phi_s)(pi n).
        log_cm = math.lgamma(m_order + 1.0) + (m_order + 1) * math.log(4.0) - math.log(3.0)
        log_tail_minus = log_tail_sum(
            lambda m: f.log_minus_B
            + f.minus_degree * np.log(m)
            + log_cm
            + _log_laplace_phi_bound(phi, s, 0.5 * m),
            n_max + 1,
        )
        tail += math.exp(log_tail_minus) if log_tail_minus < 700 else math.inf
    return LSeriesValue(value, int(n_max), float(tail), Route.DIRECT)


# ------------------------------------------------------------ psi family


def _log_laplace_psi(s: complex, k: int, n):
    n = np.asarray(n, dtype=float)
    return log_gamma(k - s) - log_gamma(float(k)) + kummer_m(s, k, 2.0 * math.pi * n, scaled=True, log=True)


def laplace_psi(psi: PsiFamily, n):
    """Laplace transform of psi_s at 2 pi n: Gamma(k-s)/Gamma(k) e^{-2 pi n} M(s, k, 2 pi n)."""
    out = np.exp(_log_laplace_psi(psi.s, psi.weight_k, n))
    return complex(out) if np.ndim(out) == 0 else out


def laplace_psi_fricke(s: complex, N: int, y):
    """Laplace transform of the Fricke image of psi_s: e^{-y/N}/N (y/N)^{-s}."""
    y = np.asarray(y, dtype=float)
    if np.any(~(y > 0.0)):
        raise DomainError("laplace_psi_fricke: y must be positive")
    out = np.exp(-y / N - complex(s) * np.log(y / N)) / N
    return complex(out) if out.ndim == 0 else out


def _require_cusp_form(f: CoefficientSource, what: str):
    if not f.is_cusp_form:
        raise DomainError(f"{what}: source must be a holomorphic cusp form (n0 = 0, c(0) = 0, no c-)")
    if f.weight_k.denominator != 1 or int(f.weight_k) % 2 or f.weight_k < 2:
        raise DomainError(f"{what}: weight must be an even positive integer")


def lseries_psi_direct(f: CoefficientSource, s, n_max: int | None = None, taper: bool = True) -> LSeriesValue:
    """L_f(psi_s) = sum_{n>=1} c(n) Gamma(k-s)/Gamma(k) e^{-2 pi n} M(s, k, 2 pi n).

    Valid in the strip 0 < Re s < (k-1)/2 where the series converges
    absolutely.  With ``taper`` (the default) the terms are weighted by
    smooth_taper(n / n_max); since the summand has an asymptotic expansion
    in powers of n times c(n), and those Dirichlet series are entire, the
    weighted sum converges faster than any power of n_max.  The tail
    estimate is then |S(n_max) - S(n_max/2)|.  Without taper the sum is cut
    sharply and the tail estimate uses the rate n^{Re s - (k+1)/2 + eps}.
    """
    _require_cusp_form(f, "lseries_psi_direct")
    s = complex(s)
    k = int(f.weight_k)
    if not 0.0 < s.real < (k - 1) / 2.0:
        raise DomainError(f"lseries_psi_direct: need 0 < Re s < {(k - 1) / 2}")
    n_max = config.LSERIES_N_MAX if n_max is None else int(n_max)
    n, logc, sign = f.log_terms(n_max, n_min=1)
    if n.size == 0:
        return LSeriesValue(0j, n_max, 0.0, Route.DIRECT)
    terms = sign * np.exp(logc + _log_laplace_psi(s, k, n))
    if taper:
        value = compensated_sum(terms * smooth_taper(n / n_max))
        half = n_max // 2
        sel = n <= half
        coarse = compensated_sum(terms[sel] * smooth_taper(n[sel] / half))
        tail = abs(value - coarse)
    else:
        value = compensated_sum(terms)
        eps = config.KUMMER_TAIL_EPS
        rate = s.real - (k + 1) / 2.0 + eps
        log_a = float(np.max(logc - ((k - 1) / 2.0 + eps) * np.log(n)))
        log_amp = (log_gamma(k - s) - log_gamma(s)).real + (s.real - k) * math.log(2.0 * math.pi)
        tail = math.exp(log_a + log_amp) * n_max ** (rate + 1.0) / -(rate + 1.0)
    return LSeriesValue(value, n_max, float(tail), Route.DIRECT)


def lseries_psi_fricke(g: CoefficientSource, s, n_max: int | None = None) -> LSeriesValue:
    """(1/N) sum_{n>=1} d(n) e^{-2 pi n/N} (2 pi n/N)^{-s} for the partner g.

    ``g`` carries the partner coefficients d(n) as its own c+(n).  The n = 0
    term is excluded and d(0) = 0 is enforced.  When ``n_max`` is omitted
    the sum is extended until the growth bound on the omitted terms falls
    below 1e-17 of the value.
    """
    s = complex(s)
    if g.n0 != 0 or g.c_plus(0) != 0:
        raise DomainError("lseries_psi_fricke: requires d(0) = 0 and no principal part")
    N = g.level_N

    def log_bound(m):
        return g.log_growth_A + g.growth_C_f * np.sqrt(m) - 2.0 * math.pi * m / N - s.real * np.log(
            2.0 * math.pi * m / N
        )

    if n_max is None:
        n_max = 16
        while True:
            lead = log_bound(np.arange(1.0, n_max + 1.0)).max()
            if log_tail_sum(log_bound, n_max + 1) < lead - 45.0:
                break
            n_max *= 2
    n, logc, sign = g.log_terms(int(n_max), n_min=1)
    if n.size == 0:
        return LSeriesValue(0j, int(n_max), 0.0, Route.FRICKE_CONTINUED)
    x = 2.0 * math.pi * n / N
    terms = sign * np.exp(logc - x - s * np.log(x)) / N
    value = compensated_sum(terms)
    log_tail = log_tail_sum(log_bound, int(n_max) + 1) - math.log(N)
    return LSeriesValue(value, int(n_max), float(math.exp(min(log_tail, 700.0))), Route.FRICKE_CONTINUED)


def functional_equation_factor(k, N: int) -> complex:
    """i^k N^{1 - k/2} with the principal branch of i^k."""
    k = float(k)
    return cmath.exp(0.5j * math.pi * k) * N ** (1.0 - 0.5 * k)


def lseries_psi_continued(f: CoefficientSource, s, n_max: int | None = None) -> LSeriesValue:
    """L_f(psi_s) for any s, through the functional equation.

    Equals i^k N^{1-k/2} times the Fricke-side series of the partner, which
    converges geometrically for every s.
    """
    _require_cusp_form(f, "lseries_psi_continued")
    inner = lseries_psi_fricke(f.fricke_partner(), s, n_max)
    factor = functional_equation_factor(f.weight_k, f.level_N)
    return LSeriesValue(factor * inner.value, inner.n_used, abs(factor) * inner.tail_estimate, Route.FRICKE_CONTINUED)
