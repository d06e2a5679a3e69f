"""Special functions in binary64.

Complex log-Gamma, the modified Bessel function K of half-integral order,
Kummer's confluent hypergeometric function M(a, b, z) with complex first
parameter, and the upper incomplete Gamma function at integer order.

All functions accept NumPy arrays as well as scalars and return an object of
the same shape (a Python scalar for scalar input).  They are pure and
thread-safe.
"""

from __future__ import annotations

import functools
import math
from fractions import Fraction

import numpy as np

from . import config
from .errors import ConvergenceError, DomainError, PoleError

EULER_GAMMA = 0.57721566490153286061
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
_EPS = 2.0 ** -53

# B_{2j} / (2j (2j-1)) for j = 1..10.
_STIRLING = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
)
_STIRLING_RADIUS = 12.0


def _prepare(value, dtype):
    arr = np.asarray(value, dtype=dtype)
    return np.atleast_1d(arr).copy(), arr.ndim == 0


def _finish(arr, scalar):
    if scalar:
        return arr[0].item()
    return arr


# ---------------------------------------------------------------- log-Gamma


def log_gamma(z):
    """Logarithm of Gamma(z) for complex z.

    Uses the branch that is real on the positive real axis and analytic on
    the plane cut along the non-positive real axis (the convention of
    ``scipy.special.loggamma``).  Points close to the origin or to the
    negative real axis are first shifted right by the recurrence, then the
    Stirling series with ten Bernoulli terms is applied.
    """
    w, scalar = _prepare(z, complex)
    re, im = w.real, w.imag
    if np.any(~np.isfinite(w)):
        raise DomainError("log_gamma: non-finite argument")
    if np.any((im == 0.0) & (re <= 0.0) & (np.floor(re) == re)):
        raise PoleError("log_gamma: pole at a non-positive integer")

    need = (np.abs(w) < _STIRLING_RADIUS) | ((re < 0.0) & (np.abs(im) < -re))
    shift = np.where(need, np.ceil(np.maximum(_STIRLING_RADIUS - re, 0.0)), 0.0).astype(np.int64)
    correction = np.zeros_like(w)
    for j in range(int(shift.max(initial=0))):
        mask = shift > j
        correction[mask] += np.log(w[mask] + j)

    u = w + shift
    inv = 1.0 / u
    inv2 = inv * inv
    series = np.full_like(u, _STIRLING[-1])
    for coeff in reversed(_STIRLING[:-1]):
        series = series * inv2 + coeff
    result = (u - 0.5) * np.log(u) - u + _LOG_SQRT_2PI + series * inv - correction
    return _finish(result, scalar)


def gamma(z):
    """Gamma(z) for complex z, via :func:`log_gamma`."""
    value = np.exp(log_gamma(z))
    return complex(value) if np.ndim(value) == 0 else value


# ------------------------------------------------------------ Bessel K


def bessel_order_twice(nu) -> int:
    """Return 2*nu as an int, rejecting orders outside (1/2)Z."""
    twice = Fraction(nu) * 2 if not isinstance(nu, Fraction) else nu * 2
    if twice.denominator != 1:
        raise DomainError(f"bessel_k: order {nu} is not in (1/2)Z")
    return int(twice)


def _k01_series(x):
    """Unscaled K_0 and K_1 from Temme's series, accurate for 0 < x <= 2."""
    half = 0.5 * x
    ff = -EULER_GAMMA - np.log(half)
    k0 = ff.copy()
    k1 = np.full_like(x, 0.5)
    c = np.ones_like(x)
    p = 0.5
    q = 0.5
    d = half * half
    for i in range(1, 80):
        ff = (i * ff + p + q) / (i * i)
        c = c * d / i
        p /= i
        q /= i
        step0 = c * ff
        step1 = c * (p - i * ff)
        k0 = k0 + step0
        k1 = k1 + step1
        if np.all(np.abs(step0) <= _EPS * np.abs(k0)) and np.all(np.abs(step1) <= _EPS * np.abs(k1)):
            break
    return k0, k1 * (2.0 / x)


def _k01_cf2_scaled(x):
    """Scaled e^x K_0 and e^x K_1 from Steed's continued fraction, x >= 2."""
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = d.copy()
    delh = d.copy()
    q1 = np.zeros_like(x)
    q2 = np.ones_like(x)
    a1 = 0.25
    q = np.full_like(x, a1)
    c = a1
    a = -a1
    s = 1.0 + q * delh
    # Large arguments converge in a few steps; their entries are frozen
    # while the rest keep iterating, since further steps could overflow.
    active = np.ones(x.shape, dtype=bool)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        for i in range(1, 10_000):
            a -= 2 * i
            c = -a * c / (i + 1.0)
            qnew = (q1 - b * q2) / a
            q1, q2 = q2, qnew
            q = q + c * qnew
            b = b + 2.0
            d = 1.0 / (b + a * d)
            delh = (b * d - 1.0) * delh
            h = np.where(active, h + delh, h)
            dels = q * delh
            s = np.where(active, s + dels, s)
            active &= ~(np.abs(dels) <= _EPS * np.abs(s))
            if not active.any():
                break
        else:
            raise ConvergenceError("bessel_k: continued fraction did not converge")
    h = a1 * h
    k0 = np.sqrt(math.pi / (2.0 * x)) / s
    k1 = k0 * (x + 0.5 - h) / x
    return k0, k1


def _bessel_k_scaled(twice: int, x):
    """e^x K_{twice/2}(x) for a positive float array x."""
    twice = abs(twice)
    if twice % 2:
        lo = np.sqrt(math.pi / (2.0 * x))
        if twice == 1:
            return lo
        hi = lo * (1.0 + 1.0 / x)
        mu = 0.5
        steps = (twice - 1) // 2
    else:
        lo = np.empty_like(x)
        hi = np.empty_like(x)
        small = x <= 2.0
        if small.any():
            k0, k1 = _k01_series(x[small])
            scale = np.exp(x[small])
            lo[small] = k0 * scale
            hi[small] = k1 * scale
        if (~small).any():
            k0, k1 = _k01_cf2_scaled(x[~small])
            lo[~small] = k0
            hi[~small] = k1
        if twice == 0:
            return lo
        mu = 0.0
        steps = twice // 2
    for j in range(1, steps):
        lo, hi = hi, lo + (2.0 * (mu + j) / x) * hi
    return hi


def bessel_k(nu, x, scaled: bool = False):
    """Modified Bessel function K_nu(x) for nu in (1/2)Z and x > 0.

    Integer orders start from K_0, K_1 (Temme's series for x <= 2, Steed's
    continued fraction for x > 2); half-integer orders start from the closed
    forms of K_{1/2}, K_{3/2}.  Both continue by the upward recurrence, which
    is stable for K.

    With ``scaled=True`` the value e^x K_nu(x) is returned.  Unscaled values
    below the smallest double flush to 0.0; :func:`log_bessel_k` gives the
    logarithm over the full range.
    """
    twice = bessel_order_twice(nu)
    xs, scalar = _prepare(x, float)
    if np.any(~(xs > 0.0)) or np.any(~np.isfinite(xs)):
        raise DomainError("bessel_k: x must be positive and finite")
    val = _bessel_k_scaled(twice, xs)
    if not scaled:
        with np.errstate(under="ignore"):
            val = val * np.exp(-xs)
    return _finish(val, scalar)


def log_bessel_k(nu, x):
    """log K_nu(x), finite even where K_nu(x) underflows."""
    twice = bessel_order_twice(nu)
    xs, scalar = _prepare(x, float)
    if np.any(~(xs > 0.0)) or np.any(~np.isfinite(xs)):
        raise DomainError("log_bessel_k: x must be positive and finite")
    return _finish(np.log(_bessel_k_scaled(twice, xs)) - xs, scalar)


def log_bessel_k_bound(nu, x):
    """Logarithm of an explicit majorant of K_nu(x).

    For |nu| <= 1/2, K_nu(x) <= sqrt(pi/(2x)) e^{-x}.  For larger orders the
    integral representation with (1 + u/2x)^{m} <= e^{mu/(2x)} gives the
    factor (1 - m/(2x))^{-(|nu|+1/2)}, m = |nu| - 1/2, valid for 2x > m.  Where
    that condition fails the exact value is returned instead.
    """
    twice = abs(bessel_order_twice(nu))
    xs, scalar = _prepare(x, float)
    base = 0.5 * np.log(math.pi / (2.0 * xs)) - xs
    order = twice / 2.0
    if order <= 0.5:
        return _finish(base, scalar)
    m = order - 0.5
    ok = 2.0 * xs > 1.01 * m
    out = np.empty_like(xs)
    out[ok] = base[ok] - (order + 0.5) * np.log1p(-m / (2.0 * xs[ok]))
    if (~ok).any():
        out[~ok] = np.log(_bessel_k_scaled(twice, xs[~ok])) - xs[~ok]
    return _finish(out, scalar)


# ------------------------------------------------------------- Kummer M


def _two_sum_add(s, comp, x):
    """Neumaier step: s + x with the rounding error accumulated in comp."""
    t = s + x
    comp += np.where(np.abs(s) >= np.abs(x), (s - t) + x, (x - t) + s)
    return t, comp


def _kummer_series(a, b, z, max_terms):
    """Power series of M(a, b, z); returns (mantissa, log_scale).

    M = mantissa * exp(log_scale).  Rescaling keeps the partial sums finite
    for large z; real and imaginary parts are accumulated with compensation.
    """
    shape = a.shape
    term = np.ones(shape, complex)
    s_re = np.ones(shape)
    s_im = np.zeros(shape)
    c_re = np.zeros(shape)
    c_im = np.zeros(shape)
    log_scale = np.zeros(shape)
    limit = np.maximum(np.abs(z), np.abs(a)) + 2.0
    m = 0
    while True:
        term = term * ((a + m) / (b + m)) * (z / (m + 1.0))
        m += 1
        s_re, c_re = _two_sum_add(s_re, c_re, term.real)
        s_im, c_im = _two_sum_add(s_im, c_im, term.imag)
        mag = np.maximum(np.abs(s_re) + np.abs(s_im), np.abs(term))
        big = mag > 1e250
        if big.any():
            f = mag[big]
            term[big] /= f
            s_re[big] /= f
            s_im[big] /= f
            c_re[big] /= f
            c_im[big] /= f
            log_scale[big] += np.log(f)
        if m > 8 and (m & 7) == 0:
            total = np.abs(s_re + c_re) + np.abs(s_im + c_im)
            done = (m > limit) & (np.abs(term) <= 1e-17 * total)
            done |= term == 0
            if done.all():
                break
        if m > max_terms:
            raise ConvergenceError(f"kummer_m: series exceeded {max_terms} terms")
    return (s_re + c_re) + 1j * (s_im + c_im), log_scale


def _is_nonpositive_integer(a):
    return (a.imag == 0.0) & (a.real <= 0.0) & (np.floor(a.real) == a.real)


def _kummer_asymptotic_log(a, b, z):
    """log(e^{-z} M(a, b, z)) from the dominant large-z expansion.

    Returns (log_value, relative_error_estimate).  The error estimate adds
    the first omitted term, the rounding level of the largest term and the
    size of the neglected recessive contribution.
    """
    s = np.ones(a.shape, complex)
    term = np.ones(a.shape, complex)
    biggest = np.ones(a.shape)
    active = np.ones(a.shape, bool)
    abs_im = np.abs(a.imag)
    for m in range(20_000):
        r = (1.0 - a + m) * (b - a + m) / ((m + 1.0) * z)
        diverging = active & (np.abs(r) > 1.0) & (m > abs_im)
        active &= ~diverging
        term = np.where(active, term * r, term)
        s = s + np.where(active, term, 0.0)
        biggest = np.maximum(biggest, np.abs(term))
        active &= np.abs(term) >= 1e-17 * np.abs(s)
        if not active.any():
            break
    err = (np.abs(term) + 1e-16 * biggest) / np.abs(s)

    log_val = log_gamma(np.full(a.shape, b, complex)) - log_gamma(a) + (a - b) * np.log(z) + np.log(s)

    bma = b - a
    rec = np.zeros(a.shape)
    valid = ~_is_nonpositive_integer(bma)
    if valid.any():
        av = a[valid]
        rec_log = (
            (log_gamma(av) - log_gamma(bma[valid])).real
            + math.pi * np.abs(av.imag)
            - z[valid]
            + (b - 2.0 * av.real) * np.log(z[valid])
        )
        rec[valid] = np.exp(np.minimum(rec_log, 700.0))
    return log_val, err + rec


def _kummer_log(a, b, z, scaled, max_terms):
    """log of M(a, b, z) (or of e^{-z} M when scaled) on broadcast arrays."""
    out = np.empty(a.shape, complex)
    asym = (z > config.KUMMER_SERIES_Z) & ~_is_nonpositive_integer(a)
    if asym.any():
        log_val, err = _kummer_asymptotic_log(a[asym], b, z[asym])
        good = err <= config.KUMMER_ASYMPTOTIC_RTOL
        idx = np.flatnonzero(asym)
        out[idx[good]] = log_val[good] if scaled else log_val[good] + z[asym][good]
        asym[idx[~good]] = False
    ser = ~asym
    if ser.any():
        mant, log_scale = _kummer_series(a[ser], b, z[ser], max_terms)
        with np.errstate(divide="ignore"):
            val = np.log(mant) + log_scale
        out[ser] = val - z[ser] if scaled else val
    return out


def kummer_m(a, b, z, scaled: bool = False, log: bool = False, *, z_max=None, max_terms=None):
    """Kummer's function M(a, b, z) = sum (a)_m z^m / ((b)_m m!).

    ``a`` may be complex, ``b`` is a real number that is not a non-positive
    integer, and ``z`` is real.  ``a`` and ``z`` broadcast against each other.

    For |z| up to ``config.KUMMER_SERIES_Z`` (and for negative z) the power
    series is summed with compensation and on-the-fly rescaling; above it the
    dominant asymptotic expansion is used wherever its own error estimate is
    below ``config.KUMMER_ASYMPTOTIC_RTOL``, otherwise the series again.

    ``scaled=True`` returns e^{-z} M(a, b, z).  ``log=True`` returns the
    complex logarithm of the (scaled or raw) value, which stays finite when
    the value itself would overflow.
    """
    b = float(b)
    if b <= 0.0 and b == math.floor(b):
        raise DomainError("kummer_m: b must not be a non-positive integer")
    z_max = config.KUMMER_Z_MAX if z_max is None else z_max
    max_terms = config.KUMMER_MAX_TERMS if max_terms is None else max_terms
    a_arr = np.asarray(a, complex)
    z_arr = np.asarray(z, float)
    scalar = a_arr.ndim == 0 and z_arr.ndim == 0
    a_b, z_b = np.broadcast_arrays(np.atleast_1d(a_arr), np.atleast_1d(z_arr))
    a_b = a_b.astype(complex).copy()
    z_b = z_b.astype(float).copy()
    if np.any(~np.isfinite(z_b)) or np.any(np.abs(z_b) > z_max):
        raise DomainError(f"kummer_m: |z| must not exceed z_max = {z_max}")
    shape = a_b.shape
    flat = _kummer_log(a_b.ravel(), b, z_b.ravel(), scaled, max_terms).reshape(shape)
    if not log:
        with np.errstate(over="ignore", under="ignore"):
            flat = np.exp(flat)
    return _finish(flat, scalar)


# ------------------------------------------------- incomplete Gamma, k <= 0


def incomplete_gamma_elem(m: int, x, log: bool = False):
    """Gamma(m+1, x) = m! e^{-x} sum_{l=0}^{m} x^l / l! for integer m >= 0.

    Each summand is formed in log space so that large x neither overflows
    nor loses the leading terms.  ``log=True`` returns log Gamma(m+1, x).
    """
    if int(m) != m or m < 0:
        raise DomainError("incomplete_gamma_elem: m must be a non-negative integer")
    m = int(m)
    xs, scalar = _prepare(x, float)
    if np.any(~(xs > 0.0)):
        raise DomainError("incomplete_gamma_elem: x must be positive")
    logx = np.log(xs)
    logs = np.stack([ell * logx - math.lgamma(ell + 1.0) for ell in range(m + 1)])
    peak = logs.max(axis=0)
    total = peak + np.log(np.exp(logs - peak).sum(axis=0)) + math.lgamma(m + 1.0) - xs
    if not log:
        with np.errstate(under="ignore"):
            total = np.exp(total)
    return _finish(total, scalar)


# ---------------------------------------------- Kummer growth majorant


def _tail_exponent_base(a_real, b, eps):
    p = a_real - b + eps
    return p, (-p if p < 0.0 else 0.0)


def _log_tail_shape(a_real, b, y, eps):
    """log of e^y * max(y, y*)^p with p = a - b + eps, monotone in y."""
    p, ystar = _tail_exponent_base(a_real, b, eps)
    return y + p * np.log(np.maximum(y, ystar))


@functools.lru_cache(maxsize=64)
def calibrate_kummer_tail_constant(a_real: float, b: float, eps: float) -> float:
    """Implied constant of the growth bound, calibrated by sampling.

    Samples |Gamma(a+ix) M(a+ix, b, y)| on the configured (x, y) grid and
    returns the largest ratio to the majorant shape, inflated by
    ``config.KUMMER_TAIL_INFLATION``.
    """
    xs = np.linspace(*config.KUMMER_TAIL_GRID_X)
    ys = np.linspace(*config.KUMMER_TAIL_GRID_Y)
    xx, yy = np.meshgrid(xs, ys)
    aa = a_real + 1j * xx
    log_abs = (log_gamma(aa) + kummer_m(aa, b, yy, scaled=True, log=True)).real + yy
    ratio = log_abs - _log_tail_shape(a_real, b, yy, eps)
    return float(config.KUMMER_TAIL_INFLATION * math.exp(ratio.max()))


def kummer_tail_bound(a_real, b, y, x_height=0.0, eps=None, log: bool = False):
    """Majorant C e^y y^{a-b+eps} of |Gamma(a+ix) M(a+ix, b, y)|, uniform in x.

    Below y* = b - a - eps the power is frozen at y*, which keeps the
    majorant monotone in y without changing it for large y.  The constant C
    comes from :func:`calibrate_kummer_tail_constant`.  ``x_height`` is
    accepted for interface symmetry; the bound does not depend on it.
    """
    eps = config.KUMMER_TAIL_EPS if eps is None else float(eps)
    if not a_real > 0.0:
        raise DomainError("kummer_tail_bound: a must be positive")
    if not b > 2.0 * a_real + 0.5:
        raise DomainError("kummer_tail_bound: requires b > 2a + 1/2")
    if not math.isfinite(float(x_height)):
        raise DomainError("kummer_tail_bound: x_height must be finite")
    ys, scalar = _prepare(y, float)
    if np.any(~(ys > 0.0)):
        raise DomainError("kummer_tail_bound: y must be positive")
    const = calibrate_kummer_tail_constant(float(a_real), float(b), eps)
    val = math.log(const) + _log_tail_shape(a_real, b, ys, eps)
    if not log:
        with np.errstate(over="ignore"):
            val = np.exp(val)
    return _finish(val, scalar)
