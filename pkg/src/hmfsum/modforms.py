"""Exact q-expansion arithmetic and concrete coefficient sources.

Power series carry Python integers, so every coefficient of an eta product,
of Delta or of j is exact; conversion to floating point happens only when a
summation formula consumes the data (and then in log space, since partition
numbers and j-coefficients leave the double range quickly).
"""

from __future__ import annotations

import cmath
import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, IngestionError, TruncationError


class FormalPowerSeries:
    """Truncated power series sum_{n=0}^{order} a_n q^n with integer a_n."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[int], order: int | None = None):
        coeffs = [int(c) for c in coeffs]
        if order is None:
            order = len(coeffs) - 1
        if order < 0:
            raise DomainError("FormalPowerSeries: order must be non-negative")
        coeffs = coeffs[: order + 1] + [0] * (order + 1 - len(coeffs))
        self.coeffs = tuple(coeffs)

    @classmethod
    def one(cls, order: int) -> "FormalPowerSeries":
        return cls([1], order)

    @classmethod
    def from_sparse(cls, terms: dict[int, int], order: int) -> "FormalPowerSeries":
        coeffs = [0] * (order + 1)
        for n, c in terms.items():
            if 0 <= n <= order:
                coeffs[n] = int(c)
        return cls(coeffs, order)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, n):
        return self.coeffs[n]

    def __iter__(self):
        return iter(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, FormalPowerSeries):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        shown = ", ".join(str(c) for c in self.coeffs[:6])
        more = ", ..." if len(self.coeffs) > 6 else ""
        return f"FormalPowerSeries([{shown}{more}], order={self.order})"

    def truncate(self, order: int) -> "FormalPowerSeries":
        return FormalPowerSeries(self.coeffs, min(order, self.order))

    def _common(self, other):
        order = min(self.order, other.order)
        return self.coeffs[: order + 1], other.coeffs[: order + 1], order

    def __add__(self, other):
        if isinstance(other, int):
            other = FormalPowerSeries([other], self.order)
        a, b, order = self._common(other)
        return FormalPowerSeries([x + y for x, y in zip(a, b)], order)

    __radd__ = __add__

    def __neg__(self):
        return FormalPowerSeries([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return FormalPowerSeries([other * c for c in self.coeffs])
        a, b, order = self._common(other)
        nz = [(i, c) for i, c in enumerate(b) if c]
        out = [0] * (order + 1)
        for i, x in enumerate(a):
            if not x:
                continue
            for j, y in nz:
                if i + j > order:
                    break
                out[i + j] += x * y
        return FormalPowerSeries(out, order)

    __rmul__ = __mul__

    def inverse(self) -> "FormalPowerSeries":
        """Multiplicative inverse; the constant term must be +1 or -1."""
        a0 = self.coeffs[0]
        if a0 not in (1, -1):
            raise DomainError("FormalPowerSeries.inverse: constant term must be a unit")
        nz = [(k, c) for k, c in enumerate(self.coeffs) if c and k]
        out = [a0] + [0] * self.order
        for n in range(1, self.order + 1):
            acc = 0
            for k, c in nz:
                if k > n:
                    break
                acc += c * out[n - k]
            out[n] = -a0 * acc
        return FormalPowerSeries(out, self.order)

    def __truediv__(self, other):
        return self * other.inverse()

    def __pow__(self, exponent: int):
        """Integer power by J. C. P. Miller's recurrence (constant term 1).

        For P with p_0 = 1 the coefficients of Q = P^e satisfy
        n q_n = sum_{k=1}^{n} ((e+1) k - n) p_k q_{n-k}; only the non-zero
        p_k are visited, which makes sparse bases (eta products) cheap.
        """
        if int(exponent) != exponent:
            raise DomainError("FormalPowerSeries: exponent must be an integer")
        exponent = int(exponent)
        if exponent == 0:
            return FormalPowerSeries.one(self.order)
        if self.coeffs[0] != 1:
            if exponent < 0:
                return self.inverse() ** (-exponent)
            result = FormalPowerSeries.one(self.order)
            base = self
            e = exponent
            while e:
                if e & 1:
                    result = result * base
                base = base * base
                e >>= 1
            return result
        return FormalPowerSeries(_miller_power(self.coeffs, exponent, self.order), self.order)


def _miller_power(coeffs: Sequence[int], exponent: int, order: int) -> list[int]:
    nz = [(k, c) for k, c in enumerate(coeffs) if c and 0 < k <= order]
    out = [1] + [0] * order
    e1 = exponent + 1
    for n in range(1, order + 1):
        acc = 0
        for k, c in nz:
            if k > n:
                break
            acc += (e1 * k - n) * c * out[n - k]
        q, r = divmod(acc, n)
        if r:
            raise ArithmeticError("power recurrence produced a non-integer coefficient")
        out[n] = q
    return out


def pentagonal_series(order: int) -> FormalPowerSeries:
    """prod_{n>=1} (1 - q^n) = sum_j (-1)^j q^{j(3j-1)/2} through q^order."""
    terms = {0: 1}
    j = 1
    while True:
        g1 = j * (3 * j - 1) // 2
        if g1 > order:
            break
        sign = -1 if j % 2 else 1
        terms[g1] = sign
        g2 = j * (3 * j + 1) // 2
        if g2 <= order:
            terms[g2] = sign
        j += 1
    return FormalPowerSeries.from_sparse(terms, order)


def series_eta_product(exponent: int, order: int) -> FormalPowerSeries:
    """Exact coefficients of prod_{n>=1} (1 - q^n)^exponent through q^order."""
    if order < 0:
        raise DomainError("series_eta_product: order must be non-negative")
    return pentagonal_series(order) ** exponent


_partition_lock = threading.Lock()
_partition_cache: list[int] = [1]


def partition_numbers(n_max: int) -> list[int]:
    """p(0), ..., p(n_max) by Euler's pentagonal recurrence.

    Results are cached and extended on demand; the returned list is a copy.
    """
    if n_max < 0:
        raise DomainError("partition_numbers: n_max must be non-negative")
    with _partition_lock:
        p = _partition_cache
        for n in range(len(p), n_max + 1):
            total = 0
            j = 1
            while True:
                g1 = j * (3 * j - 1) // 2
                if g1 > n:
                    break
                g2 = g1 + j
                term = p[n - g1] + (p[n - g2] if g2 <= n else 0)
                total += term if j % 2 else -term
                j += 1
            p.append(total)
        return p[: n_max + 1]


@lru_cache(maxsize=8)
def tau_coefficients(n_max: int) -> tuple[int, ...]:
    """Ramanujan tau(0..n_max) from Delta = q prod (1 - q^n)^24 (tau(0) = 0)."""
    if n_max < 1:
        raise DomainError("tau_coefficients: n_max must be at least 1")
    eta24 = series_eta_product(24, n_max - 1)
    return (0,) + eta24.coeffs


def _sigma3(n_max: int) -> list[int]:
    sig = [0] * (n_max + 1)
    for d in range(1, n_max + 1):
        d3 = d ** 3
        for m in range(d, n_max + 1, d):
            sig[m] += d3
    return sig


@lru_cache(maxsize=8)
def j_coefficients(n_max: int) -> tuple[int, ...]:
    """c(-1), c(0), ..., c(n_max) of j = E4^3 / Delta by exact series division."""
    if n_max < -1:
        raise DomainError("j_coefficients: n_max must be at least -1")
    order = n_max + 1
    sig = _sigma3(order)
    e4 = FormalPowerSeries([1] + [240 * sig[n] for n in range(1, order + 1)], order)
    qj = (e4 * e4 * e4) / series_eta_product(24, order)
    return qj.coeffs


# -------------------------------------------------------------- sources


Provider = Callable[[int], tuple[Sequence[int], Sequence]]


def _log_abs(c) -> float:
    if isinstance(c, int):
        return math.log(abs(c))
    return math.log(abs(complex(c)))


@dataclass(frozen=True)
class CoefficientSource:
    """A harmonic Maass form (or weakly holomorphic form) given by its data.

    ``plus_provider(n_max)`` returns the indices and exact (or float)
    holomorphic coefficients c+(n) for -n0 <= n <= n_max on the support;
    ``minus_provider`` does the same for c-(n), n >= 1.  The Fricke partner
    is a scalar multiple: d(n) = fricke_multiplier * c(n).

    The support of c+ is contained in {n : n = support_residue mod
    support_modulus}; tail bounds use this to skip indices that vanish.
    """

    name: str
    weight_k: Fraction
    level_N: int
    n0: int
    growth_C_f: float
    fricke_multiplier: complex
    plus_provider: Provider = field(repr=False, compare=False)
    minus_provider: Provider | None = field(default=None, repr=False, compare=False)
    support_modulus: int = 1
    support_residue: int = 0
    minus_degree: float | None = None
    n_cap: int | None = None
    growth_check_to: int = 200
    log_growth_A: float = field(init=False)
    log_minus_B: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "weight_k", Fraction(self.weight_k))
        if (2 * self.weight_k).denominator != 1:
            raise DomainError("CoefficientSource: weight must lie in (1/2)Z")
        if self.level_N < 1 or self.n0 < 0 or not self.growth_C_f > 0.0:
            raise DomainError("CoefficientSource: need N >= 1, n0 >= 0 and C_f > 0")
        if self.minus_provider is not None:
            if self.weight_k.denominator != 1 or self.weight_k > 0:
                raise DomainError("CoefficientSource: non-holomorphic part requires k in -N_0")
            if self.minus_degree is None:
                raise DomainError("CoefficientSource: non-holomorphic part needs a declared polynomial degree")
        check_to = self.growth_check_to if self.n_cap is None else min(self.growth_check_to, self.n_cap)
        object.__setattr__(self, "log_growth_A", self._max_log_growth(check_to))
        object.__setattr__(self, "log_minus_B", self._max_log_minus(check_to))

    # --------------------------------------------------------- metadata

    @property
    def k(self) -> float:
        return float(self.weight_k)

    @property
    def is_weakly_holomorphic(self) -> bool:
        return self.minus_provider is None

    @property
    def is_cusp_form(self) -> bool:
        return self.n0 == 0 and self.is_weakly_holomorphic and self.c_plus(0) == 0

    # ---------------------------------------------------- coefficient data

    def _check_cap(self, n_max):
        if self.n_cap is not None and n_max > self.n_cap:
            raise TruncationError(
                f"source {self.name!r} provides coefficients only up to n = {self.n_cap}"
            )

    def plus_terms(self, n_max: int):
        """(indices, coefficients) of c+ for -n0 <= n <= n_max."""
        self._check_cap(n_max)
        idx, coeffs = self.plus_provider(n_max)
        return np.asarray(idx, dtype=np.int64), list(coeffs)

    def minus_terms(self, n_max: int):
        """(indices, coefficients) of c- for 1 <= n <= n_max (empty if holomorphic)."""
        if self.minus_provider is None:
            return np.zeros(0, dtype=np.int64), []
        self._check_cap(n_max)
        idx, coeffs = self.minus_provider(n_max)
        return np.asarray(idx, dtype=np.int64), list(coeffs)

    @staticmethod
    def _lookup(terms, n):
        idx, coeffs = terms
        hit = np.flatnonzero(idx == n)
        return coeffs[hit[0]] if hit.size else 0

    def c_plus(self, n: int):
        if n < -self.n0:
            return 0
        return self._lookup(self.plus_terms(max(n, 0)), n)

    def c_minus(self, n: int):
        if n < 1 or self.minus_provider is None:
            return 0
        return self._lookup(self.minus_terms(n), n)

    def d_plus(self, n: int) -> complex:
        return self.fricke_multiplier * complex(self.c_plus(n))

    def d_minus(self, n: int) -> complex:
        return self.fricke_multiplier * complex(self.c_minus(n))

    def log_terms(self, n_max: int, minus: bool = False, n_min: int | None = None):
        """Non-zero coefficients in log form: (n, log|c(n)|, sign(c(n))).

        Signs are floats for real data and unit complex numbers otherwise.
        """
        idx, coeffs = self.minus_terms(n_max) if minus else self.plus_terms(n_max)
        keep = [i for i, c in enumerate(coeffs) if c != 0 and (n_min is None or idx[i] >= n_min)]
        n = idx[keep]
        logs = np.array([_log_abs(coeffs[i]) for i in keep], dtype=float)
        if all(isinstance(coeffs[i], (int, float)) for i in keep):
            signs = np.array([1.0 if coeffs[i] > 0 else -1.0 for i in keep])
        else:
            signs = np.array([complex(coeffs[i]) / abs(complex(coeffs[i])) for i in keep])
        return n, logs, signs

    # ------------------------------------------------------ growth data

    def _max_log_growth(self, n_max):
        n, logs, _ = self.log_terms(n_max, n_min=1)
        if n.size == 0:
            return -math.inf
        return float(np.max(logs - self.growth_C_f * np.sqrt(n)))

    def _max_log_minus(self, n_max):
        if self.minus_provider is None:
            return -math.inf
        n, logs, _ = self.log_terms(n_max, minus=True)
        if n.size == 0:
            return -math.inf
        return float(np.max(logs - self.minus_degree * np.log(n)))

    def check_growth(self, n_max: int) -> bool:
        """True when |c+(n)| <= A e^{C_f sqrt(n)} holds for 1 <= n <= n_max."""
        return self._max_log_growth(n_max) <= self.log_growth_A + 1e-12

    def support(self, n_lo: int, n_hi: int) -> np.ndarray:
        """Indices in [n_lo, n_hi] where c+ may be non-zero."""
        m, r = self.support_modulus, self.support_residue
        first = n_lo + ((r - n_lo) % m)
        return np.arange(first, n_hi + 1, m, dtype=np.int64)

    def fricke_partner(self) -> "CoefficientSource":
        """The source whose coefficients are d(n), for integral weight.

        Applying w_N twice multiplies by (-1)^k, so the partner's own
        multiplier is (-1)^k / lambda.
        """
        if self.weight_k.denominator != 1:
            raise DomainError("fricke_partner: only implemented for integral weight")
        lam = self.fricke_multiplier

        def plus(n_max):
            idx, coeffs = self.plus_provider(n_max)
            return idx, [lam * complex(c) if lam != 1 else c for c in coeffs]

        minus = None
        if self.minus_provider is not None:
            def minus(n_max):
                idx, coeffs = self.minus_provider(n_max)
                return idx, [lam * complex(c) if lam != 1 else c for c in coeffs]

        sign = -1 if int(self.weight_k) % 2 else 1
        return CoefficientSource(
            name=f"{self.name}|w",
            weight_k=self.weight_k,
            level_N=self.level_N,
            n0=self.n0,
            growth_C_f=self.growth_C_f,
            fricke_multiplier=sign / lam,
            plus_provider=plus,
            minus_provider=minus,
            support_modulus=self.support_modulus,
            support_residue=self.support_residue,
            minus_degree=self.minus_degree,
            n_cap=self.n_cap,
            growth_check_to=self.growth_check_to,
        )


def _partition_plus(n_max):
    count = (n_max + 1) // 24
    p = partition_numbers(max(count, 0))
    return [24 * n - 1 for n in range(count + 1)], p[: count + 1]


def partition_source() -> CoefficientSource:
    """f = 1/eta(24z) = sum p(n) q^{24n-1}: weight -1/2, level 576, n0 = 1.

    The Fricke partner is e^{i pi/4} f and C_f = pi/6.
    """
    return CoefficientSource(
        name="partition",
        weight_k=Fraction(-1, 2),
        level_N=576,
        n0=1,
        growth_C_f=math.pi / 6.0,
        fricke_multiplier=cmath.exp(0.25j * math.pi),
        plus_provider=_partition_plus,
        support_modulus=24,
        support_residue=23,
        growth_check_to=24 * 200,
    )


def _delta_plus(n_max):
    tau = tau_coefficients(max(n_max, 1))
    return list(range(0, n_max + 1)), list(tau[: n_max + 1])


def delta_source(n_max: int | None = None) -> CoefficientSource:
    """Delta = q prod (1 - q^n)^24: weight 12, level 1, self-dual.

    ``n_max`` (optional) caps the coefficient range that may be requested.
    """
    if n_max is not None and n_max < 1:
        raise DomainError("delta_source: n_max must be at least 1")
    return CoefficientSource(
        name="delta",
        weight_k=Fraction(12),
        level_N=1,
        n0=0,
        growth_C_f=1.0,
        fricke_multiplier=1.0,
        plus_provider=_delta_plus,
        n_cap=n_max,
    )


def _j_plus(n_max):
    coeffs = j_coefficients(max(n_max, -1))
    return list(range(-1, n_max + 1)), list(coeffs[: n_max + 2])


def j_source(n_max: int | None = None) -> CoefficientSource:
    """j = q^{-1} + 744 + 196884 q + ...: weight 0, level 1, n0 = 1, C_f = 4 pi."""
    if n_max is not None and n_max < 1:
        raise DomainError("j_source: n_max must be at least 1")
    return CoefficientSource(
        name="j",
        weight_k=Fraction(0),
        level_N=1,
        n0=1,
        growth_C_f=4.0 * math.pi,
        fricke_multiplier=1.0,
        plus_provider=_j_plus,
        n_cap=n_max,
    )


def zero_source(weight_k=Fraction(12), level_N: int = 1) -> CoefficientSource:
    """The zero form, handy as a degenerate input."""
    return CoefficientSource(
        name="zero",
        weight_k=weight_k,
        level_N=level_N,
        n0=0,
        growth_C_f=1.0,
        fricke_multiplier=1.0,
        plus_provider=lambda n_max: (list(range(0, n_max + 1)), [0] * (n_max + 1)),
    )


# ------------------------------------------------------------ ingestion


def _parse_float(token, what, lineno):
    try:
        value = float(token)
    except ValueError:
        raise IngestionError(f"line {lineno}: cannot parse {what} {token!r}") from None
    if not math.isfinite(value):
        raise IngestionError(f"line {lineno}: {what} is not finite")
    return value


def _parse_int(token, what, lineno):
    try:
        return int(token)
    except ValueError:
        raise IngestionError(f"line {lineno}: {what} must be an integer, got {token!r}") from None


def parse_source(text: str, name: str = "file") -> CoefficientSource:
    """Build a source from the text coefficient format.

    Header: ``k N n0 fricke_re fricke_im C_f [minus_degree]``.  Body lines:
    ``n c_plus [c_minus]``.  Blank lines and text after ``#`` are ignored.
    """
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append((lineno, line.split()))
    if not rows:
        raise IngestionError("coefficient file is empty")

    lineno, head = rows[0]
    if len(head) not in (6, 7):
        raise IngestionError(f"line {lineno}: header needs 6 or 7 fields, got {len(head)}")
    try:
        k = Fraction(head[0])
    except (ValueError, ZeroDivisionError):
        raise IngestionError(f"line {lineno}: cannot parse weight {head[0]!r}") from None
    if (2 * k).denominator != 1:
        raise IngestionError(f"line {lineno}: weight must lie in (1/2)Z")
    level = _parse_int(head[1], "level N", lineno)
    n0 = _parse_int(head[2], "n0", lineno)
    fricke = complex(_parse_float(head[3], "fricke_re", lineno), _parse_float(head[4], "fricke_im", lineno))
    c_f = _parse_float(head[5], "C_f", lineno)
    degree = _parse_float(head[6], "minus_degree", lineno) if len(head) == 7 else None
    if level < 1:
        raise IngestionError(f"line {lineno}: level must be positive")
    if n0 < 0:
        raise IngestionError(f"line {lineno}: n0 must be non-negative")
    if not c_f > 0.0:
        raise IngestionError(f"line {lineno}: C_f must be positive")
    if fricke == 0:
        raise IngestionError(f"line {lineno}: Fricke multiplier must be non-zero")

    plus: dict[int, float] = {}
    minus: dict[int, float] = {}
    for lineno, fields in rows[1:]:
        if len(fields) not in (2, 3):
            raise IngestionError(f"line {lineno}: expected 'n c_plus [c_minus]'")
        n = _parse_int(fields[0], "index n", lineno)
        if n < -n0:
            raise IngestionError(f"line {lineno}: index {n} below -n0 = {-n0}")
        if n in plus:
            raise IngestionError(f"line {lineno}: duplicate index {n}")
        plus[n] = _parse_float(fields[1], "c_plus", lineno)
        if len(fields) == 3:
            value = _parse_float(fields[2], "c_minus", lineno)
            if value != 0.0:
                if n < 1:
                    raise IngestionError(f"line {lineno}: c_minus is only defined for n >= 1")
                minus[n] = value
    if not plus:
        raise IngestionError("coefficient file has a header but no coefficients")
    top = max(plus)
    if minus:
        if k.denominator != 1 or k > 0:
            raise IngestionError("non-holomorphic coefficients require weight k in -N_0")
        if degree is None:
            raise IngestionError("non-holomorphic coefficients require a minus_degree header field")

    plus_idx = list(range(-n0, top + 1))
    plus_val = [plus.get(n, 0.0) for n in plus_idx]

    def plus_provider(n_max):
        stop = n_max + n0 + 1
        return plus_idx[:stop], plus_val[:stop]

    minus_provider = None
    if minus:
        minus_idx = list(range(1, top + 1))
        minus_val = [minus.get(n, 0.0) for n in minus_idx]

        def minus_provider(n_max):
            return minus_idx[:n_max], minus_val[:n_max]

    try:
        return CoefficientSource(
            name=name,
            weight_k=k,
            level_N=level,
            n0=n0,
            growth_C_f=c_f,
            fricke_multiplier=fricke,
            plus_provider=plus_provider,
            minus_provider=minus_provider,
            minus_degree=degree,
            n_cap=top,
        )
    except DomainError as exc:
        raise IngestionError(str(exc)) from None


def load_source(path) -> CoefficientSource:
    """Read a coefficient file (see :func:`parse_source`)."""
    try:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise IngestionError(f"cannot read coefficient file: {exc}") from None
    except UnicodeDecodeError:
        raise IngestionError("coefficient file is not valid UTF-8 text") from None
    return parse_source(text, name=f"file:{path}")
