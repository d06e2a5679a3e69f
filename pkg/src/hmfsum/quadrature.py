"""Numerical integration: double-exponential rules on (a, inf) and [a, b],
and the trapezoidal rule on a vertical line in the complex plane.

Integrands are called with NumPy arrays of nodes and must return arrays of
the same shape.  Non-finite integrand values at the extreme nodes of the
double-exponential rules (where the transformed weight underflows) are
treated as zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import config
from .errors import ConvergenceError, DecayError, DomainError

_HALF_PI = 0.5 * math.pi
_DE_T_MAX = 6.0
_DE_H0 = 0.5


@dataclass(frozen=True)
class QuadResult:
    value: complex | float
    abs_error_estimate: float
    nodes_used: int


@dataclass(frozen=True)
class ContourSpec:
    """Parameters of a vertical-line integral over Re(s) = -epsilon.

    ``T`` is the truncation height (``None`` means adaptive), ``rho`` the
    Riesz exponent that fixes the declared decay rate (1+|t|)^{2 eps - rho},
    and ``nodes_per_unit`` the reciprocal of the trapezoidal step.
    """

    epsilon: float = config.RIESZ_EPSILON
    T: float | None = None
    rho: float = config.RIESZ_RHO
    nodes_per_unit: int = config.RIESZ_NODES_PER_UNIT

    def __post_init__(self):
        if not 0.0 < self.epsilon <= 0.5:
            raise DomainError("ContourSpec: epsilon must lie in (0, 1/2]")
        if not self.rho > 1.0:
            raise DomainError("ContourSpec: rho must exceed 1")
        if self.T is not None and not self.T > 0.0:
            raise DomainError("ContourSpec: T must be positive")
        if int(self.nodes_per_unit) != self.nodes_per_unit or self.nodes_per_unit < 1:
            raise DomainError("ContourSpec: nodes_per_unit must be a positive integer")

    @property
    def decay_exponent(self) -> float:
        return 2.0 * self.epsilon - self.rho


def _clean(values):
    values = np.asarray(values)
    return np.where(np.isfinite(values), values, 0.0)


def _de_levels(evaluate, tol, max_level, min_level=3):
    """Shared driver: halve the step until two levels agree to ``tol``.

    ``evaluate(t)`` returns the transformed integrand (weight included) at
    the nodes t.  Level 0 uses step _DE_H0; level L adds the odd multiples of
    _DE_H0 / 2^L.
    """
    h = _DE_H0
    t = np.arange(-_DE_T_MAX, _DE_T_MAX + 0.5 * h, h)
    total = _clean(evaluate(t)).sum()
    nodes = t.size
    estimate = h * total
    diff = math.inf
    for level in range(1, max_level + 1):
        h *= 0.5
        t_new = np.arange(-_DE_T_MAX + h, _DE_T_MAX, 2.0 * h)
        total = total + _clean(evaluate(t_new)).sum()
        nodes += t_new.size
        new_estimate = h * total
        diff = abs(new_estimate - estimate)
        estimate = new_estimate
        scale = max(1.0, abs(estimate))
        if level >= min_level and diff <= tol * scale:
            return QuadResult(_as_number(estimate), float(diff + 4e-16 * abs(estimate)), nodes)
    raise ConvergenceError(
        f"quadrature did not converge after {max_level} refinements (last change {diff:.3e})"
    )


def _as_number(value):
    value = complex(value)
    return value.real if value.imag == 0.0 else value


def integrate_semi_infinite(integrand, tol=config.QUAD_TOL, *, a=0.0, scale=1.0, max_level=None):
    """Integral of ``integrand`` over (a, inf) by the exp-sinh rule.

    Nodes x = a + scale * exp((pi/2) sinh t).  ``scale`` should roughly match
    the width of the integrand.  The refinement stops when two successive
    levels differ by at most ``tol * max(1, |I|)``.
    """
    max_level = config.QUAD_MAX_LEVEL if max_level is None else max_level

    def evaluate(t):
        u = _HALF_PI * np.sinh(t)
        with np.errstate(over="ignore", under="ignore", invalid="ignore", divide="ignore"):
            dx = scale * np.exp(u)
            w = _HALF_PI * np.cosh(t) * dx
            return w * np.asarray(integrand(a + dx))

    return _de_levels(evaluate, tol, max_level)


def integrate_finite(integrand, a, b, tol=config.QUAD_TOL, *, endpoint_distances=False, max_level=None):
    """Integral of ``integrand`` over [a, b] by the tanh-sinh rule.

    Endpoint singularities of type (x-a)^alpha, alpha > -1, are absorbed by
    the transformation.  With ``endpoint_distances=True`` the integrand is
    called as ``integrand(x, x - a, b - x)`` with both distances computed
    without cancellation, so factors such as (1 - x)^{s-1} stay accurate
    next to the endpoints.
    """
    if not b > a:
        raise DomainError("integrate_finite: need a < b")
    max_level = config.QUAD_MAX_LEVEL if max_level is None else max_level
    half = 0.5 * (b - a)

    def evaluate(t):
        u = _HALF_PI * np.sinh(t)
        with np.errstate(over="ignore", under="ignore", invalid="ignore", divide="ignore"):
            e = np.exp(-2.0 * np.abs(u))
            # Distance to the nearer endpoint is 2 * half * e / (1 + e).
            near = 2.0 * half * e / (1.0 + e)
            far = 2.0 * half - near
            to_a = np.where(u < 0.0, near, far)
            to_b = np.where(u < 0.0, far, near)
            x = np.where(u < 0.0, a + to_a, b - to_b)
            w = half * _HALF_PI * np.cosh(t) * 4.0 * e / (1.0 + e) ** 2
            if endpoint_distances:
                vals = integrand(x, to_a, to_b)
            else:
                vals = integrand(x)
            return w * np.asarray(vals)

    return _de_levels(evaluate, tol, max_level)


def vertical_line_tail_bound(edge_magnitude, T, spec):
    """Bound on the integral of |g| beyond height T on both sides.

    Assumes |g(sigma+it)| <= A |t|^p for |t| >= T with p = 2 eps - rho and A
    calibrated from the magnitude observed at |t| = T; the factor 1/(2 pi)
    of the inversion integral is included.
    """
    p = spec.decay_exponent
    if p >= -1.0:
        return math.inf
    return 2.0 * edge_magnitude * T / (-p - 1.0) / (2.0 * math.pi)


def _check_decay(integrand, sigma, T, spec, edge, conj_symmetric):
    ts = np.array([2.0 * T]) if conj_symmetric else np.array([2.0 * T, -2.0 * T])
    far = float(np.max(np.abs(integrand(sigma + 1j * ts))))
    allowed = edge * 2.0 ** spec.decay_exponent
    if far > 1.000001 * allowed + 1e-300:
        raise DecayError(
            f"integrand on Re(s) = {sigma} decays slower than |t|^{spec.decay_exponent:.3g} "
            f"(|g| = {edge:.3e} at T = {T:.4g}, {far:.3e} at 2T)"
        )


def integrate_vertical_line(
    integrand,
    spec: ContourSpec,
    sigma=None,
    tol=config.QUAD_TOL,
    conj_symmetric=False,
    check_decay=True,
):
    """(1/(2 pi i)) times the integral of g(s) ds along Re(s) = sigma.

    Trapezoidal rule with step 1/nodes_per_unit on |Im s| <= T, plus the tail
    bound of :func:`vertical_line_tail_bound`.  When ``spec.T`` is None the
    height starts at 10 and doubles until the tail bound is below tol/2.

    ``conj_symmetric=True`` declares g(conj(s)) = conj(g(s)); only Im s >= 0
    is sampled and the result is real.

    The discretisation error of the trapezoidal rule is estimated from the
    coarse rule on every other node, using the fact that the error of a
    rule on an analytic strip squares when the step halves.
    """
    sigma = -spec.epsilon if sigma is None else float(sigma)
    h = 1.0 / spec.nodes_per_unit

    def edge_of(T):
        ts = np.array([T]) if conj_symmetric else np.array([T, -T])
        return float(np.max(np.abs(integrand(sigma + 1j * ts))))

    if spec.T is None:
        T = 10.0
        for _ in range(40):
            edge = edge_of(T)
            if vertical_line_tail_bound(edge, T, spec) < 0.5 * tol:
                break
            T *= 2.0
        else:
            raise ConvergenceError("integrate_vertical_line: adaptive height did not converge")
    else:
        T = float(spec.T)
        edge = edge_of(T)

    n = int(math.floor(T / h + 1e-9))
    if conj_symmetric:
        t = h * np.arange(0, n + 1)
    else:
        t = h * np.arange(-n, n + 1)
    g = np.asarray(integrand(sigma + 1j * t), dtype=complex)
    if conj_symmetric:
        weights = np.ones(t.size)
        weights[0] = 0.5
        fine = 2.0 * (weights * g.real).sum()
        coarse = 2.0 * (weights[::2] * g[::2].real).sum()
        l1 = 2.0 * (weights * np.abs(g)).sum()
        value_fine = h * fine / (2.0 * math.pi)
        value_coarse = 2.0 * h * coarse / (2.0 * math.pi)
        value = float(value_fine)
    else:
        mid = n % 2
        value_fine = h * g.sum() / (2.0 * math.pi)
        value_coarse = 2.0 * h * g[mid::2].sum() / (2.0 * math.pi)
        l1 = np.abs(g).sum()
        value = _as_number(value_fine)
    l1 = h * l1 / (2.0 * math.pi)
    if check_decay and edge > 0.0:
        _check_decay(integrand, sigma, T, spec, edge, conj_symmetric)
    tail = vertical_line_tail_bound(edge, T, spec)
    if l1 > 0.0:
        rel = abs(value_fine - value_coarse) / l1
        disc = 10.0 * rel * rel * l1
    else:
        disc = 0.0
    return QuadResult(value, float(tail + disc + 1e-16 * l1), int(t.size))
