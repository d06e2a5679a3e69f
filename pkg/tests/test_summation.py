"""Summation-formula verifiers: each side against independent oracles."""

import math
import warnings

import mpmath as mp
import pytest

from hmfsum.errors import DomainError, HypothesisError, TruncationError
from hmfsum.modforms import delta_source, j_source, parse_source, partition_numbers, tau_coefficients
from hmfsum.quadrature import ContourSpec
from hmfsum.summation import (
    SF1Params,
    SlowTailWarning,
    SummationReport,
    asymptotic_scan,
    contour_height,
    partition_constant,
    partition_rhs_general,
    partition_rhs_extra_factor,
    riesz_lhs,
    riesz_main_term,
    riesz_remainder_details,
    sf1_lhs,
    sf1_rhs,
    sf1_tail_bounds,
    verify_partition,
    verify_riesz,
    verify_sf1,
)

mp.mp.dps = 30


def integral_oracle(k, n, C, X, N, lam, side):
    """One summand of either side written as an integral against
    exp(-X/x) phi(x), with the incomplete Gamma kernel of the
    nonholomorphic part, evaluated by mpmath."""
    r = mp.sqrt(N)

    def phi(x):
        return mp.e ** (-C * (r * x + 1 / (r * x)))

    if side == "lhs":
        g = lambda x: mp.e ** (-X / x) * phi(x) * mp.e ** (2 * mp.pi * n * x) * mp.gammainc(1 - k, 4 * mp.pi * n * x) / x
        return complex(0.5 * mp.quad(g, [0, 0.5, 2, mp.inf]))
    g = lambda x: (
        mp.e ** (-X / x) * phi(x) * x ** (-1 - k) * mp.e ** (2 * mp.pi * n / (N * x)) * mp.gammainc(1 - k, 4 * mp.pi * n / (N * x))
    )
    factor = complex(mp.mpc(0, 1) ** k) * N ** (-k / 2.0) * lam
    return factor * complex(0.5 * mp.quad(g, [0, 0.5, 2, mp.inf]))


class TestSF1:
    def test_j_far_from_threshold(self):
        rep = verify_sf1(j_source(), SF1Params(10.0, 1.0), tol=1e-8)
        assert rep.passed and rep.rel_residual < 1e-8
        assert rep.tail_bound_lhs < 1e-8 * abs(rep.lhs)

    def test_delta(self):
        for X in (0.3, 1.0, 4.0):
            rep = verify_sf1(delta_source(), SF1Params(0.5, X), tol=1e-10)
            assert rep.rel_residual < 1e-10

    def test_lhs_term_against_bessel_oracle(self):
        f = j_source()
        p = SF1Params(7.0, 1.5)
        terms = [(-1, 1), (0, 744), (1, 196884)]
        ref = sum(
            c * mp.besselk(0, 2 * mp.sqrt((7 + 2 * mp.pi * n) * (7 + 1.5))) for n, c in terms
        )
        assert abs(sf1_lhs(f, p, 1) - float(ref)) < 1e-13 * abs(float(ref))

    @pytest.mark.parametrize("k", [0, -1, -2])
    @pytest.mark.parametrize("N", [1, 4])
    def test_nonholomorphic_kernels_against_integral_oracle(self, k, N):
        for n in (1, 3):
            f = parse_source(f"{k} {N} 0 -1 0 0.5 0\n{n} 0 1.0\n")
            p = SF1Params(1.2, 0.7)
            lhs_ref = integral_oracle(k, n, 1.2, 0.7, N, -1, "lhs")
            rhs_ref = integral_oracle(k, n, 1.2, 0.7, N, -1, "rhs")
            assert abs(sf1_lhs(f, p, n) - lhs_ref) < 1e-12 * abs(lhs_ref)
            assert abs(sf1_rhs(f, p, n) - rhs_ref) < 1e-12 * abs(rhs_ref)

    def test_holomorphic_rhs_term_against_integral_oracle(self):
        f = parse_source("-2 4 0 1 0 0.5\n2 1.0\n")
        p = SF1Params(1.1, 2.0)
        N, k, n = 4, -2, 2
        r = mp.sqrt(N)
        g = lambda x: mp.e ** (-2.0 / x) * mp.e ** (-1.1 * (r * x + 1 / (r * x))) * x ** (-1 - k) * mp.e ** (-2 * mp.pi * n / (N * x))
        ref = complex(mp.mpc(0, 1) ** k) * N ** (-k / 2.0) * complex(0.5 * mp.quad(g, [0, 0.5, 2, mp.inf]))
        assert abs(sf1_rhs(f, p, n) - ref) < 1e-12 * abs(ref)

    def test_tail_bounds_dominate_observed_tails(self):
        f = j_source()
        p = SF1Params(10.0, 1.0)
        full_l, full_r = sf1_lhs(f, p, 400), sf1_rhs(f, p, 400)
        for m in (4, 8, 16):
            tl, tr = sf1_tail_bounds(f, p, m)
            assert abs(full_l - sf1_lhs(f, p, m)) <= tl
            assert abs(full_r - sf1_rhs(f, p, m)) <= tr

    def test_cap_raises_with_report(self):
        with pytest.raises(TruncationError) as info:
            verify_sf1(j_source(), SF1Params(2.0 * math.pi + 0.1, 1.0), tol=1e-6, n_max_cap=100)
        rep = info.value.report
        assert isinstance(rep, SummationReport) and rep.n_max_lhs == 100 and not rep.passed

    def test_hypothesis_violations(self):
        with pytest.raises(HypothesisError):
            SF1Params(1.0, -1.0)
        with pytest.raises(HypothesisError):
            verify_sf1(j_source(), SF1Params(6.0, 1.0))

    def test_report_relative_residual(self):
        rep = SummationReport.build(2.0, 1.0, 0.4, 1, 1, 0.0, 0.0, {})
        assert rep.abs_residual == 1.0 and rep.rel_residual == 0.5 and not rep.passed


class TestPartition:
    def test_constant(self):
        assert partition_constant(0.01) == pytest.approx(math.pi / 12 + 0.01)
        with pytest.raises(HypothesisError):
            partition_constant(0.0)

    def test_general_rhs_against_direct_sum(self):
        X, eps, n_max = 1.0, 0.01, 40
        C = math.pi / 12 + eps
        p = partition_numbers(n_max)
        ref = mp.fsum(
            p[n] * mp.e ** (-2 * mp.sqrt(C * (24 * X + 2 * mp.pi * n + eps))) for n in range(n_max + 1)
        ) * mp.sqrt(mp.pi / C) / 2
        assert abs(partition_rhs_general(X, eps, n_max) - float(ref)) < 1e-14 * float(ref)

    def test_generic_rhs_matches_closed_form(self):
        # The generic right side at half-integral weight reduces to the
        # K_{-1/2} closed form; the two code paths must agree.
        f_rhs = verify_partition(1.0, n_max=60).rhs
        assert abs(f_rhs.real - partition_rhs_general(1.0, 0.01, 60)) < 1e-13 * abs(f_rhs)
        assert abs(f_rhs.imag) < 1e-13 * abs(f_rhs)

    def test_extra_factor_variant_differs_by_order_one(self):
        rep = verify_partition(1.0, n_max=300)
        assert rep.extras["extra_factor_rel_residual"] > 0.5
        assert rep.extras["consistent_variant"] == "general"
        assert partition_rhs_extra_factor(1.0, 0.01, 10) < partition_rhs_general(1.0, 0.01, 10)

    def test_residual_falls_with_truncation(self):
        res = [verify_partition(1.0, n_max=m).rel_residual for m in (300, 1200)]
        assert res[1] < res[0]


class TestRiesz:
    def test_lhs_against_direct_sum(self):
        tau = tau_coefficients(10)
        X, rho = 40.0, 2.0
        ref = sum(
            tau[n] * math.exp(-2 * math.pi * n) * (2 * math.pi * n) ** -5.5 * (1 - 2 * math.pi * n / X) ** rho
            for n in range(1, 7)
        )
        assert abs(riesz_lhs(delta_source(), X, rho) - ref) < 1e-15 * abs(ref)

    def test_main_term_against_series(self):
        # For level one the Fricke-side transform at s = (k-1)/2 is
        # e^{-2 pi n} (2 pi n)^{-s}, so the main term is a rapidly convergent series.
        tau = tau_coefficients(30)
        ref = mp.fsum(tau[n] * mp.e ** (-2 * mp.pi * n) * (2 * mp.pi * n) ** mp.mpf(-5.5) for n in range(1, 31))
        main = riesz_main_term(delta_source())
        assert abs(main - float(ref)) < 1e-14 * float(ref)
        assert riesz_lhs(delta_source(), 1000.0, 2.0) == pytest.approx(main.real, rel=2e-2)

    def test_contour_height(self):
        assert contour_height(1) == pytest.approx(3.5 * math.sqrt(2 * math.pi) + 10.0)

    def test_small_truncation(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", SlowTailWarning)
            rep = verify_riesz(delta_source(), 10.0, ContourSpec(epsilon=0.45, rho=2.0), tol=1e-3, n_max=200)
        assert rep.passed and rep.rel_residual < 1e-3
        assert rep.extras["tail_estimate"] >= 0.0 and rep.tail_bound_rhs > 0.0

    def test_slow_tail_warning(self):
        with pytest.warns(SlowTailWarning):
            verify_riesz(delta_source(), 20.0, ContourSpec(epsilon=0.45, rho=2.0), tol=1e-12, n_max=20)

    def test_threads_do_not_change_value(self):
        spec = ContourSpec(epsilon=0.45, rho=3.0)
        one = riesz_remainder_details(delta_source(), 20.0, spec, n_max=40, threads=1)
        four = riesz_remainder_details(delta_source(), 20.0, spec, n_max=40, threads=4)
        assert one.value == four.value and one.quad_error == four.quad_error

    def test_hypotheses(self):
        with pytest.raises(HypothesisError):
            riesz_lhs(delta_source(), 10.0, 1.0)
        with pytest.raises(DomainError):
            riesz_lhs(j_source(), 10.0, 2.0)
        with pytest.raises(DomainError):
            riesz_remainder_details(delta_source(), -1.0, ContourSpec(epsilon=0.45, rho=2.0), n_max=5)


class TestScan:
    def test_decreasing_residual(self):
        scan = asymptotic_scan(delta_source(), 2.0, [10, 20, 40, 80, 160])
        res = [r for _, r in scan.points]
        assert all(b < a for a, b in zip(res, res[1:]))
        assert scan.slope <= 0.0

    def test_grid_must_increase(self):
        with pytest.raises(DomainError):
            asymptotic_scan(delta_source(), 2.0, [20, 10])
