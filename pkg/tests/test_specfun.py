"""Tests for complex Gamma wrappers and terminating hypergeometric polynomials."""

from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import special

from src.errors import DomainError
from src.specfun import PolyHypergeom, cgamma, clog_gamma, hyp1f1_poly, hyp2f1_poly


def rising_factorial(x: complex, k: int) -> complex:
    out = complex(1.0)
    for j in range(k):
        out *= x + j
    return out


class TestGamma:
    def test_real_argument(self):
        assert cgamma(1.6) == pytest.approx(math.gamma(1.6))

    def test_negative_non_integer(self):
        assert cgamma(-0.4) == pytest.approx(math.gamma(-0.4))

    @pytest.mark.parametrize("s", [0, -1, -3])
    def test_poles_raise(self, s):
        with pytest.raises(DomainError):
            cgamma(s)
        with pytest.raises(DomainError):
            clog_gamma(s)

    def test_log_gamma_consistent(self):
        s = 1.3 + 0.7j
        assert np.exp(clog_gamma(s)) == pytest.approx(cgamma(s))

    def test_recurrence_at_random_complex_points(self):
        rng = np.random.default_rng(20)
        points = rng.uniform(-4.5, 4.5, 25) + 1j * rng.uniform(-3.0, 3.0, 25)
        for s in points:
            assert cgamma(s + 1) == pytest.approx(s * cgamma(s), rel=1e-10)
            # log Γ(s+1) - log Γ(s) - log s is a multiple of 2πi
            assert np.exp(clog_gamma(s + 1) - clog_gamma(s) - np.log(s)) == pytest.approx(1.0, rel=1e-10)


class TestHypergeometricPolynomials:
    def test_hyp2f1_value(self):
        # 1 - 2*1.6/2.6*0.5 + (1.6/3.6)*0.25
        assert hyp2f1_poly(2, 1.6, 2.6, 0.5).real == pytest.approx(0.495726, abs=1e-6)

    def test_hyp1f1_value(self):
        # 1 - 2/2.6 + 2/(2.6*3.6*2)
        assert hyp1f1_poly(2, 2.6, 1.0).real == pytest.approx(0.337607, abs=1e-6)

    def test_degree_zero_is_one(self):
        np.testing.assert_allclose(hyp1f1_poly(0, 2.6, np.array([0.0, 3.0, 100.0])), 1.0)

    @pytest.mark.parametrize("n", [1, 3, 6])
    def test_hyp1f1_matches_laguerre(self, n):
        # 1F1(-n; a+1; x) = L_n^{(a)}(x) / binom(n+a, n)
        a, x = 1.6, np.linspace(0.0, 12.0, 7)
        expected = special.eval_genlaguerre(n, a, x) / special.binom(n + a, n)
        np.testing.assert_allclose(np.real(hyp1f1_poly(n, a + 1, x)), expected, rtol=1e-10, atol=1e-12)

    @pytest.mark.parametrize("n", [1, 4, 8])
    def test_hyp2f1_matches_scipy(self, n):
        x = np.array([-0.7, 0.1, 0.5, 0.9])
        expected = special.hyp2f1(-n, 1.6, 2.6, x)
        np.testing.assert_allclose(np.real(hyp2f1_poly(n, 1.6, 2.6, x)), expected, rtol=1e-10)

    def test_complex_argument(self):
        x = 0.3 - 0.8j
        expected = 1 + (-1) * 1.6 / 2.6 * x
        assert hyp2f1_poly(1, 1.6, 2.6, x) == pytest.approx(expected)

    def test_coefficients(self):
        coeffs = PolyHypergeom(2, None, 2.6).coefficients()
        np.testing.assert_allclose(coeffs, [1.0, -2 / 2.6, 2 / (2.6 * 3.6 * 2)])

    @pytest.mark.parametrize("n", [-1, 1.5, True])
    def test_invalid_degree(self, n):
        with pytest.raises(DomainError):
            PolyHypergeom(n, None, 2.0)

    def test_lower_parameter_hitting_zero(self):
        with pytest.raises(DomainError):
            PolyHypergeom(3, 1.0, -1.0)

    def test_coefficients_match_rising_factorials(self):
        n, b, c = 5, 0.7 + 0.4j, 2.3
        expected = [
            rising_factorial(-n, k) * rising_factorial(b, k) / (rising_factorial(c, k) * math.factorial(k))
            for k in range(n + 1)
        ]
        np.testing.assert_allclose(PolyHypergeom(n, b, c).coefficients(), expected, rtol=1e-13)

    @pytest.mark.parametrize("n", [0, 1, 4, 9])
    @pytest.mark.parametrize("b", [1.6, 0.3 + 0.2j])
    def test_equal_parameters_give_binomial(self, n, b):
        # 2F1(-n, b; b; x) = (1 - x)^n
        x = np.array([-0.8, 0.0, 0.35, 0.9, 0.2 + 0.5j])
        np.testing.assert_allclose(hyp2f1_poly(n, b, b, x), (1 - x) ** n, rtol=1e-12, atol=1e-12)

    @pytest.mark.parametrize("n", [0, 1, 3, 7])
    @pytest.mark.parametrize("c", [2.6, 1.2])
    def test_kummer_equation(self, n, c):
        # y = 1F1(-n; c; q) solves q y'' + (c - q) y' + n y = 0
        q = np.linspace(0.1, 15.0, 9)

        def derivative(order: int) -> np.ndarray:
            if order > n:
                return np.zeros_like(q, dtype=complex)
            factor = rising_factorial(-n, order) / rising_factorial(c, order)
            return factor * np.asarray(hyp1f1_poly(n - order, c + order, q))

        y, y1, y2 = derivative(0), derivative(1), derivative(2)
        terms = [q * y2, (c - q) * y1, n * y]
        scale = max(float(np.max(np.abs(t))) for t in terms) + 1.0
        np.testing.assert_allclose(sum(terms), 0, atol=1e-12 * scale)
