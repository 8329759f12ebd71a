"""Tests for weighted L² norms, Bergman norms and the isometries."""

from __future__ import annotations

import math

import numpy as np
import pytest

from src.core import AnalyticCoefficient, Atom, RadialFunction
from src.errors import DomainError
from src.norms import (
    BergmanNorm,
    ConstantReport,
    IsometryReport,
    bergman_norm,
    derivative_isometry_constant,
    direct_isometry_constant,
    inner_product_constant_check,
    isometry_check,
    l2_inner,
    l2_weighted_norm,
    power_basis,
)
from src.transform import transform

EXP = RadialFunction((Atom(1.0, 1.0, 1j),))


class TestConfigurationSide:
    def test_exponential(self):
        # ∫ q² e^{-2q} dq = 1/4
        assert l2_weighted_norm(EXP) == pytest.approx(0.25)

    def test_oscillating_atom(self):
        # |q e^{(i c - 1) q}|² = q² e^{-2q}: ∫ q⁴ e^{-2q} dq = 4!/2⁵
        f = RadialFunction((Atom(1.0, 2.0, 0.7 + 1j),))
        assert l2_weighted_norm(f) == pytest.approx(24 / 32)

    def test_inner_product_of_basis_pair(self):
        alpha = 0.3
        f, g = RadialFunction((power_basis(0, alpha),)), RadialFunction((power_basis(1, alpha),))
        expected = math.gamma(2 * alpha + 2) / 2 ** (2 * alpha + 2)
        assert l2_inner(f, g) == pytest.approx(expected)

    def test_high_order_atom_does_not_overflow(self):
        # ∫ q² q^{197} e^{-10q} dq = Γ(200)/10^200; Γ(200) alone overflows a double
        f = RadialFunction((Atom(1.0, 99.5, 5j),))
        expected = math.exp(math.lgamma(200) - 200 * math.log(10))
        assert math.isfinite(expected)
        assert l2_weighted_norm(f) == pytest.approx(expected, rel=1e-10)

    def test_sampled_function(self):
        q = np.geomspace(1e-4, 40.0, 2000)
        assert l2_weighted_norm(RadialFunction.from_samples(q, np.exp(-q))) == pytest.approx(0.25, rel=1e-6)

    def test_atoms_plus_samples(self):
        q = np.geomspace(1e-4, 40.0, 2000)
        f = RadialFunction((Atom(1.0, 1.0, 1j),), RadialFunction.from_samples(q, np.exp(-q)).samples)
        # (2 e^{-q}) gives four times the norm
        assert l2_weighted_norm(f) == pytest.approx(1.0, rel=1e-6)

    def test_inner_product_rejects_samples(self):
        sampled = RadialFunction.from_samples(np.linspace(1, 4, 5), np.ones(5))
        with pytest.raises(DomainError):
            l2_inner(EXP, sampled)

    def test_power_basis(self):
        atom = power_basis(2, 0.3)
        assert atom.alpha == pytest.approx(2.3)
        assert atom.pole == 1j
        with pytest.raises(DomainError):
            power_basis(-1, 0.3)


class TestBergmanNorm:
    def test_order_must_be_positive(self):
        with pytest.raises(DomainError):
            BergmanNorm(0.0, 1.0, 0.0)

    def test_zero_coefficient(self):
        assert bergman_norm(AnalyticCoefficient(0.6), 2.2).value == 0.0

    def test_direct_norm_of_exponential(self):
        # γ = 2: ∫ a³/a² ∫ |Γ(3) w^{-3}|² db da with |w|² = (1+a)² + b²
        F = transform(EXP, 2.0)
        expected = 0.25 / direct_isometry_constant(2.0)
        assert bergman_norm(F, 3.0).value == pytest.approx(expected, rel=1e-6)

    def test_diverging_order_detected(self):
        # order 1 makes the a -> 0 end logarithmic
        with pytest.raises(DomainError):
            bergman_norm(transform(EXP, 0.6), 1.0)

    @pytest.mark.parametrize("c", [2.0, -0.5, 0.3 - 1.7j])
    def test_homogeneity(self, c):
        F = transform(EXP, 0.6).derivative()
        base = bergman_norm(F, 2.2).value
        assert bergman_norm(F.scaled(c), 2.2).value == pytest.approx(abs(c) ** 2 * base, rel=1e-12)

    def test_parallelogram_law(self):
        F = transform(EXP, 0.6).derivative()
        G = transform(RadialFunction((Atom(0.5 - 0.25j, 2.5, 0.3 + 1.2j),)), 0.6).derivative()
        lhs = bergman_norm(F.plus(G), 2.2).value + bergman_norm(F.plus(G.scaled(-1)), 2.2).value
        rhs = 2 * bergman_norm(F, 2.2).value + 2 * bergman_norm(G, 2.2).value
        assert lhs == pytest.approx(rhs, rel=1e-6)


class TestIsometry:
    def test_constants(self):
        assert derivative_isometry_constant(1.0) == pytest.approx(2 / math.pi)
        assert direct_isometry_constant(2.0) == pytest.approx(2 / math.pi)

    @pytest.mark.parametrize("gamma", [0.8, 1.0])
    def test_direct_form_needs_gamma_above_one(self, gamma):
        with pytest.raises(DomainError):
            direct_isometry_constant(gamma)

    @pytest.mark.parametrize("gamma", [0.3, 0.6, 0.8, 1.5])
    def test_derivative_form(self, gamma):
        report = isometry_check(EXP, gamma, form="derivative")
        assert report.lhs == pytest.approx(0.25)
        assert report.discrepancy < 1e-4

    @pytest.mark.parametrize("n", range(5))
    @pytest.mark.parametrize("alpha", [0.0, 0.3, 0.7])
    def test_derivative_form_on_power_basis(self, n, alpha):
        f = RadialFunction((power_basis(n, alpha),))
        s = 2 * (alpha + n) + 1
        report = isometry_check(f, 0.6, form="derivative")
        assert report.lhs == pytest.approx(math.gamma(s) / 2**s, rel=1e-12)
        assert report.discrepancy < 1e-4

    @pytest.mark.parametrize("gamma", [1.5, 2.0])
    def test_direct_form(self, gamma):
        assert isometry_check(EXP, gamma, form="direct").discrepancy < 1e-4

    def test_unknown_form(self):
        with pytest.raises(ValueError):
            isometry_check(EXP, 0.6, form="sideways")

    def test_report_as_dict(self):
        report = IsometryReport("direct", 1.0, 1.5, 1e-9)
        assert report.discrepancy == pytest.approx(1 / 3)
        assert report.as_dict()["discrepancy"] == report.discrepancy
        assert IsometryReport("direct", 0.0, 0.0, 0.0).discrepancy == 0.0


class TestInnerProductConstant:
    def test_measured_constant_matches_derived_form(self):
        report = inner_product_constant_check(0.8)
        assert report.matches == "derived"
        assert abs(report.measured - report.derived) <= 1e-3 * report.derived
        # Γ(2γ-2) is finite at γ = 0.8 but gives a different value
        assert report.printed is not None
        assert report.printed != pytest.approx(report.derived, rel=1e-2)

    def test_matches_logic(self):
        assert ConstantReport(0.8, 2.0 + 0j, 2.0, 5.0).matches == "derived"
        assert ConstantReport(0.8, 5.0 + 0j, 2.0, 5.0).matches == "printed"
        assert ConstantReport(0.8, 3.0 + 0j, 2.0, None).matches is None
