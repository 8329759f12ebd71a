"""Tests for the forward transform, operator maps and half-plane diagnostics."""

from __future__ import annotations

import math

import numpy as np
import pytest

from src.core import AnalyticCoefficient, Atom, HalfPlanePoint, RadialFunction, Remainder, Samples
from src.errors import DomainError
from src.transform import (
    HalfPlaneGrid,
    apply_operator_map_q,
    apply_operator_map_qddq,
    cauchy_riemann_defect,
    decay_check,
    finite_difference_map,
    forward_atom,
    forward_quadrature,
    transform,
    wavelet_coefficient,
    zbar_ddz,
)

EXP = RadialFunction((Atom(1.0, 1.0, 1j),))
ZBARS = np.array([0.3 - 0.7j, -1.2 - 0.4j, 2.5 - 1.5j])


def exp_image(gamma: float, zbar: complex) -> complex:
    # ∫ e^{-i zbar q} q^γ e^{-q} dq
    return math.gamma(gamma + 1) / (1 + 1j * zbar) ** (gamma + 1)


class TestForwardAtom:
    def test_pole_term_of_exponential(self):
        term = forward_atom(Atom(1.0, 1.0, 1j), 0.6)
        assert term.order == pytest.approx(1.6)
        assert term.pole == 1j
        assert term.coeff == pytest.approx(math.gamma(1.6))

    def test_value_at_minus_i(self):
        F = transform(EXP, 0.6)
        assert F.evaluate(-1j).real == pytest.approx(math.gamma(1.6) / 2**1.6)
        assert F.evaluate(-1j).real == pytest.approx(0.29475, abs=5e-6)

    @pytest.mark.parametrize("gamma", [0.3, 0.8, 2.0])
    def test_matches_integral(self, gamma):
        F = transform(EXP, gamma)
        np.testing.assert_allclose(F.evaluate(ZBARS), [exp_image(gamma, z) for z in ZBARS], rtol=1e-12)

    def test_gamma_must_be_positive(self):
        with pytest.raises(DomainError):
            forward_atom(Atom(1.0, 1.0, 1j), 0.0)


class TestForwardQuadrature:
    def test_sampled_exponential(self):
        q = np.geomspace(1e-6, 60.0, 3000)
        for zbar in ZBARS:
            value, err = forward_quadrature(Samples(q, np.exp(-q)), 0.6, zbar, atol=1e-13, rtol=1e-11)
            assert value == pytest.approx(exp_image(0.6, zbar), rel=1e-8)
            assert err < 1e-8

    @pytest.mark.slow
    @pytest.mark.parametrize("alpha", [0.0, 0.2, 0.5, 1.0, 2.0])
    @pytest.mark.parametrize("pole", [1j, 0.5j, 1 + 1j])
    @pytest.mark.parametrize("gamma", [0.3, 0.6, 0.8, 1.5])
    def test_sampled_atom_matches_closed_form(self, alpha, pole, gamma):
        atom = Atom(1.0, alpha, pole)
        q = np.geomspace(1e-6, 90.0, 6000)
        samples = Samples(q, atom.evaluate(q))
        rng = np.random.default_rng(11)
        zbars = rng.uniform(-3.0, 3.0, 20) - 1j * rng.uniform(0.1, 3.0, 20)
        values = [forward_quadrature(samples, gamma, zb, atol=1e-14, rtol=1e-12)[0] for zb in zbars]
        np.testing.assert_allclose(values, forward_atom(atom, gamma).evaluate(zbars), rtol=1e-7)

    def test_worked_value_at_minus_i(self):
        # α = 0.2, γ = 0.6, ζ₀ = i: Γ(0.8) [i(-i - i)]^{-0.8} = Γ(0.8) / 2^{0.8}
        atom = Atom(1.0, 0.2, 1j)
        assert forward_atom(atom, 0.6).evaluate(-1j) == pytest.approx(math.gamma(0.8) / 2**0.8, rel=1e-14)
        q = np.geomspace(1e-6, 60.0, 3000)
        value, _ = forward_quadrature(Samples(q, atom.evaluate(q)), 0.6, -1j, atol=1e-14, rtol=1e-12)
        assert value == pytest.approx(math.gamma(0.8) / 2**0.8, rel=1e-7)

    def test_error_covers_tail_truncation(self):
        # a grid cut at q = 3 leaves a tail the three-term series cannot resolve to 1e-10
        q = np.geomspace(1e-6, 3.0, 3000)
        value, err = forward_quadrature(Samples(q, np.exp(-q)), 0.6, -1j, atol=1e-14, rtol=1e-12)
        dropped = math.exp(-6.0) * 3.0**0.6 * 0.6 * 0.4 * 1.4 / (3.0**3 * 2.0**4)
        assert err >= dropped * (1 - 1e-6)
        assert abs(value - exp_image(0.6, -1j)) <= err

    def test_exact_tail_series_adds_no_error(self):
        # for gamma = 1 the series terminates
        q = np.geomspace(1e-6, 3.0, 3000)
        _, err = forward_quadrature(Samples(q, np.exp(-q)), 1.0, -1j, atol=1e-14, rtol=1e-12)
        assert err < 1e-9

    def test_atoms_only_is_exact(self):
        value, err = forward_quadrature(EXP, 0.6, -1j)
        assert value == pytest.approx(math.gamma(1.6) / 2**1.6)
        assert err == 0.0

    def test_upper_half_plane_rejected(self):
        with pytest.raises(DomainError):
            forward_quadrature(EXP, 0.6, 0.5 + 0.1j)

    def test_transform_of_samples_uses_remainder(self):
        q = np.geomspace(1e-6, 60.0, 3000)
        F = transform(RadialFunction.from_samples(q, np.exp(-q)), 0.8)
        assert F.pole_terms == ()
        assert not F.is_symbolic
        assert F.evaluate(-1j) == pytest.approx(exp_image(0.8, -1j), rel=1e-7)

    def test_zero_samples_give_zero_coefficient(self):
        F = transform(RadialFunction.from_samples(np.linspace(1, 5, 10), np.zeros(10)), 0.6)
        assert F.is_zero


class TestWaveletCoefficient:
    def test_scaling_factor(self):
        z = HalfPlanePoint(b=0.5, a=2.0)
        expected = 2.0**0.1 * exp_image(0.6, 0.5 - 2j)
        assert wavelet_coefficient(EXP, z, 0.6) == pytest.approx(expected)


class TestOperatorMaps:
    @pytest.mark.parametrize("gamma", [0.3, 0.8, 1.7])
    def test_qddq_map(self, gamma):
        f = RadialFunction((Atom(0.5 - 0.25j, 2.5, 0.3 + 1.2j), Atom(1.0, 1.0, 1j)))
        lhs = transform(f.qddq(), gamma)
        rhs = apply_operator_map_qddq(transform(f, gamma))
        np.testing.assert_allclose(lhs.evaluate(ZBARS), rhs.evaluate(ZBARS), rtol=1e-12)

    @pytest.mark.parametrize("gamma", [0.3, 0.8, 1.7])
    def test_multiplication_map(self, gamma):
        lhs = transform(RadialFunction((Atom(1.0, 2.0, 1j),)), gamma)
        rhs = apply_operator_map_q(transform(EXP, gamma))
        np.testing.assert_allclose(lhs.evaluate(ZBARS), rhs.evaluate(ZBARS), rtol=1e-12)

    def test_multiplication_is_i_times_derivative(self):
        F = transform(EXP, 0.6)
        np.testing.assert_allclose(
            apply_operator_map_q(F).evaluate(ZBARS), 1j * F.derivative().evaluate(ZBARS), rtol=1e-12
        )

    def test_zbar_ddz(self):
        F = transform(EXP, 0.6)
        np.testing.assert_allclose(
            zbar_ddz(F).evaluate(ZBARS), ZBARS * F.derivative().evaluate(ZBARS), rtol=1e-12
        )

    def test_symbolic_maps_reject_remainders(self):
        F = AnalyticCoefficient(0.6, remainder=Remainder(lambda z: z**-2))
        with pytest.raises(DomainError):
            apply_operator_map_qddq(F)

    @pytest.mark.parametrize("kind", ["qddq", "q", "zbar_ddz"])
    def test_finite_difference_map_agrees_with_symbolic(self, kind):
        F = transform(EXP, 0.6)
        term = F.pole_terms[0]
        wrapped = AnalyticCoefficient(0.6, remainder=Remainder(lambda z: term.evaluate(z)))
        symbolic = {"qddq": apply_operator_map_qddq, "q": apply_operator_map_q, "zbar_ddz": zbar_ddz}[kind](F)
        mapped = finite_difference_map(wrapped, kind)
        np.testing.assert_allclose(mapped.evaluate(ZBARS), symbolic.evaluate(ZBARS), rtol=1e-7)

    def test_finite_difference_map_unknown_kind(self):
        with pytest.raises(ValueError):
            finite_difference_map(transform(EXP, 0.6), "laplace")


class TestDiagnostics:
    def test_decay_exponent(self):
        report = decay_check(transform(EXP, 0.6))
        assert report.passed
        assert report.exponent == pytest.approx(-1.6, abs=1e-3)
        assert {r.direction for r in report.rays} == {"b+", "b-", "a+"}

    def test_non_decaying_coefficient_fails(self):
        F = AnalyticCoefficient(0.6, remainder=Remainder(lambda z: 1.0 + 0j))
        report = decay_check(F, radii=np.geomspace(1e2, 1e4, 5))
        assert not report.passed
        assert report.exponent == pytest.approx(0.0, abs=1e-12)
        assert report.as_dict()["exponent"] == report.exponent

    def test_cauchy_riemann_defect_of_analytic_function(self):
        assert cauchy_riemann_defect(transform(EXP, 0.6), 0.4 - 0.8j) < 1e-6

    def test_cauchy_riemann_defect_of_conjugate(self):
        F = AnalyticCoefficient(0.6, remainder=Remainder(lambda z: z.conjugate()))
        assert cauchy_riemann_defect(F, 0.4 - 0.8j) > 0.5


class TestHalfPlaneGrid:
    def test_mesh(self):
        a, b = HalfPlaneGrid(0.1, 10.0, 5.0, n_a=3, n_b=5).mesh()
        np.testing.assert_allclose(a, [0.1, 1.0, 10.0])
        np.testing.assert_allclose(b, [-5.0, -2.5, 0.0, 2.5, 5.0])

    def test_rule_integrates_area(self):
        rule = HalfPlaneGrid(0.1, 10.0, 5.0, n_a=40, n_b=40).rule()
        area = float(np.sum(rule.a_weights[:, None] * rule.b_weights))
        assert area == pytest.approx(9.9 * 10.0, rel=1e-10)
        assert rule.zbar().shape == (40, 40)

    def test_unbounded_rule_integrates_lorentzian(self):
        # ∫∫ a^{-2}/(1 + (b/a)²) db da = ∫ π/a da over [1, e]
        rule = HalfPlaneGrid(1.0, math.e, math.inf, n_a=20, n_b=80).rule()
        density = 1 / (rule.a[:, None] ** 2 * (1 + (rule.b / rule.a[:, None]) ** 2))
        value = float(np.sum(rule.a_weights[:, None] * rule.b_weights * density))
        assert value == pytest.approx(math.pi, rel=1e-6)

    def test_unbounded_mesh_rejected(self):
        with pytest.raises(DomainError):
            HalfPlaneGrid.for_quadrature().mesh()

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"a_min": 0.0, "a_max": 1.0, "b_max": 1.0},
            {"a_min": 2.0, "a_max": 1.0, "b_max": 1.0},
            {"a_min": 0.1, "a_max": 1.0, "b_max": 0.0},
            {"a_min": 0.1, "a_max": 1.0, "b_max": 1.0, "n_a": 1},
        ],
    )
    def test_invalid_grid(self, kwargs):
        with pytest.raises(DomainError):
            HalfPlaneGrid(**kwargs)
