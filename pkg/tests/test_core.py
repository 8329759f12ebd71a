"""Tests for the shared domain types: points, atoms, samples, pole terms, coefficients."""

from __future__ import annotations

import math
from dataclasses import fields
from types import SimpleNamespace

import numpy as np
import pytest

from src.core import (
    AnalyticCoefficient,
    Atom,
    HalfPlanePoint,
    PoleTerm,
    RadialFunction,
    Remainder,
    Samples,
    WaveletParams,
    classify_gamma,
    merge_pole_terms,
    principal_power,
    validate_params,
)
from src.errors import DomainError, ValidationError


class TestPrincipalPower:
    def test_square_root_of_minus_one(self):
        assert principal_power(-1 + 0j, 0.5) == pytest.approx(1j)

    def test_vectorized(self):
        out = principal_power(np.array([4.0, 9.0]), 0.5)
        np.testing.assert_allclose(out, [2.0, 3.0])

    def test_zero_base_raises(self):
        with pytest.raises(DomainError):
            principal_power(np.array([1.0, 0.0]), 0.3)


class TestHalfPlanePoint:
    def test_from_zbar_round_trip(self):
        z = HalfPlanePoint.from_zbar(1.5 - 2j)
        assert (z.b, z.a) == (1.5, 2.0)
        assert z.zbar == 1.5 - 2j
        assert z.z == 1.5 + 2j

    @pytest.mark.parametrize("a", [0.0, -1.0, math.inf])
    def test_rejects_points_off_the_half_plane(self, a):
        with pytest.raises(DomainError):
            HalfPlanePoint(b=0.0, a=a)


class TestClassification:
    @pytest.mark.parametrize(
        "gamma, kind",
        [
            (2.0, "admissible"),
            (1.0001, "admissible"),
            (1.0, "non-admissible"),
            (0.6, "non-admissible"),
            (0.5, "non-square-integrable"),
            (0.3, "non-square-integrable"),
        ],
    )
    def test_classify_gamma(self, gamma, kind):
        assert classify_gamma(gamma) == kind

    def test_wavelet_params_record(self):
        record = validate_params(WaveletParams(0.8))
        assert record.kind == "non-admissible"
        assert record.square_integrable
        assert not record.admissible

    def test_non_positive_gamma_rejected(self):
        with pytest.raises(ValidationError):
            classify_gamma(0.0)

    def test_dirac_like_parameters_collect_all_problems(self):
        with pytest.raises(ValidationError) as exc:
            validate_params(SimpleNamespace(lam=-0.5, chi=0.5, m=-1.0))
        assert len(exc.value.problems) >= 3

    def test_coupling_above_chi_names_the_inequality(self):
        with pytest.raises(ValidationError, match=r"chi\^2 > lambda\^2"):
            validate_params(SimpleNamespace(lam=1.5, chi=-1, m=1.0))

    def test_valid_dirac_parameters_give_gamma(self):
        record = validate_params(SimpleNamespace(lam=0.6, chi=-1, m=1.0))
        assert record.gamma == pytest.approx(0.8)


class TestAtom:
    def test_evaluate(self):
        atom = Atom(2.0, 1.0, 1j)
        assert atom.evaluate(0.5) == pytest.approx(2 * math.exp(-0.5))

    def test_power_and_oscillation(self):
        atom = Atom(1.0, 2.5, 0.5 + 1j)
        q = 1.7
        expected = q**1.5 * np.exp(1j * (0.5 + 1j) * q)
        assert atom.evaluate(q) == pytest.approx(expected)

    def test_negative_alpha_rejected(self):
        with pytest.raises(DomainError):
            Atom(1.0, -0.1, 1j)

    def test_pole_must_lie_in_upper_half_plane(self):
        with pytest.raises(DomainError):
            Atom(1.0, 1.0, -1j)

    def test_qddq_is_exact(self):
        # q d/dq e^{-q} = -q e^{-q}
        q = 1.3
        parts = Atom(1.0, 1.0, 1j).qddq()
        assert sum(p.evaluate(q) for p in parts) == pytest.approx(-q * math.exp(-q))


class TestRadialFunction:
    def test_sum_of_atoms(self):
        f = RadialFunction((Atom(1.0, 1.0, 1j), Atom(2.0, 2.0, 1j)))
        q = np.array([0.5, 2.0])
        np.testing.assert_allclose(f.evaluate(q), np.exp(-q) + 2 * q * np.exp(-q))

    def test_non_positive_q_rejected(self):
        with pytest.raises(DomainError):
            RadialFunction((Atom(1.0, 1.0, 1j),)).evaluate([0.0, 1.0])

    def test_scaled_and_plus(self):
        f = RadialFunction((Atom(1.0, 1.0, 1j),))
        g = f.scaled(3.0).plus(f)
        assert g.evaluate(1.0) == pytest.approx(4 * math.exp(-1.0))

    def test_is_zero(self):
        assert RadialFunction().is_zero
        assert RadialFunction((Atom(0.0, 1.0, 1j),)).is_zero
        assert not RadialFunction((Atom(1.0, 1.0, 1j),)).is_zero

    def test_adding_samples_on_different_grids_fails(self):
        a = RadialFunction.from_samples(np.linspace(1, 4, 5), np.ones(5))
        b = RadialFunction.from_samples(np.linspace(1, 5, 5), np.ones(5))
        with pytest.raises(DomainError):
            a.plus(b)


class TestSamples:
    def test_interpolates_inside_grid(self):
        q = np.geomspace(1e-3, 30, 2000)
        s = Samples(q, np.exp(-q))
        x = np.array([0.01, 0.7, 5.3])
        np.testing.assert_allclose(np.real(s.evaluate(x)), np.exp(-x), rtol=1e-6)

    def test_power_law_head(self):
        q = np.geomspace(1e-2, 10, 200)
        s = Samples(q, q**-0.4)
        assert np.real(s.evaluate(1e-4)) == pytest.approx(1e-4**-0.4, rel=1e-6)

    def test_exponential_tail(self):
        q = np.linspace(0.5, 10, 300)
        s = Samples(q, np.exp(-q))
        assert np.real(s.evaluate(12.0)) == pytest.approx(math.exp(-12.0), rel=1e-6)

    def test_qddq(self):
        q = np.geomspace(1e-3, 30, 2000)
        d = Samples(q, np.exp(-q)).qddq()
        x = np.array([0.1, 1.0, 4.0])
        np.testing.assert_allclose(np.real(d.evaluate(x)), -x * np.exp(-x), rtol=1e-4)

    @pytest.mark.parametrize(
        "q, values",
        [
            ([1.0, 2.0, 3.0], [1.0, 1.0, 1.0]),
            ([1.0, 2.0, 2.0, 3.0], [1.0, 1.0, 1.0, 1.0]),
            ([-1.0, 2.0, 3.0, 4.0], [1.0, 1.0, 1.0, 1.0]),
            ([1.0, 2.0, 3.0, 4.0], [1.0, 1.0, 1.0]),
        ],
    )
    def test_invalid_grids_rejected(self, q, values):
        with pytest.raises(DomainError):
            Samples(np.array(q), np.array(values))

    def test_arrays_are_read_only(self):
        s = Samples(np.linspace(1, 4, 4), np.ones(4))
        with pytest.raises(ValueError):
            s.values[0] = 2.0


class TestPoleTerm:
    def test_evaluate(self):
        # [i(-i - i)]^{-2} = 2^{-2}
        assert PoleTerm(1.0, 2.0, 1j).evaluate(-1j) == pytest.approx(0.25)

    def test_from_shifted(self):
        zb = 0.3 - 0.5j
        term = PoleTerm.from_shifted(1.0, 2.0, 1j)
        assert term.evaluate(zb) == pytest.approx((zb - 1j) ** -2)

    def test_derivative_matches_central_difference(self):
        term = PoleTerm(0.7 - 0.2j, 1.6, 0.5j)
        zb, h = 0.4 - 0.9j, 1e-6
        numeric = (term.evaluate(zb + h) - term.evaluate(zb - h)) / (2 * h)
        assert term.derivative().evaluate(zb) == pytest.approx(numeric, rel=1e-7)

    def test_pole_in_lower_half_plane_rejected(self):
        with pytest.raises(DomainError):
            PoleTerm(1.0, 1.0, -0.5j)


class TestMergePoleTerms:
    def test_combines_equal_orders(self):
        merged = merge_pole_terms([PoleTerm(1.0, 1.5, 1j), PoleTerm(2.0, 1.5, 1j), PoleTerm(1.0, 2.5, 1j)])
        assert len(merged) == 2
        assert merged[0].coeff == 3.0

    def test_drops_cancelled_terms(self):
        assert merge_pole_terms([PoleTerm(1.0, 1.5, 1j), PoleTerm(-1.0, 1.5, 1j)]) == ()

    def test_keeps_distinct_poles_apart(self):
        assert len(merge_pole_terms([PoleTerm(1.0, 1.5, 1j), PoleTerm(1.0, 1.5, 0.5j)])) == 2


class TestAnalyticCoefficient:
    def test_upper_half_plane_rejected(self):
        F = AnalyticCoefficient(0.6, (PoleTerm(1.0, 1.6, 1j),))
        with pytest.raises(DomainError):
            F.evaluate(0.3 + 0.1j)

    def test_order_below_gamma_rejected(self):
        with pytest.raises(DomainError):
            AnalyticCoefficient(0.6, (PoleTerm(1.0, 0.5, 1j),))

    def test_plus_requires_same_gamma(self):
        with pytest.raises(DomainError):
            AnalyticCoefficient(0.6).plus(AnalyticCoefficient(0.7))

    def test_remainder_derivative(self):
        F = AnalyticCoefficient(0.6, remainder=Remainder(lambda z: z**-3))
        zb = 0.2 - 1.1j
        assert F.derivative().evaluate(zb) == pytest.approx(-3 * zb**-4, rel=1e-8)
        assert not F.is_symbolic

    def test_vectorized_remainder(self):
        F = AnalyticCoefficient(0.6, remainder=Remainder(lambda z: 2 * z))
        zb = np.array([[1 - 1j, 2 - 1j], [1 - 2j, 2 - 2j]])
        np.testing.assert_allclose(F.evaluate(zb), 2 * zb)

    def test_remainder_from_mesh(self):
        a = np.geomspace(0.1, 10, 30)
        b = np.linspace(-5, 5, 41)
        values = (b[None, :] - 1j * a[:, None]) * 0 + 1.5
        g = Remainder.from_mesh(a, b, values)
        assert g.evaluate(0.37 - 1.3j) == pytest.approx(1.5)
        assert g.evaluate(20 - 1j) == 0

    def test_scaled_remainder(self):
        F = AnalyticCoefficient(0.6, remainder=Remainder(lambda z: z**-2, label="mesh"))
        G = F.scaled(2j)
        assert G.remainder is not None
        assert G.remainder.label == "mesh"
        assert G.evaluate(1 - 2j) == pytest.approx(2j * (1 - 2j) ** -2)
        # decay constants travel in the coefficient metadata, not on the remainder
        assert [f.name for f in fields(Remainder)] == ["func", "label"]

    def test_is_zero(self):
        assert AnalyticCoefficient(0.6).is_zero
        assert not AnalyticCoefficient(0.6, (PoleTerm(1.0, 1.6, 1j),)).is_zero
