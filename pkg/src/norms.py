"""
norms.py - Weighted L² and Bergman Norms

Both sides of the isometries:

  - configuration side: ``∫₀^∞ q² |f|² dq``, closed form on atoms and
    quadrature on samples;
  - half-plane side: ``∫ dμ_L(z) (Im z)^order |F(zbar)|²`` with
    ``dμ_L = da db / a²``, by tensor Gauss-Legendre quadrature (see
    :meth:`src.transform.HalfPlaneGrid.rule`) plus power-law tails in ``a``.

The derivative form of the isometry holds for every ``γ > 0``:

    ∫ q²|f|² dq = 2^(2γ) / (2πΓ(2γ)) · ∫ dμ_L a^(2γ+1) |∂F|²

and the direct form (order ``2γ-1``, constant ``2^(2γ-2)/(2πΓ(2γ-2))``) only
for ``γ > 1``.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass
from typing import Any

import numpy as np

from .core import AnalyticCoefficient, Atom, RadialFunction, Samples
from .errors import AccuracyError, DomainError
from .quadrature import adaptive_gauss_legendre
from .specfun import cgamma, clog_gamma
from .transform import HalfPlaneGrid, transform

log = logging.getLogger("biwave.norms")


@dataclass(frozen=True)
class BergmanNorm:
    """Squared Bergman norm ``∫ dμ_L a^order |F|²`` with its quadrature error estimate."""

    order: float
    value: float
    error: float

    def __post_init__(self) -> None:
        if not self.order > 0:
            raise DomainError(f"Bergman order must be > 0, got {self.order}")


# ─── Configuration Side ─────────────────────────────────────────────────────


def _atom_pair(x: Atom, y: Atom) -> complex:
    # ∫ q² conj(x) y dq
    p = x.alpha + y.alpha + 1
    base = -1j * (y.pole - np.conj(x.pole))
    return complex(np.conj(x.coeff) * y.coeff * np.exp(clog_gamma(p) - p * np.log(base)))


def l2_inner(f: RadialFunction, g: RadialFunction) -> complex:
    """``(f, g) = ∫₀^∞ q² conj(f) g dq`` for atom sums, exact."""
    if f.samples is not None or g.samples is not None:
        raise DomainError("l2_inner is closed-form only; sampled functions go through l2_weighted_norm")
    return sum((_atom_pair(x, y) for x in f.atoms for y in g.atoms), 0j)


def _samples_norm(samples: Samples) -> tuple[float, float]:
    spline = samples.spline

    def integrand(u: np.ndarray) -> np.ndarray:
        return np.exp(u) * np.abs(spline(u)) ** 2

    body, error = adaptive_gauss_legendre(integrand, samples.log_q)
    c, p = samples.head_model
    head = 0.0
    if c != 0:
        if not p > 0:
            raise DomainError("q²|f|² is not integrable at 0 for the sampled function")
        head = abs(c) ** 2 * samples.q[0] ** (2 * p) / (2 * p)
    f_last, kappa = samples.tail_model
    tail = 0.0
    if f_last != 0:
        k = 2 * kappa.real
        if not k > 0:
            raise DomainError("sampled function does not decay; weighted L² norm diverges")
        q_n = samples.q[-1]
        tail = abs(f_last) ** 2 * (q_n**2 / k + 2 * q_n / k**2 + 2 / k**3)
    return float(body.real + head + tail), error


def l2_weighted_norm(f: RadialFunction) -> float:
    """
    ``∫₀^∞ q² |f(q)|² dq``.

    Atom sums are summed in closed form pairwise. A sampled part is
    integrated in ``log q`` with the head and tail models of
    :class:`src.core.Samples`; the cross term between atoms and samples is
    integrated over the sample grid.
    """
    total = sum((_atom_pair(x, y) for x in f.atoms for y in f.atoms), 0j).real
    if f.samples is None:
        return float(total)

    s_norm, _ = _samples_norm(f.samples)
    total += s_norm
    if f.atoms:
        atoms_only = RadialFunction(f.atoms)
        spline = f.samples.spline

        def cross(u: np.ndarray) -> np.ndarray:
            q = np.exp(u)
            h_atoms = q * np.asarray(atoms_only.evaluate(q))
            return np.exp(u) * np.conj(h_atoms) * spline(u)

        value, _ = adaptive_gauss_legendre(cross, f.samples.log_q)
        total += 2 * value.real
    return float(total)


def power_basis(n: int, alpha: float) -> Atom:
    """``ψ_n(q) = q^(α-1+n) e^(-q)``."""
    if n < 0:
        raise DomainError(f"basis index must be >= 0, got {n}")
    return Atom(1.0, alpha + n, 1j)


# ─── Half-Plane Side ────────────────────────────────────────────────────────


def _half_plane_sum(
    density: Callable[[np.ndarray], np.ndarray], order: float, grid: HalfPlaneGrid, n_a: int, n_b: int
) -> complex:
    rule = grid.rule(n_a, n_b)
    values = density(rule.zbar())
    rho = (values * rule.b_weights).sum(axis=1)
    a = rule.a
    main = np.sum(rule.a_weights * a ** (order - 2) * rho)

    low = 0j
    if rho[0] != 0:
        if not order > 1:
            raise DomainError(f"Bergman integral of order {order:g} diverges at a -> 0")
        low = rho[0] * grid.a_min ** (order - 1) / (order - 1)

    high = 0j
    if rho[-1] != 0 and rho[-2] != 0:
        k = -math.log(abs(rho[-1]) / abs(rho[-2])) / math.log(a[-1] / a[-2])
        if not k > order - 1:
            raise DomainError(f"Bergman integral of order {order:g} diverges at a -> infinity")
        high = rho[-1] * (a[-1] / grid.a_max) ** k * grid.a_max ** (order - 1) / (k - order + 1)
    return complex(main + low + high)


def _half_plane_integral(
    density: Callable[[np.ndarray], np.ndarray],
    order: float,
    grid: HalfPlaneGrid,
    rtol: float | None,
) -> tuple[complex, float]:
    value = _half_plane_sum(density, order, grid, grid.n_a, grid.n_b)
    coarse = _half_plane_sum(density, order, grid, max(2, grid.n_a // 2), max(2, grid.n_b // 2))
    error = abs(value - coarse)
    if rtol is not None and error > rtol * abs(value):
        raise AccuracyError(
            f"half-plane quadrature error {error:.3g} exceeds tolerance (value {abs(value):.6g})",
            estimate=value,
            error=error,
        )
    return value, error


def bergman_norm(
    F: AnalyticCoefficient, order: float, grid: HalfPlaneGrid | None = None, rtol: float | None = None
) -> BergmanNorm:
    """
    Squared Bergman norm of ``F`` with weight ``(Im z)^order``.

    Parameters:
    - F: analytic coefficient (evaluated on the quadrature nodes).
    - order: weight exponent, e.g. ``2γ-1`` or ``2γ+1``.
    - grid: quadrature region; defaults to :meth:`HalfPlaneGrid.for_quadrature`.
    - rtol: when given, an error estimate above ``rtol * value`` raises
      :class:`AccuracyError`.
    """
    grid = grid or HalfPlaneGrid.for_quadrature()
    if F.is_zero:
        return BergmanNorm(order, 0.0, 0.0)
    value, error = _half_plane_integral(lambda zb: np.abs(F.evaluate(zb)) ** 2, order, grid, rtol)
    return BergmanNorm(order, float(value.real), error)


def derivative_isometry_constant(gamma: float) -> float:
    """``2^(2γ) / (2πΓ(2γ))``."""
    return 2 ** (2 * gamma) / (2 * math.pi * math.gamma(2 * gamma))


def direct_isometry_constant(gamma: float) -> float:
    """``2^(2γ-2) / (2πΓ(2γ-2))``; defined for ``γ > 1`` only."""
    if not gamma > 1:
        raise DomainError(f"the direct isometry needs gamma > 1, got {gamma}")
    return 2 ** (2 * gamma - 2) / (2 * math.pi * math.gamma(2 * gamma - 2))


@dataclass(frozen=True)
class IsometryReport:
    form: str
    lhs: float
    rhs: float
    error: float

    @property
    def discrepancy(self) -> float:
        scale = max(abs(self.lhs), abs(self.rhs))
        return 0.0 if scale == 0 else abs(self.lhs - self.rhs) / scale

    def as_dict(self) -> dict[str, Any]:
        return {
            "form": self.form,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "error": self.error,
            "discrepancy": self.discrepancy,
        }


def isometry_check(
    f: RadialFunction, gamma: float, form: str = "derivative", grid: HalfPlaneGrid | None = None
) -> IsometryReport:
    """
    Compare ``∫ q²|f|²`` with its half-plane counterpart.

    ``form="derivative"`` uses ``∂F`` at order ``2γ+1`` (valid for every
    ``γ > 0``); ``form="direct"`` uses ``F`` at order ``2γ-1`` and requires
    ``γ > 1``.
    """
    lhs = l2_weighted_norm(f)
    F = transform(f, gamma)
    if form == "derivative":
        norm = bergman_norm(F.derivative(), 2 * gamma + 1, grid)
        constant = derivative_isometry_constant(gamma)
    elif form == "direct":
        constant = direct_isometry_constant(gamma)
        norm = bergman_norm(F, 2 * gamma - 1, grid)
    else:
        raise ValueError(f"unknown isometry form {form!r}")
    report = IsometryReport(form, lhs, constant * norm.value, constant * norm.error)
    log.debug(f"isometry ({form}, gamma={gamma:g}): lhs={lhs:.12g} rhs={report.rhs:.12g}")
    return report


def a_gamma_inner_product(
    F: AnalyticCoefficient,
    G: AnalyticCoefficient,
    gamma: float | None = None,
    grid: HalfPlaneGrid | None = None,
    rtol: float | None = None,
) -> complex:
    """``<F|G> = ∫ dμ_L a^(2γ+1) conj(∂F) ∂G``."""
    gamma = F.gamma if gamma is None else gamma
    grid = grid or HalfPlaneGrid.for_quadrature()
    dF, dG = F.derivative(), G.derivative()
    value, _ = _half_plane_integral(
        lambda zb: np.conj(dF.evaluate(zb)) * dG.evaluate(zb), 2 * gamma + 1, grid, rtol
    )
    return value


@dataclass(frozen=True)
class ConstantReport:
    """Measured ``<F|G> / (f, g)`` next to the two candidate constants."""

    gamma: float
    measured: complex
    derived: float
    printed: float | None

    @property
    def matches(self) -> str | None:
        def close(c: float | None) -> bool:
            return c is not None and abs(self.measured - c) <= 1e-3 * abs(c)

        if close(self.derived):
            return "derived"
        if close(self.printed):
            return "printed"
        return None


def inner_product_constant_check(
    gamma: float, alpha: float = 0.3, grid: HalfPlaneGrid | None = None
) -> ConstantReport:
    """
    Measure the constant linking ``<F|G>`` to ``(f, g)`` on the pair
    ``ψ_0, ψ_1`` and set it against ``2πΓ(2γ)/2^(2γ)`` and the variant
    ``2πΓ(2γ-2)/2^(2γ-2)``.
    """
    f = RadialFunction((power_basis(0, alpha),))
    g = RadialFunction((power_basis(1, alpha),))
    product = a_gamma_inner_product(transform(f, gamma), transform(g, gamma), gamma, grid)
    measured = product / l2_inner(f, g)
    derived = 1 / derivative_isometry_constant(gamma)
    try:
        printed: float | None = 2 * math.pi * float(cgamma(2 * gamma - 2).real) / 2 ** (2 * gamma - 2)
    except DomainError:
        printed = None
    report = ConstantReport(gamma, measured, derived, printed)
    if report.matches != "derived":
        log.warning(f"inner product constant at gamma={gamma:g} matches {report.matches!r}, not derived")
    return report
