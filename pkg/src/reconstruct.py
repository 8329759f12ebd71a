"""
reconstruct.py - Bi-Orthogonal Reconstruction

Right inverse of the forward transform built on the constant reconstruction
wavelet ``χ^γ = 1/(2πΓ(γ))``, paired with the analyzing wavelet so that
``∫ q ψ^γ χ^γ dq = 1/(2π)``.

Pole terms invert in closed form (one atom each). Remainders are inverted
numerically, integrating over ``b`` first (a Fourier integral at fixed
``a``, absolutely convergent under the decay bound) and over ``a`` second
with generalized Gauss-Laguerre nodes. The opposite order is only
conditionally convergent and is never evaluated.

For ``γ > 1`` the orthogonal (admissible) inverse is available as a
reference path.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import ArrayLike
from scipy import integrate
from tqdm import tqdm

from .core import AnalyticCoefficient, Atom, PoleTerm, RadialFunction
from .errors import AccuracyError, BiwaveError, DomainError
from .quadrature import fourier_line_integral, genlaguerre_rule
from .specfun import cgamma
from .transform import decay_check, finite_difference_map, zbar_ddz

log = logging.getLogger("biwave.reconstruct")

DEFAULT_RTOL = 1e-6
DEFAULT_ATOL = 1e-12
DEFAULT_LAGUERRE_NODES = 4


@dataclass(frozen=True)
class ReconstructionWavelet:
    """The constant reconstruction wavelet ``χ^γ(q) = 1/(2πΓ(γ))``."""

    gamma: float

    def __post_init__(self) -> None:
        if not self.gamma > 0:
            raise DomainError(f"gamma must be > 0, got {self.gamma}")

    @property
    def value(self) -> float:
        return 1.0 / (2 * math.pi * math.gamma(self.gamma))

    def __call__(self, q: ArrayLike) -> Any:
        return np.full(np.shape(q), self.value) if np.ndim(q) else self.value


def pairing(gamma: float) -> float:
    """``∫₀^∞ q ψ^γ(q) χ^γ(q) dq``; equals ``1/(2π)`` for every ``γ > 0``."""
    chi = ReconstructionWavelet(gamma).value
    # q * q^{γ-2} e^{-q} = q^{γ-1} e^{-q}; the algebraic weight handles q -> 0
    head, _ = integrate.quad(lambda q: math.exp(-q), 0.0, 1.0, weight="alg", wvar=(gamma - 1, 0.0))
    tail, _ = integrate.quad(lambda q: q ** (gamma - 1) * math.exp(-q), 1.0, np.inf)
    return chi * (head + tail)


# ─── Closed-Form Inversion ──────────────────────────────────────────────────


def reconstruct_pole_term(term: PoleTerm, gamma: float) -> Atom:
    """
    Exact inverse of one pole term.

    ``c [i(zbar-ζ₀)]^(-s)`` comes from the atom ``(c/Γ(s)) q^(s-γ-1) e^(iζ₀q)``.
    """
    alpha = term.order - gamma
    if alpha < -1e-12:
        raise DomainError(f"pole order {term.order} < gamma={gamma} has no atom preimage")
    return Atom(term.coeff / cgamma(term.order), max(alpha, 0.0), term.pole)


def reconstruct_atoms(F: AnalyticCoefficient) -> RadialFunction:
    """Atom sum reproducing the pole-term part of ``F``; the remainder is ignored."""
    return RadialFunction(tuple(reconstruct_pole_term(t, F.gamma) for t in F.pole_terms))


# ─── Numerical Inversion ────────────────────────────────────────────────────


@dataclass(frozen=True, eq=False)
class GridReconstruction:
    """Values of a numerically reconstructed function on a ``q``-grid."""

    q: np.ndarray
    values: np.ndarray
    errors: np.ndarray
    conditionally_convergent: bool = False

    def as_radial(self) -> RadialFunction:
        return RadialFunction.from_samples(self.q, self.values)


def _line_integral(F: AnalyticCoefficient, a: float, q: float) -> tuple[complex, float]:
    value, error, _warned = fourier_line_integral(lambda b: complex(F.evaluate(complex(b, -a))), q)
    return value, error


def _laguerre_sum(
    F: AnalyticCoefficient, q: float, nodes: int, alpha: float, rate: float, boost: float
) -> tuple[complex, float]:
    # a = x / (rate q); e^{boost x} undoes the e^{-x} carried by the Laguerre weight
    x, w = genlaguerre_rule(nodes, alpha)
    total = 0j
    line_error = 0.0
    for xk, wk in zip(x, w):
        inner, error = _line_integral(F, xk / (rate * q), q)
        weight = wk * math.exp(boost * xk)
        total += weight * inner
        line_error += abs(weight) * error
    return total, line_error


def _fine_and_coarse(
    F: AnalyticCoefficient, q: float, nodes: int, alpha: float, rate: float, boost: float, scale: float
) -> tuple[complex, float]:
    # node-count sensitivity plus the accumulated error of the inner line integrals
    fine, line_error = _laguerre_sum(F, q, nodes, alpha, rate, boost)
    coarse, _ = _laguerre_sum(F, q, nodes - 1, alpha, rate, boost)
    return scale * fine, abs(scale) * (abs(fine - coarse) + line_error)


def _bi_orthogonal_point(F: AnalyticCoefficient, gamma: float, q: float, nodes: int) -> tuple[complex, float]:
    scale = q ** (-gamma) / (2 * math.pi * math.gamma(gamma))
    return _fine_and_coarse(F, q, nodes, gamma - 1, 1.0, 1.0, scale)


def _check_decay(F: AnalyticCoefficient) -> bool:
    """True when the decay precondition of the numerical inverse looks violated."""
    try:
        report = decay_check(F, radii=np.geomspace(10.0, 1e3, 5))
    except BiwaveError as exc:
        log.warning(f"Decay check inconclusive: {exc}")
        return True
    exponent = report.exponent
    if exponent is not None and exponent >= -1:
        log.warning(
            f"Remainder decays like |zbar|^{exponent:.3g}; the b-integral is only conditionally convergent"
        )
        return True
    return False


def _run_grid(
    point: Any,
    q: np.ndarray,
    threads: int,
    progress: bool,
    desc: str,
) -> tuple[np.ndarray, np.ndarray]:
    values = np.zeros(q.shape, dtype=complex)
    errors = np.zeros(q.shape, dtype=float)
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        results = pool.map(point, q)
        for idx, (value, error) in enumerate(tqdm(results, total=q.size, desc=desc, disable=not progress)):
            values[idx], errors[idx] = value, error
    return values, errors


def _validated_grid(q_grid: ArrayLike) -> np.ndarray:
    q = np.asarray(q_grid, dtype=float)
    if q.ndim != 1 or np.any(q <= 0):
        raise DomainError("reconstruction grid must be one-dimensional with q > 0")
    return q


def _raise_on_tolerance(
    q: np.ndarray, values: np.ndarray, errors: np.ndarray, rtol: float, atol: float, what: str
) -> None:
    bad = errors > rtol * np.abs(values) + atol
    if np.any(bad):
        worst = int(np.argmax(errors / (np.abs(values) + atol)))
        raise AccuracyError(
            f"{what} missed tolerance at {int(bad.sum())} of {q.size} points (worst at q={q[worst]:g})",
            estimate=values,
            error=float(errors.max()),
        )


def reconstruct_grid(
    G: AnalyticCoefficient,
    gamma: float,
    q_grid: ArrayLike,
    laguerre_nodes: int = DEFAULT_LAGUERRE_NODES,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    threads: int = 1,
    progress: bool = False,
) -> GridReconstruction:
    """
    Numerical inverse of an analytic coefficient on a ``q``-grid.

    Parameters:
    - G: coefficient to invert (pole terms, if any, are integrated numerically too).
    - gamma: wavelet exponent.
    - q_grid: evaluation points, all > 0.
    - laguerre_nodes: nodes of the outer ``a``-rule; convergence is judged
      against the rule with one node fewer.
    - rtol, atol: tolerance per point; exceeding it raises :class:`AccuracyError`.
    - threads: worker threads over grid points.
    - progress: show a tqdm bar.

    Returns:
    - GridReconstruction with values, error estimates and the
      conditional-convergence flag.
    """
    if not gamma > 0:
        raise DomainError(f"gamma must be > 0, got {gamma}")
    q = _validated_grid(q_grid)
    if G.is_zero:
        return GridReconstruction(q, np.zeros(q.shape, dtype=complex), np.zeros(q.shape))
    if laguerre_nodes < 2:
        raise DomainError("laguerre_nodes must be >= 2")

    flagged = _check_decay(G)
    values, errors = _run_grid(
        lambda x: _bi_orthogonal_point(G, gamma, float(x), laguerre_nodes),
        q,
        threads,
        progress,
        "reconstruct",
    )
    _raise_on_tolerance(q, values, errors, rtol, atol, "bi-orthogonal reconstruction")
    return GridReconstruction(q, values, errors, flagged)


def reconstruct(F: AnalyticCoefficient, q: ArrayLike, **kwargs: Any) -> np.ndarray:
    """
    Invert ``F`` on ``q``: pole terms in closed form, remainder numerically.

    Keyword arguments go to :func:`reconstruct_grid`.
    """
    qa = _validated_grid(np.atleast_1d(q))
    values = np.asarray(reconstruct_atoms(F).evaluate(qa), dtype=complex).reshape(qa.shape)
    if F.remainder is not None:
        values = values + reconstruct_grid(F.remainder_only(), F.gamma, qa, **kwargs).values
    return values


def admissible_constant(gamma: float) -> float:
    """``2^(2γ-2) / (2π Γ(2γ-2))``, the orthogonal-inverse normalization."""
    if not gamma > 1:
        raise DomainError(f"the orthogonal inverse needs gamma > 1, got {gamma}")
    return 2 ** (2 * gamma - 2) / (2 * math.pi * math.gamma(2 * gamma - 2))


def reconstruct_admissible(
    F: AnalyticCoefficient,
    gamma: float,
    q_grid: ArrayLike,
    laguerre_nodes: int = DEFAULT_LAGUERRE_NODES,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    threads: int = 1,
    progress: bool = False,
) -> GridReconstruction:
    """
    Orthogonal inverse ``f = c_γ ∫ dμ_L(z) (ψ_z, f) ψ_z`` for ``γ > 1``.

    Uses the same ``b``-first order as :func:`reconstruct_grid`; the outer
    rule carries the weight ``x^(2γ-3) e^(-x)``.
    """
    c_gamma = admissible_constant(gamma)
    q = _validated_grid(q_grid)
    if F.is_zero:
        return GridReconstruction(q, np.zeros(q.shape, dtype=complex), np.zeros(q.shape))

    def point(x: float) -> tuple[complex, float]:
        x = float(x)
        scale = c_gamma * x ** (gamma - 2) * (2 * x) ** (-(2 * gamma - 2))
        return _fine_and_coarse(F, x, laguerre_nodes, 2 * gamma - 3, 2.0, 0.5, scale)

    values, errors = _run_grid(point, q, threads, progress, "admissible")
    _raise_on_tolerance(q, values, errors, rtol, atol, "admissible reconstruction")
    return GridReconstruction(q, values, errors)


# ─── Derivative Transport ───────────────────────────────────────────────────


@dataclass(frozen=True, eq=False)
class TransportReport:
    q: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray

    @property
    def max_discrepancy(self) -> float:
        scale = max(
            float(np.max(np.abs(self.rhs), initial=0.0)), float(np.max(np.abs(self.lhs), initial=0.0))
        )
        if scale == 0:
            return 0.0
        return float(np.max(np.abs(self.lhs - self.rhs)) / scale)


def derivative_transport_check(F: AnalyticCoefficient, q_grid: ArrayLike, **kwargs: Any) -> TransportReport:
    """
    Compare the inverse of ``zbar ∂F`` with ``-(q d/dq + γ + 1) f`` for ``f`` the inverse of ``F``.

    Pole terms take the closed-form route on both sides. A remainder is
    inverted numerically and differentiated through a spline, so the grid
    needs at least four increasing points then.
    """
    q = _validated_grid(q_grid)
    gamma = F.gamma
    f = reconstruct_atoms(F)
    rhs = -(np.asarray(f.qddq().evaluate(q)) + (gamma + 1) * np.asarray(f.evaluate(q)))
    lhs = np.asarray(reconstruct_atoms(zbar_ddz(F.poles_only())).evaluate(q), dtype=complex)
    if F.remainder is not None:
        f_rem = reconstruct_grid(F.remainder_only(), gamma, q, **kwargs).as_radial()
        rhs = rhs - (np.asarray(f_rem.qddq().evaluate(q)) + (gamma + 1) * np.asarray(f_rem.evaluate(q)))
        mapped = finite_difference_map(F.remainder_only(), "zbar_ddz")
        lhs = lhs + reconstruct_grid(mapped, gamma, q, **kwargs).values
    return TransportReport(q, np.atleast_1d(lhs), np.atleast_1d(rhs))
