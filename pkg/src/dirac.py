"""
dirac.py - Relativistic Hydrogen-Like Bound States

Radial Dirac-Coulomb problem for coupling ``λ = Nα`` and ``χ = ±(j+1/2)``,
written in the scaled variable ``q = 2r√(m²-ε²)`` with
``s = √((m+ε)/(m-ε))``:

    q f' + (1+χ) f - (s q/2 + λ) g = 0
    q g' + (1-χ) g - (q/(2s) - λ) f = 0

Wavelet-transforming this pair with ``γ = √(χ²-λ²)`` gives a first-order
system in ``zbar`` with poles at ``±i/2``. Analyticity of its solution in the
lower half-plane forces ``η̃ = -γ + λε/√(m²-ε²)`` to be a non-negative
integer ``n``, which yields the spectrum

    ε_n / m = [1 + λ²/(γ+n)²]^(-1/2)

and closed-form eigen-coefficients

    Φ_n(zbar) = w^(-2γ) [c₁ (1, -1/s) ₂F₁(-n, 2γ; 2γ+1; 1/w)
                       + c₂ (1, +1/s) ₂F₁(1-n, 2γ; 2γ+1; 1/w)]

with ``w = i(zbar - i/2) = 1/2 + i zbar``, ``c₁ = -γ+χ-λs``,
``c₂ = -γ+χ+λs``. Inverting term by term gives the configuration-space
functions ``q^(γ-1) e^(-q/2) ₁F₁(-n, 2γ+1; q)``.

On the ``χ < 0`` branch ``c₂`` vanishes at ``n = 0`` and only the first term
survives; on the ``χ > 0`` branch there is no ``n = 0`` state.

Units: energies are in units of ``m`` unless stated otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import ArrayLike
from scipy.optimize import brentq

from .core import AnalyticCoefficient, PoleTerm, RadialFunction, merge_pole_terms, validate_params
from .errors import DomainError, ValidationError
from .norms import l2_weighted_norm
from .reconstruct import reconstruct_atoms
from .specfun import PolyHypergeom, cgamma, hyp1f1_poly

M_ELECTRON_EV = 510998.95
FINE_STRUCTURE = 1.0 / 137.0

POLE = 0.5j
_ETA_ZERO = 1e-12


# ─── Parameters ─────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class DiracParams:
    """Coupling ``lam = Nα``, ``chi = ∓(j+1/2)`` and mass ``m``."""

    lam: float
    chi: float
    m: float = 1.0

    def __post_init__(self) -> None:
        validate_params(self)

    @classmethod
    def from_charge(
        cls, N: float, chi: float, m: float = 1.0, fine_structure: float = FINE_STRUCTURE
    ) -> DiracParams:
        if not N > 0:
            raise ValidationError(f"nuclear charge must satisfy N > 0, got N={N}")
        return cls(N * fine_structure, chi, m)

    @classmethod
    def from_j(
        cls,
        j: float,
        l: int,  # noqa: E741
        lam: float | None = None,
        N: float | None = None,
        m: float = 1.0,
        fine_structure: float = FINE_STRUCTURE,
    ) -> DiracParams:
        """``chi = -(j+1/2)`` for ``j = l+1/2`` and ``+(j+1/2)`` for ``j = l-1/2``."""
        problems = []
        if (lam is None) == (N is None):
            problems.append("give exactly one of lambda or N")
        if l < 0 or abs(abs(j - l) - 0.5) > 1e-12:
            problems.append(f"j must equal l +- 1/2 with l >= 0, got j={j}, l={l}")
        if problems:
            raise ValidationError(problems)
        chi = -(j + 0.5) if j > l else j + 0.5
        coupling = lam if lam is not None else N * fine_structure  # type: ignore[operator]
        return cls(coupling, chi, m)

    @property
    def gamma(self) -> float:
        return math.sqrt(self.chi**2 - self.lam**2)


def _check_n(n: int) -> int:
    if isinstance(n, bool) or int(n) != n or n < 0:
        raise DomainError(f"quantum number n must be a non-negative integer, got {n}")
    return int(n)


def _check_epsilon(p: DiracParams, epsilon: float) -> None:
    if not abs(epsilon) < p.m:
        raise DomainError(f"bound states need |epsilon| < m, got epsilon={epsilon}, m={p.m}")


def kappa(p: DiracParams, epsilon: float) -> float:
    """``√(m²-ε²)``."""
    _check_epsilon(p, epsilon)
    return math.sqrt((p.m - epsilon) * (p.m + epsilon))


def spinor_ratio(p: DiracParams, epsilon: float) -> float:
    """``s = √((m+ε)/(m-ε))``."""
    _check_epsilon(p, epsilon)
    return math.sqrt((p.m + epsilon) / (p.m - epsilon))


def eta_tilde(p: DiracParams, epsilon: float) -> float:
    return -p.gamma + p.lam * epsilon / kappa(p, epsilon)


def eta(p: DiracParams, epsilon: float) -> float:
    return -p.gamma - p.lam * epsilon / kappa(p, epsilon)


# ─── Spectrum ───────────────────────────────────────────────────────────────


def spectrum(p: DiracParams, n: int) -> float:
    """``ε_n = m [1 + λ²/(γ+n)²]^(-1/2)``."""
    n = _check_n(n)
    return p.m / math.sqrt(1 + (p.lam / (p.gamma + n)) ** 2)


def quantize(p: DiracParams, n: int) -> float:
    """
    Solve ``η̃(ε) = n`` on ``(0, m)`` by bracketed root finding.

    Independent of the closed form in :func:`spectrum`; the two agree to
    rounding.
    """
    n = _check_n(n)

    def condition(eps: float) -> float:
        return eta_tilde(p, eps) - n

    gap = 0.1
    while condition(p.m * (1 - gap)) <= 0:
        gap *= 1e-2
        if gap < 1e-300:
            raise DomainError(f"no root of the quantization condition for n={n}")
    eps_rtol = 4 * np.finfo(float).eps
    root = brentq(condition, 0.0, p.m * (1 - gap), xtol=p.m * 1e-16, rtol=eps_rtol, maxiter=500)
    return float(root)


def state_exists(p: DiracParams, n: int) -> bool:
    """``n = 0`` exists on the ``χ < 0`` branch only."""
    return _check_n(n) > 0 or p.chi < 0


def principal_quantum_number(p: DiracParams, n: int) -> int:
    return _check_n(n) + int(abs(p.chi))


def nonrelativistic_binding(p: DiracParams, n: int) -> float:
    """Leading Bohr term ``m λ² / (2 n'²)`` of ``m - ε_n``."""
    return p.m * p.lam**2 / (2 * principal_quantum_number(p, n) ** 2)


def binding(p: DiracParams, n: int) -> float:
    """``m - ε_n`` without the cancellation of ``m - spectrum(p, n)``."""
    x = (p.lam / (p.gamma + _check_n(n))) ** 2
    root = math.sqrt(1 + x)
    return p.m * x / (root * (root + 1))


def binding_energy_ev(p: DiracParams, n: int) -> float:
    """``(m - ε_n)`` in eV, taking ``m`` as the electron mass."""
    return binding(p, n) / p.m * M_ELECTRON_EV


# ─── Matrix Algebra ─────────────────────────────────────────────────────────


@dataclass(frozen=True, eq=False)
class MatrixSet:
    """``A'``, ``B'``, the projectors ``A``, ``B`` and the exponents ``η``, ``η̃``."""

    a_prime: np.ndarray
    b_prime: np.ndarray
    a: np.ndarray
    b: np.ndarray | None
    eta: float
    eta_tilde: float
    gamma: float
    coupling: float

    def identity_residuals(self) -> dict[str, float]:
        """
        Largest entrywise violation of each algebraic identity, relative to the
        largest entry involved. ``B`` identities are skipped when ``η̃ = 0``.
        """

        def rel(lhs: np.ndarray, rhs: np.ndarray) -> float:
            scale = max(float(np.max(np.abs(lhs))), float(np.max(np.abs(rhs))), 1e-300)
            return float(np.max(np.abs(lhs - rhs))) / scale

        ap, bp, c = self.a_prime, self.b_prime, self.coupling
        out = {
            "A'^2 = 2 gamma A'": rel(ap @ ap, 2 * self.gamma * ap),
            "A'B' = c A'": rel(ap @ bp, c * ap),
            "B'^2 = c B'": rel(bp @ bp, c * bp),
            "B'A' = 2 gamma B'": rel(bp @ ap, 2 * self.gamma * bp),
            "A^2 = A": rel(self.a @ self.a, self.a),
        }
        if self.b is not None:
            out["AB = A"] = rel(self.a @ self.b, self.a)
            out["B^2 = B"] = rel(self.b @ self.b, self.b)
            out["BA = B"] = rel(self.b @ self.a, self.b)
        return out


def build_matrices(p: DiracParams, epsilon: float) -> MatrixSet:
    g, chi, lam = p.gamma, p.chi, p.lam
    s = spinor_ratio(p, epsilon)
    a_prime = np.array([[g - chi, lam], [-lam, g + chi]], dtype=float)
    b_prime = np.array([[lam * s, -(chi + g) * s], [-(g - chi) / s, -lam / s]], dtype=float)
    e, et = eta(p, epsilon), eta_tilde(p, epsilon)
    a = (a_prime + b_prime) / (-2 * e)
    b = (a_prime - b_prime) / (-2 * et) if abs(et) >= _ETA_ZERO else None
    coupling = 2 * lam * epsilon / kappa(p, epsilon)
    return MatrixSet(a_prime, b_prime, a, b, e, et, g, coupling)


# ─── Bound States ───────────────────────────────────────────────────────────


@dataclass(frozen=True, eq=False)
class BoundState:
    n: int
    epsilon: float
    eta: float
    eta_tilde: float
    spinor_a: np.ndarray
    spinor_b: np.ndarray

    def as_dict(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "epsilon": self.epsilon,
            "eta": self.eta,
            "eta_tilde": self.eta_tilde,
            "spinor_a": self.spinor_a.tolist(),
            "spinor_b": self.spinor_b.tolist(),
        }


def _require_state(p: DiracParams, n: int) -> int:
    n = _check_n(n)
    if not state_exists(p, n):
        raise DomainError(f"no n=0 bound state on the chi > 0 branch (chi={p.chi:g})")
    return n


def bound_state(p: DiracParams, n: int) -> BoundState:
    n = _require_state(p, n)
    eps = spectrum(p, n)
    s = spinor_ratio(p, eps)
    c1 = -p.gamma + p.chi - p.lam * s
    c2 = -p.gamma + p.chi + p.lam * s if n > 0 else 0.0
    return BoundState(
        n=n,
        epsilon=eps,
        eta=-n - 2 * p.gamma,
        eta_tilde=eta_tilde(p, eps),
        spinor_a=c1 * np.array([1.0, -1.0 / s]),
        spinor_b=c2 * np.array([1.0, 1.0 / s]),
    )


def _hyp2f1_pole_terms(degree: int, gamma: float, weight: float) -> list[PoleTerm]:
    # w^{-2γ} ₂F₁(-degree, 2γ; 2γ+1; 1/w) as Σ_k c_k w^{-(2γ+k)}
    coefficients = PolyHypergeom(degree, 2 * gamma, 2 * gamma + 1).coefficients()
    return [PoleTerm(weight * c, 2 * gamma + k, POLE) for k, c in enumerate(coefficients) if c != 0]


def eigen_coefficient(p: DiracParams, n: int) -> tuple[AnalyticCoefficient, AnalyticCoefficient]:
    """
    ``Φ_n = (F, G)`` as exact pole-term sums at ``zbar = i/2``, up to the
    overall constant (prefactors ``c₁``, ``c₂`` unscaled).
    """
    state = bound_state(p, n)
    g = p.gamma
    components: list[list[PoleTerm]] = [[], []]
    for idx in range(2):
        components[idx] += _hyp2f1_pole_terms(n, g, float(state.spinor_a[idx]))
        if n > 0:
            components[idx] += _hyp2f1_pole_terms(n - 1, g, float(state.spinor_b[idx]))
    meta = {"n": state.n, "epsilon": state.epsilon, "lam": p.lam, "chi": p.chi}
    F, G = (AnalyticCoefficient(g, merge_pole_terms(terms), None, dict(meta)) for terms in components)
    return F, G


def eigenfunction_z(p: DiracParams, n: int, zbar: ArrayLike) -> np.ndarray:
    """``Φ_n(zbar)`` stacked along the first axis: ``[F(zbar), G(zbar)]``."""
    zb = np.asarray(zbar, dtype=complex)
    if np.any(zb.imag >= 0):
        raise DomainError("eigen-coefficients are evaluated on Im(zbar) < 0 only")
    F, G = eigen_coefficient(p, n)
    return np.array([F.evaluate(zb), G.evaluate(zb)])


def transformed_system_matrix(p: DiracParams, epsilon: float, zbar: complex) -> np.ndarray:
    """``(1/2)[(A'+B')/(zbar-i/2) + (A'-B')/(zbar+i/2)]``."""
    mats = build_matrices(p, epsilon)
    ap, bp = mats.a_prime, mats.b_prime
    return 0.5 * ((ap + bp) / (zbar - 0.5j) + (ap - bp) / (zbar + 0.5j))


def transformed_system_residual(p: DiracParams, n: int, zbar: complex) -> float:
    """Relative residual of ``dΦ/dzbar + M(zbar) Φ = 0`` at one point."""
    zbar = complex(zbar)
    F, G = eigen_coefficient(p, n)
    phi = np.array([F.evaluate(zbar), G.evaluate(zbar)])
    dphi = np.array([F.derivative().evaluate(zbar), G.derivative().evaluate(zbar)])
    m_phi = transformed_system_matrix(p, spectrum(p, n), zbar) @ phi
    scale = np.linalg.norm(dphi) + np.linalg.norm(m_phi)
    return float(np.linalg.norm(dphi + m_phi) / scale) if scale > 0 else float("nan")


# ─── Configuration Space ────────────────────────────────────────────────────


def _normalization(f: RadialFunction, g: RadialFunction) -> float:
    norm = l2_weighted_norm(f) + l2_weighted_norm(g)
    if not norm > 0:
        raise DomainError("eigenfunction vanishes identically")
    head = f.evaluate(1e-12)
    sign = 1.0 if head.real >= 0 else -1.0
    return sign / math.sqrt(norm)


def eigenfunction_radial(p: DiracParams, n: int) -> tuple[RadialFunction, RadialFunction]:
    """
    Normalized radial pair ``(f, g)`` as atom sums, obtained by inverting
    :func:`eigen_coefficient` term by term.

    ``∫ q² (f² + g²) dq = 1`` and ``f > 0`` near the origin.
    """
    F, G = eigen_coefficient(p, n)
    f, g = reconstruct_atoms(F), reconstruct_atoms(G)
    scale = _normalization(f, g)
    return f.scaled(scale), g.scaled(scale)


def eigenfunction_config(p: DiracParams, n: int, q: ArrayLike) -> np.ndarray:
    """
    ``[f(q), g(q)]`` from the confluent form

        q^(γ-1) e^(-q/2) [c₁ ₁F₁(-n; 2γ+1; q) (1, -1/s)
                          + c₂ ₁F₁(1-n; 2γ+1; q) (1, 1/s)] / Γ(2γ)

    with the normalization of :func:`eigenfunction_radial`.
    """
    qa = np.asarray(q, dtype=float)
    if np.any(qa <= 0):
        raise DomainError("configuration-space eigenfunctions are defined for q > 0")
    state = bound_state(p, n)
    g2 = 2 * p.gamma
    profile = qa ** (p.gamma - 1) * np.exp(-qa / 2) / cgamma(g2).real
    first = np.real(hyp1f1_poly(n, g2 + 1, qa))
    second = np.real(hyp1f1_poly(n - 1, g2 + 1, qa)) if n > 0 else np.zeros_like(qa)
    f = profile * (state.spinor_a[0] * first + state.spinor_b[0] * second)
    g = profile * (state.spinor_a[1] * first + state.spinor_b[1] * second)
    f_ref, g_ref = (reconstruct_atoms(c) for c in eigen_coefficient(p, n))
    scale = _normalization(f_ref, g_ref)
    return np.array([scale * f, scale * g])
