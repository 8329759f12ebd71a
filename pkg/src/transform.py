"""
transform.py - Forward Wavelet Transform

The forward map

    F(zbar) = ∫₀^∞ dq e^(-i zbar q) q^γ f(q)

is evaluated two ways. Atoms ``c q^(α-1) e^(iζ₀q)`` map in closed form onto
pole terms ``c Γ(γ+α) [i(zbar-ζ₀)]^(-(γ+α))``; sampled remainders go through
adaptive Gauss-Legendre quadrature in ``u = log q`` with analytic head and
tail corrections.

Also here: the operator maps (``q d/dq`` and multiplication by ``q``) acting
symbolically on pole terms, decay diagnostics along rays, the Cauchy-Riemann
check and the half-plane grids used for output and 2-D quadrature.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .core import (
    AnalyticCoefficient,
    Atom,
    HalfPlanePoint,
    PoleTerm,
    RadialFunction,
    Remainder,
    Samples,
    merge_pole_terms,
)
from .errors import DomainError
from .quadrature import adaptive_gauss_legendre, gauss_legendre
from .specfun import cgamma

log = logging.getLogger("biwave.transform")

DEFAULT_ATOL = 1e-10
DEFAULT_RTOL = 1e-8
DEFAULT_DEPTH = 24

_HEAD_MAX_TERMS = 200


# ─── Forward Map ────────────────────────────────────────────────────────────


def forward_atom(atom: Atom, gamma: float) -> PoleTerm:
    """Exact image of one atom: ``c Γ(γ+α) [i(zbar-ζ₀)]^(-(γ+α))``."""
    if not gamma > 0:
        raise DomainError(f"gamma must be > 0, got {gamma}")
    order = gamma + atom.alpha
    return PoleTerm(atom.coeff * cgamma(order), order, atom.pole)


def _head_integral(samples: Samples, gamma: float, zbar: complex) -> tuple[complex, float]:
    # ∫₀^{q0} e^{-i zbar q} C q^{γ+p-1} dq, expanded in powers of q0
    c, p = samples.head_model
    if c == 0:
        return 0j, 0.0
    s = gamma + p
    if not s > 0:
        raise DomainError(f"integrand q^(gamma+p-1) is not integrable at 0 (gamma+p={s:.3g})")
    q0 = samples.q[0]
    x = -1j * zbar * q0
    term = complex(1.0)
    total = term / s
    contribution = total
    for k in range(1, _HEAD_MAX_TERMS):
        term *= x / k
        contribution = term / (s + k)
        total += contribution
        if abs(contribution) < 1e-17 * abs(total):
            break
    scale = c * q0**s
    # last term kept stands in for the truncated rest
    return scale * total, float(abs(scale * contribution))


def _tail_integral(samples: Samples, gamma: float, zbar: complex) -> tuple[complex, float]:
    # ∫_{qN}^∞ e^{-i zbar q} q^γ f_N e^{-κ(q-qN)} dq, asymptotic in 1/(qN β)
    f_last, kappa = samples.tail_model
    if f_last == 0:
        return 0j, 0.0
    beta = kappa + 1j * zbar
    if not beta.real > 0:
        raise DomainError("sampled function does not decay fast enough beyond the grid")
    q_n = samples.q[-1]
    series = 1 / beta + gamma / (q_n * beta**2) + gamma * (gamma - 1) / (q_n**2 * beta**3)
    dropped = gamma * (gamma - 1) * (gamma - 2) / (q_n**3 * beta**4)
    prefactor = f_last * np.exp(-1j * zbar * q_n) * q_n**gamma
    return prefactor * series, float(abs(prefactor * dropped))


def forward_quadrature(
    f: RadialFunction | Samples,
    gamma: float,
    zbar: complex,
    atol: float = DEFAULT_ATOL,
    rtol: float = DEFAULT_RTOL,
    max_depth: int = DEFAULT_DEPTH,
) -> tuple[complex, float]:
    """
    Evaluate ``F(zbar)`` for a sampled function by quadrature.

    Atoms of a :class:`RadialFunction` are added in closed form; only the
    sampled part is integrated numerically.

    Returns:
    - (value, error): value and absolute error estimate, covering the panel
      quadrature and the truncation of the head and tail series.
    """
    zbar = complex(zbar)
    if not zbar.imag < 0:
        raise DomainError(f"forward transform needs Im(zbar) < 0, got zbar={zbar}")
    if not gamma > 0:
        raise DomainError(f"gamma must be > 0, got {gamma}")

    if isinstance(f, RadialFunction):
        exact = sum((forward_atom(a, gamma).evaluate(zbar) for a in f.atoms), 0j)
        if f.samples is None:
            return complex(exact), 0.0
        samples = f.samples
    else:
        exact = 0j
        samples = f

    if not np.any(samples.values):
        return complex(exact), 0.0

    spline = samples.spline

    def integrand(u: np.ndarray) -> np.ndarray:
        return np.exp(-1j * zbar * np.exp(u) + gamma * u) * spline(u)

    body, error = adaptive_gauss_legendre(integrand, samples.log_q, atol=atol, rtol=rtol, max_depth=max_depth)
    head, head_error = _head_integral(samples, gamma, zbar)
    tail, tail_error = _tail_integral(samples, gamma, zbar)
    return complex(exact + body + head + tail), error + head_error + tail_error


def transform(f: RadialFunction, gamma: float) -> AnalyticCoefficient:
    """
    ``F = L^γ f`` as an :class:`AnalyticCoefficient`.

    Atoms become exact pole terms; a sampled part becomes a remainder that
    runs :func:`forward_quadrature` on each evaluation.
    """
    terms = merge_pole_terms([forward_atom(atom, gamma) for atom in f.atoms])
    remainder = None
    if f.samples is not None and np.any(f.samples.values):
        samples = f.samples

        def _quad(zbar: complex) -> complex:
            return forward_quadrature(samples, gamma, zbar)[0]

        remainder = Remainder(_quad, label="quadrature")
    return AnalyticCoefficient(gamma, terms, remainder)


def wavelet_coefficient(f: RadialFunction, z: HalfPlanePoint, gamma: float) -> complex:
    """``(ψ_z^γ, f) = a^(γ-1/2) F(b - ia)``."""
    return complex(z.a ** (gamma - 0.5) * transform(f, gamma).evaluate(z.zbar))


# ─── Operator Maps ──────────────────────────────────────────────────────────


def _require_symbolic(F: AnalyticCoefficient, what: str) -> None:
    if F.remainder is not None:
        raise DomainError(f"{what} needs pole terms only; use finite_difference_map for remainders")


def apply_operator_map_qddq(F: AnalyticCoefficient) -> AnalyticCoefficient:
    """Image of ``q d/dq``: ``-zbar ∂F - (γ+1) F``, exact on pole terms."""
    _require_symbolic(F, "apply_operator_map_qddq")
    terms: list[PoleTerm] = []
    for t in F.pole_terms:
        s = t.order
        terms.append(PoleTerm((s - F.gamma - 1) * t.coeff, s, t.pole))
        terms.append(PoleTerm(1j * s * t.pole * t.coeff, s + 1, t.pole))
    return AnalyticCoefficient(F.gamma, merge_pole_terms(terms))


def apply_operator_map_q(F: AnalyticCoefficient) -> AnalyticCoefficient:
    """Image of multiplication by ``q``: ``i ∂F``."""
    _require_symbolic(F, "apply_operator_map_q")
    terms = [PoleTerm(t.order * t.coeff, t.order + 1, t.pole) for t in F.pole_terms]
    return AnalyticCoefficient(F.gamma, merge_pole_terms(terms))


def zbar_ddz(F: AnalyticCoefficient) -> AnalyticCoefficient:
    """``zbar ∂F``, exact on pole terms."""
    _require_symbolic(F, "zbar_ddz")
    terms: list[PoleTerm] = []
    for t in F.pole_terms:
        s = t.order
        terms.append(PoleTerm(-s * t.coeff, s, t.pole))
        terms.append(PoleTerm(-1j * s * t.pole * t.coeff, s + 1, t.pole))
    return AnalyticCoefficient(F.gamma, merge_pole_terms(terms))


def finite_difference_map(F: AnalyticCoefficient, kind: str) -> AnalyticCoefficient:
    """
    Operator maps for coefficients with a remainder.

    Pole terms are mapped exactly; the remainder goes through the central
    difference derivative of :meth:`AnalyticCoefficient.derivative`.
    ``kind`` is ``"qddq"``, ``"q"`` or ``"zbar_ddz"``.
    """
    symbolic = {"qddq": apply_operator_map_qddq, "q": apply_operator_map_q, "zbar_ddz": zbar_ddz}
    if kind not in symbolic:
        raise ValueError(f"unknown operator map {kind!r}")
    out = symbolic[kind](F.poles_only())
    if F.remainder is None:
        return out

    g = F.remainder
    dg = F.remainder_only().derivative().remainder
    assert dg is not None
    gamma = F.gamma

    def _mapped(zbar: complex) -> complex:
        if kind == "qddq":
            return -zbar * dg.func(zbar) - (gamma + 1) * g.func(zbar)
        if kind == "q":
            return 1j * dg.func(zbar)
        return zbar * dg.func(zbar)

    return AnalyticCoefficient(gamma, out.pole_terms, Remainder(_mapped, label=f"{kind} {g.label}"))


# ─── Diagnostics ────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class RayFit:
    """Log-log fit of ``|F|`` along one ray."""

    direction: str
    exponent: float | None
    monotone: bool
    knee: float | None


@dataclass(frozen=True)
class DecayReport:
    rays: tuple[RayFit, ...]
    radii: tuple[float, ...] = field(default=())

    @property
    def passed(self) -> bool:
        return all(r.monotone and (r.exponent is None or r.exponent < 0) for r in self.rays)

    @property
    def exponent(self) -> float | None:
        """Slowest (largest) fitted exponent over all rays."""
        fitted = [r.exponent for r in self.rays if r.exponent is not None]
        return max(fitted) if fitted else None

    def as_dict(self) -> dict[str, Any]:
        return {
            "passed": self.passed,
            "exponent": self.exponent,
            "rays": [r.__dict__ for r in self.rays],
        }


def _fit_ray(direction: str, radii: np.ndarray, values: np.ndarray) -> RayFit:
    mags = np.abs(values)
    if not np.any(mags):
        return RayFit(direction, None, True, None)
    if np.any(mags == 0):
        return RayFit(direction, None, False, None)
    slope = float(np.polyfit(np.log(radii), np.log(mags), 1)[0])
    decreasing = np.diff(mags) <= 0
    knee_idx = len(decreasing)
    for i in range(len(decreasing) - 1, -1, -1):
        if not decreasing[i]:
            break
        knee_idx = i
    monotone = knee_idx < len(decreasing)
    knee = float(radii[knee_idx]) if monotone else None
    return RayFit(direction, slope, monotone, knee)


def decay_check(
    F: AnalyticCoefficient,
    a: float = 1.0,
    b: float = 0.0,
    radii: np.ndarray | None = None,
) -> DecayReport:
    """
    Sample ``|F|`` along ``b -> ±∞`` at fixed ``a`` and ``a -> ∞`` at fixed ``b``
    and fit the power-law exponent on each ray.
    """
    r = np.geomspace(1e3, 1e7, 9) if radii is None else np.asarray(radii, dtype=float)
    rays = {
        "b+": r - 1j * a,
        "b-": -r - 1j * a,
        "a+": b - 1j * r,
    }
    fits = tuple(_fit_ray(name, r, np.asarray(F.evaluate(zbars))) for name, zbars in rays.items())
    return DecayReport(fits, tuple(float(x) for x in r))


def cauchy_riemann_defect(F: AnalyticCoefficient, zbar: complex, h: float | None = None) -> float:
    """
    Relative size of ``∂F/∂(conj zbar)`` estimated by central differences.

    Zero for an analytic ``F``; returns the absolute defect when ``F(zbar) = 0``.
    """
    zbar = complex(zbar)
    step = h if h is not None else max(1e-5, 1e-5 * abs(zbar))
    step = min(step, -zbar.imag / 2)
    dx = (F.evaluate(zbar + step) - F.evaluate(zbar - step)) / (2 * step)
    dy = (F.evaluate(zbar + 1j * step) - F.evaluate(zbar - 1j * step)) / (2 * step)
    defect = abs(0.5 * (dx + 1j * dy))
    scale = abs(F.evaluate(zbar))
    return float(defect / scale) if scale > 0 else float(defect)


# ─── Half-Plane Grids ───────────────────────────────────────────────────────


@dataclass(frozen=True, eq=False)
class HalfPlaneRule:
    """Tensor quadrature rule: integrate over ``b`` per ``a``-node, then over ``a``."""

    a: np.ndarray
    a_weights: np.ndarray
    b: np.ndarray
    b_weights: np.ndarray

    def zbar(self) -> np.ndarray:
        return self.b - 1j * self.a[:, None]


@dataclass(frozen=True)
class HalfPlaneGrid:
    """
    Region ``a ∈ [a_min, a_max]``, ``|b - b_center| <= b_max`` of the upper half-plane.

    ``mesh()`` gives log-spaced ``a`` and uniform ``b`` nodes for output.
    ``rule()`` gives Gauss-Legendre nodes in ``u = log a`` and in ``v`` with
    ``b = b_center + (a + a_ref) tan v``; ``b_max`` may be infinite there.
    """

    a_min: float
    a_max: float
    b_max: float
    n_a: int = 40
    n_b: int = 41
    b_center: float = 0.0
    a_ref: float = 1.0

    def __post_init__(self) -> None:
        problems = []
        if not self.a_min > 0:
            problems.append(f"a_min must be > 0, got {self.a_min}")
        if not self.a_max > self.a_min:
            problems.append(f"a_max must exceed a_min, got {self.a_max}")
        if not self.b_max > 0:
            problems.append(f"b_max must be > 0, got {self.b_max}")
        if self.n_a < 2 or self.n_b < 2:
            problems.append("grids need at least 2 nodes per axis")
        if not self.a_ref > 0:
            problems.append(f"a_ref must be > 0, got {self.a_ref}")
        if problems:
            raise DomainError("; ".join(problems))

    @classmethod
    def for_quadrature(cls, n_a: int = 200, n_b: int = 128, b_center: float = 0.0) -> HalfPlaneGrid:
        return cls(1e-10, 1e6, math.inf, n_a, n_b, b_center=b_center)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        if not math.isfinite(self.b_max):
            raise DomainError("mesh() needs a finite b_max")
        a_nodes = np.geomspace(self.a_min, self.a_max, self.n_a)
        b_nodes = np.linspace(self.b_center - self.b_max, self.b_center + self.b_max, self.n_b)
        return a_nodes, b_nodes

    def rule(self, n_a: int | None = None, n_b: int | None = None) -> HalfPlaneRule:
        na = n_a or self.n_a
        nb = n_b or self.n_b
        xu, wu = gauss_legendre(na)
        lo, hi = math.log(self.a_min), math.log(self.a_max)
        u = 0.5 * (hi + lo) + 0.5 * (hi - lo) * xu
        a = np.exp(u)
        a_weights = 0.5 * (hi - lo) * wu * a

        sigma = a + self.a_ref
        v_max = np.arctan(self.b_max / sigma) if math.isfinite(self.b_max) else np.full_like(a, np.pi / 2)
        xv, wv = gauss_legendre(nb)
        v = v_max[:, None] * xv[None, :]
        b = self.b_center + sigma[:, None] * np.tan(v)
        b_weights = v_max[:, None] * wv[None, :] * sigma[:, None] / np.cos(v) ** 2
        return HalfPlaneRule(a, a_weights, b, b_weights)
