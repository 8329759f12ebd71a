"""
core.py - Domain Types and Branch Conventions

Shared vocabulary of the library:

  - :class:`HalfPlanePoint`: a point ``z = b + ia`` of the upper half-plane;
    transforms are always evaluated at its conjugate ``zbar = b - ia``.
  - :class:`WaveletParams`: the exponent γ of the analyzing wavelet
    ``q^(γ-2) e^(-q)``.
  - :class:`Atom`, :class:`Samples`, :class:`RadialFunction`: radial
    functions on ``q > 0`` as closed-form atom sums plus an optional sampled
    remainder.
  - :class:`PoleTerm`, :class:`Remainder`, :class:`AnalyticCoefficient`: the
    analytic factor ``F(zbar)`` of a wavelet coefficient.

All complex powers go through :func:`principal_power`. Bases are always
arranged as ``i(zbar - pole)``, whose real part is ``a + Im(pole) > 0`` on the
working domain, so the principal branch never sees its cut.

Every type here is immutable after construction.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.interpolate import CubicSpline, RegularGridInterpolator

from .errors import DomainError, ValidationError

ComplexArray = NDArray[np.complex128]
FloatArray = NDArray[np.float64]

# Orders closer than this are treated as the same pole order when merging.
_ORDER_TOL = 1e-12


def _scalar_or_array(values: np.ndarray) -> Any:
    return values.item() if values.ndim == 0 else values


# ─── Branch Convention ──────────────────────────────────────────────────────


def principal_power(w: ArrayLike, s: complex | float) -> Any:
    """
    Return ``exp(s * Log w)`` with ``Log`` the principal logarithm.

    Works elementwise on arrays. Raises :class:`DomainError` when any base is
    exactly zero.
    """
    base = np.asarray(w, dtype=complex)
    if np.any(base == 0):
        raise DomainError("principal_power: base must be non-zero")
    return _scalar_or_array(np.exp(s * np.log(base)))


# ─── Half-Plane Points ──────────────────────────────────────────────────────


@dataclass(frozen=True)
class HalfPlanePoint:
    """``z = b + ia`` with ``a > 0``."""

    b: float
    a: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise DomainError(f"HalfPlanePoint needs finite coordinates, got b={self.b}, a={self.a}")
        if self.a <= 0:
            raise DomainError(f"HalfPlanePoint needs a > 0, got a={self.a}")

    @classmethod
    def from_zbar(cls, zbar: complex) -> HalfPlanePoint:
        return cls(b=zbar.real, a=-zbar.imag)

    @property
    def z(self) -> complex:
        return complex(self.b, self.a)

    @property
    def zbar(self) -> complex:
        return complex(self.b, -self.a)


# ─── Parameter Classification ───────────────────────────────────────────────


@dataclass(frozen=True)
class WaveletParams:
    """Exponent of the analyzing wavelet ``ψ^γ(q) = q^(γ-2) e^(-q)``."""

    gamma: float


@dataclass(frozen=True)
class ClassificationRecord:
    """Result of :func:`validate_params`."""

    gamma: float
    kind: str

    @property
    def admissible(self) -> bool:
        return self.kind == "admissible"

    @property
    def square_integrable(self) -> bool:
        return self.kind != "non-square-integrable"


def classify_gamma(gamma: float) -> str:
    """
    Admissibility class of ``ψ^γ``.

    ``gamma > 1`` is admissible, ``1/2 < gamma <= 1`` is square integrable but
    not admissible, ``0 < gamma <= 1/2`` is not square integrable.
    """
    if not gamma > 0:
        raise ValidationError(f"gamma must satisfy gamma > 0, got {gamma}")
    if gamma > 1:
        return "admissible"
    if gamma > 0.5:
        return "non-admissible"
    return "non-square-integrable"


def validate_params(p: Any) -> ClassificationRecord:
    """
    Validate wavelet or Dirac parameters and classify the resulting γ.

    Accepts :class:`WaveletParams` or anything exposing ``lam``, ``chi`` and
    ``m`` (see :class:`src.dirac.DiracParams`). All violated inequalities are
    collected into a single :class:`ValidationError`.
    """
    if isinstance(p, WaveletParams):
        return ClassificationRecord(gamma=p.gamma, kind=classify_gamma(p.gamma))

    problems: list[str] = []
    m, lam, chi = p.m, p.lam, p.chi
    if not m > 0:
        problems.append(f"mass must satisfy m > 0, got m={m}")
    if not lam > 0:
        problems.append(f"coupling must satisfy lambda > 0, got lambda={lam}")
    if not math.isfinite(chi) or chi != round(chi) or abs(chi) < 1:
        problems.append(f"chi must be a non-zero integer with |chi| >= 1, got chi={chi}")
    if not chi * chi > lam * lam:
        problems.append(f"parameters must satisfy chi^2 > lambda^2, got chi={chi}, lambda={lam}")
    if problems:
        raise ValidationError(problems)
    gamma = math.sqrt(chi * chi - lam * lam)
    return ClassificationRecord(gamma=gamma, kind=classify_gamma(gamma))


# ─── Radial Functions ───────────────────────────────────────────────────────


@dataclass(frozen=True)
class Atom:
    """The radial function ``coeff * q^(alpha-1) * exp(i * pole * q)``."""

    coeff: complex
    alpha: float
    pole: complex

    def __post_init__(self) -> None:
        if self.alpha < 0:
            raise DomainError(f"Atom needs alpha >= 0, got {self.alpha}")
        if not complex(self.pole).imag > 0:
            raise DomainError(f"Atom needs Im(pole) > 0, got pole={self.pole}")

    def evaluate(self, q: ArrayLike) -> Any:
        qa = np.asarray(q, dtype=float)
        values = self.coeff * qa ** (self.alpha - 1) * np.exp(1j * self.pole * qa)
        return _scalar_or_array(np.asarray(values, dtype=complex))

    def scaled(self, c: complex) -> Atom:
        return Atom(self.coeff * c, self.alpha, self.pole)

    def qddq(self) -> tuple[Atom, Atom]:
        """``q d/dq`` of the atom, itself a pair of atoms."""
        return (
            Atom(self.coeff * (self.alpha - 1), self.alpha, self.pole),
            Atom(self.coeff * 1j * self.pole, self.alpha + 1, self.pole),
        )


@dataclass(frozen=True, eq=False)
class Samples:
    """
    A radial function sampled on a strictly increasing grid ``q_i > 0``.

    Interpolation is piecewise cubic in ``log q`` applied to ``q * f(q)``,
    which stays bounded for the ``q^(alpha-1)`` behaviour near the origin.
    Below the grid a power law fitted to the first two samples is used and
    above it an exponential fitted to the last two samples.
    """

    q: FloatArray
    values: ComplexArray

    def __post_init__(self) -> None:
        q = np.array(self.q, dtype=float)
        v = np.array(self.values, dtype=complex)
        if q.ndim != 1 or q.shape != v.shape:
            raise DomainError("Samples need one-dimensional grid and values of equal length")
        if q.size < 4:
            raise DomainError("Samples need at least 4 grid points")
        if np.any(q <= 0) or np.any(np.diff(q) <= 0):
            raise DomainError("Samples grid must be positive and strictly increasing")
        q.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "values", v)

    @cached_property
    def log_q(self) -> FloatArray:
        return np.log(self.q)

    @cached_property
    def spline(self) -> CubicSpline:
        return CubicSpline(self.log_q, self.q * self.values)

    @cached_property
    def head_model(self) -> tuple[complex, float]:
        """``(C, p)`` such that ``q f(q) ~ C q^p`` below the first sample."""
        h0, h1 = self.q[0] * self.values[0], self.q[1] * self.values[1]
        if h0 == 0 or h1 == 0:
            return 0j, 0.0
        p = math.log(abs(h1) / abs(h0)) / math.log(self.q[1] / self.q[0])
        return complex(h0 / self.q[0] ** p), p

    @cached_property
    def tail_model(self) -> tuple[complex, complex]:
        """``(f_N, kappa)`` such that ``f(q) ~ f_N exp(-kappa (q - q_N))`` above the grid."""
        f_last, f_prev = self.values[-1], self.values[-2]
        if f_last == 0 or f_prev == 0:
            return 0j, 0j
        kappa = -np.log(f_last / f_prev) / (self.q[-1] - self.q[-2])
        return complex(f_last), complex(kappa)

    def evaluate(self, q: ArrayLike) -> Any:
        qa = np.asarray(q, dtype=float)
        out = np.zeros(qa.shape, dtype=complex)
        inside = (qa >= self.q[0]) & (qa <= self.q[-1])
        if np.any(inside):
            out[inside] = self.spline(np.log(qa[inside])) / qa[inside]
        below = (qa > 0) & (qa < self.q[0])
        if np.any(below):
            c, p = self.head_model
            out[below] = c * qa[below] ** (p - 1)
        above = qa > self.q[-1]
        if np.any(above):
            f_last, kappa = self.tail_model
            if kappa.real > 0:
                out[above] = f_last * np.exp(-kappa * (qa[above] - self.q[-1]))
        return _scalar_or_array(out)

    def qddq(self) -> Samples:
        # q f' = (d(qf)/du - qf) / q with u = log q
        h = self.q * self.values
        dh = self.spline(self.log_q, 1)
        return Samples(self.q, (dh - h) / self.q)

    def scaled(self, c: complex) -> Samples:
        return Samples(self.q, self.values * c)


@dataclass(frozen=True)
class RadialFunction:
    """Atom sum plus an optional sampled remainder; the two parts are summed, never merged."""

    atoms: tuple[Atom, ...] = ()
    samples: Samples | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "atoms", tuple(self.atoms))

    @classmethod
    def from_samples(cls, q: ArrayLike, values: ArrayLike) -> RadialFunction:
        return cls(samples=Samples(np.asarray(q, dtype=float), np.asarray(values, dtype=complex)))

    @property
    def is_zero(self) -> bool:
        atoms_zero = all(atom.coeff == 0 for atom in self.atoms)
        samples_zero = self.samples is None or not np.any(self.samples.values)
        return atoms_zero and samples_zero

    def evaluate(self, q: ArrayLike) -> Any:
        qa = np.asarray(q, dtype=float)
        if np.any(qa <= 0):
            raise DomainError("radial functions are defined for q > 0 only")
        total = np.zeros(qa.shape, dtype=complex)
        for atom in self.atoms:
            total = total + atom.evaluate(qa)
        if self.samples is not None:
            total = total + self.samples.evaluate(qa)
        return _scalar_or_array(np.asarray(total, dtype=complex))

    def qddq(self) -> RadialFunction:
        """``q d/dq f``: exact on atoms, spline derivative on samples."""
        atoms = tuple(part for atom in self.atoms for part in atom.qddq())
        samples = self.samples.qddq() if self.samples is not None else None
        return RadialFunction(atoms, samples)

    def scaled(self, c: complex) -> RadialFunction:
        samples = self.samples.scaled(c) if self.samples is not None else None
        return RadialFunction(tuple(atom.scaled(c) for atom in self.atoms), samples)

    def plus(self, other: RadialFunction) -> RadialFunction:
        if self.samples is not None and other.samples is not None:
            if not np.array_equal(self.samples.q, other.samples.q):
                raise DomainError("cannot add sampled functions on different grids")
            samples: Samples | None = Samples(self.samples.q, self.samples.values + other.samples.values)
        else:
            samples = self.samples if self.samples is not None else other.samples
        return RadialFunction(self.atoms + other.atoms, samples)


# ─── Analytic Coefficients ──────────────────────────────────────────────────


@dataclass(frozen=True)
class PoleTerm:
    """``coeff * [i(zbar - pole)]^(-order)``."""

    coeff: complex
    order: float
    pole: complex

    def __post_init__(self) -> None:
        if not complex(self.pole).imag > 0:
            raise DomainError(f"PoleTerm needs Im(pole) > 0, got pole={self.pole}")

    @classmethod
    def from_shifted(cls, coeff: complex, order: float, pole: complex) -> PoleTerm:
        """Convert ``coeff * (zbar - pole)^(-order)`` into the ``i(zbar - pole)`` base."""
        return cls(coeff * principal_power(1j, order), order, pole)

    def base(self, zbar: ArrayLike) -> Any:
        return 1j * (np.asarray(zbar, dtype=complex) - self.pole)

    def evaluate(self, zbar: ArrayLike) -> Any:
        return self.coeff * principal_power(self.base(zbar), -self.order)

    def derivative(self) -> PoleTerm:
        return PoleTerm(self.coeff * (-self.order) * 1j, self.order + 1, self.pole)

    def scaled(self, c: complex) -> PoleTerm:
        return PoleTerm(self.coeff * c, self.order, self.pole)


@dataclass(frozen=True)
class Remainder:
    """
    Non-closed-form part ``G(zbar)`` of an analytic coefficient.

    Wraps a scalar callable; evaluation vectorizes over arrays. Decay is
    measured on demand with :func:`src.transform.decay_check`.
    """

    func: Callable[[complex], complex]
    label: str = "remainder"

    @classmethod
    def from_mesh(cls, a_nodes: ArrayLike, b_nodes: ArrayLike, values: ArrayLike) -> Remainder:
        """
        Interpolate samples ``values[i, j] = G(b_j - i a_i)`` on a half-plane mesh.

        Linear in ``(log a, b)``; zero outside the mesh.
        """
        log_a = np.log(np.asarray(a_nodes, dtype=float))
        b = np.asarray(b_nodes, dtype=float)
        v = np.asarray(values, dtype=complex)
        re = RegularGridInterpolator((log_a, b), v.real, bounds_error=False, fill_value=0.0)
        im = RegularGridInterpolator((log_a, b), v.imag, bounds_error=False, fill_value=0.0)

        def _interp(zbar: complex) -> complex:
            point = [[math.log(-zbar.imag), zbar.real]]
            return complex(re(point)[0], im(point)[0])

        return cls(_interp, label="mesh")

    def evaluate(self, zbar: ArrayLike) -> Any:
        zb = np.asarray(zbar, dtype=complex)
        if zb.ndim == 0:
            return complex(self.func(complex(zb)))
        flat = np.array([self.func(complex(z)) for z in zb.ravel()], dtype=complex)
        return flat.reshape(zb.shape)


def finite_difference_step(zbar: complex) -> float:
    return max(1e-5, 1e-5 * abs(zbar))


def _remainder_derivative(g: Remainder) -> Remainder:
    def _dg(zbar: complex) -> complex:
        h = finite_difference_step(zbar)
        return (g.func(zbar + h) - g.func(zbar - h)) / (2 * h)

    return Remainder(_dg, label=f"d/dzbar {g.label}")


def _scaled_remainder(g: Remainder, c: complex) -> Remainder:
    return Remainder(lambda zbar: c * g.func(zbar), label=g.label)


def merge_pole_terms(terms: Sequence[PoleTerm]) -> tuple[PoleTerm, ...]:
    """Combine terms sharing pole and order; drop exact zeros."""
    merged: list[PoleTerm] = []
    for term in terms:
        for idx, existing in enumerate(merged):
            if existing.pole == term.pole and abs(existing.order - term.order) <= _ORDER_TOL:
                merged[idx] = PoleTerm(existing.coeff + term.coeff, existing.order, existing.pole)
                break
        else:
            merged.append(term)
    return tuple(t for t in merged if t.coeff != 0)


@dataclass(frozen=True)
class AnalyticCoefficient:
    """
    Analytic factor ``F(zbar)`` of the wavelet coefficients of one function.

    ``F = sum(pole_terms) + remainder``; defined and analytic for
    ``Im(zbar) < 0``. Every pole term has ``order >= gamma``.
    """

    gamma: float
    pole_terms: tuple[PoleTerm, ...] = ()
    remainder: Remainder | None = None
    metadata: dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "pole_terms", tuple(self.pole_terms))
        for term in self.pole_terms:
            if term.order < self.gamma - _ORDER_TOL:
                raise DomainError(
                    f"pole term order {term.order} is below gamma={self.gamma} (needs alpha >= 0)"
                )

    @property
    def is_symbolic(self) -> bool:
        return self.remainder is None

    @property
    def is_zero(self) -> bool:
        return self.remainder is None and all(t.coeff == 0 for t in self.pole_terms)

    def evaluate(self, zbar: ArrayLike) -> Any:
        zb = np.asarray(zbar, dtype=complex)
        if np.any(zb.imag >= 0):
            raise DomainError("analytic coefficients are evaluated on Im(zbar) < 0 only")
        total = np.zeros(zb.shape, dtype=complex)
        for term in self.pole_terms:
            total = total + term.evaluate(zb)
        if self.remainder is not None:
            total = total + self.remainder.evaluate(zb)
        return _scalar_or_array(np.asarray(total, dtype=complex))

    def derivative(self) -> AnalyticCoefficient:
        """``dF/dzbar``: exact on pole terms, central differences on the remainder."""
        remainder = _remainder_derivative(self.remainder) if self.remainder is not None else None
        return AnalyticCoefficient(
            self.gamma, tuple(t.derivative() for t in self.pole_terms), remainder, dict(self.metadata)
        )

    def scaled(self, c: complex) -> AnalyticCoefficient:
        remainder = _scaled_remainder(self.remainder, c) if self.remainder is not None else None
        return AnalyticCoefficient(
            self.gamma, tuple(t.scaled(c) for t in self.pole_terms), remainder, dict(self.metadata)
        )

    def plus(self, other: AnalyticCoefficient) -> AnalyticCoefficient:
        if abs(self.gamma - other.gamma) > _ORDER_TOL:
            raise DomainError("cannot add coefficients built for different gamma")
        if self.remainder is not None and other.remainder is not None:
            g1, g2 = self.remainder, other.remainder
            remainder: Remainder | None = Remainder(lambda z: g1.func(z) + g2.func(z), label="sum")
        else:
            remainder = self.remainder if self.remainder is not None else other.remainder
        return AnalyticCoefficient(self.gamma, self.pole_terms + other.pole_terms, remainder)

    def poles_only(self) -> AnalyticCoefficient:
        return AnalyticCoefficient(self.gamma, self.pole_terms, None, dict(self.metadata))

    def remainder_only(self) -> AnalyticCoefficient:
        return AnalyticCoefficient(self.gamma, (), self.remainder, dict(self.metadata))
