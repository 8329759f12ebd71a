"""
specfun.py - Complex Special Functions

Gamma functions on the complex plane and the terminating hypergeometric
series needed by the closed forms:

  - ``cgamma`` / ``clog_gamma``: thin wrappers over :mod:`scipy.special` that
    reject the poles of Γ instead of returning ``inf``/``nan``.
  - ``hyp2f1_poly`` / ``hyp1f1_poly``: ₂F₁(-n, b; c; x) and ₁F₁(-n; c; x) as
    finite sums, evaluated by forward term recurrence with compensated
    (Neumaier) accumulation. The alternating signs of ``(-n)_k`` cancel badly
    for larger ``n``; plain summation loses digits there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import ArrayLike
from scipy import special

from .errors import DomainError


def _is_gamma_pole(s: complex) -> bool:
    return s.imag == 0 and s.real <= 0 and s.real == math.floor(s.real)


def cgamma(s: complex | float) -> complex:
    """Γ(s) for complex ``s``; non-positive integers raise :class:`DomainError`."""
    s = complex(s)
    if _is_gamma_pole(s):
        raise DomainError(f"gamma function has a pole at s={s.real:g}")
    return complex(special.gamma(s))


def clog_gamma(s: complex | float) -> complex:
    """Principal branch of log Γ(s)."""
    s = complex(s)
    if _is_gamma_pole(s):
        raise DomainError(f"log-gamma has a pole at s={s.real:g}")
    return complex(special.loggamma(s))


def _neumaier_sum(terms: np.ndarray) -> np.ndarray:
    """Compensated sum along axis 0, done separately on real and imaginary parts."""

    def _real(parts: np.ndarray) -> np.ndarray:
        total = np.zeros(parts.shape[1:], dtype=float)
        comp = np.zeros_like(total)
        for term in parts:
            t = total + term
            big = np.abs(total) >= np.abs(term)
            comp += np.where(big, (total - t) + term, (term - t) + total)
            total = t
        return total + comp

    return _real(terms.real) + 1j * _real(terms.imag)


@dataclass(frozen=True)
class PolyHypergeom:
    """
    Terminating hypergeometric series with upper parameter ``-n``.

    ``b is None`` selects the confluent ₁F₁(-n; c; x) form, otherwise
    ₂F₁(-n, b; c; x).
    """

    n: int
    b: complex | None
    c: complex

    def __post_init__(self) -> None:
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 0:
            raise DomainError(f"degree n must be a non-negative integer, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        c = complex(self.c)
        for k in range(self.n):
            if c + k == 0:
                raise DomainError(f"lower parameter c={c.real:g} makes term {k + 1} divide by zero")

    def ratio(self, k: int) -> complex:
        """``t_{k+1} / (t_k x)``."""
        num = complex(-self.n + k)
        if self.b is not None:
            num *= complex(self.b) + k
        return num / ((complex(self.c) + k) * (k + 1))

    def coefficients(self) -> np.ndarray:
        """Coefficients of ``x^k`` for ``k = 0..n``."""
        out = np.empty(self.n + 1, dtype=complex)
        out[0] = 1.0
        for k in range(self.n):
            out[k + 1] = out[k] * self.ratio(k)
        return out

    def __call__(self, x: ArrayLike) -> Any:
        xa = np.asarray(x, dtype=complex)
        terms = np.empty((self.n + 1,) + xa.shape, dtype=complex)
        terms[0] = 1.0
        for k in range(self.n):
            terms[k + 1] = terms[k] * self.ratio(k) * xa
        total = _neumaier_sum(terms)
        return total.item() if total.ndim == 0 else total


def hyp2f1_poly(n: int, b: complex, c: complex, x: ArrayLike) -> Any:
    """₂F₁(-n, b; c; x), a polynomial of degree ``n`` in ``x``."""
    return PolyHypergeom(n, complex(b), complex(c))(x)


def hyp1f1_poly(n: int, c: complex, q: ArrayLike) -> Any:
    """₁F₁(-n; c; q), a polynomial of degree ``n`` in ``q``."""
    return PolyHypergeom(n, None, complex(c))(q)
