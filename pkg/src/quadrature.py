"""
quadrature.py - Quadrature Rules

Numerical integration building blocks shared by the transform, the
reconstruction and the norm computations:

  - ``adaptive_gauss_legendre``: vectorized panel bisection with a fixed
    Gauss-Legendre rule per panel, error estimated from the two-halves
    refinement.
  - ``genlaguerre_rule``: generalized Gauss-Laguerre nodes for integrals of
    ``x^alpha e^(-x) h(x)`` on the half-line.
  - ``fourier_line_integral``: ``∫ G(b) e^(ibq) db`` over the real line via
    QUADPACK's QAWF (Fourier integrals on semi-infinite ranges).
"""

from __future__ import annotations

import logging
import warnings
from collections.abc import Callable
from functools import lru_cache

import numpy as np
from numpy.typing import ArrayLike
from scipy import integrate
from scipy.special import roots_genlaguerre, roots_legendre

from .errors import AccuracyError

log = logging.getLogger("biwave.quadrature")

# Panels alive at once; beyond this the integrand is not resolvable with the rule.
MAX_PANELS = 200_000


@lru_cache(maxsize=32)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the ``n``-point Gauss-Legendre rule on [-1, 1]."""
    x, w = roots_legendre(n)
    return x, w


@lru_cache(maxsize=32)
def genlaguerre_rule(n: int, alpha: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for ``∫₀^∞ x^alpha e^(-x) h(x) dx``."""
    x, w = roots_genlaguerre(n, alpha)
    return x, w


def _panel_sums(
    func: Callable[[np.ndarray], np.ndarray], lo: np.ndarray, hi: np.ndarray, order: int
) -> np.ndarray:
    x, w = gauss_legendre(order)
    half = 0.5 * (hi - lo)
    nodes = 0.5 * (hi + lo)[:, None] + half[:, None] * x[None, :]
    values = np.asarray(func(nodes), dtype=complex)
    return half * (values @ w)


def adaptive_gauss_legendre(
    func: Callable[[np.ndarray], np.ndarray],
    edges: ArrayLike,
    atol: float = 1e-10,
    rtol: float = 1e-8,
    order: int = 15,
    max_depth: int = 24,
) -> tuple[complex, float]:
    """
    Integrate ``func`` over ``[edges[0], edges[-1]]``.

    Parameters:
    - func: vectorized integrand, called with arrays of shape (panels, order).
    - edges: initial panel boundaries, strictly increasing.
    - atol, rtol: absolute and relative tolerance on the total.
    - order: Gauss-Legendre points per panel.
    - max_depth: maximum number of bisections of an initial panel.

    Returns:
    - (value, error): integral estimate and its absolute error estimate.

    Raises :class:`AccuracyError` (with the best estimate attached) when the
    tolerance is not met within ``max_depth`` bisections.
    """
    e = np.asarray(edges, dtype=float)
    lo, hi = e[:-1].copy(), e[1:].copy()
    width = e[-1] - e[0]
    if width == 0:
        return 0j, 0.0

    done_value = 0j
    done_error = 0.0
    estimate = 0j
    pending_error = np.inf
    for _depth in range(max_depth + 1):
        mid = 0.5 * (lo + hi)
        coarse = _panel_sums(func, lo, hi, order)
        fine = _panel_sums(func, lo, mid, order) + _panel_sums(func, mid, hi, order)
        err = np.abs(fine - coarse)
        estimate = done_value + fine.sum()
        tol = max(atol, rtol * abs(estimate))
        ok = err <= tol * (hi - lo) / width
        done_value += fine[ok].sum()
        done_error += float(err[ok].sum())
        if ok.all():
            return complex(done_value), done_error
        pending_error = float(err[~ok].sum())
        lo, mid, hi = lo[~ok], mid[~ok], hi[~ok]
        lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])
        if lo.size > MAX_PANELS:
            break

    raise AccuracyError(
        f"adaptive Gauss-Legendre did not converge (error {done_error + pending_error:.3g})",
        estimate=complex(estimate),
        error=done_error + pending_error,
    )


def _qawf(func: Callable[[float], float], q: float, kind: str, epsabs: float) -> tuple[float, float, bool]:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", integrate.IntegrationWarning)
        value, error = integrate.quad(func, 0.0, np.inf, weight=kind, wvar=q, epsabs=epsabs, limlst=100)
    warned = any(issubclass(w.category, integrate.IntegrationWarning) for w in caught)
    return float(value), float(error), warned


def fourier_line_integral(
    g: Callable[[float], complex], q: float, epsabs: float = 1e-12
) -> tuple[complex, float, bool]:
    """
    ``∫_{-∞}^{∞} g(b) e^(ibq) db`` for ``q > 0``.

    ``g`` is split into even and odd parts ``E(b) = g(b) + g(-b)`` and
    ``O(b) = g(b) - g(-b)`` so each real piece becomes a one-sided cosine or
    sine integral.

    Returns:
    - (value, error, warned): ``warned`` is set when QUADPACK reported an
      integration warning on any of the four pieces.
    """
    if not q > 0:
        raise ValueError(f"fourier_line_integral needs q > 0, got {q}")

    def even(b: float) -> complex:
        return g(b) + g(-b)

    def odd(b: float) -> complex:
        return g(b) - g(-b)

    pieces = [
        _qawf(lambda b: even(b).real, q, "cos", epsabs),
        _qawf(lambda b: odd(b).imag, q, "sin", epsabs),
        _qawf(lambda b: even(b).imag, q, "cos", epsabs),
        _qawf(lambda b: odd(b).real, q, "sin", epsabs),
    ]
    (ec_re, e1, w1), (os_im, e2, w2), (ec_im, e3, w3), (os_re, e4, w4) = pieces
    value = complex(ec_re - os_im, ec_im + os_re)
    warned = w1 or w2 or w3 or w4
    if warned:
        log.debug(f"QAWF warning at q={q:g}")
    return value, e1 + e2 + e3 + e4, warned
