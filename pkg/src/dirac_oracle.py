"""
dirac_oracle.py - Shooting-Method Reference Solver

Integrates the radial Dirac pair directly in ``t = ln q`` and locates the
bound-state energies by matching an outward solution (regular Frobenius start
``q^(γ-1)`` at ``q_min``) against an inward one (decaying ``e^(-q/2)`` start
at ``q_max``). Shares no code path with the wavelet derivation in
:mod:`src.dirac` beyond the parameter types.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike
from scipy import integrate
from scipy.interpolate import make_interp_spline
from scipy.optimize import brentq

from .core import RadialFunction
from .dirac import DiracParams, spectrum, spinor_ratio, state_exists
from .errors import BracketError, DomainError, IntegrationError

log = logging.getLogger("biwave.oracle")


@dataclass(frozen=True)
class ShootingConfig:
    q_min: float = 1e-6
    q_max: float = 80.0
    q_match: float = 2.0
    rtol: float = 1e-12
    atol: float = 1e-14

    def __post_init__(self) -> None:
        if not 0 < self.q_min < self.q_match < self.q_max:
            raise DomainError(
                f"need 0 < q_min < q_match < q_max, got {self.q_min}, {self.q_match}, {self.q_max}"
            )


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Solution on the integration grid plus the final log-derivative ``f'/f``."""

    q: np.ndarray
    f: np.ndarray
    g: np.ndarray
    log_derivative: float


def _rhs(p: DiracParams, s: float):
    lam, chi = p.lam, p.chi

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        q = math.exp(t)
        f, g = y
        return np.array([-(1 + chi) * f + (s * q / 2 + lam) * g, -(1 - chi) * g + (q / (2 * s) - lam) * f])

    return rhs


def frobenius_start(p: DiracParams, epsilon: float, q: ArrayLike) -> np.ndarray:
    """Regular solution near the origin to second order, normalized to ``f ~ q^(γ-1)``."""
    qa = np.asarray(q, dtype=float)
    s = spinor_ratio(p, epsilon)
    gam, lam, chi = p.gamma, p.lam, p.chi
    a0, b0 = 1.0, (gam + chi) / lam
    d = 2 * gam + 1
    a1 = ((s / 2) * b0 * (gam + 1 - chi) + lam * a0 / (2 * s)) / d
    b1 = ((gam + 1 + chi) * a0 / (2 * s) - lam * (s / 2) * b0) / d
    lead = qa ** (gam - 1)
    return np.array([lead * (a0 + a1 * qa), lead * (b0 + b1 * qa)])


def _solve(
    p: DiracParams, s: float, y0: np.ndarray, t0: float, t1: float, cfg: ShootingConfig, dense: bool = False
):
    sol = integrate.solve_ivp(
        _rhs(p, s), (t0, t1), y0, method="DOP853", rtol=cfg.rtol, atol=cfg.atol, dense_output=dense
    )
    if not sol.success:
        raise IntegrationError(f"radial integration failed: {sol.message}")
    return sol


def _scale_atol(y0: np.ndarray, cfg: ShootingConfig) -> ShootingConfig:
    # atol is relative to the starting amplitude; start values can be far from O(1)
    scale = float(np.max(np.abs(y0)))
    return ShootingConfig(cfg.q_min, cfg.q_max, cfg.q_match, cfg.rtol, cfg.atol * scale)


def integrate_radial(
    p: DiracParams, epsilon: float, cfg: ShootingConfig | None = None, q_end: float | None = None
) -> Trajectory:
    """
    Outward integration from the regular start at ``q_min`` to ``q_end``
    (default ``q_max``).

    At an eigenvalue the trajectory decays, ``f'/f ≈ -1/2``; between
    eigenvalues it picks up the growing ``e^(q/2)`` branch.
    """
    cfg = cfg or ShootingConfig()
    q_end = cfg.q_max if q_end is None else q_end
    if not q_end > cfg.q_min:
        raise DomainError(f"q_end must exceed q_min={cfg.q_min}, got {q_end}")
    s = spinor_ratio(p, epsilon)
    y0 = frobenius_start(p, epsilon, cfg.q_min)
    sol = _solve(p, s, y0, math.log(cfg.q_min), math.log(q_end), _scale_atol(y0, cfg))
    q = np.exp(sol.t)
    f, g = sol.y
    dfdt = _rhs(p, s)(sol.t[-1], sol.y[:, -1])[0]
    return Trajectory(q, f, g, float(dfdt / (q[-1] * f[-1])))


def _outward(p: DiracParams, epsilon: float, cfg: ShootingConfig, dense: bool = False):
    y0 = frobenius_start(p, epsilon, cfg.q_min)
    s = spinor_ratio(p, epsilon)
    return _solve(p, s, y0, math.log(cfg.q_min), math.log(cfg.q_match), _scale_atol(y0, cfg), dense)


def _inward(p: DiracParams, epsilon: float, cfg: ShootingConfig, dense: bool = False):
    s = spinor_ratio(p, epsilon)
    y0 = np.array([1.0, -1.0 / s])
    return _solve(p, s, y0, math.log(cfg.q_max), math.log(cfg.q_match), cfg, dense)


def matching_function(p: DiracParams, epsilon: float, cfg: ShootingConfig | None = None) -> float:
    """
    Normalized Wronskian ``(f_o g_i - g_o f_i) / (|o| |i|)`` at ``q_match``.

    Vanishes exactly when the regular and decaying solutions coincide.
    """
    cfg = cfg or ShootingConfig()
    out = _outward(p, epsilon, cfg).y[:, -1]
    inn = _inward(p, epsilon, cfg).y[:, -1]
    return float((out[0] * inn[1] - out[1] * inn[0]) / (np.linalg.norm(out) * np.linalg.norm(inn)))


def shoot_eigenvalue(
    p: DiracParams, bracket: tuple[float, float], cfg: ShootingConfig | None = None
) -> float:
    """Root of :func:`matching_function` inside ``bracket``; no sign change raises :class:`BracketError`."""
    cfg = cfg or ShootingConfig()
    lo, hi = bracket
    if not 0 < lo < hi < p.m:
        raise BracketError(f"bracket must satisfy 0 < lo < hi < m, got ({lo}, {hi})")
    d_lo, d_hi = matching_function(p, lo, cfg), matching_function(p, hi, cfg)
    if d_lo * d_hi > 0:
        raise BracketError(f"matching function has the same sign at {lo:.15g} and {hi:.15g}")
    root = brentq(lambda e: matching_function(p, e, cfg), lo, hi, xtol=p.m * 1e-15, rtol=1e-14)
    log.debug(f"shooting root lam={p.lam:g} chi={p.chi:g}: epsilon={root:.15g}")
    return float(root)


def bracket_for(p: DiracParams, n: int) -> tuple[float, float]:
    """Midpoints to the neighbouring closed-form levels."""
    eps = spectrum(p, n)
    above = spectrum(p, n + 1)
    hi = 0.5 * (eps + above)
    if n > 0 and state_exists(p, n - 1):
        lo = 0.5 * (spectrum(p, n - 1) + eps)
    else:
        lo = eps - (above - eps)
    return max(lo, 0.5 * eps), hi


def solve_state(p: DiracParams, n: int, cfg: ShootingConfig | None = None) -> float:
    """Shooting eigenvalue of the ``n``-th state, bracketed around the closed-form level."""
    if not state_exists(p, n):
        raise DomainError(f"no n={n} bound state for chi={p.chi:g}")
    return shoot_eigenvalue(p, bracket_for(p, n), cfg)


def eigenfunction(
    p: DiracParams, epsilon: float, q: ArrayLike, cfg: ShootingConfig | None = None
) -> np.ndarray:
    """
    ``[f(q), g(q)]`` at ``epsilon``, glued at ``q_match`` and normalized so
    ``∫ q² (f² + g²) dq = 1`` with ``f > 0`` near the origin.

    Points below ``q_min`` use the Frobenius start; points above ``q_max``
    raise :class:`DomainError`.
    """
    cfg = cfg or ShootingConfig()
    qa = np.asarray(q, dtype=float)
    if np.any(qa <= 0) or np.any(qa > cfg.q_max):
        raise DomainError(f"eigenfunction grid must lie in (0, {cfg.q_max}]")
    out = _outward(p, epsilon, cfg, dense=True)
    inn = _inward(p, epsilon, cfg, dense=True)
    y_o, y_i = out.y[:, -1], inn.y[:, -1]
    k = 0 if abs(y_i[0]) >= abs(y_i[1]) else 1
    ratio = y_o[k] / y_i[k]

    def values(x: np.ndarray) -> np.ndarray:
        x = np.atleast_1d(x)
        res = np.empty((2, x.size))
        low = x < cfg.q_min
        mid = (x >= cfg.q_min) & (x <= cfg.q_match)
        high = x > cfg.q_match
        if low.any():
            res[:, low] = frobenius_start(p, epsilon, x[low])
        if mid.any():
            res[:, mid] = out.sol(np.log(x[mid]))
        if high.any():
            res[:, high] = ratio * inn.sol(np.log(x[high]))
        return res

    def density(t: float) -> float:
        x = math.exp(t)
        f, g = values(np.array([x]))[:, 0]
        return x**3 * (f * f + g * g)

    quad_opts = {"epsabs": 0.0, "epsrel": 1e-12, "limit": 200}
    t_min, t_match, t_max = math.log(cfg.q_min), math.log(cfg.q_match), math.log(cfg.q_max)
    body = integrate.quad(density, t_min, t_match, **quad_opts)[0]
    body += integrate.quad(density, t_match, t_max, **quad_opts)[0]
    b0 = (p.gamma + p.chi) / p.lam
    head = cfg.q_min ** (2 * p.gamma + 1) * (1 + b0 * b0) / (2 * p.gamma + 1)
    norm = math.sqrt(body + head)
    result = values(qa.ravel()) / norm
    return result.reshape((2,) + qa.shape)


def count_nodes(values: ArrayLike, floor: float = 1e-10) -> int:
    """Sign changes of a sampled real function, ignoring entries below ``floor * max|values|``."""
    v = np.real(np.asarray(values)).ravel()
    if v.size == 0:
        return 0
    big = v[np.abs(v) > floor * np.max(np.abs(v))]
    return int(np.count_nonzero(np.signbit(big[1:]) != np.signbit(big[:-1])))


def _relative(parts: list[np.ndarray]) -> np.ndarray:
    total = parts[0] + parts[1] - parts[2]
    scale = np.abs(parts[0]) + np.abs(parts[1]) + np.abs(parts[2])
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.abs(total) / scale


def residual(
    p: DiracParams,
    n: int,
    f: RadialFunction | ArrayLike,
    g: RadialFunction | ArrayLike,
    q: ArrayLike | None = None,
) -> float:
    """
    Largest pointwise relative residual of the radial equations at ``ε_n``.

    Atom-sum inputs are differentiated exactly and checked on ``q`` (default
    a log grid on ``[1e-3, 40]``); sampled inputs need ``q`` and are
    differentiated with a quintic spline in ``ln q``, dropping three points
    at each end. All-zero input gives ``nan``.
    """
    eps = spectrum(p, n)
    s = spinor_ratio(p, eps)
    chi, lam = p.chi, p.lam
    if isinstance(f, RadialFunction) and isinstance(g, RadialFunction):
        qa = np.geomspace(1e-3, 40.0, 400) if q is None else np.asarray(q, dtype=float)
        fv, gv = np.real(f.evaluate(qa)), np.real(g.evaluate(qa))
        qf, qg = np.real(f.qddq().evaluate(qa)), np.real(g.qddq().evaluate(qa))
    else:
        if q is None:
            raise DomainError("sampled residuals need the q grid")
        qa = np.asarray(q, dtype=float)
        fv, gv = np.real(np.asarray(f, dtype=complex)), np.real(np.asarray(g, dtype=complex))
        if qa.size < 12:
            raise DomainError("sampled residuals need at least 12 points")
        t = np.log(qa)
        qf = make_interp_spline(t, fv, k=5).derivative()(t)
        qg = make_interp_spline(t, gv, k=5).derivative()(t)
        sl = slice(3, -3)
        qa, fv, gv, qf, qg = qa[sl], fv[sl], gv[sl], qf[sl], qg[sl]
    if not (np.any(fv) or np.any(gv)):
        return float("nan")
    first = _relative([qf, (1 + chi) * fv, (s * qa / 2 + lam) * gv])
    second = _relative([qg, (1 - chi) * gv, (qa / (2 * s) - lam) * fv])
    return float(np.nanmax(np.concatenate([first, second])))
