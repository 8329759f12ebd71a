"""
verify.py - Property Verification Suite

Runs the numerical invariants of the package as named checks and reports a
machine-readable pass/fail per check. Each check measures one deviation
(relative error, residual, exponent mismatch) and compares it with its
tolerance; ``[tolerances]`` in the run file or ``--tolerance`` override the
defaults.

Check groups:
  - spectrum and quantization (closed form vs root finding, Bohr limit)
  - matrix algebra and the transformed ``zbar`` system
  - transform round trips and operator maps (symbolic and quadrature)
  - analyticity on a mesh and the pairing normalization
  - isometries and the inner-product constant
  - agreement with the shooting oracle

A failing check never stops the suite. Exceptions raised inside a check are
reported as ``ERROR`` with their message; an :class:`AccuracyError` keeps
its best estimate in the report.
"""

from __future__ import annotations

import json
import math
from collections.abc import Callable
from dataclasses import dataclass
from typing import Any

import numpy as np
from colorama import Fore, Style
from scipy.integrate import simpson
from tqdm import tqdm

from . import dirac, dirac_oracle
from .core import Atom, RadialFunction, Samples
from .errors import AccuracyError, BiwaveError
from .norms import inner_product_constant_check, isometry_check
from .reconstruct import (
    derivative_transport_check,
    pairing,
    reconstruct_admissible,
    reconstruct_atoms,
    reconstruct_grid,
)
from .transform import (
    HalfPlaneGrid,
    apply_operator_map_q,
    apply_operator_map_qddq,
    cauchy_riemann_defect,
    decay_check,
    forward_quadrature,
    transform,
)
from .utils import format_float

PASS, FAIL, ERROR = "PASS", "FAIL", "ERROR"

# Points of the lower half-plane used by pointwise comparisons.
ZBAR_POINTS = (0.3 - 0.7j, -1.2 - 0.4j, 2.5 - 1.5j, 0.05 - 3.0j, -0.8 - 0.05j)

# user parameter sets appended to the built-in sweeps
Extra = tuple[dirac.DiracParams, ...]


@dataclass(frozen=True)
class Measurement:
    """Outcome of one check before the tolerance is applied."""

    value: float
    expected: float
    deviation: float
    detail: str = ""


@dataclass(frozen=True)
class CheckResult:
    check: str
    status: str
    value: float | None
    expected: float | None
    deviation: float | None
    tolerance: float
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def as_dict(self) -> dict[str, Any]:
        return {
            "check": self.check,
            "status": self.status,
            "value": self.value,
            "expected": self.expected,
            "deviation": self.deviation,
            "tolerance": self.tolerance,
            "detail": self.detail,
        }


@dataclass(frozen=True)
class Check:
    name: str
    run: Callable[[], Measurement]
    tolerance: float
    slow: bool = False
    description: str = ""


def _rel(value: float, expected: float) -> float:
    return abs(value - expected) / abs(expected) if expected != 0 else abs(value)


def _max_rel(values: np.ndarray, expected: np.ndarray) -> float:
    scale = np.maximum(np.abs(expected), 1e-300)
    return float(np.max(np.abs(np.asarray(values) - np.asarray(expected)) / scale))


# ─── Spectrum ───────────────────────────────────────────────────────────────


def _spectrum_ground_state() -> Measurement:
    p = dirac.DiracParams.from_charge(1, -1)
    eps = dirac.spectrum(p, 0) / p.m
    expected = math.sqrt(1 - dirac.FINE_STRUCTURE**2)
    return Measurement(eps, expected, _rel(eps, expected))


def _cases(pairs: tuple[tuple[float, float], ...], extra: Extra) -> list[dirac.DiracParams]:
    return [dirac.DiracParams(lam, chi) for lam, chi in pairs] + list(extra)


def _quantize_agreement(extra: Extra = ()) -> Measurement:
    worst, where = 0.0, ""
    grid = tuple((lam, chi) for lam in (0.1, 0.3, 0.6, 0.9) for chi in (-2, -1, 1, 2))
    for p in _cases(grid, extra):
        for n in range(11):
            dev = _rel(dirac.quantize(p, n), dirac.spectrum(p, n))
            if dev > worst:
                worst, where = dev, f"lam={p.lam:g} chi={p.chi:g} n={n}"
    return Measurement(worst, 0.0, worst, where)


def _nonrelativistic_limit() -> Measurement:
    worst, where = 0.0, ""
    lam = 0.02
    for chi in (-2, -1, 1, 2):
        for n in range(4):
            p_big, p_small = dirac.DiracParams(lam, chi), dirac.DiracParams(lam / 2, chi)
            if not dirac.state_exists(p_big, n):
                continue
            r_big = dirac.binding(p_big, n) / dirac.nonrelativistic_binding(p_big, n)
            r_small = dirac.binding(p_small, n) / dirac.nonrelativistic_binding(p_small, n)
            extrapolated = (4 * r_small - r_big) / 3
            if abs(extrapolated - 1) > worst:
                worst, where = abs(extrapolated - 1), f"chi={chi} n={n}"
    return Measurement(1 + worst, 1.0, worst, where)


# ─── Matrix Algebra ─────────────────────────────────────────────────────────


def _projector_identities() -> Measurement:
    rng = np.random.default_rng(20240607)
    worst, where = 0.0, ""
    for _ in range(50):
        chi = float(rng.choice([-3, -2, -1, 1, 2, 3]))
        lam = float(rng.uniform(0.05, 0.95)) * abs(chi)
        n = int(rng.integers(1, 6))
        p = dirac.DiracParams(lam, chi)
        residuals = dirac.build_matrices(p, dirac.spectrum(p, n)).identity_residuals()
        name, dev = max(residuals.items(), key=lambda kv: kv[1])
        if dev > worst:
            worst, where = dev, f"{name} at lam={lam:.4g} chi={chi:g} n={n}"
    return Measurement(worst, 0.0, worst, where)


def _transformed_system(extra: Extra = ()) -> Measurement:
    worst, where = 0.0, ""
    for p in _cases(((0.6, -1), (0.3, 2)), extra):
        for n in range(5):
            if not dirac.state_exists(p, n):
                continue
            for zbar in ZBAR_POINTS:
                dev = dirac.transformed_system_residual(p, n, zbar)
                if dev > worst:
                    worst, where = dev, f"lam={p.lam:g} chi={p.chi:g} n={n} zbar={zbar}"
    return Measurement(worst, 0.0, worst, where)


def _coefficient_decay() -> Measurement:
    worst, where = 0.0, ""
    for lam, chi in ((0.6, -1), (0.6, -2)):
        p = dirac.DiracParams(lam, chi)
        for n in range(4):
            F, _ = dirac.eigen_coefficient(p, n)
            exponent = decay_check(F).exponent
            dev = math.inf if exponent is None else abs(exponent / (-2 * p.gamma) - 1)
            if dev > worst:
                worst, where = dev, f"lam={lam} chi={chi} n={n} exponent={exponent}"
    return Measurement(worst, 0.0, worst, where)


def _small_q_exponent() -> Measurement:
    worst, where = 0.0, ""
    q = np.geomspace(1e-4, 1e-2, 25)
    for lam, chi, n in ((0.6, -1, 0), (0.6, -2, 0), (0.6, -2, 1), (0.6, -2, 2)):
        p = dirac.DiracParams(lam, chi)
        f, _ = dirac.eigenfunction_radial(p, n)
        slope = float(np.polyfit(np.log(q), np.log(np.abs(f.evaluate(q))), 1)[0])
        dev = abs(slope / (p.gamma - 1) - 1)
        if dev > worst:
            worst, where = dev, f"lam={lam} chi={chi} n={n} slope={slope:.6g}"
    return Measurement(worst, 0.0, worst, where)


# ─── Transform Round Trips ──────────────────────────────────────────────────

_ATOM_FAMILY = (
    Atom(1.0, 1.0, 1j),
    Atom(0.5 - 0.25j, 2.5, 0.3 + 1.2j),
    Atom(-2.0, 0.0, 0.5j),
)


def _round_trip_symbolic() -> Measurement:
    worst = 0.0
    for gamma in (0.3, 0.6, 0.8, 2.0):
        for atom in _ATOM_FAMILY:
            back = reconstruct_atoms(transform(RadialFunction((atom,)), gamma)).atoms[0]
            dev = max(abs(back.coeff - atom.coeff) / abs(atom.coeff), abs(back.alpha - atom.alpha))
            worst = max(worst, dev)
    return Measurement(worst, 0.0, worst)


def _round_trip_numeric(threads: int, progress: bool) -> Measurement:
    worst, where = 0.0, ""
    q = np.geomspace(0.1, 5.0, 20)
    f = RadialFunction((Atom(1.0, 1.0, 1j),))
    exact = np.asarray(f.evaluate(q))
    for gamma in (0.3, 0.6, 0.8):
        result = reconstruct_grid(transform(f, gamma), gamma, q, threads=threads, progress=progress)
        dev = float(np.max(np.abs(result.values - exact)) / np.max(np.abs(exact)))
        if dev > worst:
            worst, where = dev, f"gamma={gamma}"
    return Measurement(worst, 0.0, worst, where)


def _operator_maps_symbolic() -> Measurement:
    worst = 0.0
    zb = np.array(ZBAR_POINTS)
    for gamma in (0.3, 0.8, 1.7):
        for atom in _ATOM_FAMILY:
            f = RadialFunction((atom,))
            F = transform(f, gamma)
            q_f = RadialFunction((Atom(atom.coeff, atom.alpha + 1, atom.pole),))
            pairs = (
                (transform(f.qddq(), gamma), apply_operator_map_qddq(F)),
                (transform(q_f, gamma), apply_operator_map_q(F)),
            )
            for lhs, rhs in pairs:
                worst = max(worst, _max_rel(lhs.evaluate(zb), rhs.evaluate(zb)))
    return Measurement(worst, 0.0, worst)


def _operator_maps_quadrature() -> Measurement:
    # e^{-q} and its images sampled densely; quadrature against the symbolic maps
    q = np.geomspace(1e-6, 60.0, 4000)
    F = transform(RadialFunction((Atom(1.0, 1.0, 1j),)), 0.6)
    mapped = {
        "qddq": (Samples(q, -q * np.exp(-q)), apply_operator_map_qddq(F)),
        "q": (Samples(q, q * np.exp(-q)), apply_operator_map_q(F)),
    }
    worst, where = 0.0, ""
    for kind, (samples, G) in mapped.items():
        for zbar in ZBAR_POINTS[:4]:
            value, _ = forward_quadrature(samples, 0.6, zbar, atol=1e-13, rtol=1e-11)
            dev = _rel(value, G.evaluate(zbar))
            if dev > worst:
                worst, where = dev, f"{kind} at zbar={zbar}"
    return Measurement(worst, 0.0, worst, where)


def _derivative_transport() -> Measurement:
    F = transform(RadialFunction(_ATOM_FAMILY), 0.6)
    report = derivative_transport_check(F, np.geomspace(0.05, 8.0, 12))
    return Measurement(report.max_discrepancy, 0.0, report.max_discrepancy)


def _admissible_cross_path(threads: int, progress: bool) -> Measurement:
    gamma = 2.0
    q = np.geomspace(0.2, 4.0, 5)
    F = transform(RadialFunction((Atom(1.0, 1.0, 1j),)), gamma)
    bi = reconstruct_grid(F, gamma, q, threads=threads, progress=progress).values
    adm = reconstruct_admissible(F, gamma, q, threads=threads, progress=progress).values
    dev = float(np.max(np.abs(bi - adm)) / np.max(np.abs(adm)))
    return Measurement(dev, 0.0, dev)


def _cauchy_riemann() -> Measurement:
    # single pole terms on interior mesh nodes; a relative defect needs F != 0
    a, b = HalfPlaneGrid(0.1, 10.0, 5.0, n_a=6, n_b=7).mesh()
    points = [complex(bb, -aa) for aa in a[1:-1] for bb in b[1:-1]]
    coefficients = {
        f"atom {k}, gamma={gamma}": transform(RadialFunction((atom,)), gamma)
        for k, atom in enumerate(_ATOM_FAMILY)
        for gamma in (0.6, 1.7)
    }
    coefficients["Phi_0, lam=0.6 chi=-2"] = dirac.eigen_coefficient(dirac.DiracParams(0.6, -2), 0)[0]
    worst, where = 0.0, ""
    for label, F in coefficients.items():
        for zbar in points:
            dev = cauchy_riemann_defect(F, zbar)
            if dev > worst:
                worst, where = dev, f"{label} at zbar={zbar}"
    return Measurement(worst, 0.0, worst, where)


def _pairing_normalization() -> Measurement:
    expected = 1 / (2 * math.pi)
    worst, worst_value, where = 0.0, expected, ""
    for gamma in (0.3, 0.6, 0.8, 1.5):
        value = pairing(gamma)
        dev = _rel(value, expected)
        if dev >= worst:
            worst, worst_value, where = dev, value, f"gamma={gamma}"
    return Measurement(worst_value, expected, worst, where)


# ─── Isometries ─────────────────────────────────────────────────────────────


def _isometry(form: str, gammas: tuple[float, ...]) -> Callable[[], Measurement]:
    def run() -> Measurement:
        f = RadialFunction((Atom(1.0, 1.0, 1j),))
        worst, worst_rhs, where = 0.0, 0.25, ""
        for gamma in gammas:
            report = isometry_check(f, gamma, form=form)
            dev = _rel(report.rhs, 0.25)
            if dev >= worst:
                worst, worst_rhs, where = dev, report.rhs, f"gamma={gamma} lhs={report.lhs:.15g}"
        return Measurement(worst_rhs, 0.25, worst, where)

    return run


def _inner_product_constant() -> Measurement:
    report = inner_product_constant_check(0.8)
    measured = float(abs(report.measured))
    return Measurement(measured, report.derived, _rel(measured, report.derived), f"matches={report.matches}")


# ─── Shooting Oracle ────────────────────────────────────────────────────────

_ORACLE_CASES = ((0.6, -1), (0.3, -1), (0.6, -2))


def _oracle_eigenvalues(progress: bool) -> Measurement:
    worst, where = 0.0, ""
    cases = [(lam, chi, n) for lam, chi in _ORACLE_CASES for n in (1, 2, 3)]
    for lam, chi, n in tqdm(cases, desc="shooting", disable=not progress):
        p = dirac.DiracParams(lam, chi)
        dev = _rel(dirac_oracle.solve_state(p, n), dirac.spectrum(p, n))
        if dev > worst:
            worst, where = dev, f"lam={lam} chi={chi} n={n}"
    return Measurement(worst, 0.0, worst, where)


def l2_difference(p: dirac.DiracParams, n: int, q: np.ndarray | None = None) -> float:
    """Relative ``L²(q² dq)`` distance between the oracle and closed-form eigenfunctions."""
    q = np.geomspace(1e-4, 70.0, 6000) if q is None else q
    closed = np.real(dirac.eigenfunction_config(p, n, q))
    oracle = dirac_oracle.eigenfunction(p, dirac_oracle.solve_state(p, n), q)
    diff = simpson(q**2 * np.sum((closed - oracle) ** 2, axis=0), x=q)
    norm = simpson(q**2 * np.sum(closed**2, axis=0), x=q)
    return float(math.sqrt(abs(diff) / norm))


def _oracle_eigenfunctions() -> Measurement:
    worst, where = 0.0, ""
    for lam, chi, n in ((0.6, -1, 0), (0.6, -1, 2), (0.6, -2, 1)):
        dev = l2_difference(dirac.DiracParams(lam, chi), n)
        if dev > worst:
            worst, where = dev, f"lam={lam} chi={chi} n={n}"
    return Measurement(worst, 0.0, worst, where)


def _oracle_residual(extra: Extra = ()) -> Measurement:
    worst, where = 0.0, ""
    q = np.geomspace(0.01, 30.0, 300)
    for p in _cases(((0.6, -1), (0.3, 1)), extra):
        for n in range(4):
            if not dirac.state_exists(p, n):
                continue
            f, g = dirac.eigenfunction_radial(p, n)
            dev = dirac_oracle.residual(p, n, f, g, q)
            if not dev <= worst:
                worst, where = dev, f"lam={p.lam:g} chi={p.chi:g} n={n}"
    return Measurement(worst, 0.0, worst, where)


def _node_count() -> Measurement:
    worst, where = 0, ""
    q = np.geomspace(1e-3, 60.0, 4000)
    p = dirac.DiracParams(0.6, -1)
    for n in range(4):
        f = dirac.eigenfunction_config(p, n, q)[0]
        nodes = dirac_oracle.count_nodes(f)
        if abs(nodes - n) > worst:
            worst, where = abs(nodes - n), f"n={n} nodes={nodes}"
    return Measurement(float(worst), 0.0, float(worst), where)


# ─── Registry ───────────────────────────────────────────────────────────────


def build_checks(
    threads: int = 1, progress: bool = False, params: dirac.DiracParams | None = None
) -> list[Check]:
    """
    All checks in run order with their default tolerances.

    ``params`` adds one user parameter set to the sweeps of the
    parameter-driven checks (quantization, transformed system, radial residual).
    """
    extra: Extra = () if params is None else (params,)
    return [
        Check("spectrum_ground_state", _spectrum_ground_state, 1e-12, description="hydrogen 1s"),
        Check(
            "quantize_agreement",
            lambda: _quantize_agreement(extra),
            1e-12,
            description="root finding vs closed form",
        ),
        Check("nonrelativistic_limit", _nonrelativistic_limit, 1e-5, description="Bohr term, extrapolated"),
        Check("projector_identities", _projector_identities, 1e-12, description="A', B', A, B algebra"),
        Check(
            "transformed_system",
            lambda: _transformed_system(extra),
            1e-8,
            description="zbar-system residual",
        ),
        Check("coefficient_decay", _coefficient_decay, 1e-2, description="|Phi| ~ |zbar|^(-2 gamma)"),
        Check("small_q_exponent", _small_q_exponent, 1e-2, description="f ~ q^(gamma-1)"),
        Check("round_trip_symbolic", _round_trip_symbolic, 1e-12, description="atoms -> poles -> atoms"),
        Check(
            "round_trip_numeric",
            lambda: _round_trip_numeric(threads, progress),
            1e-7,
            slow=True,
            description="grid reconstruction of e^-q",
        ),
        Check("operator_maps_symbolic", _operator_maps_symbolic, 1e-12, description="q d/dq and q maps"),
        Check("operator_maps_quadrature", _operator_maps_quadrature, 1e-8, description="maps vs quadrature"),
        Check("derivative_transport", _derivative_transport, 1e-10, description="zbar dF vs -(q d/dq+g+1)f"),
        Check(
            "admissible_cross_path",
            lambda: _admissible_cross_path(threads, progress),
            1e-6,
            slow=True,
            description="bi-orthogonal vs orthogonal inverse",
        ),
        Check("cauchy_riemann", _cauchy_riemann, 1e-6, description="dF/d(conj zbar) on mesh"),
        Check("pairing_normalization", _pairing_normalization, 1e-10, description="int q psi chi = 1/(2 pi)"),
        Check("isometry_derivative", _isometry("derivative", (0.3, 0.6)), 1e-4, description="e^-q norm"),
        Check("isometry_direct", _isometry("direct", (1.5, 2.0)), 1e-4, description="direct form, gamma > 1"),
        Check("inner_product_constant", _inner_product_constant, 1e-3, description="2 pi Gamma(2g)/2^(2g)"),
        Check(
            "oracle_eigenvalues",
            lambda: _oracle_eigenvalues(progress),
            1e-8,
            slow=True,
            description="shooting vs spectrum",
        ),
        Check(
            "oracle_eigenfunctions",
            _oracle_eigenfunctions,
            1e-6,
            slow=True,
            description="shooting vs closed form, L2",
        ),
        Check(
            "oracle_residual",
            lambda: _oracle_residual(extra),
            1e-8,
            description="closed form in the radial ODE",
        ),
        Check("node_count", _node_count, 0.5, description="n nodes in f"),
    ]


def check_names() -> list[str]:
    return [c.name for c in build_checks()]


def _run_one(logger, check: Check, tolerance: float) -> CheckResult:
    try:
        m = check.run()
    except AccuracyError as exc:
        scalar = exc.estimate is not None and np.ndim(exc.estimate) == 0
        value = float(abs(exc.estimate)) if scalar else None
        logger.warning(f"check {check.name}: {exc}")
        return CheckResult(check.name, FAIL, value, None, exc.error, tolerance, f"accuracy: {exc}")
    except BiwaveError as exc:
        logger.error(f"check {check.name} raised {type(exc).__name__}: {exc}")
        return CheckResult(check.name, ERROR, None, None, None, tolerance, f"{type(exc).__name__}: {exc}")
    except Exception as exc:
        # one broken check never stops the suite
        logger.exception(f"check {check.name} crashed")
        return CheckResult(check.name, ERROR, None, None, None, tolerance, f"{type(exc).__name__}: {exc}")
    ok = bool(m.deviation <= tolerance)
    status = PASS if ok else FAIL
    level = logger.info if ok else logger.warning
    level(f"check {check.name}: {status} (deviation {m.deviation:.3e}, tolerance {tolerance:.1e})")
    return CheckResult(check.name, status, m.value, m.expected, m.deviation, tolerance, m.detail)


def run_verification(
    logger,
    only: list[str] | None = None,
    tolerance: float | None = None,
    tolerances: dict[str, float] | None = None,
    include_slow: bool = True,
    threads: int = 1,
    progress: bool = False,
    params: dirac.DiracParams | None = None,
) -> dict[str, Any]:
    """
    Run the selected checks.

    Parameters:
    - logger: Logger instance.
    - only: check names to run (default all); unknown names raise ``ValueError``.
    - tolerance: global override applied to every check.
    - tolerances: per-check overrides (win over ``tolerance``).
    - include_slow: when False, skip checks marked slow.
    - threads: worker threads for grid reconstructions.
    - progress: show tqdm bars.
    - params: optional extra parameter set for the parameter-driven checks.

    Returns:
    - dict: ``passed``, ``total``, ``failed`` and ``checks`` (list of per-check dicts).
    """
    checks = build_checks(threads, progress, params=params)
    known = {c.name for c in checks}
    if only:
        unknown = sorted(set(only) - known)
        if unknown:
            raise ValueError(f"unknown check name(s): {', '.join(unknown)}")
        checks = [c for c in checks if c.name in only]
    if not include_slow:
        checks = [c for c in checks if not c.slow]

    overrides = tolerances or {}
    for name in sorted(set(overrides) - known):
        logger.warning(f"tolerance override for unknown check '{name}' ignored")
    results = []
    for check in tqdm(checks, desc="verify", disable=not progress):
        tol = overrides.get(check.name, tolerance if tolerance is not None else check.tolerance)
        results.append(_run_one(logger, check, tol))

    failed = [r for r in results if not r.passed]
    return {
        "passed": not failed,
        "total": len(results),
        "failed": len(failed),
        "checks": [r.as_dict() for r in results],
    }


def print_verify_report(results: dict[str, Any]) -> bool:
    """
    Print a coloured PASS/FAIL table to stdout.

    Returns:
        bool: True if every check passed.
    """
    colour = {PASS: Fore.GREEN, FAIL: Fore.RED, ERROR: Fore.YELLOW}
    print("\n=== Verification Report ===\n")
    print(f"{'check':<26} {'status':<7} {'deviation':>11} {'tolerance':>10}")
    for entry in results["checks"]:
        dev = entry["deviation"]
        dev_text = f"{dev:.3e}" if dev is not None else "-"
        status = entry["status"]
        print(
            f"{entry['check']:<26} {colour[status]}{status:<7}{Style.RESET_ALL} "
            f"{dev_text:>11} {entry['tolerance']:>10.1e}"
        )
        if status != PASS and entry["detail"]:
            print(f"    {entry['detail']}")

    if results["passed"]:
        print(f"\nResult: {Fore.GREEN}ALL {results['total']} CHECKS PASSED{Style.RESET_ALL}")
    else:
        print(f"\nResult: {Fore.RED}{results['failed']} OF {results['total']} CHECKS FAILED{Style.RESET_ALL}")
    print()
    return bool(results["passed"])


def _finite_or_text(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return format_float(value)
    return value


def render_report(results: dict[str, Any]) -> str:
    """JSON text of a :func:`run_verification` report; non-finite numbers become strings."""
    checks = [{k: _finite_or_text(v) for k, v in entry.items()} for entry in results["checks"]]
    return json.dumps({**results, "checks": checks}, indent=2, sort_keys=True) + "\n"
