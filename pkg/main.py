"""
main.py - biwave CLI Entry Point and Orchestrator

Central entry point that routes one subcommand per run:
  1. Parse CLI arguments, merge an optional ``--config`` file, apply defaults
  2. Validate the merged arguments (exit 2 on any problem)
  3. Run ``spectrum``, ``wavefunction``, ``verify`` or ``transform-demo``
  4. Write the data file (stdout by default) plus a ``.meta.json`` sidecar

Exit codes: 0 success, 1 verification failure or unmet accuracy,
2 usage or validation error.
"""

from __future__ import annotations

import logging
import sys
from collections.abc import Callable

import numpy as np
from colorama import init
from scipy.integrate import simpson

from src import dirac, dirac_oracle
from src.__version__ import __version__
from src.argparse_setup import apply_defaults, physics_given, setup_argparse, validate_args
from src.config import extract_config_values, merge_with_args
from src.core import Atom, RadialFunction, WaveletParams, validate_params
from src.errors import AccuracyError, BiwaveError, DomainError
from src.logger import AppLogger, event, new_run_id
from src.manifest import RunManifest
from src.reconstruct import reconstruct_admissible, reconstruct_atoms, reconstruct_grid
from src.transform import HalfPlaneGrid, transform
from src.utils import format_float, parse_n_range, render_csv, render_json, thread_cap, write_output
from src.verify import build_checks, print_verify_report, render_report, run_verification

# Half-plane window printed by transform-demo.
DEMO_WINDOW = {"a_min": 0.1, "a_max": 10.0, "b_max": 5.0}


def build_params(args) -> dirac.DiracParams:
    """DiracParams from ``--lambda``/``--N`` and ``--chi`` or ``--j``/``--l``."""
    fine = args.fine_structure or dirac.FINE_STRUCTURE
    if args.j is not None:
        return dirac.DiracParams.from_j(args.j, args.l, lam=args.lam, N=args.N, fine_structure=fine)
    if args.N is not None:
        return dirac.DiracParams.from_charge(args.N, args.chi, fine_structure=fine)
    return dirac.DiracParams(args.lam, args.chi)


def _params_comment(p: dirac.DiracParams) -> str:
    return f"lambda={format_float(p.lam)} chi={format_float(p.chi)} gamma={format_float(p.gamma)}"


def _render(args, columns: list[str], rows: list[list], comments: list[str]) -> str:
    if args.format == "json":
        return render_json(columns, rows, {"comments": comments})
    return render_csv(columns, rows, comments)


def _emit(logger: logging.Logger, manifest: RunManifest, text: str, out: str | None) -> None:
    path = write_output(text, out)
    if path is not None:
        sidecar = manifest.save(path)
        event(logger, "run.output_written", f"Wrote {path}", path=str(path), sidecar=str(sidecar))


# ─── Commands ───────────────────────────────────────────────────────────────


def run_spectrum(logger: logging.Logger, args, manifest: RunManifest) -> int:
    p = build_params(args)
    with_ev = args.N is not None
    columns = ["n", "epsilon_over_m", "binding_over_m", "eta", "eta_tilde"]
    if with_ev:
        columns.append("binding_ev")
    rows = []
    for n in parse_n_range(args.n_range):
        if not dirac.state_exists(p, n):
            logger.warning(f"no bound state n={n} for chi={p.chi:g}; row skipped")
            continue
        state = dirac.bound_state(p, n)
        row = [n, state.epsilon / p.m, dirac.binding(p, n) / p.m, state.eta, state.eta_tilde]
        if with_ev:
            row.append(dirac.binding_energy_ev(p, n))
        rows.append(row)

    comments = [_params_comment(p), "energies in units of m"]
    if with_ev:
        comments.append(f"binding_ev uses m = {format_float(dirac.M_ELECTRON_EV)} eV")
    manifest.record("rows", len(rows))
    _emit(logger, manifest, _render(args, columns, rows, comments), args.out)
    return 0


def run_wavefunction(logger: logging.Logger, args, manifest: RunManifest) -> int:
    p = build_params(args)
    n = parse_n_range(args.n_range)[0]
    q = np.geomspace(args.q_min, args.q_max, args.points)
    f, g = np.real(dirac.eigenfunction_config(p, n, q))
    density = q**2 * (f**2 + g**2)
    grid_integral = float(simpson(density, x=q))
    nodes = dirac_oracle.count_nodes(f)
    logger.info(f"n={n}: grid integral {grid_integral:.8f}, {nodes} node(s) in f")

    comments = [
        _params_comment(p),
        f"n={n} epsilon_over_m={format_float(dirac.spectrum(p, n) / p.m)}",
        "normalization: integral of q^2 (f^2 + g^2) over (0, inf) is 1; f > 0 near q = 0",
        f"grid_integral={format_float(grid_integral)} nodes_f={nodes}",
    ]
    manifest.record("grid_integral", grid_integral)
    manifest.record("nodes_f", nodes)
    rows = [list(r) for r in zip(q.tolist(), f.tolist(), g.tolist())]
    _emit(logger, manifest, _render(args, ["q", "f", "g"], rows, comments), args.out)

    if args.plot_data:
        plot_rows = [list(r) for r in zip(q.tolist(), (f**2).tolist(), (g**2).tolist(), density.tolist())]
        text = render_csv(["q", "f_squared", "g_squared", "radial_density"], plot_rows, comments)
        _emit(logger, manifest, text, args.plot_data)
    return 0


def run_verify(logger: logging.Logger, args, manifest: RunManifest) -> int:
    if args.list_checks:
        for check in build_checks():
            tag = "slow" if check.slow else ""
            print(f"{check.name:<26} {tag:<5} {check.tolerance:>7.0e}  {check.description}")
        return 0

    params = build_params(args) if physics_given(args) else None
    if params is not None:
        logger.info(f"parameter-driven checks also sweep {_params_comment(params)}")
        manifest.record("parameters", _params_comment(params))
    threads = thread_cap(logger, args.threads)
    progress = not args.no_progress and sys.stderr.isatty()
    try:
        report = run_verification(
            logger,
            only=args.only,
            tolerance=args.tolerance,
            tolerances=getattr(args, "tolerances", None),
            include_slow=not args.skip_slow,
            threads=threads,
            progress=progress,
            params=params,
        )
    except ValueError as e:
        logger.error(str(e))
        return 2

    all_ok = print_verify_report(report)
    failed = [c["check"] for c in report["checks"] if c["status"] != "PASS"]
    manifest.record("total", report["total"])
    manifest.record("failed_checks", failed)
    if args.out:
        _emit(logger, manifest, render_report(report), args.out)

    if all_ok:
        event(logger, "run.verify_complete", f"All {report['total']} checks passed", total=report["total"])
        return 0
    event(logger, "run.verify_failed", f"{len(failed)} check(s) failed", failed=failed)
    return 1


def run_transform_demo(logger: logging.Logger, args, manifest: RunManifest) -> int:
    gamma = args.gamma
    regime = validate_params(WaveletParams(gamma)).kind
    atom = Atom(args.coeff, args.alpha, complex(args.pole_re, args.pole_im))
    f = RadialFunction((atom,))
    F = transform(f, gamma)

    grid = HalfPlaneGrid(n_a=args.mesh, n_b=args.mesh, **DEMO_WINDOW)
    a_nodes, b_nodes = grid.mesh()
    zbar = b_nodes[None, :] - 1j * a_nodes[:, None]
    values = np.asarray(F.evaluate(zbar), dtype=complex)
    rows = []
    for i, a in enumerate(a_nodes):
        for j, b in enumerate(b_nodes):
            v = values[i, j]
            rows.append([float(a), float(b), float(v.real), float(v.imag)])

    q = np.geomspace(args.q_min, args.q_max, args.points)
    exact = np.asarray(f.evaluate(q), dtype=complex)
    scale = float(np.max(np.abs(exact))) or 1.0
    symbolic = np.asarray(reconstruct_atoms(F).evaluate(q), dtype=complex)
    symbolic_error = float(np.max(np.abs(symbolic - exact))) / scale
    threads = thread_cap(logger, args.threads)
    numeric = reconstruct_grid(F, gamma, q, threads=threads).values
    numeric_error = float(np.max(np.abs(numeric - exact))) / scale

    comments = [
        f"gamma={format_float(gamma)} regime={regime}",
        f"atom coeff={format_float(args.coeff)} alpha={format_float(args.alpha)} "
        f"pole={format_float(args.pole_re)}+{format_float(args.pole_im)}i",
        f"round_trip_symbolic_error={format_float(symbolic_error)}",
        f"round_trip_numeric_error={format_float(numeric_error)}",
    ]
    manifest.record("round_trip_numeric_error", numeric_error)
    if gamma > 1:
        admissible = reconstruct_admissible(F, gamma, q, threads=threads).values
        cross = float(np.max(np.abs(numeric - admissible))) / scale
        comments.append(f"admissible_cross_path_difference={format_float(cross)}")
        manifest.record("admissible_cross_path_difference", cross)
    logger.info(f"transform-demo gamma={gamma:g}: numeric round-trip error {numeric_error:.3e}")

    _emit(logger, manifest, _render(args, ["a", "b", "re_F", "im_F"], rows, comments), args.out)
    return 0


COMMANDS: dict[str, Callable[[logging.Logger, object, RunManifest], int]] = {
    "spectrum": run_spectrum,
    "wavefunction": run_wavefunction,
    "verify": run_verify,
    "transform-demo": run_transform_demo,
}


# ─── Entry Point ────────────────────────────────────────────────────────────


def main(argv: list[str] | None = None) -> None:
    """CLI entry point: parses arguments, routes to the subcommand, exits with its status."""
    init(autoreset=True)
    args = setup_argparse(argv)
    logger = AppLogger(args.log_file, logging.DEBUG if args.verbose else logging.INFO).logger
    new_run_id()

    if args.command is None:
        logger.error("no command given; choose one of: " + ", ".join(COMMANDS))
        sys.exit(2)

    event(logger, "run.start", f"biwave {__version__} {args.command}", command=args.command)

    if args.config:
        if args.show_config:
            extract_config_values(logger, args.config, show=True)
            sys.exit(0)
        values = extract_config_values(logger, args.config)
        merge_with_args(args, values or {})
        event(logger, "run.config_loaded", f"Merged {args.config}", path=args.config)
    elif args.show_config:
        logger.error("--show-config needs --config")
        sys.exit(2)

    apply_defaults(args)
    validate_args(args, logger)
    manifest = RunManifest(args.command, vars(args))

    try:
        code = COMMANDS[args.command](logger, args, manifest)
    except DomainError as e:
        logger.error(f"{type(e).__name__}: {e}")
        code = 2
    except AccuracyError as e:
        logger.error(f"accuracy target missed: {e} (error estimate {e.error})")
        code = 1
    except BiwaveError as e:
        logger.error(f"{type(e).__name__}: {e}")
        code = 1
    sys.exit(code)


if __name__ == "__main__":
    main()
