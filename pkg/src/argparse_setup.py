"""
argparse_setup.py - CLI Argument Parsing and Validation

Defines the four subcommands (``spectrum``, ``wavefunction``, ``verify``,
``transform-demo``) and their flags. Value flags default to None so a
``--config`` file can fill them; :data:`DEFAULTS` is applied after the merge.
:func:`validate_args` checks flag combinations and exits with status 2.
"""

from __future__ import annotations

import argparse
import sys
from typing import Any

from .__version__ import __version__
from .utils import parse_n_range

COMMANDS = ("spectrum", "wavefunction", "verify", "transform-demo")

# Applied to attributes still None after the config merge.
DEFAULTS: dict[str, dict[str, Any]] = {
    "spectrum": {"n_range": "0..3", "format": "csv"},
    "wavefunction": {"n_range": "0", "q_min": 1e-3, "q_max": 40.0, "points": 400, "format": "csv"},
    "verify": {"threads": 1},
    "transform-demo": {
        "gamma": 0.6,
        "alpha": 1.0,
        "coeff": 1.0,
        "pole_re": 0.0,
        "pole_im": 1.0,
        "q_min": 0.1,
        "q_max": 5.0,
        "points": 20,
        "mesh": 8,
        "threads": 1,
        "format": "csv",
    },
}


def _add_common(sub: argparse.ArgumentParser, formats: bool = True) -> None:
    sub.add_argument("--config", type=str, default=None, help="INI run file; command-line flags win")
    sub.add_argument("--out", type=str, default=None, help="Output file (default: stdout)")
    sub.add_argument("--show-config", action="store_true", help="Print the --config file values and exit")
    if formats:
        sub.add_argument("--format", choices=["csv", "json"], default=None, help="Table format")


def _add_physics(sub: argparse.ArgumentParser) -> None:
    group = sub.add_argument_group("physical parameters")
    group.add_argument("--lambda", dest="lam", type=float, default=None, help="Coupling lambda = N * alpha")
    group.add_argument("--N", dest="N", type=float, default=None, help="Nuclear charge (lambda = N / 137)")
    group.add_argument("--chi", type=float, default=None, help="Spin-orbit quantum number, chi = -+(j+1/2)")
    group.add_argument("--j", type=float, default=None, help="Total angular momentum (with --l)")
    group.add_argument("--l", type=int, default=None, help="Orbital angular momentum (with --j)")
    group.add_argument(
        "--fine-structure", dest="fine_structure", type=float, default=None, help="Fine-structure constant"
    )


def setup_argparse(argv: list[str] | None = None) -> argparse.Namespace:
    """
    Define, parse, and return all CLI arguments.

    Displays help and exits with status 2 if no arguments are provided.

    Returns:
        argparse.Namespace: Parsed command-line arguments.
    """
    parser = argparse.ArgumentParser(
        prog="biwave",
        description="Bi-orthogonal wavelet transform and relativistic hydrogen toolkit.",
    )
    parser.add_argument("--version", action="version", version=f"biwave {__version__}")
    parser.add_argument("--log-file", type=str, default="Logs/biwave.log", help="Main log file")
    parser.add_argument("--verbose", action="store_true", help="Log at DEBUG level")

    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")

    # spectrum
    spectrum = subparsers.add_parser("spectrum", help="Table of energy levels eps_n")
    _add_physics(spectrum)
    spectrum.add_argument("--n", dest="n_range", type=str, default=None, help="Radial numbers: 0..3 or 0,2")
    _add_common(spectrum)

    # wavefunction
    wave = subparsers.add_parser("wavefunction", help="Normalized (q, f, g) profile of one eigenstate")
    _add_physics(wave)
    wave.add_argument("--n", dest="n_range", type=str, default=None, help="Radial quantum number")
    wave.add_argument("--q-min", dest="q_min", type=float, default=None, help="First grid point")
    wave.add_argument("--q-max", dest="q_max", type=float, default=None, help="Last grid point")
    wave.add_argument("--points", type=int, default=None, help="Log-spaced grid points (default 400)")
    wave.add_argument("--plot-data", dest="plot_data", type=str, default=None, help="Density columns file")
    _add_common(wave)

    # verify
    verify = subparsers.add_parser("verify", help="Run the property verification suite")
    verify.add_argument("--tolerance", type=float, default=None, help="Global tolerance override")
    verify.add_argument("--only", nargs="+", default=None, metavar="CHECK", help="Run only these checks")
    verify.add_argument("--skip-slow", dest="skip_slow", action="store_true", help="Skip checks marked slow")
    verify.add_argument("--list", dest="list_checks", action="store_true", help="List check names and exit")
    verify.add_argument("--threads", type=int, default=None, help="Worker threads (capped by BIWAVE_THREADS)")
    verify.add_argument("--no-progress", dest="no_progress", action="store_true", help="Hide progress bars")
    _add_physics(verify)
    _add_common(verify, formats=False)

    # transform-demo
    demo = subparsers.add_parser("transform-demo", help="Transform one atom, print F on a mesh, round trip")
    demo.add_argument("--gamma", type=float, default=None, help="Wavelet index gamma > 0 (default 0.6)")
    demo.add_argument("--alpha", type=float, default=None, help="Atom power: q^(alpha-1) (default 1)")
    demo.add_argument("--coeff", type=float, default=None, help="Atom coefficient; 0 gives the zero function")
    demo.add_argument("--pole-re", dest="pole_re", type=float, default=None, help="Re of the atom pole")
    demo.add_argument("--pole-im", dest="pole_im", type=float, default=None, help="Im of the atom pole (> 0)")
    demo.add_argument("--q-min", dest="q_min", type=float, default=None, help="Round-trip grid start")
    demo.add_argument("--q-max", dest="q_max", type=float, default=None, help="Round-trip grid end")
    demo.add_argument("--points", type=int, default=None, help="Round-trip grid points (default 20)")
    demo.add_argument("--mesh", type=int, default=None, help="Mesh points per half-plane axis (default 8)")
    demo.add_argument("--threads", type=int, default=None, help="Worker threads (capped by BIWAVE_THREADS)")
    _add_common(demo)

    if argv is None and len(sys.argv) == 1:
        parser.print_help()
        sys.exit(2)

    return parser.parse_args(argv)


def apply_defaults(args: argparse.Namespace) -> argparse.Namespace:
    """Fill attributes still None with the per-command defaults."""
    for dest, value in DEFAULTS.get(args.command, {}).items():
        if getattr(args, dest, None) is None:
            setattr(args, dest, value)
    return args


def physics_given(args: argparse.Namespace) -> bool:
    """True when any of the physical-parameter flags was set."""
    return any(getattr(args, k, None) is not None for k in ("lam", "N", "chi", "j", "l"))


def _physics_problems(args: argparse.Namespace) -> list[str]:
    problems = []
    if args.lam is not None and args.N is not None:
        problems.append("give either --lambda or --N, not both")
    if args.lam is None and args.N is None:
        problems.append("one of --lambda or --N is required")
    has_jl = args.j is not None or args.l is not None
    if has_jl and (args.j is None or args.l is None):
        problems.append("--j and --l must be given together")
    if has_jl and args.chi is not None:
        problems.append("give either --chi or --j/--l, not both")
    if not has_jl and args.chi is None:
        problems.append("one of --chi or --j/--l is required")
    return problems


def validate_args(args: argparse.Namespace, logger) -> None:
    """
    Validate merged CLI arguments for mutual exclusivity and ranges.

    Every problem is logged before exiting with status 2.

    Parameters:
        args (argparse.Namespace): Parsed CLI arguments, config merged and defaults applied.
        logger: Logger instance for error reporting.
    """
    problems: list[str] = []

    if args.command in ("spectrum", "wavefunction"):
        problems += _physics_problems(args)
        if args.fine_structure is not None and args.N is None:
            logger.warning("--fine-structure only applies together with --N; ignored")
        try:
            ns = parse_n_range(args.n_range)
            if args.command == "wavefunction" and len(ns) != 1:
                problems.append(f"wavefunction needs exactly one --n, got {args.n_range!r}")
        except ValueError as e:
            problems.append(f"invalid --n: {e}")

    if args.command in ("wavefunction", "transform-demo"):
        if not 0 < args.q_min < args.q_max:
            problems.append(f"need 0 < --q-min < --q-max, got {args.q_min} and {args.q_max}")
        if args.points < 2:
            problems.append(f"--points must be >= 2, got {args.points}")

    if args.command == "transform-demo":
        if not args.gamma > 0:
            problems.append(f"--gamma must be > 0, got {args.gamma}")
        if args.alpha < 0:
            problems.append(f"--alpha must be >= 0, got {args.alpha}")
        if not args.pole_im > 0:
            problems.append(f"--pole-im must be > 0, got {args.pole_im}")
        if args.mesh < 2:
            problems.append(f"--mesh must be >= 2, got {args.mesh}")

    if args.command == "verify" and physics_given(args):
        problems += _physics_problems(args)

    if args.command == "verify" and args.tolerance is not None and not args.tolerance > 0:
        problems.append(f"--tolerance must be > 0, got {args.tolerance}")

    threads = getattr(args, "threads", None)
    if threads is not None and threads < 1:
        problems.append(f"--threads must be >= 1, got {threads}")

    if problems:
        for problem in problems:
            logger.error(problem)
        sys.exit(2)
