"""Single source of truth for the biwave version.

The version string is read by :mod:`src.argparse_setup` for ``--version``,
by :mod:`src.manifest` for run sidecars, and by ``pyproject.toml`` (via
hatchling) when building distribution artifacts.
"""

__version__ = "0.1.0"
