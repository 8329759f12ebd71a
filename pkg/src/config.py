"""
config.py - Configuration Loading, Validation, and Display

Loads optional INI-format run files via ``configparser``, resolves
``${ENV_VAR}`` placeholders from the environment, validates every key with
clear error messages, and extracts the settings into a normalized dictionary
whose keys match the command-line destinations.

Sections:
    [META]        schema_version (mismatch only warns)
    [biwave]      physical parameters, grid and output settings
    [tolerances]  per-check tolerance overrides for ``verify``
"""

from __future__ import annotations

import configparser
import logging
import os
import re
import sys
from typing import Any

# ─── Schema Version ─────────────────────────────────────────────────────────
CURRENT_SCHEMA_VERSION = "1"

FLOAT_KEYS = ("lambda", "N", "chi", "gamma", "q_min", "q_max", "tolerance", "fine_structure")
INT_KEYS = ("points", "threads")
TEXT_KEYS = ("n", "out", "format")
FORMATS = ("csv", "json")

# configparser lower-cases option names; map back to destinations
_DEST = {"lambda": "lam", "n_charge": "N", "n": "n_range"}


# ─── Environment Variable Resolution ────────────────────────────────────────


def resolve_env_vars(value: str) -> str:
    """
    Replace ``${ENV_VAR}`` placeholders in a string with environment variable values.

    Raises:
        ValueError: If a referenced environment variable is not set.
    """

    def _replace(match: re.Match[str]) -> str:
        var_name = match.group(1)
        env_value = os.environ.get(var_name)
        if env_value is None:
            raise ValueError(
                f"Environment variable '{var_name}' is not set (referenced as '${{{var_name}}}' in config)"
            )
        return env_value

    return re.sub(r"\$\{([^}]+)\}", _replace, value)


def _check_schema_version(config: configparser.ConfigParser, logger: logging.Logger) -> None:
    file_version = normalize_none(config.get("META", "schema_version", fallback=None))
    if file_version is None:
        logger.warning(
            f"Config file has no [META] schema_version. "
            f"Add [META] schema_version = {CURRENT_SCHEMA_VERSION} to suppress this warning."
        )
    elif file_version != CURRENT_SCHEMA_VERSION:
        logger.warning(
            f"Config schema version mismatch: file has v{file_version}, expected v{CURRENT_SCHEMA_VERSION}."
        )


def _resolve_all_env_vars(config: configparser.ConfigParser, logger: logging.Logger) -> list[str]:
    """
    Resolve ``${ENV_VAR}`` placeholders in-place in every section.

    Returns the list of resolution errors instead of stopping at the first.
    """
    errors = []
    for section in ["DEFAULT", *config.sections()]:
        for key in config[section]:
            raw_value = config.get(section, key, raw=True)
            if "${" in raw_value:
                try:
                    config.set(section, key, resolve_env_vars(raw_value))
                    logger.debug(f"Resolved env var in [{section}].{key}")
                except ValueError as e:
                    errors.append(f"Config error: [{section}].{key}: {e}")
    return errors


# ─── Value Normalization ────────────────────────────────────────────────────


def normalize_none(value: Any) -> str | None:
    """
    Normalize config values by converting sentinel strings to Python None.

    Returns:
        str or None: Stripped value, or None if empty/``None``.
    """
    if value is None:
        return None
    stripped = str(value).strip()
    if stripped.lower() == "none" or stripped == "":
        return None
    return stripped


def _option_name(key: str) -> str:
    # [biwave] N would collide with n after lower-casing; it is spelled n_charge in files
    return "n_charge" if key == "N" else key


# ─── Configuration Validation ───────────────────────────────────────────────


def validate_config(logger: logging.Logger, config: configparser.ConfigParser) -> None:
    """
    Check that every present key parses and lies in range.

    Collects all errors before exiting (status 2) so users can fix multiple
    issues in one pass.
    """
    errors: list[str] = []
    section = "biwave"

    for key in FLOAT_KEYS:
        raw = normalize_none(config.get(section, _option_name(key), fallback=None))
        if raw is None:
            continue
        try:
            value = float(raw)
        except ValueError:
            errors.append(f"Config error: '{_option_name(key)}' in [{section}] must be a number, got '{raw}'")
            continue
        if key in ("lambda", "N", "gamma", "q_min", "q_max", "tolerance", "fine_structure") and not value > 0:
            errors.append(f"Config error: '{_option_name(key)}' in [{section}] must be > 0, got {raw}")

    for key in INT_KEYS:
        raw = normalize_none(config.get(section, key, fallback=None))
        if raw is None:
            continue
        try:
            if int(raw) < 1:
                errors.append(f"Config error: '{key}' in [{section}] must be >= 1, got {raw}")
        except ValueError:
            errors.append(f"Config error: '{key}' in [{section}] must be an integer, got '{raw}'")

    fmt = normalize_none(config.get(section, "format", fallback=None))
    if fmt is not None and fmt not in FORMATS:
        errors.append(f"Config error: 'format' in [{section}] must be one of {FORMATS}, got '{fmt}'")

    has_lambda = normalize_none(config.get(section, "lambda", fallback=None)) is not None
    has_charge = normalize_none(config.get(section, "n_charge", fallback=None)) is not None
    if has_lambda and has_charge:
        errors.append(f"Config error: give either 'lambda' or 'n_charge' in [{section}], not both")

    if "tolerances" in config:
        for key, raw in config.items("tolerances"):
            if key in config.defaults():
                continue
            try:
                if not float(raw) > 0:
                    errors.append(f"Config error: tolerance '{key}' must be > 0, got {raw}")
            except ValueError:
                errors.append(f"Config error: tolerance '{key}' must be a number, got '{raw}'")

    if errors:
        _fail(logger, errors)


def _fail(logger: logging.Logger, errors: list[str]) -> None:
    for err in errors:
        logger.error(err)
    print("\nConfiguration errors found:", file=sys.stderr)
    for err in errors:
        print(f"  - {err}", file=sys.stderr)
    sys.exit(2)


# ─── Configuration Extraction ───────────────────────────────────────────────


def extract_config_values(logger: logging.Logger, config_file_path: str, show: bool = False) -> dict | None:
    """
    Load, validate, and extract all configuration values from an INI file.

    Parameters:
        logger: Logger instance.
        config_file_path (str): Path to the INI configuration file.
        show (bool): If True, print the configuration to stdout instead of returning it.

    Returns:
        dict or None: Keys are argparse destinations (``lam``, ``N``, ``chi``,
        ``n_range``, ...) plus ``tolerances`` (check name -> float). Absent
        keys are omitted so command-line defaults can fill them.
    """
    config = load_config(logger, config_file_path)
    _check_schema_version(config, logger)
    errors = _resolve_all_env_vars(config, logger)
    if errors:
        _fail(logger, errors)
    validate_config(logger, config)

    values: dict[str, Any] = {}
    section = "biwave"
    for key in FLOAT_KEYS + INT_KEYS + TEXT_KEYS:
        raw = normalize_none(config.get(section, _option_name(key), fallback=None))
        if raw is None:
            continue
        dest = _DEST.get(key, key)
        if key in FLOAT_KEYS:
            values[dest] = float(raw)
        elif key in INT_KEYS:
            values[dest] = int(raw)
        else:
            values[dest] = raw

    tolerances = {}
    if "tolerances" in config:
        for key, raw in config.items("tolerances"):
            if key not in config.defaults():
                tolerances[key] = float(raw)
    values["tolerances"] = tolerances

    if show:
        print("Current Configuration:\n")
        print("biwave:")
        for key in FLOAT_KEYS + INT_KEYS + TEXT_KEYS:
            dest = _DEST.get(key, key)
            print(f"  {key:<15}: {values.get(dest, 'Not Set')}")
        print("\ntolerances:")
        if tolerances:
            for name, tol in tolerances.items():
                print(f"  {name:<25}: {tol:g}")
        else:
            print("  (defaults)")
        return None
    return values


def merge_with_args(args: Any, values: dict[str, Any]) -> Any:
    """
    Fill argparse attributes left at ``None`` from config values.

    Command-line flags win over file values.
    """
    for dest, value in values.items():
        if dest == "tolerances":
            merged = dict(value)
            merged.update(getattr(args, "tolerances", None) or {})
            args.tolerances = merged
        elif getattr(args, dest, None) is None:
            setattr(args, dest, value)
    return args


def load_config(logger: logging.Logger, config_path: str) -> configparser.ConfigParser:
    """
    Load and parse an INI configuration file.

    Exits with status 2 if the file is missing, empty, or malformed.
    """
    config = configparser.ConfigParser()

    try:
        read = config.read(config_path)
        if not read:
            raise configparser.Error(f"Config file '{config_path}' does not exist or cannot be read.")
        if not config.sections():
            raise configparser.Error(f"Config file '{config_path}' is empty or not correctly formatted.")

        logger.info(f"Configuration loaded successfully from {config_path}")
        return config

    except configparser.Error as e:
        logger.error(f"ConfigParser error while reading file '{config_path}': {e}")
        sys.exit(2)
