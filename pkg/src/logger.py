"""
logger.py - Structured Application Logging

Provides the :class:`AppLogger` façade used by the command-line runs.
Three output streams:

  1. Rotating file handler, 20 MB x 10 files (human-readable or JSON).
  2. Console handler, always human-readable.
  3. Events file handler: run lifecycle events only, written as JSON lines
     to an ``events.log`` sidecar at INFO level.

Numerical modules log through child loggers (``biwave.transform``,
``biwave.oracle``, ...) and inherit these handlers. A correlation ID
(``run_id``) is attached to every record via :mod:`contextvars` so one
verification run can be followed across modules.

Environment toggles:
    BIWAVE_LOG_JSON=1    emit the main log file as JSON lines
"""

from __future__ import annotations

import json
import logging
import os
import socket
import uuid
from contextvars import ContextVar
from logging import handlers
from pathlib import Path
from typing import Any

LOGGER_NAME = "biwave"

_RUN_EVENTS = frozenset(
    {
        "run.start",
        "run.config_loaded",
        "run.output_written",
        "run.verify_complete",
        "run.verify_failed",
    }
)

# marks handlers AppLogger installed
_OWNER_TAG = "_biwave_owned"

_run_id_var: ContextVar[str] = ContextVar("run_id", default="-")


def new_run_id() -> str:
    """Generate and install a new correlation ID for the current context."""
    rid = uuid.uuid4().hex[:12]
    _run_id_var.set(rid)
    return rid


def current_run_id() -> str:
    return _run_id_var.get()


class _ContextFilter(logging.Filter):
    """Attach hostname and run_id to every record."""

    def __init__(self) -> None:
        super().__init__()
        self._hostname = socket.gethostname()

    def filter(self, record: logging.LogRecord) -> bool:
        record.hostname = self._hostname
        record.run_id = _run_id_var.get()
        return True


class _EventFilter(logging.Filter):
    def filter(self, record: logging.LogRecord) -> bool:
        return getattr(record, "run_event", None) in _RUN_EVENTS


class JsonFormatter(logging.Formatter):
    """Emit each record as a single-line JSON object, structured fields included."""

    _RESERVED = frozenset(vars(logging.LogRecord("", 0, "", 0, "", None, None))) | {
        "message",
        "asctime",
        "hostname",
        "run_id",
        "run_event",
    }

    def format(self, record: logging.LogRecord) -> str:
        payload: dict[str, Any] = {
            "ts": self.formatTime(record, "%Y-%m-%dT%H:%M:%S%z"),
            "level": record.levelname,
            "logger": record.name,
            "msg": record.getMessage(),
            "module": record.module,
            "line": record.lineno,
            "pid": record.process,
            "hostname": getattr(record, "hostname", "-"),
            "run_id": getattr(record, "run_id", "-"),
        }
        if record.exc_info:
            payload["exc"] = self.formatException(record.exc_info)
        run_event = getattr(record, "run_event", None)
        if run_event:
            payload["event"] = run_event
        for key, value in vars(record).items():
            if key not in self._RESERVED and key not in payload:
                payload[key] = value
        return json.dumps(payload, ensure_ascii=False, default=str)


def _truthy(value: str | None) -> bool:
    return str(value or "").lower() in {"1", "true", "yes", "on"}


def _own(handler: logging.Handler) -> None:
    setattr(handler, _OWNER_TAG, True)


def owned_handlers(logger: logging.Logger) -> list[logging.Handler]:
    """Handlers installed by :class:`AppLogger`; test-capture handlers are not counted."""
    return [h for h in logger.handlers if getattr(h, _OWNER_TAG, False)]


class AppLogger:
    """
    Configure and expose the ``biwave`` logger.

    Parameters:
        log_file: Path to the primary rotating log file.
        log_level: Logging level for the main logger. Defaults to INFO.
        events_file: Optional path for the events stream. If omitted, an
            ``events.log`` sibling of ``log_file`` is used.
    """

    def __init__(
        self,
        log_file: str | os.PathLike[str],
        log_level: int = logging.INFO,
        events_file: str | os.PathLike[str] | None = None,
    ) -> None:
        self.logger = self._setup(Path(log_file), log_level, events_file)

    def _setup(
        self,
        log_file: Path,
        log_level: int,
        events_file: str | os.PathLike[str] | None,
    ) -> logging.Logger:
        logger = logging.getLogger(LOGGER_NAME)
        logger.setLevel(log_level)
        logger.propagate = False

        if owned_handlers(logger):
            return logger

        log_file.parent.mkdir(parents=True, exist_ok=True)

        plain_fmt = logging.Formatter("%(asctime)s [%(run_id)s] %(levelname)s %(name)s - %(message)s")
        context_filter = _ContextFilter()
        use_json = _truthy(os.environ.get("BIWAVE_LOG_JSON"))

        file_handler = handlers.RotatingFileHandler(
            log_file,
            maxBytes=20 * 1024 * 1024,
            backupCount=10,
            encoding="utf-8",
        )
        file_handler.setFormatter(JsonFormatter() if use_json else plain_fmt)
        file_handler.addFilter(context_filter)
        _own(file_handler)
        logger.addHandler(file_handler)

        console_handler = logging.StreamHandler()
        console_handler.setFormatter(plain_fmt)
        console_handler.addFilter(context_filter)
        _own(console_handler)
        logger.addHandler(console_handler)

        events_path = Path(events_file) if events_file else log_file.parent / "events.log"
        events_handler = handlers.RotatingFileHandler(
            events_path,
            maxBytes=5 * 1024 * 1024,
            backupCount=10,
            encoding="utf-8",
        )
        events_handler.setLevel(logging.INFO)
        events_handler.setFormatter(JsonFormatter())
        events_handler.addFilter(context_filter)
        events_handler.addFilter(_EventFilter())
        _own(events_handler)
        logger.addHandler(events_handler)

        return logger


def event(logger: logging.Logger, name: str, message: str, **fields: Any) -> None:
    """
    Emit a run lifecycle event.

    The record goes to the events sidecar (via the ``run_event`` tag) and
    also appears in the main log.

    Parameters:
        logger: Any logger instance (typically the one from AppLogger).
        name: One of the ``run.*`` names in :data:`_RUN_EVENTS`.
        message: Human-readable summary.
        **fields: Additional structured fields included in the JSON record.
    """
    if name not in _RUN_EVENTS:
        logger.warning(f"event() called with unknown event '{name}'")
    extra: dict[str, Any] = {"run_event": name}
    extra.update(fields)
    logger.info(message, extra=extra)
