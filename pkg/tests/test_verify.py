"""Tests for the property verification suite and its reports."""

from __future__ import annotations

import json
import math

import pytest

from src import verify
from src.dirac import DiracParams
from src.errors import AccuracyError, DomainError
from src.verify import (
    Check,
    Measurement,
    build_checks,
    check_names,
    print_verify_report,
    render_report,
    run_verification,
)

FAST = [
    "spectrum_ground_state",
    "quantize_agreement",
    "projector_identities",
    "cauchy_riemann",
    "pairing_normalization",
    "node_count",
]


def _raise(exc: Exception):
    def run() -> Measurement:
        raise exc

    return run


@pytest.fixture
def fake_checks(monkeypatch):
    checks = [
        Check("good", lambda: Measurement(1.0, 1.0, 0.0), 1e-12),
        Check("bad", lambda: Measurement(1.5, 1.0, 0.5), 1e-3),
        Check("nan", lambda: Measurement(float("nan"), 0.0, float("nan")), 1e-8),
        Check("inaccurate", _raise(AccuracyError("missed", estimate=-2.0, error=0.1)), 1e-6),
        Check("broken", _raise(DomainError("outside")), 1e-6),
        Check("sluggish", lambda: Measurement(0.0, 0.0, 0.0), 1e-6, slow=True),
    ]
    monkeypatch.setattr(verify, "build_checks", lambda *args, **kwargs: checks)
    return checks


class TestRegistry:
    def test_names_are_unique(self):
        names = check_names()
        assert len(names) == len(set(names)) == 22

    def test_slow_checks(self):
        slow = {c.name for c in build_checks() if c.slow}
        assert slow == {
            "round_trip_numeric",
            "admissible_cross_path",
            "oracle_eigenvalues",
            "oracle_eigenfunctions",
        }


class TestRunVerification:
    def test_fast_checks_pass(self, logger):
        report = run_verification(logger, only=FAST)
        assert report["total"] == len(FAST)
        assert report["passed"], [c for c in report["checks"] if c["status"] != "PASS"]
        assert [c["check"] for c in report["checks"]] == FAST

    def test_user_parameters_extend_sweeps(self, logger, monkeypatch):
        seen = []
        original = verify.dirac.quantize

        def spy(p, n):
            seen.append((p.lam, p.chi))
            return original(p, n)

        monkeypatch.setattr(verify.dirac, "quantize", spy)
        p = DiracParams(0.45, -3)
        report = run_verification(logger, only=["quantize_agreement", "transformed_system"], params=p)
        assert report["passed"]
        assert (0.45, -3) in seen

    def test_analyticity_and_pairing_checks(self, logger):
        report = run_verification(logger, only=["cauchy_riemann", "pairing_normalization"])
        cr, pair = report["checks"]
        assert cr["status"] == pair["status"] == "PASS"
        assert cr["deviation"] < 1e-6
        assert "zbar=" in cr["detail"]
        assert pair["expected"] == pytest.approx(1 / (2 * math.pi))

    def test_unknown_name(self, logger):
        with pytest.raises(ValueError, match="no_such_check"):
            run_verification(logger, only=["node_count", "no_such_check"])

    def test_statuses(self, logger, fake_checks):
        report = run_verification(logger)
        status = {c["check"]: c["status"] for c in report["checks"]}
        assert status == {
            "good": "PASS",
            "bad": "FAIL",
            "nan": "FAIL",
            "inaccurate": "FAIL",
            "broken": "ERROR",
            "sluggish": "PASS",
        }
        assert report["failed"] == 4
        assert not report["passed"]

    @pytest.mark.parametrize(
        "exc", [ValueError("bad fit"), ZeroDivisionError("flat ray"), FloatingPointError()]
    )
    def test_foreign_exception_is_contained(self, logger, monkeypatch, exc):
        checks = [
            Check("crashing", _raise(exc), 1e-6),
            Check("good", lambda: Measurement(1.0, 1.0, 0.0), 1e-12),
        ]
        monkeypatch.setattr(verify, "build_checks", lambda *args, **kwargs: checks)
        report = run_verification(logger)
        status = {c["check"]: c["status"] for c in report["checks"]}
        assert status == {"crashing": "ERROR", "good": "PASS"}
        assert type(exc).__name__ in report["checks"][0]["detail"]
        assert not report["passed"]

    def test_accuracy_error_keeps_estimate(self, logger, fake_checks):
        entry = run_verification(logger, only=["inaccurate"])["checks"][0]
        assert entry["value"] == 2.0
        assert entry["deviation"] == 0.1
        assert "missed" in entry["detail"]

    def test_skip_slow(self, logger, fake_checks):
        report = run_verification(logger, include_slow=False)
        assert "sluggish" not in {c["check"] for c in report["checks"]}

    def test_tolerance_overrides(self, logger, fake_checks, caplog):
        overrides = {"good": 0.5, "typo": 1.0}
        report = run_verification(logger, only=["good", "bad"], tolerance=1.0, tolerances=overrides)
        tol = {c["check"]: c["tolerance"] for c in report["checks"]}
        assert tol == {"good": 0.5, "bad": 1.0}
        assert report["passed"]
        assert "typo" in caplog.text


class TestReports:
    def test_print_report(self, logger, fake_checks, capsys):
        report = run_verification(logger, only=["good", "bad"])
        assert print_verify_report(report) is False
        out = capsys.readouterr().out
        assert "Verification Report" in out
        assert "1 OF 2 CHECKS FAILED" in out

    def test_print_all_passed(self, logger, fake_checks, capsys):
        assert print_verify_report(run_verification(logger, only=["good"])) is True
        assert "ALL 1 CHECKS PASSED" in capsys.readouterr().out

    def test_render_report_schema(self, logger, fake_checks):
        doc = json.loads(render_report(run_verification(logger)))
        assert set(doc) == {"passed", "total", "failed", "checks"}
        entry = next(c for c in doc["checks"] if c["check"] == "nan")
        assert entry["value"] == "nan"
        assert {"check", "status", "value", "expected", "tolerance"} <= set(entry)
