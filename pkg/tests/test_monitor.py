"""
Tests for run statistics and the JSON report envelope
"""

from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from utils.monitor import CertificateMonitor, get_monitor
from utils.reports import SCHEMA, Report, inputs_digest


class TestCertificateMonitor:

    def test_counts_outcomes(self):
        monitor = CertificateMonitor()
        monitor.log_run("slope", 0.5, passed=True)
        monitor.log_run("xy", 0.25, passed=False)
        monitor.log_run("xy", 0.25, error=True)
        metrics = monitor.get_metrics()
        assert (metrics["total_runs"], metrics["passed"], metrics["failed"], metrics["errors"]) == (3, 1, 1, 1)
        assert metrics["per_name"]["xy"] == {"runs": 2, "time": 0.5}
        assert metrics["avg_time"] == pytest.approx(1 / 3)

    def test_timed_block(self):
        monitor = CertificateMonitor()
        with monitor.timed("pitch") as outcome:
            outcome["passed"] = False
        with pytest.raises(ZeroDivisionError):
            with monitor.timed("pitch"):
                1 / 0
        metrics = monitor.get_metrics()
        assert metrics["failed"] == 1 and metrics["errors"] == 1

    def test_thread_safe(self):
        monitor = CertificateMonitor()
        with ThreadPoolExecutor(max_workers=8) as pool:
            list(pool.map(lambda i: monitor.log_run(f"c{i % 5}", 0.001), range(400)))
        assert monitor.get_metrics()["total_runs"] == 400

    def test_reset(self):
        monitor = get_monitor()
        monitor.log_run("slope", 1.0)
        monitor.reset_metrics()
        assert monitor.get_metrics()["total_runs"] == 0
        assert get_monitor() is monitor


class TestReport:

    def test_digest_ignores_key_order(self):
        assert inputs_digest({"a": 1, "b": [1, 2]}) == inputs_digest({"b": [1, 2], "a": 1})
        assert inputs_digest({"a": 1}) != inputs_digest({"a": 2})

    def test_numpy_values_serialize(self):
        report = Report("band", {"file": "x.json"}, {"v": np.float64(0.5), "ok": np.bool_(True),
                                                     "arr": np.arange(3)}, True)
        data = report.to_dict()
        assert data["results"] == {"v": 0.5, "ok": True, "arr": [0, 1, 2]}
        assert data["schema"] == SCHEMA

    def test_round_trip(self):
        report = Report("verify", {"name": "all"}, {"verdicts": []}, False, ["note"], wall_time=1.25)
        again = Report.from_dict(report.to_dict())
        assert again.to_dict() == report.to_dict()

    def test_deterministic_without_timing(self):
        first = Report("omega", {"b": "1/5"}, {"omega": True}, True, wall_time=0.1)
        second = Report("omega", {"b": "1/5"}, {"omega": True}, True, wall_time=0.9)
        assert first.to_json(include_timing=False) == second.to_json(include_timing=False)

    def test_rejects_other_schema(self):
        with pytest.raises(ValueError, match="schema"):
            Report.from_dict({"schema": "other/2", "command": "x", "inputs": {}, "results": {}, "passed": True})
