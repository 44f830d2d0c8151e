"""
Certificate Monitor
===================

Thread-safe bookkeeping of certificate and command runs: counts of runs,
passes, failures and errors plus wall time, overall and per name.
"""

import threading
import time
from contextlib import contextmanager
from typing import Any, Dict, Iterator


class CertificateMonitor:
    """
    Run statistics for certificates and band checks
    """

    def __init__(self):
        self.lock = threading.Lock()
        self.reset_metrics()

    def reset_metrics(self):
        """Reset all run statistics"""
        with self.lock:
            self.metrics = {
                'total_runs': 0,
                'passed': 0,
                'failed': 0,
                'errors': 0,
                'total_time': 0.0,
                'per_name': {},
            }

    def log_run(self, name: str, duration: float, passed: bool = True, error: bool = False):
        """Record one finished run"""
        with self.lock:
            self.metrics['total_runs'] += 1
            self.metrics['total_time'] += duration
            if error:
                self.metrics['errors'] += 1
            elif passed:
                self.metrics['passed'] += 1
            else:
                self.metrics['failed'] += 1

            entry = self.metrics['per_name'].setdefault(name, {'runs': 0, 'time': 0.0})
            entry['runs'] += 1
            entry['time'] += duration

    @contextmanager
    def timed(self, name: str) -> Iterator[Dict[str, Any]]:
        """
        Time a block; the block sets outcome['passed'] (default True)

        Exceptions propagate and are logged as errors.
        """
        outcome = {'passed': True}
        start = time.perf_counter()
        try:
            yield outcome
        except Exception:
            self.log_run(name, time.perf_counter() - start, passed=False, error=True)
            raise
        self.log_run(name, time.perf_counter() - start, passed=bool(outcome['passed']))

    def get_metrics(self) -> Dict[str, Any]:
        """Snapshot of the current statistics"""
        with self.lock:
            metrics = dict(self.metrics)
            metrics['per_name'] = {k: dict(v) for k, v in self.metrics['per_name'].items()}
            metrics['pass_rate'] = (metrics['passed'] / max(1, metrics['total_runs'])) * 100
            metrics['avg_time'] = metrics['total_time'] / max(1, metrics['total_runs'])
            return metrics


_monitor = None


def get_monitor() -> CertificateMonitor:
    """Process-wide monitor instance"""
    global _monitor
    if _monitor is None:
        _monitor = CertificateMonitor()
    return _monitor
