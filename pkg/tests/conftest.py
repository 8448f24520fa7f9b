import functools
import os
import sys

import pytest

from dal.approx import best_approx_scan

os.environ.setdefault("SOURCE_DATE_EPOCH", "0")


@functools.lru_cache(maxsize=None)
def cached_scan(spec, n, qmax):
    return best_approx_scan(spec, n, qmax)


@pytest.fixture
def scan():
    return cached_scan


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("DAL_CACHE_DIR", str(tmp_path / "cache"))


def pytest_terminal_summary(terminalreporter):
    mod = next((m for name, m in list(sys.modules.items()) if name.endswith("test_acceptance")), None)
    rows = getattr(mod, "RESULTS", [])
    if rows:
        terminalreporter.section("acceptance criteria")
        for row in rows:
            terminalreporter.write_line(row)
