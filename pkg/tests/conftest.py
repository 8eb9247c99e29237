from __future__ import annotations

from contextlib import contextmanager

import pytest

_RESULTS = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_RESULTS] = []


@pytest.fixture
def criterion(request):
    """Context manager that records one acceptance criterion as PASS or FAIL."""
    results = request.config.stash[_RESULTS]

    @contextmanager
    def record(number: int, title: str):
        note: dict[str, str] = {"detail": ""}
        try:
            yield note
        except BaseException:
            line = f"ACCEPTANCE {number:>2} FAIL  {title}  {note['detail']}".rstrip()
            results.append((number, line))
            print(line)
            raise
        line = f"ACCEPTANCE {number:>2} PASS  {title}  {note['detail']}".rstrip()
        results.append((number, line))
        print(line)

    return record


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash.get(_RESULTS, [])
    if results:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(results):
            terminalreporter.write_line(line)
