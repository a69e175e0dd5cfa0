"""Shared pytest hooks: collects acceptance verdicts and prints them at the end."""

import pytest

_VERDICTS: dict[int, tuple[bool, str]] = {}
_NOTES: list[str] = []


@pytest.fixture
def verdict():
    """``verdict(criterion, ok, detail)`` records one acceptance line."""

    def record(criterion: int, ok: bool, detail: str):
        _VERDICTS[criterion] = (bool(ok), detail)

    return record


@pytest.fixture
def note():
    """Free-form diagnostic line shown under the acceptance summary."""
    return _NOTES.append


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for crit in sorted(_VERDICTS):
        ok, detail = _VERDICTS[crit]
        tr.write_line(f"criterion {crit:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
    passed = sum(ok for ok, _ in _VERDICTS.values())
    tr.write_line(f"{passed}/{len(_VERDICTS)} criteria pass")
    if _NOTES:
        tr.section("acceptance diagnostics")
        for line in _NOTES:
            tr.write_line(line)
