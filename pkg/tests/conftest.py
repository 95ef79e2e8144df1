import pytest

# criterion id -> (passed, one-line detail); filled by tests/test_acceptance.py
_CRITERIA: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def criterion():
    """Record a criterion outcome, then assert every named check."""

    def record(cid: str, title: str, checks: dict[str, bool], detail: str = "") -> None:
        failed = [name for name, ok in checks.items() if not ok]
        summary = title if not detail else f"{title}: {detail}"
        if failed:
            summary += f" [failed: {', '.join(failed)}]"
        _CRITERIA[cid] = (not failed, summary)
        assert not failed, summary

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(_CRITERIA, key=lambda c: int(c[1:])):
        ok, summary = _CRITERIA[cid]
        terminalreporter.write_line(f"{cid:>4} {'PASS' if ok else 'FAIL'}  {summary}")
