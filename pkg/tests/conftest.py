import pytest

_VERDICTS = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call" and item.module.__name__ == "test_acceptance":
        notes = getattr(item, "criterion_notes", [])
        _VERDICTS.append((item.name, rep.passed, notes))


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, notes in _VERDICTS:
        detail = f" ({'; '.join(notes)})" if notes else ""
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {name}{detail}")
