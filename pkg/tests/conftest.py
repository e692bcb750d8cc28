"""Shared test plumbing: the acceptance-criterion reporter.

Acceptance tests call :func:`record_criterion` so that every criterion
prints one pass/fail line, collected into a summary section at the end
of the run regardless of pytest's capture settings.
"""

_criterion_lines: list[tuple[int, str]] = []


def record_criterion(index: int, name: str, passed: bool, detail: str = "") -> None:
    status = "PASS" if passed else "FAIL"
    line = f"criterion {index:2d} {status}  {name}"
    if detail:
        line += f"  [{detail}]"
    _criterion_lines.append((index, line))
    print(line)


def pytest_terminal_summary(terminalreporter):
    if not _criterion_lines:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_criterion_lines):
        terminalreporter.line(line)
