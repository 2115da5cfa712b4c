"""Shared test plumbing: a recorder for the acceptance-criterion verdict
lines, printed in the terminal summary so every run shows one PASS/FAIL
line per criterion regardless of capture settings."""

criterion_lines: list[str] = []


def record_criterion(number: int, passed: bool, detail: str) -> None:
    verdict = "PASS" if passed else "FAIL"
    criterion_lines.append(f"criterion {number:02d} {verdict}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if criterion_lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(criterion_lines):
            terminalreporter.write_line(line)
