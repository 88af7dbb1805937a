from __future__ import annotations

import pytest

# criterion -> (passed, detail); filled by the acceptance tests
VERDICTS: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def verdict():
    def record(criterion: str, passed: bool, detail: str) -> None:
        VERDICTS[criterion] = (passed, detail)
        print(f"{criterion}: {'PASS' if passed else 'FAIL'} ({detail})")
        assert passed, f"{criterion}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(VERDICTS):
        passed, detail = VERDICTS[criterion]
        terminalreporter.write_line(f"{criterion}: {'PASS' if passed else 'FAIL'} ({detail})")
