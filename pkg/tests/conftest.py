import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

# acceptance verdicts, one line per criterion, filled in by test_acceptance
VERDICTS: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(VERDICTS):
            terminalreporter.write_line(VERDICTS[n])
