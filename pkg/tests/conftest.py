import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

import acceptance_criteria  # noqa: E402


def pytest_terminal_summary(terminalreporter):
    results = acceptance_criteria.RESULTS
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(results):
        terminalreporter.write_line(acceptance_criteria.format_line(results[key]))
