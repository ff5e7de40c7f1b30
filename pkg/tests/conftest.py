import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from stereosal.synthetic import make_scene  # noqa: E402


@pytest.fixture(scope="session")
def scene():
    return make_scene(0)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
