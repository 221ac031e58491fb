import json

import pytest
from hypothesis import settings

settings.register_profile("ktlab", deadline=None, max_examples=40, derandomize=True)
settings.load_profile("ktlab")

# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])


@pytest.fixture(scope="session")
def scenario_run_all(tmp_path_factory):
    """``ktlab scenario run all`` once per session: (exit code, parsed JSON)."""
    from ktlab.cli import main

    out = tmp_path_factory.mktemp("scenarios") / "all.json"
    code = main(["--seed", "0", "scenario", "run", "all", "--out", str(out)])
    return code, json.loads(out.read_text())
