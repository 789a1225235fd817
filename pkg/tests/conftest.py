import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from metainterp.toydata import write_world  # noqa: E402

DATA = Path(__file__).parent / "data"

_acceptance = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        status = "PASS" if rep.passed else ("SKIP" if rep.skipped else "FAIL")
        _acceptance.append((marker.args[0], item.name, status))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for label, name, status in _acceptance:
        terminalreporter.write_line(f"{status:4}  {label}  ({name})")


@pytest.fixture(scope="session")
def world(tmp_path_factory):
    """Synthetic resources on disk plus a built index snapshot."""
    from metainterp.cli import main

    d = write_world(tmp_path_factory.mktemp("world"))
    assert main(["ingest", "--config", str(d / "metainterp.ini")]) == 0
    return d


@pytest.fixture(scope="session")
def world_resources(world):
    from metainterp.cli import load_resources, read_config

    return load_resources(read_config(str(world / "metainterp.ini")))
