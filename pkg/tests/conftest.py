from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from mural2scene.fixtures import write_foguang  # noqa: E402

SMALL_DPI = 60


@pytest.fixture(scope="session")
def small_fixture(tmp_path_factory) -> Path:
    """Foguang fixture at 60 dpi (3071 x 850 px); returns the manifest path."""
    return write_foguang(tmp_path_factory.mktemp("foguang_small"), dpi=SMALL_DPI)


@pytest.fixture(scope="session")
def full_fixture(tmp_path_factory) -> Path:
    """Foguang fixture at the scan's 300 dpi (15354 x 4252 px)."""
    return write_foguang(tmp_path_factory.mktemp("foguang_full"))


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    lines = getattr(acceptance, "RESULTS", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
