import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from rydhet import AtomSystem, DriveConfig, TWO_PI  # noqa: E402

ROOT = Path(__file__).resolve().parents[1]
MHZ = TWO_PI * 1e6

_ACCEPTANCE: dict[str, str] = {}


def record_acceptance(key: str, line: str) -> None:
    _ACCEPTANCE[key] = line


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for key in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[key])


@pytest.fixture
def cs_atom():
    return AtomSystem.cesium()


@pytest.fixture
def ideal_atom():
    return AtomSystem.cesium().idealized()


@pytest.fixture(params=[2.0, 4.0, 6.0], ids=lambda v: f"OL{v:g}MHz")
def cs_drive(request):
    return DriveConfig.cesium(omega_L=request.param * MHZ)


@pytest.fixture
def drive4():
    return DriveConfig.cesium(omega_L=4.0 * MHZ)


def rel_err(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))
