import json
import pathlib
import sys

import pytest

sys.path.insert(0, str(pathlib.Path(__file__).parent))

from lamopt.clt import QUASI_ISO, AngleSet, LoadCase, Material, StrainAllowables  # noqa: E402

FIXTURES = pathlib.Path(__file__).parent / "fixtures"


@pytest.fixture
def quasi():
    return AngleSet(QUASI_ISO)


@pytest.fixture
def cross():
    return AngleSet((0, 90))


@pytest.fixture
def material():
    # T300/5208 carbon-epoxy
    return Material(181000.0, 10300.0, 7170.0, 0.28, 0.125,
                    StrainAllowables(0.005, 0.004, 0.008))


@pytest.fixture
def plate_loads():
    return LoadCase(Nx=-20.0, Ny=-5.0, plate_a=200.0, plate_b=100.0, max_mode=4)


def load_fixture(name):
    return json.loads((FIXTURES / name).read_text())


@pytest.fixture
def compression_doc():
    return load_fixture("compression.json")


# one line per acceptance criterion, shown at the end of the run
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
