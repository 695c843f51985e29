import numpy as np
import pytest

from ricci_homog.structure import derive_structure
from ricci_homog.tables import flag_su3_table, sphere5_table, su2_su2_table, torus_table


@pytest.fixture(scope="session")
def flag_sd():
    return derive_structure(flag_su3_table(), "su3_flag")[0]


@pytest.fixture(scope="session")
def sphere5_sd():
    return derive_structure(sphere5_table(), "su3_su2_sphere5")[0]


@pytest.fixture(scope="session")
def su2_su2_sd():
    return derive_structure(su2_su2_table(), "su2_su2")[0]


@pytest.fixture(scope="session")
def torus_sd():
    return derive_structure(torus_table(), "torus3")[0]


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def acceptance():
    """Record one PASS/FAIL line per acceptance criterion."""

    def record(number, title, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} ({detail})"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(l.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
