import time

import pytest

from genuslab import enumeration

# criterion number -> (passed, detail); printed at the end of the run
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def record():
    def _record(criterion: int, passed: bool, detail: str) -> bool:
        ACCEPTANCE[criterion] = (bool(passed), detail)
        line = f"criterion {criterion}: {'PASS' if passed else 'FAIL'} - {detail}"
        print(line)
        return passed
    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {k}: {detail}")


@pytest.fixture(scope="session")
def census_timings():
    return {}


@pytest.fixture(scope="session")
def censuses(census_timings):
    """Fresh exhaustive censuses for n = 1, 2, 3 (n = 3 takes ~20 s)."""
    out = {}
    for n in (1, 2, 3):
        t0 = time.perf_counter()
        out[n] = enumeration.brute_force_census(n)
        census_timings[n] = time.perf_counter() - t0
    return out


@pytest.fixture(scope="session")
def seeded(censuses):
    return enumeration.calibrate_seed(censuses[1], censuses[2], censuses[3])


@pytest.fixture(scope="session")
def table_timing():
    return {}


@pytest.fixture(scope="session")
def table120(seeded, table_timing):
    t0 = time.perf_counter()
    table = enumeration.gj_extend(seeded, 120)
    table_timing["seconds"] = time.perf_counter() - t0
    return table
