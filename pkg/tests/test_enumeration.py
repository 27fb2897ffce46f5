import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from genuslab import enumeration as en
from genuslab.errors import (
    CorruptTable,
    InconsistentSeed,
    NonIntegralEntry,
    NotSeeded,
    SizeTooLarge,
    TableTooSmall,
)

# frozen after checking against the census (n <= 3) and the planar closed form
FROZEN = {
    1: [4, 1],
    2: [32, 28],
    3: [336, 664, 105],
    4: [4096, 14912, 8112],
    5: [54912, 326496, 396792, 50050],
    6: [786432, 7048192, 15663360, 6722816],
}


def double_factorial(k):
    return math.prod(range(k, 0, -2))


def planar_closed_form(n):
    # rooted planar triangulations with 2n faces, loops and multiple edges allowed
    return 2 ** (2 * n + 1) * double_factorial(3 * n) // (math.factorial(n + 2) * double_factorial(n))


@pytest.fixture(scope="module")
def small_table():
    return en.gj_extend(en.TauTable.seeded(1), 30)


def test_frozen_rows(small_table):
    for n, row in FROZEN.items():
        assert small_table.row(n) == row


def test_kronecker_term_alone_gives_one():
    # at n = g = 1 only the 2 [n = g = 1] term survives, whatever the seed
    for seed in (0, 1, Fraction(1, 2)):
        assert en.recurrence_rhs(1, 1, en.TauTable.seeded(seed)) == 2


def test_zero_pattern_small(small_table):
    assert small_table(2, 2) == 0
    for n in range(1, 31):
        for g in range(en.max_genus(n) + 3):
            assert (small_table(n, g) > 0) == (n >= 2 * g - 1)


def test_planar_closed_form(table120):
    for n in range(1, 121):
        assert table120(n, 0) == planar_closed_form(n)


def test_census_matches_recurrence(censuses, seeded):
    assert seeded.seed_cell == 1
    for n, c in censuses.items():
        assert c.counts == {g: v for g, v in enumerate(seeded.row(n)) if v}


def test_census_matching_totals(censuses):
    for n, c in censuses.items():
        assert sum(c.matchings.values()) + c.disconnected == en.matching_count(n)
    assert censuses[3].matchings == {0: 9797760, 1: 19362240, 2: 3061800}
    assert censuses[3].disconnected == 2237625


def test_orbit_identity(censuses):
    # relabelling 2n triangles and rotating each one hits every rooted map (6n)^-1 (2n)! 3^(2n) times
    for n, c in censuses.items():
        for g, count in c.matchings.items():
            assert Fraction(count * 6 * n, math.factorial(2 * n) * 3 ** (2 * n)) == c.count(g)


def test_n1_census():
    c = en.brute_force_census(1)
    assert set(c.counts) == {0, 1}
    assert c.count(1) == 1
    assert c.dump() == [{"genus": 0, "count": 4}, {"genus": 1, "count": 1}]


def test_python_and_compiled_agree():
    py = en.brute_force_census(2, method="python")
    cc = en.brute_force_census(2, method="compiled")
    assert py.counts == cc.counts and py.matchings == cc.matchings
    assert py.disconnected == cc.disconnected
    for g in py.counts:
        assert py.class_index(g) == cc.class_index(g)


@pytest.mark.parametrize("n", [1, 2])
def test_all_roots_adds_nothing(n):
    # every rooted class is already reached with the root on dart 0
    assert en.brute_force_census(n, "python", all_roots=True).counts == en.brute_force_census(n).counts


def test_census_size_limits():
    for n in (0, 4):
        with pytest.raises(SizeTooLarge):
            en.brute_force_census(n)


def test_census_json_round_trip(tmp_path, censuses):
    c = censuses[2]
    c.save(tmp_path / "c.json")
    back = en.GluingCensus.load(tmp_path / "c.json")
    assert back.counts == c.counts and back.matchings == c.matchings
    assert back.class_index(1) == c.class_index(1)


def test_calibration_checks(censuses):
    c1, c2, c3 = censuses[1], censuses[2], censuses[3]
    with pytest.raises(InconsistentSeed):
        en.calibrate_seed(c2, c1, c3)
    bad = en.GluingCensus(3, dict(c3.counts), c3.representatives, c3.matchings, c3.disconnected)
    bad.counts[1] += 1
    with pytest.raises(InconsistentSeed):
        en.calibrate_seed(c1, c2, bad)


def test_wrong_seed_is_caught():
    with pytest.raises(NonIntegralEntry):
        en.gj_extend(en.TauTable.seeded(Fraction(1, 3)), 5)
    with pytest.raises(NotSeeded):
        en.gj_extend(en.TauTable(None), 3)


def test_extend_is_incremental(small_table):
    part = en.gj_extend(en.TauTable.seeded(1), 10)
    assert en.gj_extend(part, 30).entries == small_table.entries


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 30), st.integers(0, 16))
def test_recurrence_holds(n, g):
    table = en.gj_extend(en.TauTable.seeded(1), 30)
    assert en.recurrence_rhs(n, g, table) == (n + 1) * table(n, g)


def test_csv_round_trip_and_corruption(tmp_path, small_table):
    path = tmp_path / "tau.csv"
    small_table.to_csv(path)
    back = en.TauTable.from_csv(path)
    assert back.entries == small_table.entries and back.seed_cell == 1
    lines = path.read_text().splitlines()
    i = next(k for k, line in enumerate(lines) if line.startswith("20,3,"))
    lines[i] = "20,3," + str(int(lines[i].split(",")[2]) + 1)
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(CorruptTable):
        en.TauTable.from_csv(path, verify_rows=0)
    path.write_text("n,g,tau\n1,0,4\n")
    with pytest.raises(CorruptTable):
        en.TauTable.from_csv(path)


def test_ratio_diagnostic(small_table, table120):
    (row,) = en.ratio_diagnostic(small_table, 0.0, [2])
    assert row.ratio == Fraction(4, 32)
    errs = [r.error for r in en.ratio_diagnostic(table120, 0.2, [40, 80, 120])]
    assert errs[0] >= errs[1] >= errs[2]
    ratios = [r.ratio for r in en.ratio_diagnostic(table120, 0.0, range(2, 121))]
    assert all(r > 0 for r in ratios)
    assert all(a > b for a, b in zip(ratios, ratios[1:]))
    with pytest.raises(TableTooSmall):
        en.ratio_diagnostic(small_table, 0.2, [40])
