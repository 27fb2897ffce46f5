"""Exact counts tau(n, g) of rooted triangulations with 2n faces and genus g.

Counts come from the Goulden-Jackson recurrence

    (n+1) tau(n,g) = 4n(3n-2)(3n-4) tau(n-2,g-1) + 4(3n-1) tau(n-1,g)
                     + 4 sum_{i+j=n-2} sum_{g1+g2=g} (3i+2)(3j+2) tau(i,g1) tau(j,g2)
                     + 2 [n = g = 1].

The value used for tau(0, 0) inside the convolution is not fixed a priori; it
is calibrated against an exhaustive census of triangle gluings for n <= 3.
"""

from __future__ import annotations

import csv
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import floor
from pathlib import Path
from typing import Callable, Iterable

from .errors import (
    CorruptTable,
    Disconnected,
    InconsistentSeed,
    NonIntegralEntry,
    NotSeeded,
    SizeTooLarge,
    TableTooSmall,
)
from .maps import RootedMap, build_map, canonical_key

Number = int | Fraction


def max_genus(n: int) -> int:
    """Largest genus with tau(n, g) > 0, i.e. the largest g with n >= 2g - 1."""
    return (n + 1) // 2


def recurrence_rhs(n: int, g: int, tau: Callable[[int, int], Number]) -> Number:
    """Right-hand side of the recurrence for (n, g), with ``tau`` supplying smaller sizes."""
    total: Number = 0
    if n >= 2 and g >= 1:
        total += 4 * n * (3 * n - 2) * (3 * n - 4) * tau(n - 2, g - 1)
    if n >= 1:
        total += 4 * (3 * n - 1) * tau(n - 1, g)
    m = n - 2
    if m >= 0:
        conv: Number = 0
        for i in range(m + 1):
            j = m - i
            for g1 in range(g + 1):
                a = tau(i, g1)
                if not a:
                    continue
                b = tau(j, g - g1)
                if b:
                    conv += (3 * i + 2) * (3 * j + 2) * a * b
        total += 4 * conv
    if n == 1 and g == 1:
        total += 2
    return total


@dataclass
class TauTable:
    """tau(n, g) for 1 <= n <= n_max, all g; tau(0, 0) is the seed cell."""

    seed_cell: Fraction | None
    entries: dict[tuple[int, int], int] = field(default_factory=dict)
    n_max: int = 0

    @classmethod
    def seeded(cls, seed: Number) -> "TauTable":
        return cls(Fraction(seed), {}, 0)

    def __call__(self, n: int, g: int) -> Number:
        if n < 0 or g < 0:
            return 0
        if n == 0:
            if self.seed_cell is None:
                raise NotSeeded("table has no seed cell")
            return self.seed_cell if g == 0 else 0
        return self.entries.get((n, g), 0)

    def row(self, n: int) -> list[int]:
        return [self.entries.get((n, g), 0) for g in range(max_genus(n) + 1)]

    def copy(self) -> "TauTable":
        return TauTable(self.seed_cell, dict(self.entries), self.n_max)

    def to_csv(self, path: str | Path, header_extra: str = "") -> None:
        path = Path(path)
        with path.open("w", newline="") as fh:
            fh.write(f"# seed_cell={self.seed_cell}\n")
            if header_extra:
                fh.write(f"# {header_extra}\n")
            w = csv.writer(fh)
            w.writerow(["n", "g", "tau"])
            for n in range(1, self.n_max + 1):
                for g in range(max_genus(n) + 2):
                    w.writerow([n, g, self.entries.get((n, g), 0)])

    @classmethod
    def from_csv(cls, path: str | Path, verify_rows: int = 10) -> "TauTable":
        seed = None
        entries = {}
        n_max = 0
        with Path(path).open() as fh:
            lines = []
            for line in fh:
                if line.startswith("# seed_cell="):
                    seed = Fraction(line.split("=", 1)[1].strip())
                elif not line.startswith("#"):
                    lines.append(line)
        for row in csv.DictReader(lines):
            n, g = int(row["n"]), int(row["g"])
            entries[(n, g)] = int(row["tau"])
            n_max = max(n_max, n)
        if seed is None:
            raise CorruptTable("missing seed_cell header")
        table = cls(seed, {k: v for k, v in entries.items() if v}, n_max)
        table.verify(verify_rows)
        return table

    def verify(self, rows: int = 10, rng: random.Random | None = None) -> None:
        """Recheck the recurrence on ``rows`` random cells (all cells if rows <= 0)."""
        cells = [(n, g) for n in range(1, self.n_max + 1) for g in range(max_genus(n) + 2)]
        if rows > 0:
            rng = rng or random.Random(self.n_max)
            cells = rng.sample(cells, min(rows, len(cells)))
        for n, g in cells:
            rhs = recurrence_rhs(n, g, self)
            if rhs != (n + 1) * self(n, g):
                raise CorruptTable(f"recurrence fails at (n, g) = ({n}, {g})")


def gj_extend(table: TauTable, n_target: int) -> TauTable:
    """Fill all sizes up to ``n_target`` from the recurrence.

    Genera one past the feasible range are evaluated too, so the zero pattern
    is produced by the recurrence rather than assumed.
    """
    if table.seed_cell is None:
        raise NotSeeded("seed the table with calibrate_seed() or TauTable.seeded()")
    out = table.copy()
    seed = out.seed_cell
    # weighted rows W[i][g] = (3i+2) tau(i, g); W[0] holds the seed cell
    w: list[list[Number]] = [[2 * (seed.numerator if seed.denominator == 1 else seed)]]
    for i in range(1, out.n_max + 1):
        w.append([(3 * i + 2) * out(i, g) for g in range(max_genus(i) + 1)])

    for n in range(out.n_max + 1, n_target + 1):
        gmax = max_genus(n) + 1
        m = n - 2
        conv = [0] * (gmax + 1)
        if m >= 0:
            # symmetric halves of sum_{i+j=m} W[i] * W[j]
            for i in range(m // 2 + 1):
                j = m - i
                wi, wj = w[i], w[j]
                factor = 1 if i == j else 2
                for g1, a in enumerate(wi):
                    if not a:
                        continue
                    for g2, b in enumerate(wj):
                        if g1 + g2 > gmax:
                            break
                        if b:
                            conv[g1 + g2] += factor * a * b
        for g in range(gmax + 1):
            rhs = 4 * conv[g]
            if n >= 2 and g >= 1:
                rhs += 4 * n * (3 * n - 2) * (3 * n - 4) * out(n - 2, g - 1)
            rhs += 4 * (3 * n - 1) * out(n - 1, g)
            if n == 1 and g == 1:
                rhs += 2
            value = Fraction(rhs) / (n + 1)
            if value.denominator != 1:
                raise NonIntegralEntry(f"tau({n},{g}) = {value} is not an integer")
            if value:
                out.entries[(n, g)] = int(value)
        out.n_max = n
        w.append([(3 * n + 2) * out(n, g) for g in range(max_genus(n) + 1)])
    return out


# -- exhaustive census --------------------------------------------------------

@dataclass
class GluingCensus:
    """Distinct rooted triangulations met while gluing 2n labelled triangles."""

    n: int
    counts: dict[int, int]
    representatives: dict[int, tuple[RootedMap, ...]]
    matchings: dict[int, int]
    disconnected: int

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def count(self, g: int) -> int:
        return self.counts.get(g, 0)

    def class_index(self, g: int) -> dict[tuple, int]:
        """Canonical key -> position in ``representatives[g]``."""
        return {canonical_key(m): i for i, m in enumerate(self.representatives.get(g, ()))}

    def dump(self) -> list[dict]:
        return [{"genus": g, "count": c} for g, c in sorted(self.counts.items())]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "counts": {str(g): c for g, c in self.counts.items()},
            "matchings": {str(g): c for g, c in self.matchings.items()},
            "disconnected": self.disconnected,
            "representatives": {
                str(g): [[list(m.sigma), list(m.alpha)] for m in reps]
                for g, reps in self.representatives.items()
            },
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "GluingCensus":
        reps = {
            int(g): tuple(build_map(s, a, 0) for s, a in lst)
            for g, lst in obj["representatives"].items()
        }
        return cls(
            n=obj["n"],
            counts={int(g): c for g, c in obj["counts"].items()},
            representatives=reps,
            matchings={int(g): c for g, c in obj["matchings"].items()},
            disconnected=obj["disconnected"],
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()))

    @classmethod
    def load(cls, path: str | Path) -> "GluingCensus":
        return cls.from_dict(json.loads(Path(path).read_text()))


def _matchings(darts: list[int]) -> Iterable[list[tuple[int, int]]]:
    if not darts:
        yield []
        return
    first = darts[0]
    for k in range(1, len(darts)):
        rest = darts[1:k] + darts[k + 1:]
        for m in _matchings(rest):
            yield [(first, darts[k])] + m


def _census_python(n: int, all_roots: bool) -> GluingCensus:
    n_darts = 6 * n
    phi = [d - d % 3 + (d % 3 + 1) % 3 for d in range(n_darts)]
    classes: dict[tuple, int] = {}
    matchings: dict[int, int] = {}
    disconnected = 0
    for pairs in _matchings(list(range(n_darts))):
        alpha = [0] * n_darts
        for a, b in pairs:
            alpha[a], alpha[b] = b, a
        sigma = [phi[a] for a in alpha]
        try:
            m = build_map(sigma, alpha, 0)
        except Disconnected:
            disconnected += 1
            continue
        g = m.genus
        matchings[g] = matchings.get(g, 0) + 1
        roots = range(n_darts) if all_roots else (0,)
        for r in roots:
            key = canonical_key(RootedMap(m.sigma, m.alpha, r))
            classes.setdefault(key, g)
    return _assemble(n, classes, matchings, disconnected)


def _census_compiled(n: int) -> GluingCensus:
    from ._kernels import census_kernel, unpack_key

    raw, per_genus, disconnected = census_kernel(2 * n)
    classes = {unpack_key(k, 6 * n): int(g) for k, g in raw.items()}
    matchings = {g: int(c) for g, c in enumerate(per_genus) if c}
    return _assemble(n, classes, matchings, int(disconnected))


def _assemble(n, classes, matchings, disconnected) -> GluingCensus:
    by_genus: dict[int, list] = {}
    for key, g in classes.items():
        by_genus.setdefault(g, []).append(key)
    reps = {}
    for g, keys in by_genus.items():
        keys.sort()
        reps[g] = tuple(build_map(s, a, 0) for s, a in keys)
    return GluingCensus(
        n=n,
        counts={g: len(v) for g, v in sorted(by_genus.items())},
        representatives=dict(sorted(reps.items())),
        matchings=dict(sorted(matchings.items())),
        disconnected=disconnected,
    )


def brute_force_census(n: int, method: str = "auto", all_roots: bool = False) -> GluingCensus:
    """Enumerate all (6n-1)!! gluings of 2n triangles and collect rooted classes.

    ``method`` is "python" (reference loop, practical for n <= 2), "compiled"
    or "auto".  ``all_roots`` makes the python loop root every gluing at every
    dart instead of dart 0 only.
    """
    if not 1 <= n <= 3:
        raise SizeTooLarge(f"exhaustive census only for 1 <= n <= 3, got {n}")
    if method == "auto":
        method = "python" if n == 1 else "compiled"
    if method == "python":
        return _census_python(n, all_roots)
    if method == "compiled":
        return _census_compiled(n)
    raise ValueError(f"unknown method {method!r}")


def calibrate_seed(c1: GluingCensus, c2: GluingCensus, c3: GluingCensus) -> TauTable:
    """Find the tau(0,0) cell that makes the recurrence reproduce the census.

    tau(1, .) and tau(2, .) come from the censuses; the n = 3 equation must
    give the same rational for every genus it constrains.  The seeded table
    is then rebuilt from scratch and compared with all three censuses.
    """
    census = {1: c1, 2: c2, 3: c3}
    for k, c in census.items():
        if c.n != k:
            raise InconsistentSeed(f"census for n={c.n} passed where n={k} expected")

    def lookup(seed):
        def tau(i, g):
            if i < 0 or g < 0:
                return 0
            if i == 0:
                return seed if g == 0 else 0
            return census[i].count(g)
        return tau

    candidates = set()
    for g in range(max_genus(3) + 2):
        r0 = recurrence_rhs(3, g, lookup(Fraction(0)))
        r1 = recurrence_rhs(3, g, lookup(Fraction(1)))
        r2 = recurrence_rhs(3, g, lookup(Fraction(2)))
        slope = r1 - r0
        if r2 - r0 != 2 * slope:
            raise InconsistentSeed("n=3 equation is not affine in the seed cell")
        target = 4 * c3.count(g)
        if slope == 0:
            if r0 != target:
                raise InconsistentSeed(f"genus {g} at n=3 cannot be matched by any seed")
            continue
        candidates.add(Fraction(target - r0) / slope)
    if len(candidates) != 1:
        raise InconsistentSeed(f"seed candidates disagree: {sorted(candidates)}")
    seed = candidates.pop()
    table = gj_extend(TauTable.seeded(seed), 3)
    for k, c in census.items():
        for g in range(max_genus(k) + 2):
            if table(k, g) != c.count(g):
                raise InconsistentSeed(
                    f"seed {seed} gives tau({k},{g}) = {table(k, g)}, census has {c.count(g)}"
                )
    return table


# -- asymptotic diagnostics ---------------------------------------------------

@dataclass(frozen=True)
class RatioRow:
    n: int
    g: int
    ratio: Fraction
    ratio_float: float
    lam: float
    error: float


def ratio_diagnostic(table: TauTable, theta: float, sizes: Iterable[int]) -> list[RatioRow]:
    """Compare tau(n-1, g)/tau(n, g) with lambda(g/n) for g = floor(theta n)."""
    from .asymptotics import lambda_of_theta

    sizes = list(sizes)
    if max(sizes) > table.n_max:
        raise TableTooSmall(f"table filled to n={table.n_max}, need {max(sizes)}")
    rows = []
    for n in sizes:
        g = floor(theta * n)
        if n < 2 or table(n, g) == 0:
            raise ValueError(f"ratio undefined at (n, g) = ({n}, {g})")
        ratio = Fraction(table(n - 1, g)) / table(n, g)
        lam = lambda_of_theta(g / n)
        r = float(ratio)
        rows.append(RatioRow(n, g, ratio, r, lam, abs(r - lam)))
    return rows


def matching_count(n: int) -> int:
    """(6n - 1)!!, the number of ways to glue 2n labelled triangles."""
    out = 1
    for k in range(6 * n - 1, 0, -2):
        out *= k
    return out
