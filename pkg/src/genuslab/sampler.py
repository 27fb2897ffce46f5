"""Uniform rooted triangulations of fixed size and genus by rejection.

2n triangles are glued along a uniform perfect matching of their 6n sides
and the result is kept when it is connected with the requested genus.  Each
rooted triangulation is hit by the same number of (matching, root) pairs,
so the accepted maps are uniform; rooting at dart 0 is enough because
relabelling and rotating triangles moves any dart there.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Iterator, Sequence

import numpy as np

from ._kernels import evaluate_gluings
from .enumeration import TauTable, matching_count
from .errors import EmptyClass, Exhausted
from .maps import RootedMap, Triangulation, build_map

DISCONNECTED = "disconnected"
BATCH = 1024


def triangle_phi(n: int) -> np.ndarray:
    d = np.arange(6 * n)
    return d - d % 3 + (d % 3 + 1) % 3


def _alpha_from_order(order: np.ndarray) -> np.ndarray:
    alpha = np.empty_like(order)
    alpha[order[0::2]] = order[1::2]
    alpha[order[1::2]] = order[0::2]
    return alpha


def _build(alpha: np.ndarray, phi: np.ndarray) -> Triangulation:
    sigma = phi[alpha]
    return build_map(sigma.tolist(), alpha.tolist(), 0)


def sample_gluing(n: int, rng: np.random.Generator) -> RootedMap | str:
    """One uniform gluing of 2n triangles rooted at dart 0, or ``DISCONNECTED``."""
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    alpha = _alpha_from_order(rng.permutation(6 * n))
    connected, _ = evaluate_gluings(alpha[None, :], 2 * n)
    if not connected[0]:
        return DISCONNECTED
    return _build(alpha, triangle_phi(n))


@dataclass
class SamplerStats:
    attempts: int = 0
    accepted: int = 0
    rejected_disconnected: int = 0
    rejected_genus: int = 0
    seeds: tuple[int, ...] = ()

    def __add__(self, other: "SamplerStats") -> "SamplerStats":
        return SamplerStats(
            self.attempts + other.attempts,
            self.accepted + other.accepted,
            self.rejected_disconnected + other.rejected_disconnected,
            self.rejected_genus + other.rejected_genus,
            self.seeds + other.seeds,
        )

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.attempts if self.attempts else float("nan")

    def consistent(self) -> bool:
        return self.attempts == self.accepted + self.rejected_disconnected + self.rejected_genus

    def to_dict(self) -> dict:
        return {
            "attempts": self.attempts,
            "accepted": self.accepted,
            "rejected_disconnected": self.rejected_disconnected,
            "rejected_genus": self.rejected_genus,
            "seeds": list(self.seeds),
        }


@dataclass
class GluingStream:
    """Accepted gluings of genus ``g`` drawn from one generator, in order.

    Matchings are generated and screened ``BATCH`` at a time; rows are
    consumed strictly in order so the output depends only on the seed.
    """

    n: int
    g: int
    rng: np.random.Generator
    stats: SamplerStats = field(default_factory=SamplerStats)

    def __post_init__(self):
        if self.n < 1 or self.g < 0 or self.n < 2 * self.g - 1:
            raise EmptyClass(f"no triangulation with 2n={2 * self.n} faces and genus {self.g}")
        self._phi = triangle_phi(self.n)
        self._base = np.tile(np.arange(6 * self.n), (BATCH, 1))
        self._rows: np.ndarray | None = None
        self._ok: np.ndarray | None = None
        self._connected: np.ndarray | None = None
        self._pos = BATCH
        # V - E + F = 2 - 2g with E = 3n, F = 2n
        self._target_v = self.n + 2 - 2 * self.g

    def _refill(self):
        orders = self.rng.permuted(self._base, axis=1)
        alphas = np.empty_like(orders)
        rows = np.arange(BATCH)[:, None]
        alphas[rows, orders[:, 0::2]] = orders[:, 1::2]
        alphas[rows, orders[:, 1::2]] = orders[:, 0::2]
        connected, n_vertices = evaluate_gluings(alphas, 2 * self.n)
        self._rows = alphas
        self._connected = connected
        self._ok = connected & (n_vertices == self._target_v)
        self._pos = 0

    def next(self, max_attempts: int | None = None) -> Triangulation:
        spent = 0
        while True:
            if self._pos >= BATCH:
                self._refill()
            ok = self._ok[self._pos:]
            hits = np.flatnonzero(ok)
            if max_attempts is not None and (
                not len(hits) and spent + len(ok) >= max_attempts
                or len(hits) and spent + hits[0] + 1 > max_attempts
            ):
                take = max_attempts - spent
                self._account(self._pos, self._pos + take)
                self._pos += take
                raise Exhausted(f"no genus-{self.g} gluing in {max_attempts} attempts")
            if not len(hits):
                self._account(self._pos, BATCH)
                spent += BATCH - self._pos
                self._pos = BATCH
                continue
            stop = self._pos + int(hits[0]) + 1
            self._account(self._pos, stop)
            alpha = self._rows[stop - 1]
            self._pos = stop
            return _build(alpha, self._phi)

    def _account(self, lo: int, hi: int):
        conn = self._connected[lo:hi]
        ok = self._ok[lo:hi]
        self.stats.attempts += int(hi - lo)
        self.stats.accepted += int(ok.sum())
        self.stats.rejected_disconnected += int((~conn).sum())
        self.stats.rejected_genus += int((conn & ~ok).sum())

    def __iter__(self) -> Iterator[Triangulation]:
        while True:
            yield self.next()


def sample_uniform(n: int, g: int, rng: np.random.Generator,
                   max_attempts: int = 10**7, table: TauTable | None = None) -> Triangulation:
    if table is not None and n <= table.n_max and table(n, g) == 0:
        raise EmptyClass(f"tau({n},{g}) = 0")
    return GluingStream(n, g, rng).next(max_attempts)


def batch_sample(n: int, g: int, count: int, seeds: Sequence[int],
                 max_attempts: int | None = None) -> tuple[list[Triangulation], SamplerStats]:
    """``count`` maps from each seed's stream, concatenated in seed order."""
    maps: list[Triangulation] = []
    total = SamplerStats()
    for seed in seeds:
        stream = GluingStream(n, g, np.random.default_rng(seed))
        stream.stats.seeds = (int(seed),)
        for _ in range(count):
            maps.append(stream.next(max_attempts))
        total = total + stream.stats
    return maps, total


def predicted_acceptance(n: int, g: int, table: TauTable) -> float:
    """Probability that a uniform gluing is connected of genus g.

    Each rooted class is produced by (2n)! 3^{2n} / (6n) matchings.
    """
    hits = Fraction(table(n, g) * factorial(2 * n) * 3 ** (2 * n), 6 * n)
    return float(hits / matching_count(n))
