"""Graph distances on the vertex skeleton, balls of faces and their growth."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .maps import RootedMap, submap_of_faces


@lru_cache(maxsize=256)
def adjacency(m: RootedMap) -> tuple[tuple[int, ...], ...]:
    """Neighbour lists of the skeleton (loops and multi-edges collapsed)."""
    nbrs = [set() for _ in range(m.n_vertices)]
    vo = m.vertex_of
    for d in range(m.n_darts):
        u, w = vo[d], m.head(d)
        if u != w:
            nbrs[u].add(w)
    return tuple(tuple(sorted(s)) for s in nbrs)


def bfs(m: RootedMap, v: int) -> list[int]:
    adj = adjacency(m)
    dist = [-1] * len(adj)
    dist[v] = 0
    queue = deque([v])
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if dist[w] < 0:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def distance_matrix(m: RootedMap) -> np.ndarray:
    return np.array([bfs(m, v) for v in range(m.n_vertices)], dtype=np.int64)


def diameter(m: RootedMap) -> int:
    return int(distance_matrix(m).max())


@dataclass(frozen=True)
class BallSummary:
    center: int
    radius: int
    volume: int
    perimeter: int
    ball_genus: int
    faces: frozenset = field(repr=False, compare=False)


def ball_faces(m: RootedMap, v: int, r: int, dist: list[int] | None = None) -> frozenset:
    """Faces with a vertex at distance at most r - 1 from v."""
    if r < 1:
        raise ValueError(f"ball radius must be >= 1, got {r}")
    dist = bfs(m, v) if dist is None else dist
    vo = m.vertex_of
    return frozenset(m.face_of[d] for d in range(m.n_darts) if dist[vo[d]] <= r - 1)


def ball(m: RootedMap, v: int, r: int, dist: list[int] | None = None) -> BallSummary:
    faces = ball_faces(m, v, r, dist)
    sub = submap_of_faces(m, faces)
    return BallSummary(v, r, len(faces), sub.boundary_length, sub.genus, faces)


def ball_sequence(m: RootedMap, v: int) -> list[BallSummary]:
    """B_1(v), B_2(v), ... up to and including the first ball covering every face."""
    dist = bfs(m, v)
    out = []
    r = 1
    while True:
        b = ball(m, v, r, dist)
        out.append(b)
        if b.volume == m.n_faces:
            return out
        r += 1


@dataclass(frozen=True)
class ExpansionViolation:
    center: int
    radius: int
    volume: int
    next_volume: int
    perimeter: int


def check_ball_expansion(m: RootedMap) -> list[ExpansionViolation]:
    """All (v, r) with B_r(v) != t and 3 (|B_{r+1}| - |B_r|) < |boundary of B_r|."""
    bad = []
    for v in range(m.n_vertices):
        seq = ball_sequence(m, v)
        for cur, nxt in zip(seq, seq[1:]):
            if 3 * (nxt.volume - cur.volume) < cur.perimeter:
                bad.append(ExpansionViolation(v, cur.radius, cur.volume, nxt.volume, cur.perimeter))
    return bad


@dataclass(frozen=True)
class DistanceSample:
    x: int
    y: int
    u: int
    v: int
    d_xy: int
    d_uv: int

    @property
    def gap(self) -> int:
        return self.d_xy - self.d_uv


def typical_distance_sample(m: RootedMap, rng: np.random.Generator, pairs: int,
                            dist: np.ndarray | None = None) -> list[DistanceSample]:
    dist = distance_matrix(m) if dist is None else dist
    quads = rng.integers(0, m.n_vertices, size=(pairs, 4))
    return [
        DistanceSample(int(x), int(y), int(u), int(v), int(dist[x, y]), int(dist[u, v]))
        for x, y, u, v in quads
    ]


def planarity_radius(m: RootedMap, v: int) -> int:
    """Largest r with B_1(v), ..., B_r(v) all planar.

    0 when B_1 already has genus; capped at the radius where the ball first
    covers the map.
    """
    r = 0
    for b in ball_sequence(m, v):
        if b.ball_genus > 0:
            return r
        r = b.radius
    return r
