"""Separating cuts: isoperimetric profile, multicurves, Cheeger constant, isolated faces.

Face subsets and vertex subsets are bitmasks.  Exact routines sweep all
2^N masks with numpy; connectivity of every mask is obtained by growing the
lowest set bit through neighbour masks, all masks at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .errors import NotAClosedUnion
from .maps import RootedMap, dual_graph, submap_of_faces
from .metrics import bfs

EXACT_FACES = 16
EXACT_VERTICES = 16


# -- bitmask helpers ----------------------------------------------------------

def _popcount(masks: np.ndarray) -> np.ndarray:
    return np.bitwise_count(masks).astype(np.int64)


def connected_masks(nbr: Sequence[int], masks: np.ndarray) -> np.ndarray:
    """Boolean array: is each (nonempty) mask connected in the graph given by ``nbr``?"""
    masks = masks.astype(np.int64)
    reach = masks & -masks
    nbr_arr = np.asarray(nbr, dtype=np.int64)
    for _ in range(len(nbr)):
        grown = reach.copy()
        for i, nm in enumerate(nbr_arr):
            grown |= np.where((reach >> i) & 1, nm, 0)
        grown &= masks
        if np.array_equal(grown, reach):
            break
        reach = grown
    return (reach == masks) & (masks != 0)


def _is_connected(nbr: Sequence[int], mask: int) -> bool:
    if not mask:
        return False
    reach = mask & -mask
    while True:
        grown = reach
        x = reach
        while x:
            low = x & -x
            grown |= nbr[low.bit_length() - 1]
            x ^= low
        grown &= mask
        if grown == reach:
            return reach == mask
        reach = grown


def _bits(mask: int) -> tuple[int, ...]:
    return tuple(i for i in range(mask.bit_length()) if mask >> i & 1)


def _cut_sizes(edges: Sequence[tuple[int, int]], masks: np.ndarray) -> np.ndarray:
    cut = np.zeros(len(masks), dtype=np.int64)
    for a, b in edges:
        if a != b:
            cut += ((masks >> a) ^ (masks >> b)) & 1
    return cut


def _cut_size(edges, mask: int) -> int:
    return sum(1 for a, b in edges if (mask >> a & 1) != (mask >> b & 1))


# -- multicurves --------------------------------------------------------------

@dataclass(frozen=True)
class MulticurveCandidate:
    edges: frozenset
    cycles: tuple[tuple[int, ...], ...]
    valid: bool
    reason: str = ""

    @property
    def lengths(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.cycles)

    @property
    def total_length(self) -> int:
        return sum(self.lengths)

    @property
    def s(self) -> int:
        return len(self.cycles)


def _edge_id(m: RootedMap, d: int) -> int:
    return min(d, m.alpha[d])


def _split_at_repeats(m: RootedMap, walk: list[int]) -> list[list[int]]:
    """Cut a closed walk at repeated start vertices until each piece is simple."""
    out = []
    todo = [walk]
    vo = m.vertex_of
    while todo:
        w = todo.pop()
        first: dict[int, int] = {}
        for j, d in enumerate(w):
            v = vo[d]
            if v in first:
                i = first[v]
                todo.append(w[i:j])
                todo.append(w[:i] + w[j:])
                break
            first[v] = j
        else:
            out.append(w)
    out.sort(key=lambda c: min(c))
    return out


def _walks_from_edges(m: RootedMap, edge_ids: frozenset) -> list[list[int]]:
    """Closed walks pairing consecutive edge-ends in rotation order at every vertex."""
    in_set = [False] * m.n_darts
    for e in edge_ids:
        in_set[e] = in_set[m.alpha[e]] = True
    partner = {}
    for vert in m.vertices:
        ends = [d for d in vert if in_set[d]]
        if len(ends) % 2:
            raise NotAClosedUnion(f"vertex {m.vertex_of[vert[0]]} has odd degree {len(ends)}")
        start = ends.index(min(ends)) if ends else 0
        ends = ends[start:] + ends[:start]
        for a, b in zip(ends[0::2], ends[1::2]):
            partner[a], partner[b] = b, a
    walks = []
    used = set()
    for e in sorted(edge_ids):
        if e in used:
            continue
        walk = []
        d = e
        while d not in used:
            used.add(d)
            used.add(m.alpha[d])
            walk.append(d)
            d = partner[m.alpha[d]]
        walks.append(walk)
    return walks


def _boundary_walks(m: RootedMap, inside: Iterable[int]) -> list[list[int]]:
    """Boundary of a face set as closed walks of parent darts lying outside the set."""
    sub = submap_of_faces(m, inside)
    return [[m.alpha[px] for px in cyc] for cyc in sub.external_faces]


def _check_simple_closed(m: RootedMap, cyc: Sequence[int]) -> str:
    vo = m.vertex_of
    for i, d in enumerate(cyc):
        nxt = cyc[(i + 1) % len(cyc)]
        if m.head(d) != vo[nxt]:
            return "not a closed walk"
    starts = [vo[d] for d in cyc]
    if len(set(starts)) != len(starts):
        return "not simple"
    return ""


def _crossing(m: RootedMap, cycles: Sequence[Sequence[int]]) -> bool:
    owner = {}
    for k, cyc in enumerate(cycles):
        for d in cyc:
            owner[_edge_id(m, d)] = k
    for vert in m.vertices:
        ends = [(pos, _edge_id(m, d)) for pos, d in enumerate(vert) if _edge_id(m, d) in owner]
        if len(ends) < 4:
            continue
        for quad in combinations(ends, 4):
            e1, e2, e3, e4 = (e for _, e in quad)
            if len({e1, e2, e3, e4}) < 4:
                continue
            ci, cj = owner[e1], owner[e2]
            if ci != cj and owner[e3] == ci and owner[e4] == cj:
                return True
    return False


def multicurve_validate(m: RootedMap, edges: Iterable[int] | None = None, *,
                        cycles: Sequence[Sequence[int]] | None = None,
                        inside: Iterable[int] | None = None) -> MulticurveCandidate:
    """Check that a set of edges is a multicurve.

    Give one of: ``edges`` (darts, either side of each edge), explicit
    ``cycles`` (lists of darts, each dart leading to the start of the next),
    or ``inside`` (a face set whose boundary is the candidate).  Walks built
    from ``edges`` or ``inside`` are cut at repeated vertices; explicit
    cycles are judged as given.
    """
    if cycles is not None:
        walks = [list(c) for c in cycles]
        ids = [_edge_id(m, d) for c in walks for d in c]
        edge_set = frozenset(ids)
        if not walks or any(not c for c in walks):
            raise NotAClosedUnion("empty cycle")
        if len(ids) != len(edge_set):
            return MulticurveCandidate(edge_set, tuple(map(tuple, walks)), False, "cycles share an edge")
        pieces = walks
    else:
        if inside is not None:
            walks = _boundary_walks(m, inside)
            edge_set = frozenset(_edge_id(m, d) for w in walks for d in w)
        else:
            edge_set = frozenset(_edge_id(m, d) for d in edges or ())
            if not edge_set:
                raise NotAClosedUnion("empty edge set")
            walks = _walks_from_edges(m, edge_set)
        pieces = [p for w in walks for p in _split_at_repeats(m, w)]
    cyc = tuple(tuple(p) for p in pieces)
    for p in pieces:
        reason = _check_simple_closed(m, p)
        if reason == "not a closed walk":
            raise NotAClosedUnion("cycle does not close up")
        if reason:
            return MulticurveCandidate(edge_set, cyc, False, reason)
    if _crossing(m, pieces):
        return MulticurveCandidate(edge_set, cyc, False, "crossing")
    return MulticurveCandidate(edge_set, cyc, True)


# -- isoperimetric profile ----------------------------------------------------

@dataclass(frozen=True)
class ProfileEntry:
    k1: int
    cut_any: int
    witness: tuple[int, ...]
    cut_multicurve: int | None
    multicurve_witness: tuple[int, ...] | None


@dataclass(frozen=True)
class IsoperimetricProfile:
    n_faces: int
    method: str
    entries: dict[int, ProfileEntry] = field(default_factory=dict)

    def __getitem__(self, k1: int) -> int:
        return self.entries[k1].cut_any

    def __contains__(self, k1: int) -> bool:
        return k1 in self.entries

    def rows(self) -> list[dict]:
        return [
            {"k1": e.k1, "cut_any": e.cut_any, "cut_multicurve": e.cut_multicurve, "method": self.method}
            for e in sorted(self.entries.values(), key=lambda e: e.k1)
        ]


@dataclass(frozen=True)
class Bipartition:
    """Face mask with both sides face-connected, and its dual cut."""

    mask: int
    size: int
    cut: int


def separating_bipartitions(m: RootedMap) -> list[Bipartition]:
    """Every face set S (containing face 0 or not) with S and its complement connected."""
    dg = dual_graph(m)
    F = dg.n_nodes
    if F > 24:
        raise ValueError(f"exhaustive sweep refused for {F} faces")
    nbr = dg.neighbour_masks()
    full = (1 << F) - 1
    masks = np.arange(1, full, dtype=np.int64)
    ok = connected_masks(nbr, masks) & connected_masks(nbr, full ^ masks)
    masks = masks[ok]
    sizes = _popcount(masks)
    cuts = _cut_sizes(dg.edges, masks)
    return [Bipartition(int(a), int(b), int(c)) for a, b, c in zip(masks, sizes, cuts)]


def _certify(m: RootedMap, mask: int, cache: dict) -> bool:
    if mask not in cache:
        cache[mask] = multicurve_validate(m, inside=_bits(mask)).valid
    return cache[mask]


def _profile_from(m: RootedMap, parts: Iterable[Bipartition], method: str) -> IsoperimetricProfile:
    F = m.n_faces
    full = (1 << F) - 1
    by_k: dict[int, list[tuple[int, tuple[int, ...], int]]] = {}
    for p in parts:
        # the smaller side names k1; both sides count when sizes tie
        for mask, k in ((p.mask, p.size), (full ^ p.mask, F - p.size)):
            if 1 <= k <= F // 2:
                by_k.setdefault(k, []).append((p.cut, _bits(mask), mask))
    cache: dict[int, bool] = {}
    entries = {}
    for k, cands in by_k.items():
        cands.sort()
        cut, wit, _ = cands[0]
        mc = next(((c, w) for c, w, mk in cands if _certify(m, mk, cache)), (None, None))
        entries[k] = ProfileEntry(k, cut, wit, mc[0], mc[1])
    return IsoperimetricProfile(F, method, dict(sorted(entries.items())))


def _heuristic_parts(m: RootedMap, rng: np.random.Generator, runs: int) -> list[Bipartition]:
    dg = dual_graph(m)
    F = dg.n_nodes
    nbr = dg.neighbour_masks()
    full = (1 << F) - 1
    found: dict[int, Bipartition] = {}

    def offer(mask: int):
        mask &= full
        if mask in found or not 0 < mask < full:
            return
        if _is_connected(nbr, mask) and _is_connected(nbr, full ^ mask):
            found[mask] = Bipartition(mask, bin(mask).count("1"), _cut_size(dg.edges, mask))

    live = [(a, b) for a, b in dg.edges if a != b]
    # contraction: merge along random edges until two classes remain
    for _ in range(runs):
        parent = list(range(F))

        def root(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        classes = F
        for idx in rng.permutation(len(live)):
            if classes == 2:
                break
            a, b = root(live[idx][0]), root(live[idx][1])
            if a != b:
                parent[a] = b
                classes -= 1
        r0 = root(0)
        offer(sum(1 << f for f in range(F) if root(f) == r0))

    # complements of balls split into face-connected pieces
    for v in range(m.n_vertices):
        dist = bfs(m, v)
        for r in range(1, max(dist) + 2):
            ball = 0
            for d in range(m.n_darts):
                if dist[m.vertex_of[d]] <= r - 1:
                    ball |= 1 << m.face_of[d]
            offer(ball)
            rest = full ^ ball
            while rest:
                comp = rest & -rest
                while True:
                    grown = comp
                    for f in _bits(comp):
                        grown |= nbr[f]
                    grown &= rest
                    if grown == comp:
                        break
                    comp = grown
                offer(comp)
                rest ^= comp

    # random greedy growth, recording every prefix
    for _ in range(runs):
        f0 = int(rng.integers(F))
        mask = 1 << f0
        for _ in range(F // 2):
            offer(mask)
            reach = 0
            for f in _bits(mask):
                reach |= nbr[f]
            frontier = _bits(reach & ~mask & full)
            if not frontier:
                break
            mask |= 1 << int(frontier[rng.integers(len(frontier))])
        offer(mask)
    return list(found.values())


def isoperimetric_profile(m: RootedMap, exact_limit: int = EXACT_FACES,
                          rng: np.random.Generator | None = None,
                          runs: int | None = None, method: str = "auto") -> IsoperimetricProfile:
    """Smallest dual cut per size k1 of the smaller side.

    Exact when the face count is at most ``exact_limit`` (or method="exact");
    otherwise a heuristic whose values are only upper bounds.
    """
    if method == "auto":
        method = "exact" if m.n_faces <= exact_limit else "heuristic"
    if method == "exact":
        return _profile_from(m, separating_bipartitions(m), "exact")
    rng = rng if rng is not None else np.random.default_rng(0)
    runs = runs if runs is not None else 200 * max(1, m.n_faces // 2)
    return _profile_from(m, _heuristic_parts(m, rng, runs), "heuristic")


def profile_is_consistent(m: RootedMap, prof: IsoperimetricProfile) -> bool:
    """Witness sides connected and cut recount equal to the stored value."""
    dg = dual_graph(m)
    nbr = dg.neighbour_masks()
    full = (1 << dg.n_nodes) - 1
    for e in prof.entries.values():
        mask = sum(1 << f for f in e.witness)
        if len(e.witness) != e.k1 or not _is_connected(nbr, mask) or not _is_connected(nbr, full ^ mask):
            return False
        if _cut_size(dg.edges, mask) != e.cut_any:
            return False
    return True


# -- Cheeger constant ---------------------------------------------------------

@dataclass(frozen=True)
class CheegerResult:
    value: Fraction | float
    witness: tuple[int, ...]
    method: str

    @property
    def boundary(self) -> int:
        return 0 if not self.witness else int(self.value * len(self.witness))


def skeleton_edges(m: RootedMap) -> list[tuple[int, int]]:
    vo = m.vertex_of
    return [(vo[d], vo[e]) for d, e in m.edges]


def cheeger_graph(n: int, edges: Sequence[tuple[int, int]], exact_limit: int = EXACT_VERTICES,
                  rng: np.random.Generator | None = None) -> CheegerResult:
    """min |edges leaving V1| / |V1| over 1 <= |V1| <= n/2; edges count with multiplicity."""
    if n < 2:
        return CheegerResult(math.inf, (), "exact")
    nbr = [0] * n
    for a, b in edges:
        if a != b:
            nbr[a] |= 1 << b
            nbr[b] |= 1 << a
    if n <= exact_limit:
        masks = np.arange(1, 1 << n, dtype=np.int64)
        sizes = _popcount(masks)
        keep = sizes <= n // 2
        masks, sizes = masks[keep], sizes[keep]
        keep = connected_masks(nbr, masks)
        masks, sizes = masks[keep], sizes[keep]
        cuts = _cut_sizes(edges, masks)
        best = None
        for mask, k, c in zip(masks.tolist(), sizes.tolist(), cuts.tolist()):
            key = (Fraction(c, k), _bits(mask))
            if best is None or key < best:
                best = key
        return CheegerResult(best[0], best[1], "exact")

    # heuristic: BFS balls truncated at n/2, from every vertex
    adj = [_bits(x) for x in nbr]
    best = None
    for v in range(n):
        order = [v]
        seen = {v}
        i = 0
        while i < len(order) and len(order) < n // 2:
            for w in adj[order[i]]:
                if w not in seen and len(order) < n // 2:
                    seen.add(w)
                    order.append(w)
            i += 1
        mask = 0
        for k, u in enumerate(order, start=1):
            mask |= 1 << u
            key = (Fraction(_cut_size(edges, mask), k), tuple(sorted(order[:k])))
            if best is None or key < best:
                best = key
    return CheegerResult(best[0], best[1], "heuristic")


def cheeger(m: RootedMap, exact_limit: int = EXACT_VERTICES) -> CheegerResult:
    return cheeger_graph(m.n_vertices, skeleton_edges(m), exact_limit)


# -- isolated faces -----------------------------------------------------------

@dataclass(frozen=True)
class IsolatedFaces:
    count: int
    faces: tuple[int, ...]
    witnesses: dict = field(repr=False, compare=False)
    method: str = "exact"


def isolated_faces(m: RootedMap, eps: float, exact_limit: int = EXACT_FACES) -> IsolatedFaces:
    """Faces cut off by a certified multicurve of length <= eps * min(k1, k2).

    The far side must have at least ceil(sqrt(n)) faces, n being half the
    face count.  Separations are the exact bipartitions, so the count is
    exact only within ``exact_limit``.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    F = m.n_faces
    if F > exact_limit:
        raise ValueError(f"isolated_faces is exact only up to {exact_limit} faces")
    need = math.ceil(math.sqrt(F / 2))
    sides = []
    for p in separating_bipartitions(m):
        k1, k2 = p.size, F - p.size
        if k2 >= need and p.cut <= eps * min(k1, k2):
            sides.append((p.cut, p.mask))
    sides.sort()
    cache: dict[int, bool] = {}
    witness: dict[int, tuple[int, ...]] = {}
    for _, mask in sides:
        fresh = [f for f in _bits(mask) if f not in witness]
        if fresh and _certify(m, mask, cache):
            for f in fresh:
                witness[f] = _bits(mask)
    return IsolatedFaces(len(witness), tuple(sorted(witness)), witness, "exact")
