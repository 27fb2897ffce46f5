"""Insertions, tentacles and the core of a map.

A 1-insertion on dart ``d`` (from p to q) opens the edge into a 2-gon and
fills it with a path p - x - q, giving two triangles and a degree-2 vertex x.
A k-insertion is k successive 1-insertions stacked on the same side.
Tentacles are written as even plane trees, stored as nested tuples: a tree
is the tuple of its children.  The tree carried by an edge is read from one
of its darts; read from the other dart it is mirrored (children reversed at
every level).

In (phi, alpha) form a 1-insertion on ``d`` with ``d' = alpha(d)`` adds six
darts and pairs them as

    alpha:  d-c1   d'-c2   d1-e1   d2-e2
    phi:    e1 -> d2 -> c1 -> e1     e2 -> d1 -> c2 -> e2

so x carries d1 and d2, the fat edges are (e1, d1) and (d2, e2), and the
edge d now reaches c1 while d' reaches c2.  The tree on ``d`` splits as
(A, B, *rest): A goes on e1, B on d2 and rest on c2.  Reducing undoes this
exactly and is what the core decomposition iterates.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import DegenerateTotalCollapse, InvalidEdge, MalformedWalk, OddChildCount
from .maps import RootedMap, canonical_key, from_phi, single_edge
from .metrics import bfs

Tree = tuple  # nested tuples: a tree is the tuple of its children


# -- even plane trees ---------------------------------------------------------

@dataclass(frozen=True)
class EvenPlaneTree:
    children: Tree = ()

    def __post_init__(self):
        object.__setattr__(self, "children", as_shape(self.children))
        check_even(self.children)

    @property
    def n_edges(self) -> int:
        return tree_edges(self.children)

    def mirror(self) -> "EvenPlaneTree":
        return EvenPlaneTree(mirror(self.children))


def as_shape(t) -> Tree:
    if isinstance(t, EvenPlaneTree):
        return t.children
    return tuple(as_shape(c) for c in t)


def check_even(t: Tree) -> None:
    stack = [t]
    while stack:
        node = stack.pop()
        if len(node) % 2:
            raise OddChildCount(f"node with {len(node)} children")
        stack.extend(node)


def tree_edges(t: Tree) -> int:
    return sum(1 + tree_edges(c) for c in t)


@lru_cache(maxsize=None)
def mirror(t: Tree) -> Tree:
    return tuple(mirror(c) for c in reversed(t))


def tree_depth(t: Tree) -> int:
    return 1 + max((tree_depth(c) for c in t), default=-1)


def _compositions_count(m_max: int) -> list[int]:
    """Even trees with 2m edges by recursion on the root's children (forest DP)."""
    limit = 2 * m_max
    tree = [0] * (limit + 1)
    tree[0] = 1
    # forest[k][e]: ordered forests of k trees with e edges in total
    for e in range(2, limit + 1, 2):
        forest = [[0] * (e + 1) for _ in range(e + 1)]
        forest[0][0] = 1
        for k in range(1, e + 1):
            for tot in range(e + 1):
                forest[k][tot] = sum(tree[s] * forest[k - 1][tot - s] for s in range(0, tot + 1, 2))
        tree[e] = sum(forest[2 * j][e - 2 * j] for j in range(1, e // 2 + 1))
    return [tree[2 * m] for m in range(m_max + 1)]


def count_even_trees_direct(m: int) -> int:
    return _compositions_count(m)[m]


def count_even_trees_walks(m: int) -> int:
    """Walks with m steps +2 and 2m+1 steps -1 that first reach -1 at the end."""
    length = 3 * m + 1
    table = {(0, 0): 1}  # (level, +2 steps used) -> prefixes, level kept >= 0
    for _ in range(length - 1):
        nxt: dict[tuple[int, int], int] = {}
        for (lvl, used), c in table.items():
            if used < m:
                key = (lvl + 2, used + 1)
                nxt[key] = nxt.get(key, 0) + c
            if lvl - 1 >= 0:
                key = (lvl - 1, used)
                nxt[key] = nxt.get(key, 0) + c
        table = nxt
    # the last step is the -1 from level 0
    return table.get((0, m), 0)


def count_even_trees_cycle_lemma(m: int) -> int:
    return math.comb(3 * m + 1, m) // (3 * m + 1)


def even_trees(m: int) -> list[Tree]:
    """All even plane trees with 2m edges (small m only)."""
    return [_decode_one(list(w)) for w in _walk_words(m)]


def _walk_words(m: int):
    def rec(prefix, lvl, plus, minus):
        if plus == 0 and minus == 0:
            yield tuple(prefix)
            return
        if plus:
            prefix.append(2)
            yield from rec(prefix, lvl + 2, plus - 1, minus)
            prefix.pop()
        if minus and (lvl - 1 >= 0 or (plus == 0 and minus == 1)):
            prefix.append(-1)
            yield from rec(prefix, lvl - 1, plus, minus - 1)
            prefix.pop()

    yield from rec([], 0, m, 2 * m + 1)


def random_even_tree(m: int, rng: np.random.Generator) -> Tree:
    """Uniform even tree with 2m edges: shuffle the steps, rotate by the cycle lemma."""
    steps = np.array([2] * m + [-1] * (2 * m + 1))
    rng.shuffle(steps)
    walk = np.cumsum(steps)
    start = int(np.argmin(walk)) + 1  # first time the minimum is reached
    rotated = np.concatenate([steps[start:], steps[:start]])
    return _decode_one(rotated.tolist())


# -- Lukasiewicz walks --------------------------------------------------------

@dataclass(frozen=True)
class LukasiewiczWalk:
    steps: tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.steps)

    @property
    def terminal(self) -> int:
        return sum(self.steps)

    def stays_above_terminal(self) -> bool:
        lvl = 0
        end = self.terminal
        for s in self.steps[:-1]:
            lvl += s
            if lvl <= end:
                return False
        return True


def _encode_tree(t: Tree, out: list[int]) -> None:
    stack = [t]
    while stack:
        node = stack.pop()
        out.extend([2] * (len(node) // 2))
        out.append(-1)
        stack.extend(reversed(node))


def lukasiewicz_encode(forest: Sequence) -> LukasiewiczWalk:
    """Preorder; a node with 2j children contributes j steps +2 then one -1."""
    out: list[int] = []
    for t in forest:
        shape = as_shape(t)
        check_even(shape)
        _encode_tree(shape, out)
    return LukasiewiczWalk(tuple(out))


def _decode_one(steps: list[int]) -> Tree:
    trees = _decode(steps)
    if len(trees) != 1:
        raise MalformedWalk(f"walk encodes {len(trees)} trees, expected one")
    return trees[0]


def _decode(steps: Sequence[int]) -> list[Tree]:
    arity = []
    plus = 0
    for s in steps:
        if s == 2:
            plus += 1
        elif s == -1:
            arity.append(2 * plus)
            plus = 0
        else:
            raise MalformedWalk(f"step {s} not in {{+2, -1}}")
    if plus:
        raise MalformedWalk("walk ends with a +2 step")
    trees = []
    pos = 0
    while pos < len(arity):
        # build one tree from the preorder arity list
        root: list = []
        stack = [(root, arity[pos])]
        pos += 1
        while stack:
            node, need = stack[-1]
            if len(node) == need:
                stack.pop()
                continue
            if pos >= len(arity):
                raise MalformedWalk("walk ends inside a tree")
            child: list = []
            node.append(child)
            stack.append((child, arity[pos]))
            pos += 1
        trees.append(_freeze(root))
    return trees


def _freeze(node: list) -> Tree:
    return tuple(_freeze(c) for c in node)


def lukasiewicz_decode(walk: LukasiewiczWalk | Sequence[int]) -> list[Tree]:
    steps = walk.steps if isinstance(walk, LukasiewiczWalk) else tuple(walk)
    forest = _decode(steps)
    w = LukasiewiczWalk(tuple(steps))
    if forest and (w.terminal != -len(forest) or not w.stays_above_terminal()):
        raise MalformedWalk(f"terminal level {w.terminal} does not match {len(forest)} trees")
    return forest


def ladder_word(ell: int) -> tuple[int, ...]:
    """Walk pattern of the ladder B_ell; length 3 ell - 2 with ell - 1 steps +2.

    Odd ell: (+2,+2,-1) repeated (ell-1)/2 times, then (3 ell - 1)/2 steps -1.
    Even ell: the last rung is a single 1-insertion, so a (+2,-1) block sits
    before the final descent.
    """
    if ell < 1:
        raise ValueError("ladder index must be >= 1")
    if ell % 2:
        return (2, 2, -1) * ((ell - 1) // 2) + (-1,) * ((3 * ell - 1) // 2)
    return (2, 2, -1) * ((ell - 2) // 2) + (2, -1) + (-1,) * ((3 * ell - 2) // 2)


def ladder_tree(ell: int) -> Tree:
    return _decode_one(list(ladder_word(ell)))


def _contains(seq: Sequence[int], pat: Sequence[int]) -> bool:
    n, k = len(seq), len(pat)
    pat = tuple(pat)
    return any(tuple(seq[i:i + k]) == pat for i in range(n - k + 1))


def ladder_height(t: Tree) -> int:
    """Largest ell >= 2 whose ladder word occurs in the walk of ``t``; 0 if none."""
    steps = lukasiewicz_encode([t]).steps
    best = 0
    for ell in range(2, (len(steps) + 2) // 3 + 1):
        if _contains(steps, ladder_word(ell)):
            best = ell
    return best


# -- surgery ------------------------------------------------------------------

class _Surgery:
    """Mutable (phi, alpha) arrays; deleted darts are marked dead."""

    def __init__(self, m: RootedMap):
        self.phi = list(m.phi)
        self.alpha = list(m.alpha)
        self.alive = [True] * m.n_darts
        self.root = m.root

    def _new(self, k: int) -> list[int]:
        start = len(self.phi)
        self.phi.extend([-1] * k)
        self.alpha.extend([-1] * k)
        self.alive.extend([True] * k)
        return list(range(start, start + k))

    def sigma(self, d: int) -> int:
        return self.phi[self.alpha[d]]

    def insert1(self, d: int) -> tuple[int, int, int, int, int, int]:
        dp = self.alpha[d]
        c1, c2, e1, e2, d1, d2 = self._new(6)
        a, p = self.alpha, self.phi
        a[d], a[c1] = c1, d
        a[dp], a[c2] = c2, dp
        a[d1], a[e1] = e1, d1
        a[d2], a[e2] = e2, d2
        p[e1], p[d2], p[c1] = d2, c1, e1
        p[e2], p[d1], p[c2] = d1, c2, e2
        return c1, c2, e1, e2, d1, d2

    def insert(self, d: int, tree: Tree) -> None:
        todo = [(d, tree)]
        while todo:
            dart, t = todo.pop()
            if not t:
                continue
            if len(t) % 2:
                raise OddChildCount(f"node with {len(t)} children")
            c1, c2, e1, e2, d1, d2 = self.insert1(dart)
            todo.append((c2, t[2:]))
            todo.append((d2, t[1]))
            todo.append((e1, t[0]))

    def subdivide(self, d: int) -> tuple[int, int, int]:
        """Star a triangular face from a new vertex; returns the spokes into it."""
        a = d
        b = self.phi[a]
        c = self.phi[b]
        if self.phi[c] != a:
            raise InvalidEdge(f"face of dart {d} is not a triangle")
        s0, s1, s2, t0, t1, t2 = self._new(6)
        al, p = self.alpha, self.phi
        for s, t in ((s0, t0), (s1, t1), (s2, t2)):
            al[s], al[t] = t, s
        # spoke s_i runs from corner i to the centre, t_i back
        p[a], p[s1], p[t0] = s1, t0, a
        p[b], p[s2], p[t1] = s2, t1, b
        p[c], p[s0], p[t2] = s0, t2, c
        return s0, s1, s2

    def to_map(self) -> tuple[RootedMap, dict[int, int]]:
        keep = [d for d, ok in enumerate(self.alive) if ok]
        new = {d: i for i, d in enumerate(keep)}
        phi = [new[self.phi[d]] for d in keep]
        alpha = [new[self.alpha[d]] for d in keep]
        return from_phi(phi, alpha, new[self.root]), new


def _check_dart(m: RootedMap, d: int) -> None:
    if not 0 <= d < m.n_darts:
        raise InvalidEdge(f"dart {d} not in map with {m.n_darts} darts")


def insert_tree(m: RootedMap, dart: int, tree) -> RootedMap:
    """Grow the tentacle ``tree`` on the edge of ``dart``, read from ``dart``."""
    _check_dart(m, dart)
    shape = as_shape(tree)
    check_even(shape)
    s = _Surgery(m)
    s.insert(dart, shape)
    return s.to_map()[0]


def insert_trees(m: RootedMap, plan: dict[int, Tree]) -> RootedMap:
    """Grow several tentacles at once; ``plan`` maps darts of ``m`` (distinct edges) to trees."""
    s = _Surgery(m)
    edges = set()
    for d, tree in plan.items():
        _check_dart(m, d)
        e = min(d, m.alpha[d])
        if e in edges:
            raise InvalidEdge(f"edge of dart {d} planned twice")
        edges.add(e)
        shape = as_shape(tree)
        check_even(shape)
        s.insert(d, shape)
    return s.to_map()[0]


def k_insert(m: RootedMap, dart: int, k: int, plan: Sequence | None = None) -> RootedMap:
    """k-insertion on ``dart``; ``plan`` optionally gives trees for the 2k fat edges."""
    if k < 1:
        raise ValueError("k must be >= 1")
    plan = [()] * (2 * k) if plan is None else [as_shape(t) for t in plan]
    if len(plan) != 2 * k:
        raise ValueError(f"plan needs {2 * k} trees, got {len(plan)}")
    return insert_tree(m, dart, tuple(plan))


def subdivide_face(m: RootedMap, dart: int) -> RootedMap:
    _check_dart(m, dart)
    s = _Surgery(m)
    s.subdivide(dart)
    return s.to_map()[0]


def tree_to_tentacle(tree) -> RootedMap:
    """The tentacle of ``tree`` grown on a lone edge; root dart 0 is the base."""
    return insert_tree(single_edge(), 0, tree)


def tentacle_to_tree(m: RootedMap) -> EvenPlaneTree:
    dec = core_decomposition(m)
    if dec.core is None or dec.core.n_edges != 1:
        raise ValueError("map is not a single tentacle on one edge")
    return EvenPlaneTree(dec.payload_from(dec.core.root))


B4 = ladder_tree(4)


def glue_pattern_a(m: RootedMap, dart: int) -> tuple[RootedMap, int]:
    """Glue the 10-face pattern with an inner ladder B_4 on the edge of ``dart``.

    A 1-insertion creates a vertex y; one of its two triangles is starred
    from a new vertex z and B_4 is grown on the spoke y -> z.  y and z end
    with odd degrees, which no internal tentacle vertex can have, so the B_4
    is a maximal tentacle.  Returns the map and the new index of the spoke.
    """
    _check_dart(m, dart)
    s = _Surgery(m)
    c1, c2, e1, e2, d1, d2 = s.insert1(dart)
    _, spoke, _ = s.subdivide(e2)
    s.insert(spoke, B4)
    out, new = s.to_map()
    return out, new[spoke]


def pattern_a() -> tuple[RootedMap, int]:
    return glue_pattern_a(single_edge(), 0)


# -- core decomposition -------------------------------------------------------

@dataclass(frozen=True)
class Tentacle:
    base: int            # core dart the tree is read from (core labels)
    base_original: int   # same dart in the input map
    tree: Tree
    faces: int


@dataclass(frozen=True)
class CoreDecomposition:
    source: RootedMap
    core: RootedMap | None
    core_darts: tuple[int, ...]          # core label -> input dart
    tentacles: tuple[Tentacle, ...]      # non-trivial ones
    base_of: tuple[int, ...]             # input dart -> input dart of its base edge
    root_displacement: int
    degenerate: bool = False

    @property
    def T_n(self) -> int:
        """Maximal tentacles, single edges included: one per core edge."""
        return 0 if self.core is None else self.core.n_edges

    @property
    def nontrivial(self) -> int:
        return len(self.tentacles)

    @property
    def M_n(self) -> int:
        return sum(t.faces for t in self.tentacles)

    def payload_from(self, core_dart: int) -> Tree:
        if self.core is None:
            return ()
        for t in self.tentacles:
            if t.base == core_dart:
                return t.tree
            if self.core.alpha[t.base] == core_dart:
                return mirror(t.tree)
        return ()

    def payloads(self) -> dict[int, Tree]:
        return {t.base: t.tree for t in self.tentacles}

    def heights(self) -> list[int]:
        """H(e) per input dart: distance from its origin to the base edge's ends."""
        m = self.source
        if self.core is None:
            return []
        vo = m.vertex_of
        alive = set(self.core_darts)
        cache: dict[int, list[int]] = {}
        out = []
        for d in range(m.n_darts):
            if d in alive:
                out.append(0)
                continue
            b = self.base_of[d]
            ends = (vo[b], m.head(b))
            for v in ends:
                if v not in cache:
                    cache[v] = bfs(m, v)
            out.append(min(cache[v][vo[d]] for v in ends))
        return out


def _reducible(s: _Surgery, d1: int):
    """Darts of a removable 1-insertion at the origin of d1, or None."""
    d2 = s.sigma(d1)
    if d2 == d1 or s.sigma(d2) != d1:
        return None
    e1, e2 = s.alpha[d1], s.alpha[d2]
    if e1 == d2:
        return None
    c1, c2 = s.phi[d2], s.phi[d1]
    if s.phi[c1] != e1 or s.phi[c2] != e2:
        return None
    if len({c1, c2, e1, e2, d1, d2}) != 6:
        return None
    return c1, c2, e1, e2, d1, d2


class _Payloads:
    def __init__(self, alpha):
        self.alpha = alpha
        self.store: dict[int, Tree] = {}

    def get(self, d: int) -> Tree:
        if d in self.store:
            return self.store[d]
        a = self.alpha[d]
        if a in self.store:
            return mirror(self.store[a])
        return ()

    def drop(self, d: int) -> None:
        self.store.pop(d, None)
        self.store.pop(self.alpha[d], None)


def core_decomposition(m: RootedMap, rng: np.random.Generator | None = None,
                       strict: bool = False) -> CoreDecomposition:
    """Undo 1-insertions until none is left; the remaining map is the core.

    ``rng`` shuffles the order in which removable vertices are taken (the
    result should not depend on it).  A map that collapses completely comes
    back with ``core=None`` and ``degenerate=True``, or raises when ``strict``.
    """
    s = _Surgery(m)
    pay = _Payloads(s.alpha)
    parent: dict[int, int] = {}
    degenerate = False

    def candidates():
        # one dart per degree-2 vertex
        seen = set()
        out = []
        for d in range(len(s.phi)):
            if s.alive[d] and d not in seen:
                d2 = s.sigma(d)
                seen.add(d)
                seen.add(d2)
                if s.sigma(d2) == d and d2 != d:
                    out.append(d)
        return out

    queue = candidates()
    while queue:
        if rng is not None:
            rng.shuffle(queue)
            queue = [(d if rng.random() < 0.5 else s.sigma(d)) for d in queue]
        progressed = False
        for d1 in queue:
            if not s.alive[d1]:
                continue
            red = _reducible(s, d1)
            if red is None:
                continue
            c1, c2, e1, e2, d1_, d2 = red
            c1r, c2r = s.alpha[c1], s.alpha[c2]
            if c1r == c2:
                degenerate = True
                continue
            merged = pay.get(c1r) + (pay.get(e1), pay.get(d2)) + pay.get(c2)
            for x in (c1, c2, e1, e2, d1_, d2):
                pay.drop(x)
            pay.drop(c1r)
            pay.drop(c2r)
            for x in (c1, c2, e1, e2, d1_, d2):
                s.alive[x] = False
                parent[x] = c1r
            s.alpha[c1r], s.alpha[c2r] = c2r, c1r
            pay.store[c1r] = merged
            progressed = True
        queue = candidates() if progressed else []

    n0 = m.n_darts
    alive = [d for d in range(len(s.phi)) if s.alive[d]]
    if not alive:
        degenerate = True

    def base(d):
        while d in parent:
            d = parent[d]
        return d

    base_of = tuple(base(d) for d in range(n0))
    if degenerate:
        # only two triangles glued along all three sides remain
        if strict:
            raise DegenerateTotalCollapse("map collapses entirely into tentacles")
        return CoreDecomposition(m, None, (), (), base_of, 0, True)

    root = s.root
    displacement = 0
    if not s.alive[root]:
        root = base_of[root]
        dist = bfs(m, m.vertex_of[m.root])
        displacement = min(dist[m.vertex_of[root]], dist[m.head(root)])
    s.root = root
    core, new = s.to_map()
    core_darts = tuple(alive)
    tentacles = []
    for d, tree in sorted(pay.store.items()):
        if tree:
            tentacles.append(Tentacle(new[d], d, tree, tree_edges(tree)))
    return CoreDecomposition(m, core, core_darts, tuple(tentacles), base_of, displacement, degenerate)


def oriented_payloads(dec: CoreDecomposition) -> dict[int, Tree]:
    """Trees keyed by the smaller input dart of each core edge, read from it."""
    out = {}
    for t in dec.tentacles:
        a = dec.core_darts[dec.core.alpha[t.base]]
        b = t.base_original
        out[min(a, b)] = t.tree if b < a else mirror(t.tree)
    return out


def reinsert(dec: CoreDecomposition) -> RootedMap:
    """Grow every recorded tentacle back onto the core."""
    return insert_trees(dec.core, {t.base: t.tree for t in dec.tentacles})


def max_ladder_height(m: RootedMap, dec: CoreDecomposition | None = None) -> tuple[int, Tentacle | None]:
    dec = dec or core_decomposition(m)
    best, witness = 0, None
    for t in dec.tentacles:
        for tree in (t.tree, mirror(t.tree)):
            h = ladder_height(tree)
            if h > best:
                best, witness = h, t
    return best, witness


def tentacle_height_profile(m: RootedMap, dec: CoreDecomposition | None = None) -> Counter:
    dec = dec or core_decomposition(m)
    return Counter(dec.heights())


def unrooted_key(m: RootedMap) -> tuple:
    return min(canonical_key(RootedMap(m.sigma, m.alpha, r)) for r in range(m.n_darts))


@dataclass
class TentacleStats:
    T_n: int
    nontrivial: int
    M_n: int
    ell_max: int
    max_height: int
    root_displacement: int
    heights: Counter = field(default_factory=Counter)


def tentacle_stats(m: RootedMap) -> TentacleStats:
    dec = core_decomposition(m)
    ell, _ = max_ladder_height(m, dec)
    h = Counter(dec.heights())
    return TentacleStats(dec.T_n, dec.nontrivial, dec.M_n, ell, max(h) if h else 0,
                         dec.root_displacement, h)
