"""Rooted oriented maps encoded by dart permutations.

A map on ``N`` darts is a pair ``(sigma, alpha)``: ``sigma`` rotates darts
counterclockwise around their origin vertex and ``alpha`` is the fixed-point
free involution pairing the two darts of an edge.  Faces are the cycles of

    phi = sigma o alpha,      i.e.  phi[d] == sigma[alpha[d]],

so ``phi[d]`` is the dart that follows ``d`` along its face; it starts where
``d`` ends.  Every module in the package uses this convention.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .errors import (
    AlphaFixedPoint,
    Disconnected,
    EmptyFaceSet,
    NonOrientableInconsistency,
    NotAPermutation,
    NotATriangulation,
)


def _orbits(perm: Sequence[int]) -> tuple[tuple[int, ...], ...]:
    seen = [False] * len(perm)
    out = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        cyc = []
        d = start
        while not seen[d]:
            seen[d] = True
            cyc.append(d)
            d = perm[d]
        out.append(tuple(cyc))
    return tuple(out)


def _orbit_index(orbits, n):
    idx = [0] * n
    for i, orb in enumerate(orbits):
        for d in orb:
            idx[d] = i
    return tuple(idx)


def _check_permutation(p, n, name):
    if len(p) != n:
        raise NotAPermutation(f"{name} has length {len(p)}, expected {n}")
    if sorted(p) != list(range(n)):
        raise NotAPermutation(f"{name} is not a permutation of 0..{n - 1}")


def _reachable(sigma, alpha, start):
    seen = {start}
    stack = [start]
    while stack:
        d = stack.pop()
        for e in (sigma[d], alpha[d]):
            if e not in seen:
                seen.add(e)
                stack.append(e)
    return seen


@dataclass(frozen=True)
class RootedMap:
    """Connected rooted map; validated on construction and immutable."""

    sigma: tuple[int, ...]
    alpha: tuple[int, ...]
    root: int = 0

    def __post_init__(self):
        n = len(self.sigma)
        if n == 0 or n % 2:
            raise NotAPermutation(f"need a positive even number of darts, got {n}")
        _check_permutation(self.sigma, n, "sigma")
        _check_permutation(self.alpha, n, "alpha")
        for d, e in enumerate(self.alpha):
            if e == d:
                raise AlphaFixedPoint(f"alpha fixes dart {d}")
            if self.alpha[e] != d:
                raise NotAPermutation("alpha is not an involution")
        if not 0 <= self.root < n:
            raise NotAPermutation(f"root {self.root} out of range")
        if len(_reachable(self.sigma, self.alpha, 0)) != n:
            raise Disconnected("sigma and alpha do not act transitively on darts")

    @property
    def n_darts(self) -> int:
        return len(self.sigma)

    @cached_property
    def phi(self) -> tuple[int, ...]:
        return tuple(self.sigma[a] for a in self.alpha)

    @cached_property
    def vertices(self) -> tuple[tuple[int, ...], ...]:
        return _orbits(self.sigma)

    @cached_property
    def faces(self) -> tuple[tuple[int, ...], ...]:
        return _orbits(self.phi)

    @cached_property
    def vertex_of(self) -> tuple[int, ...]:
        """Index of the origin vertex of each dart."""
        return _orbit_index(self.vertices, self.n_darts)

    @cached_property
    def face_of(self) -> tuple[int, ...]:
        return _orbit_index(self.faces, self.n_darts)

    @cached_property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return tuple((d, e) for d, e in enumerate(self.alpha) if d < e)

    def head(self, d: int) -> int:
        """Vertex at the end of dart ``d``."""
        return self.vertex_of[self.alpha[d]]

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return self.n_darts // 2

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    @property
    def genus(self) -> int:
        return genus(self)

    @property
    def is_triangulation(self) -> bool:
        return all(len(f) == 3 for f in self.faces)

    def to_dict(self) -> dict:
        return {
            "n_darts": self.n_darts,
            "sigma": list(self.sigma),
            "alpha": list(self.alpha),
            "root": self.root,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))


@dataclass(frozen=True)
class Triangulation(RootedMap):
    """Rooted map whose faces all have degree 3; ``2n`` faces, ``3n`` edges."""

    def __post_init__(self):
        super().__post_init__()
        if not self.is_triangulation:
            raise NotATriangulation("some face does not have degree 3")

    @property
    def n(self) -> int:
        return self.n_faces // 2


def build_map(sigma: Sequence[int], alpha: Sequence[int], root: int = 0) -> RootedMap:
    """Validate a rotation system and return it as a map.

    Returns a :class:`Triangulation` when every face is a triangle.
    """
    m = RootedMap(tuple(int(x) for x in sigma), tuple(int(x) for x in alpha), int(root))
    if m.is_triangulation:
        return Triangulation(m.sigma, m.alpha, m.root)
    return m


def from_phi(phi: Sequence[int], alpha: Sequence[int], root: int = 0) -> RootedMap:
    sigma = [0] * len(phi)
    for d, a in enumerate(alpha):
        # phi[d] = sigma[alpha[d]]  =>  sigma[a] = phi[d]
        sigma[a] = phi[d]
    return build_map(sigma, alpha, root)


def as_triangulation(m: RootedMap) -> Triangulation:
    if isinstance(m, Triangulation):
        return m
    return Triangulation(m.sigma, m.alpha, m.root)


def genus(m: RootedMap) -> int:
    chi = m.n_vertices - m.n_edges + m.n_faces
    g2 = 2 - chi
    if g2 < 0 or g2 % 2:
        raise NonOrientableInconsistency(f"Euler characteristic {chi} is not 2 - 2g")
    return g2 // 2


def relabel(m: RootedMap, perm: Sequence[int]) -> RootedMap:
    """Rename dart ``d`` to ``perm[d]``."""
    n = m.n_darts
    sigma = [0] * n
    alpha = [0] * n
    for d in range(n):
        sigma[perm[d]] = perm[m.sigma[d]]
        alpha[perm[d]] = perm[m.alpha[d]]
    return type(m)(tuple(sigma), tuple(alpha), perm[m.root])


def reroot(m: RootedMap, root: int) -> RootedMap:
    return type(m)(m.sigma, m.alpha, root)


def canonical_labels(sigma: Sequence[int], alpha: Sequence[int], root: int) -> list[int]:
    """Breadth-first dart labels from ``root``, sigma-successor before alpha-partner.

    Unreached darts keep label -1.
    """
    label = [-1] * len(sigma)
    label[root] = 0
    queue = [root]
    nxt = 1
    head = 0
    while head < len(queue):
        d = queue[head]
        head += 1
        for e in (sigma[d], alpha[d]):
            if label[e] < 0:
                label[e] = nxt
                nxt += 1
                queue.append(e)
    return label


def canonical_key(m: RootedMap) -> tuple[tuple[int, ...], tuple[int, ...]]:
    lab = canonical_labels(m.sigma, m.alpha, m.root)
    n = m.n_darts
    sigma = [0] * n
    alpha = [0] * n
    for d in range(n):
        sigma[lab[d]] = lab[m.sigma[d]]
        alpha[lab[d]] = lab[m.alpha[d]]
    return tuple(sigma), tuple(alpha)


def canonical_form(m: RootedMap) -> RootedMap:
    """Relabelled copy rooted at dart 0; equal iff the rooted maps are isomorphic."""
    sigma, alpha = canonical_key(m)
    return type(m)(sigma, alpha, 0)


def map_from_triangles(triangles: Iterable[Sequence[int]], root: int = 0) -> Triangulation:
    """Glue oriented vertex triples along matching directed edges.

    Each directed edge ``u -> v`` must occur exactly once, together with its
    reverse ``v -> u``.
    """
    tris = [tuple(t) for t in triangles]
    where: dict[tuple[int, int], int] = {}
    phi = []
    for t, (a, b, c) in enumerate(tris):
        for i, (u, v) in enumerate(((a, b), (b, c), (c, a))):
            if (u, v) in where:
                raise ValueError(f"directed edge {u}->{v} used twice")
            where[(u, v)] = 3 * t + i
            phi.append(3 * t + (i + 1) % 3)
    alpha = [0] * len(phi)
    for (u, v), d in where.items():
        if (v, u) not in where:
            raise ValueError(f"edge {u}->{v} has no reverse side")
        alpha[d] = where[(v, u)]
    return as_triangulation(from_phi(phi, alpha, root))


# -- reference maps ---------------------------------------------------------

def tetrahedron() -> Triangulation:
    return map_from_triangles([(0, 1, 2), (0, 2, 3), (0, 3, 1), (1, 3, 2)])


def torus_one_vertex() -> Triangulation:
    """Two triangles, one vertex, three loops: the smallest torus triangulation."""
    return as_triangulation(from_phi((1, 2, 0, 4, 5, 3), (3, 4, 5, 0, 1, 2)))


def single_edge() -> RootedMap:
    return build_map((0, 1), (1, 0))


def torus_grid_triangles(p: int, q: int) -> list[tuple[int, int, int]]:
    """Vertex triples of the periodic grid; vertex (i, j) is ``i * q + j``."""
    def v(i, j):
        return (i % p) * q + (j % q)

    tris = []
    for i in range(p):
        for j in range(q):
            tris.append((v(i, j), v(i + 1, j), v(i + 1, j + 1)))
            tris.append((v(i, j), v(i + 1, j + 1), v(i, j + 1)))
    return tris


def torus_grid(p: int = 3, q: int = 3) -> Triangulation:
    """Triangulated ``p x q`` grid with periodic boundary (needs p, q >= 3)."""
    return map_from_triangles(torus_grid_triangles(p, q))


def map_from_dict(obj: dict) -> RootedMap:
    if "n_darts" in obj and obj["n_darts"] != len(obj["sigma"]):
        raise NotAPermutation("n_darts does not match the permutation length")
    return build_map(obj["sigma"], obj["alpha"], obj.get("root", 0))


def map_from_json(text: str) -> RootedMap:
    return map_from_dict(json.loads(text))


# -- dual graph -------------------------------------------------------------

@dataclass(frozen=True)
class DualGraph:
    """Multigraph on faces; one edge per map edge, loops kept."""

    n_nodes: int
    edges: tuple[tuple[int, int], ...]

    def degrees(self) -> list[int]:
        deg = [0] * self.n_nodes
        for a, b in self.edges:
            deg[a] += 1
            deg[b] += 1
        return deg

    def neighbour_masks(self) -> list[int]:
        """Bitmask of distinct neighbours of each node, self-loops dropped."""
        masks = [0] * self.n_nodes
        for a, b in self.edges:
            if a != b:
                masks[a] |= 1 << b
                masks[b] |= 1 << a
        return masks


def dual_graph(m: RootedMap) -> DualGraph:
    fo = m.face_of
    return DualGraph(m.n_faces, tuple((fo[d], fo[e]) for d, e in m.edges))


# -- sub-maps ---------------------------------------------------------------

@dataclass(frozen=True)
class BorderedSubmap:
    """Faces of a parent map cut out along their boundary.

    The boundary darts (internal darts whose partner lies outside) get a
    fresh twin each; twins are closed up into external faces by turning
    around the parent vertex, which splits any vertex met twice by the
    boundary.  ``sigma``/``alpha`` act on local darts: internal darts first
    (in increasing parent order), then the twins.
    """

    parent: RootedMap
    faces: frozenset
    internal: tuple[int, ...]
    boundary: tuple[int, ...]
    sigma: tuple[int, ...]
    alpha: tuple[int, ...]
    external_faces: tuple[tuple[int, ...], ...]
    components: int
    genus: int
    boundary_simple: bool
    twin_vertex: tuple[int, ...] = field(repr=False)

    @property
    def boundary_length(self) -> int:
        return len(self.boundary)

    @property
    def n_internal_faces(self) -> int:
        return len(self.faces)

    @property
    def boundary_lengths(self) -> tuple[int, ...]:
        return tuple(len(f) for f in self.external_faces)

    def as_map(self) -> RootedMap:
        return build_map(self.sigma, self.alpha, 0)


def submap_of_faces(m: RootedMap, faces: Iterable[int]) -> BorderedSubmap:
    fset = frozenset(faces)
    if not fset:
        raise EmptyFaceSet("need at least one face")
    fo = m.face_of
    internal = tuple(d for d in range(m.n_darts) if fo[d] in fset)
    is_int = [False] * m.n_darts
    for d in internal:
        is_int[d] = True
    boundary = tuple(d for d in internal if not is_int[m.alpha[d]])
    local = {d: i for i, d in enumerate(internal)}
    twin = {d: len(internal) + i for i, d in enumerate(boundary)}
    size = len(internal) + len(boundary)

    alpha = [0] * size
    phi = [0] * size
    for d in internal:
        a = m.alpha[d]
        if is_int[a]:
            alpha[local[d]] = local[a]
        else:
            alpha[local[d]] = twin[d]
            alpha[twin[d]] = local[d]
        phi[local[d]] = local[m.phi[d]]
    for x in boundary:
        z = m.sigma[x]
        while not is_int[m.alpha[z]]:
            z = m.sigma[z]
        phi[twin[x]] = twin[m.alpha[z]]
    sigma = [phi[alpha[d]] for d in range(size)]

    # components and Euler characteristic per component
    comp = [-1] * size
    n_comp = 0
    for s in range(size):
        if comp[s] >= 0:
            continue
        comp[s] = n_comp
        stack = [s]
        while stack:
            d = stack.pop()
            for e in (sigma[d], alpha[d]):
                if comp[e] < 0:
                    comp[e] = n_comp
                    stack.append(e)
        n_comp += 1
    chi = [0] * n_comp
    v_orb = _orbits(sigma)
    for orb in v_orb:
        chi[comp[orb[0]]] += 1
    for orb in _orbits(phi):
        chi[comp[orb[0]]] += 1
    for d in range(size):
        if d < alpha[d]:
            chi[comp[d]] -= 1
    total = 0
    for c in chi:
        if (2 - c) % 2 or c > 2:
            raise NonOrientableInconsistency("sub-map Euler characteristic is inconsistent")
        total += (2 - c) // 2

    v_idx = _orbit_index(v_orb, size)
    ext = []
    simple = True
    seen = set()
    for x in boundary:
        if x in seen:
            continue
        cyc = []
        t = twin[x]
        while True:
            px = internal[alpha[t]]
            if px in seen:
                break
            seen.add(px)
            cyc.append(px)
            t = phi[t]
        ext.append(tuple(cyc))
        origins = [v_idx[twin[px]] for px in cyc]
        if len(set(origins)) != len(origins):
            simple = False
    return BorderedSubmap(
        parent=m,
        faces=fset,
        internal=internal,
        boundary=boundary,
        sigma=tuple(sigma),
        alpha=tuple(alpha),
        external_faces=tuple(ext),
        components=n_comp,
        genus=total,
        boundary_simple=simple,
        twin_vertex=tuple(v_idx[twin[x]] for x in boundary),
    )
