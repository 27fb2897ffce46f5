"""Shared builders and hypothesis strategies."""

import numpy as np
from hypothesis import strategies as st

from genuslab.sampler import DISCONNECTED, sample_gluing


def random_triangulation(n: int, seed: int):
    """First connected uniform gluing of 2n triangles drawn from ``seed``."""
    rng = np.random.default_rng(seed)
    while True:
        m = sample_gluing(n, rng)
        if m is not DISCONNECTED:
            return m


@st.composite
def triangulations(draw, min_n=1, max_n=6):
    n = draw(st.integers(min_n, max_n))
    return random_triangulation(n, draw(st.integers(0, 2**32 - 1)))


def dart_between(tris, u, v):
    """Dart of the directed edge u -> v in a map built by map_from_triangles(tris)."""
    for t, (a, b, c) in enumerate(tris):
        for i, e in enumerate(((a, b), (b, c), (c, a))):
            if e == (u, v):
                return 3 * t + i
    raise KeyError((u, v))
