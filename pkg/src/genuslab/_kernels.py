"""Compiled inner loops: exhaustive gluing census and batched gluing checks.

Darts ``3t, 3t+1, 3t+2`` form triangle ``t`` with ``phi(3t+i) = 3t+(i+1)%3``;
a gluing is a matching ``alpha`` and ``sigma = phi o alpha``.
"""

import numpy as np
from numba import njit, types
from numba.typed import Dict

_KEY = types.UniTuple(types.int64, 4)


@njit(cache=True)
def _phi(d):
    return d - d % 3 + (d % 3 + 1) % 3


@njit(cache=True)
def _count_cycles(perm, n, mark):
    for i in range(n):
        mark[i] = 0
    c = 0
    for s in range(n):
        if mark[s]:
            continue
        c += 1
        d = s
        while not mark[d]:
            mark[d] = 1
            d = perm[d]
    return c


@njit(cache=True)
def _canonical(sigma, alpha, n, label, queue, cs, ca):
    """Root-0 BFS labels (sigma before alpha); returns number of darts reached."""
    for i in range(n):
        label[i] = -1
    label[0] = 0
    queue[0] = 0
    nxt = 1
    head = 0
    while head < nxt:
        d = queue[head]
        head += 1
        e = sigma[d]
        if label[e] < 0:
            label[e] = nxt
            queue[nxt] = e
            nxt += 1
        e = alpha[d]
        if label[e] < 0:
            label[e] = nxt
            queue[nxt] = e
            nxt += 1
    if nxt < n:
        return nxt
    for d in range(n):
        cs[label[d]] = label[sigma[d]]
        ca[label[d]] = label[alpha[d]]
    return nxt


@njit(cache=True)
def _pack(arr, lo, hi):
    k = 0
    for i in range(hi - 1, lo - 1, -1):
        k = k * 32 + arr[i]
    return k


@njit(cache=True)
def census_kernel(n_tri):
    """Enumerate every perfect matching of ``3*n_tri`` darts.

    Returns (classes: key -> genus, connected matchings per genus,
    number of disconnected matchings).  Keys pack the canonical sigma and
    alpha of the gluing rooted at dart 0, five bits per entry.

    Rooting at dart 0 alone loses nothing: relabelling triangles and
    rotating them commutes with phi and moves any dart to dart 0, so every
    rooted class already shows up with root 0.
    """
    n = 3 * n_tri
    half = n // 2
    mid = (n + 1) // 2
    alpha = np.full(n, -1, np.int64)
    sigma = np.empty(n, np.int64)
    label = np.empty(n, np.int64)
    queue = np.empty(n, np.int64)
    cs = np.empty(n, np.int64)
    ca = np.empty(n, np.int64)
    mark = np.empty(n, np.int64)
    i_at = np.zeros(half, np.int64)
    j_at = np.zeros(half, np.int64)
    classes = Dict.empty(key_type=_KEY, value_type=types.int64)
    per_genus = np.zeros(n_tri + 2, np.int64)
    disconnected = 0

    level = 0
    i_at[0] = 0
    j_at[0] = 0
    while level >= 0:
        i = i_at[level]
        j = j_at[level]
        if j > i:
            alpha[i] = -1
            alpha[j] = -1
        j += 1
        if j <= i:
            j = i + 1
        while j < n and alpha[j] >= 0:
            j += 1
        if j >= n:
            level -= 1
            continue
        alpha[i] = j
        alpha[j] = i
        j_at[level] = j
        if level < half - 1:
            level += 1
            k = i + 1
            while alpha[k] >= 0:
                k += 1
            i_at[level] = k
            j_at[level] = k
            continue
        # complete matching
        for d in range(n):
            sigma[d] = _phi(alpha[d])
        reached = _canonical(sigma, alpha, n, label, queue, cs, ca)
        if reached < n:
            disconnected += 1
            continue
        v = _count_cycles(sigma, n, mark)
        # V - E + F = 2 - 2g with E = n/2 and F = n_tri
        g = (2 - v + half - n_tri) // 2
        per_genus[g] += 1
        key = (_pack(cs, 0, mid), _pack(cs, mid, n), _pack(ca, 0, mid), _pack(ca, mid, n))
        if key not in classes:
            classes[key] = g
    return classes, per_genus, disconnected


@njit(cache=True)
def evaluate_gluings(alphas, n_tri):
    """Connectivity and vertex count for each row of a matching matrix."""
    rows, n = alphas.shape
    connected = np.zeros(rows, np.bool_)
    n_vertices = np.zeros(rows, np.int64)
    sigma = np.empty(n, np.int64)
    seen = np.empty(n, np.int64)
    stack = np.empty(n, np.int64)
    mark = np.empty(n, np.int64)
    for r in range(rows):
        alpha = alphas[r]
        for d in range(n):
            sigma[d] = _phi(alpha[d])
            seen[d] = 0
        seen[0] = 1
        stack[0] = 0
        top = 1
        count = 1
        while top > 0:
            top -= 1
            d = stack[top]
            e = sigma[d]
            if not seen[e]:
                seen[e] = 1
                stack[top] = e
                top += 1
                count += 1
            e = alpha[d]
            if not seen[e]:
                seen[e] = 1
                stack[top] = e
                top += 1
                count += 1
        if count == n:
            connected[r] = True
            n_vertices[r] = _count_cycles(sigma, n, mark)
    return connected, n_vertices


def unpack_key(key, n):
    """Inverse of the census key packing: (sigma, alpha) tuples."""
    mid = (n + 1) // 2

    def unpack(k, length):
        out = []
        for _ in range(length):
            out.append(k % 32)
            k //= 32
        return out

    sigma = unpack(key[0], mid) + unpack(key[1], n - mid)
    alpha = unpack(key[2], mid) + unpack(key[3], n - mid)
    return tuple(sigma), tuple(alpha)
