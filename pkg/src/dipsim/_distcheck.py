"""Bitmask kernel for the distance-preservation check on small graphs.

Compiled with numba because the exhaustive oracle cross-validation calls it
on every connected labeled graph up to n=7.
"""
from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _preserved(adj, n):  # pragma: no cover - exercised via distance_preserved
    full = (1 << n) - 1
    # union-of-neighborhoods table over all node subsets
    nbr = np.zeros(full + 1, np.int64)
    idx = np.zeros(full + 1, np.int64)
    for i in range(n):
        idx[1 << i] = i
    for m in range(1, full + 1):
        low = m & (-m)
        nbr[m] = nbr[m ^ low] | adj[idx[low]]

    # distances in the full graph
    dist = np.full((n, n), 127, np.int64)
    for u in range(n):
        dist[u, u] = 0
        seen = 1 << u
        frontier = seen
        d = 0
        while frontier != 0:
            d += 1
            nxt = nbr[frontier] & full & ~seen
            mm = nxt
            while mm != 0:
                low = mm & (-mm)
                dist[u, idx[low]] = d
                mm ^= low
            seen |= nxt
            frontier = nxt

    # every connected induced subgraph must reproduce those distances
    for sub in range(1, full + 1):
        if sub & (sub - 1) == 0:
            continue
        reach = sub & (-sub)
        while True:
            nxt = reach | (nbr[reach] & sub)
            if nxt == reach:
                break
            reach = nxt
        if reach != sub:
            continue
        srcs = sub
        while srcs != 0:
            lowu = srcs & (-srcs)
            u = idx[lowu]
            seen = lowu
            frontier = lowu
            d = 0
            while frontier != 0:
                d += 1
                nxt = nbr[frontier] & sub & ~seen
                mm = nxt
                while mm != 0:
                    low = mm & (-mm)
                    if dist[u, idx[low]] != d:
                        return False
                    mm ^= low
                seen |= nxt
                frontier = nxt
            srcs ^= lowu
    return True


def distance_preserved(g) -> bool:
    adj = np.array(g.masks()[1:], dtype=np.int64)
    return bool(_preserved(adj, g.n))
