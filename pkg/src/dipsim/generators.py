"""Instance generators: random members, random non-members, and the
lower-bound gadget constructions used as protocol test inputs."""
from __future__ import annotations

import random
from itertools import combinations

from .graphs import (
    Graph,
    GraphError,
    NetworkConfig,
    PruningSequence,
    PruningStep,
    Role,
    is_cograph_oracle,
    is_dh_oracle,
)


def gen_random_cograph(n: int, seed) -> NetworkConfig:
    """Random cotree with a join at the root, so the result is connected."""
    if n < 1:
        raise GraphError("n must be >= 1")
    rng = random.Random(seed)
    edges = []

    def build(lo: int, hi: int, join: bool) -> None:
        # leaves lo..hi inclusive
        size = hi - lo + 1
        if size == 1:
            return
        mid = lo + rng.randint(1, size - 1) - 1
        build(lo, mid, not join)
        build(mid + 1, hi, not join)
        if join:
            edges.extend((u, v) for u in range(lo, mid + 1) for v in range(mid + 1, hi + 1))

    build(1, n, True)
    return NetworkConfig(Graph(n, edges))


_GROWTH_ROLES = (Role.PENDING, Role.FALSE_TWIN, Role.TRUE_TWIN)


def gen_random_dh(n: int, seed, weights=None):
    """Grow a distance-hereditary graph by random pending/twin attachments.

    Returns the network and the reverse growth order as a PruningSequence.
    A false-twin step is re-sampled whenever it would disconnect the graph
    (only possible when attaching to the initial isolated node).
    """
    if n < 1:
        raise GraphError("n must be >= 1")
    if weights is None:
        weights = (1.0, 1.0, 1.0)
    weights = tuple(float(w) for w in weights)
    if len(weights) != 3 or any(w < 0 for w in weights) or sum(weights) == 0:
        raise GraphError("weights must be three non-negative values, not all zero")
    rng = random.Random(seed)
    adj = [set() for _ in range(n + 1)]
    growth = []  # (new node, role, anchor)
    for v in range(2, n + 1):
        anchor = rng.randrange(1, v)
        while True:
            role = rng.choices(_GROWTH_ROLES, weights=weights)[0]
            if role is not Role.FALSE_TWIN or adj[anchor]:
                break
        if role is Role.PENDING:
            adj[v].add(anchor)
            adj[anchor].add(v)
        else:
            for u in adj[anchor]:
                adj[v].add(u)
                adj[u].add(v)
            if role is Role.TRUE_TWIN:
                adj[v].add(anchor)
                adj[anchor].add(v)
        growth.append((v, role, anchor))
    edges = [(u, v) for u in range(1, n + 1) for v in adj[u] if u < v]
    steps = tuple(PruningStep(v, role, anchor) for v, role, anchor in reversed(growth))
    return NetworkConfig(Graph(n, edges)), PruningSequence(steps, n)


def gen_nonmember(cls: str, n: int, seed) -> NetworkConfig:
    """Rejection-sample connected Erdos-Renyi graphs (edge prob 1/2) until the
    class oracle rejects."""
    minima = {"non-cograph": 4, "non-dh": 5}
    if cls not in minima:
        raise GraphError(f"unknown non-member class {cls!r}")
    if n < minima[cls]:
        raise GraphError(f"{cls} requires n >= {minima[cls]}")
    rng = random.Random(seed)
    oracle = is_cograph_oracle if cls == "non-cograph" else is_dh_oracle
    while True:
        edges = [e for e in combinations(range(1, n + 1), 2) if rng.random() < 0.5]
        g = Graph(n, edges)
        if g.is_connected() and not oracle(g):
            return NetworkConfig(g)


def _block_ids(n_label_space: int, base_offset: int, k: int):
    """Label blocks mirroring the gadget construction: member-graph labels in
    the low block, triangle labels in the middle block, hub labels on top."""
    big = n_label_space * n_label_space
    a = [base_offset + i for i in range(1, k + 1)]
    return a, big, 2 * big


def gen_yes_gadget(f: Graph, n_label_space: int | None = None, base_offset: int = 0) -> NetworkConfig:
    """Disjoint union of a cograph f and a triangle, all joined to one hub.

    A yes-instance for both classes; node labels are drawn from disjoint
    blocks so multiple gadgets compose without collision.
    """
    if not is_cograph_oracle(f):
        raise GraphError("gadget base graph must be a cograph")
    k = f.n
    n = k + 4
    if n_label_space is None:
        n_label_space = n
    b, c, d, x = k + 1, k + 2, k + 3, k + 4
    edges = list(f.edges())
    edges += [(b, c), (c, d), (b, d)]
    edges += [(x, v) for v in range(1, k + 4)]
    a_ids, mid, top = _block_ids(n_label_space, base_offset, k)
    ids = a_ids + [mid + base_offset + 1, mid + base_offset + 2, mid + base_offset + 3]
    ids.append(top + base_offset + 1)
    return NetworkConfig(Graph(n, edges), ids)


def gen_fooling_instance(f1: Graph, f2: Graph, n_label_space: int | None = None,
                         base_offset: int = 0) -> NetworkConfig:
    """Glue two yes-instance halves so the triangle edges close into an
    induced 6-cycle; a no-instance for both classes."""
    if not is_cograph_oracle(f1) or not is_cograph_oracle(f2):
        raise GraphError("fooling halves must be cographs")
    k1, k2 = f1.n, f2.n
    n = k1 + k2 + 8
    if n_label_space is None:
        n_label_space = n
    off2 = k1
    x = [None, k1 + k2 + 1, k1 + k2 + 2]
    b = [None, k1 + k2 + 3, k1 + k2 + 4]
    c = [None, k1 + k2 + 5, k1 + k2 + 6]
    d = [None, k1 + k2 + 7, k1 + k2 + 8]
    edges = list(f1.edges())
    edges += [(u + off2, v + off2) for u, v in f2.edges()]
    for i in (1, 2):
        j = 3 - i  # index "i+1" mod 2
        span = range(1, k1 + 1) if i == 1 else range(k1 + 1, k1 + k2 + 1)
        edges += [(x[i], v) for v in span]
        edges += [(x[i], b[i]), (x[i], c[i]), (x[i], d[j])]
        edges += [(b[i], c[j]), (c[i], d[j]), (d[i], b[j])]
    big = n_label_space * n_label_space
    ids = [base_offset + i for i in range(1, k1 + k2 + 1)]
    ids += [2 * big + base_offset + 1, 2 * big + base_offset + 2]
    ids += [big + base_offset + i for i in range(1, 7)]
    return NetworkConfig(Graph(n, edges), ids)
