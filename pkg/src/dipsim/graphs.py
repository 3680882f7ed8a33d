"""Graph core: representation, class oracles, pruning sequences, join splits.

Nodes are internal indices 1..n.  Identifiers live in NetworkConfig.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from itertools import combinations


class GraphError(ValueError):
    """Invalid graph construction or invalid argument to a graph operation."""


class SizeLimitError(GraphError):
    """Input too large for an exponential-cost check."""


class Role(str, Enum):
    PENDING = "pending"
    FALSE_TWIN = "false-twin"
    TRUE_TWIN = "true-twin"


# preference used for deterministic tie-breaking between roles on the same
# (pruned, target) pair: twin roles beat pending so the last step of any
# sequence is a true twin of the survivor.
_ROLE_PREF = {Role.TRUE_TWIN: 0, Role.FALSE_TWIN: 1, Role.PENDING: 2}


class Graph:
    """Simple undirected graph on nodes 1..n."""

    __slots__ = ("n", "_adj", "_masks")

    def __init__(self, n: int, edges):
        if n < 1:
            raise GraphError("node count must be >= 1")
        adj = [set() for _ in range(n + 1)]
        seen = set()
        for e in edges:
            u, v = e
            if u == v:
                raise GraphError(f"self-loop at node {u}")
            if not (1 <= u <= n and 1 <= v <= n):
                raise GraphError(f"edge endpoint out of range: {e}")
            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise GraphError(f"duplicate edge {key}")
            seen.add(key)
            adj[u].add(v)
            adj[v].add(u)
        self.n = n
        self._adj = tuple(frozenset(s) for s in adj)
        self._masks = None

    @property
    def nodes(self):
        return range(1, self.n + 1)

    def neighbors(self, v: int) -> frozenset:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adj[u]

    def edges(self):
        return [(u, v) for u in self.nodes for v in sorted(self._adj[u]) if u < v]

    def num_edges(self) -> int:
        return sum(len(s) for s in self._adj) // 2

    def masks(self):
        """Adjacency bitmasks; bit (v-1) of masks[u] set iff u~v.  Index 0 unused."""
        if self._masks is None:
            self._masks = tuple(
                sum(1 << (v - 1) for v in self._adj[u]) if u else 0
                for u in range(self.n + 1)
            )
        return self._masks

    def is_connected(self) -> bool:
        masks = self.masks()
        full = (1 << self.n) - 1
        reach = 1
        while True:
            nxt = reach
            m = reach
            while m:
                low = m & -m
                nxt |= masks[low.bit_length()]
                m ^= low
            if nxt == reach:
                return reach == full
            reach = nxt

    def __eq__(self, other):
        return (
            isinstance(other, Graph) and self.n == other.n and self._adj == other._adj
        )

    def __hash__(self):
        return hash((self.n, self._adj))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.num_edges()})"


@dataclass(frozen=True)
class NetworkConfig:
    """A connected graph plus injective node identifiers bounded by n^c_id."""

    graph: Graph
    ids: tuple
    c_id: int = 2

    def __init__(self, graph: Graph, ids=None, c_id: int | None = None):
        n = graph.n
        if ids is None:
            ids = tuple(range(1, n + 1))
        else:
            ids = tuple(ids)
        if len(ids) != n:
            raise GraphError("ids must assign one identifier per node")
        if len(set(ids)) != n:
            raise GraphError("ids must be pairwise distinct")
        if any(i < 1 for i in ids):
            raise GraphError("ids must be positive")
        max_id = max(ids)
        if c_id is None:
            c_id = 2
            while n > 1 and max_id > n**c_id:
                c_id += 1
        elif n > 1 and max_id > n**c_id:
            raise GraphError(f"identifier {max_id} exceeds n^{c_id}")
        if n == 1 and max_id > 1:
            raise GraphError("single-node graph must use identifier 1")
        if not graph.is_connected():
            raise GraphError("protocols require a connected graph")
        object.__setattr__(self, "graph", graph)
        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "c_id", c_id)

    def id_of(self, v: int) -> int:
        return self.ids[v - 1]

    def node_of(self, ident: int) -> int:
        return self.ids.index(ident) + 1

    @property
    def max_id(self) -> int:
        return max(self.ids)


@dataclass(frozen=True)
class PruningStep:
    pruned: int
    role: Role
    target: int


@dataclass(frozen=True)
class PruningSequence:
    """n-1 elimination steps; pi maps each node to the step at which it is
    pruned, with the sole survivor at position n."""

    steps: tuple
    n: int

    @property
    def survivor(self) -> int:
        pruned = {s.pruned for s in self.steps}
        return next(v for v in range(1, self.n + 1) if v not in pruned)

    def pi(self) -> dict:
        out = {s.pruned: i for i, s in enumerate(self.steps, start=1)}
        out[self.survivor] = self.n
        return out


def validate_pruning_sequence(g: Graph, seq: PruningSequence) -> bool:
    """Replay the steps and confirm each role holds in the remaining graph."""
    if seq.n != g.n or len(seq.steps) != g.n - 1:
        return False
    if len({s.pruned for s in seq.steps}) != g.n - 1:
        return False
    adj = [set()] + [set(g.neighbors(v)) for v in g.nodes]
    alive = set(g.nodes)
    for step in seq.steps:
        v, u = step.pruned, step.target
        if v not in alive or u not in alive or u == v:
            return False
        if step.role is Role.PENDING:
            if adj[v] != {u}:
                return False
        elif step.role is Role.FALSE_TWIN:
            if adj[v] != adj[u]:
                return False
        else:  # true twin
            if adj[v] | {v} != adj[u] | {u}:
                return False
        for w in adj[v]:
            adj[w].discard(v)
        adj[v] = set()
        alive.remove(v)
    return len(alive) == 1


def induced_subgraph(g: Graph, s) -> Graph:
    """Subgraph induced by node set s, relabeled 1..|s| in sorted order."""
    s = sorted(set(s))
    if not s:
        raise GraphError("induced subgraph of an empty node set")
    if s[0] < 1 or s[-1] > g.n:
        raise GraphError("node set out of range")
    index = {v: i + 1 for i, v in enumerate(s)}
    edges = [
        (index[u], index[v]) for u, v in combinations(s, 2) if g.has_edge(u, v)
    ]
    return Graph(len(s), edges)


def _has_induced_p4(g: Graph) -> bool:
    masks = g.masks()
    for quad in combinations(range(g.n), 4):
        sub = sum(1 << b for b in quad)
        degs = sorted(bin(masks[b + 1] & sub).count("1") for b in quad)
        if degs == [1, 1, 2, 2]:
            return True
    return False


def _twin_eliminable(g: Graph) -> bool:
    masks = list(g.masks())
    alive = list(g.nodes)
    while len(alive) > 1:
        found = None
        for i, u in enumerate(alive):
            for v in alive[i + 1 :]:
                bu, bv = 1 << (u - 1), 1 << (v - 1)
                if masks[u] == masks[v] or masks[u] | bu == masks[v] | bv:
                    found = v
                    break
            if found:
                break
        if found is None:
            return False
        bv = 1 << (found - 1)
        for u in alive:
            masks[u] &= ~bv
        alive.remove(found)
    return True


def is_cograph_oracle(g: Graph) -> bool:
    """P4-freeness, computed by two independent routes that must agree."""
    by_search = not _has_induced_p4(g)
    by_twins = _twin_eliminable(g)
    if by_search != by_twins:
        raise AssertionError(
            f"cograph oracle disagreement on {g!r}: "
            f"P4-search={by_search} twin-elimination={by_twins}"
        )
    return by_search


def dh_definitional_check(g: Graph) -> bool:
    """Distance preservation in every connected induced subgraph (n <= 10)."""
    if g.n > 10:
        raise SizeLimitError("definitional check is limited to n <= 10")
    if not g.is_connected():
        raise GraphError("definitional check requires a connected graph")
    from . import _distcheck

    return _distcheck.distance_preserved(g)


def compute_pruning_sequence(g: Graph) -> PruningSequence | None:
    """Greedy pending/twin elimination.

    Tie-breaks: smallest pruned node, then smallest target, then true twin
    over false twin over pending.  Returns None iff the graph is not
    distance-hereditary.
    """
    if not g.is_connected():
        raise GraphError("pruning requires a connected graph")
    masks = list(g.masks())
    alive = list(g.nodes)
    steps = []
    while len(alive) > 1:
        chosen = None
        for v in alive:
            mv = masks[v]
            bv = 1 << (v - 1)
            best = None  # (target, role_pref, role)
            if mv and mv & (mv - 1) == 0:
                best = (mv.bit_length(), _ROLE_PREF[Role.PENDING], Role.PENDING)
            for u in alive:
                if u == v:
                    continue
                bu = 1 << (u - 1)
                if masks[u] | bu == mv | bv:
                    cand = (u, _ROLE_PREF[Role.TRUE_TWIN], Role.TRUE_TWIN)
                elif masks[u] == mv:
                    cand = (u, _ROLE_PREF[Role.FALSE_TWIN], Role.FALSE_TWIN)
                else:
                    continue
                if best is None or cand[:2] < best[:2]:
                    best = cand
            if best is not None:
                chosen = (v, best[2], best[0])
                break
        if chosen is None:
            return None
        v, role, target = chosen
        bv = 1 << (v - 1)
        for u in alive:
            masks[u] &= ~bv
        alive.remove(v)
        steps.append(PruningStep(v, role, target))
    return PruningSequence(tuple(steps), g.n)


def is_dh_oracle(g: Graph) -> bool:
    """Distance-hereditary membership via pruning; cross-checked against the
    definitional distance test for n <= 8."""
    if not g.is_connected():
        raise GraphError("distance-hereditary oracle requires a connected graph")
    by_pruning = compute_pruning_sequence(g) is not None
    if g.n <= 8:
        by_definition = dh_definitional_check(g)
        if by_definition != by_pruning:
            raise AssertionError(
                f"distance-hereditary oracle disagreement on {g!r}: "
                f"pruning={by_pruning} definitional={by_definition}"
            )
    return by_pruning


def join_split(g: Graph):
    """Bipartition (V1, V2) with every cross pair adjacent, or None.

    Exists iff the complement of g is disconnected; V1 is the complement
    component containing node 1.
    """
    if g.n < 2:
        raise GraphError("join split requires n >= 2")
    masks = g.masks()
    full = (1 << g.n) - 1
    comp = 1  # bit of node 1
    while True:
        nxt = comp
        m = comp
        while m:
            low = m & -m
            u = low.bit_length()
            nxt |= full & ~(masks[u] | (1 << (u - 1)))
            m ^= low
        if nxt == comp:
            break
        comp = nxt
    if comp == full:
        return None
    v1 = [v for v in g.nodes if comp >> (v - 1) & 1]
    v2 = [v for v in g.nodes if not comp >> (v - 1) & 1]
    return v1, v2


@dataclass(frozen=True)
class TwoLevelTree:
    """Depth-2 spanning tree where each depth-1 node has at most one child."""

    root: int
    parent: dict  # node -> parent node (root absent)
    children: dict  # node -> tuple of children

    def depth(self, v: int) -> int:
        d = 0
        while v in self.parent:
            v = self.parent[v]
            d += 1
        return d


def bcc_spanning_tree(cfg: NetworkConfig) -> TwoLevelTree | None:
    """Routing tree from a join split: the root sees every certificate either
    directly or as a copy carried by its depth-1 children."""
    g = cfg.graph
    if g.n == 1:
        return TwoLevelTree(1, {}, {1: ()})
    split = join_split(g)
    if split is None:
        return None
    v1, v2 = split
    key = lambda side: (-len(side), min(cfg.id_of(v) for v in side))
    g1, g2 = sorted((v1, v2), key=key)
    rho = min(g2, key=cfg.id_of)
    by_id = lambda v: cfg.id_of(v)
    depth1 = sorted(g1, key=by_id)
    rest = sorted((v for v in g2 if v != rho), key=by_id)
    parent = {v: rho for v in depth1}
    children = {rho: tuple(depth1)}
    for mid, leaf in zip(depth1, rest):
        parent[leaf] = mid
        children[mid] = (leaf,)
    for mid in depth1[len(rest) :]:
        children[mid] = ()
    for leaf in rest:
        children[leaf] = ()
    return TwoLevelTree(rho, parent, children)


# --- graph file format ----------------------------------------------------

def network_to_dict(cfg: NetworkConfig) -> dict:
    out = {"n": cfg.graph.n, "edges": [list(e) for e in cfg.graph.edges()]}
    if cfg.ids != tuple(range(1, cfg.graph.n + 1)):
        out["ids"] = list(cfg.ids)
    return out


def network_from_dict(data: dict) -> NetworkConfig:
    try:
        n = data["n"]
        edges = [tuple(e) for e in data["edges"]]
    except (KeyError, TypeError) as exc:
        raise GraphError(f"malformed graph object: {exc}") from exc
    g = Graph(n, edges)
    return NetworkConfig(g, data.get("ids"))


def save_network(cfg: NetworkConfig, path) -> None:
    with open(path, "w") as fh:
        json.dump(network_to_dict(cfg), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_network(path) -> NetworkConfig:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise GraphError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    return network_from_dict(data)


# --- small named graphs (used widely in tests and probes) -----------------

def path_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(1, n)])


def cycle_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(1, n)] + [(n, 1)])


def complete_graph(n: int) -> Graph:
    return Graph(n, list(combinations(range(1, n + 1), 2)))


def star_graph(leaves: int) -> Graph:
    return Graph(leaves + 1, [(1, i) for i in range(2, leaves + 2)])
