"""Two-round (random challenge, then certificates) cograph recognition:
honest prover, per-node checks, depth-2 routing to a root referee that prunes
fingerprint twins, and graph reconstruction from the referee's log."""
from __future__ import annotations

from dataclasses import dataclass

from .engine import EncCtx, F
from .fields import (
    FieldConfig,
    FingerprintCollision,
    ValidVectorEntry,
    choose_prime,
    phi_eval,
    twin_merge,
)
from .graphs import Graph, GraphError, NetworkConfig, bcc_spanning_tree

ROLE_ROOT, ROLE_MID, ROLE_LEAF = 0, 1, 2

_COPY_SCHEMA = (
    F("id", "id"),
    F("bar_id", "pos"),
    F("a", "felem"),
    F("b", "felem"),
)

_CERT_SCHEMA = (
    F("role", "role2"),
    F("parent_id", "id", optional=True),
    F("child_id", "id", optional=True),
    F("root_id", "id"),
    F("bar_id", "pos"),
    F("a", "felem"),
    F("b", "felem"),
    F("child_copy", "group", optional=True, sub=_COPY_SCHEMA),
)

_BROADCAST_SCHEMA = (F("id", "id"),) + _CERT_SCHEMA


class MalformedLogError(ValueError):
    """Referee log references a survivor that is not present."""


@dataclass
class RefereeLog:
    """Ordered pruning records (removed bar-id, surviving bar-id, delta)."""

    records: list

    def as_rows(self):
        return [[r, s, d] for r, s, d in self.records]


def fresh_ids(cfg: NetworkConfig) -> dict:
    """Rank nodes by original identifier: node -> position in [1..n]."""
    order = sorted(cfg.graph.nodes, key=cfg.id_of)
    return {v: i for i, v in enumerate(order, start=1)}


def prove_cograph(cfg: NetworkConfig, t: int, fc: FieldConfig) -> dict:
    """Honest certificates; total on any connected input.  Without a join
    split (so no routing tree exists) the prover falls back to a degenerate
    star claim, which verification rejects."""
    g = cfg.graph
    bar = fresh_ids(cfg)
    a = {v: phi_eval(bar[v], t, fc) for v in g.nodes}
    b = {v: sum(a[u] for u in g.neighbors(v)) % fc.p for v in g.nodes}
    tree = bcc_spanning_tree(cfg)
    certs = {}
    if tree is None:
        root = min(g.nodes, key=cfg.id_of)
        for v in g.nodes:
            certs[v] = {
                "role": ROLE_ROOT if v == root else ROLE_MID,
                "parent_id": None if v == root else cfg.id_of(root),
                "child_id": None,
                "root_id": cfg.id_of(root),
                "bar_id": bar[v],
                "a": a[v],
                "b": b[v],
                "child_copy": None,
            }
        return certs
    for v in g.nodes:
        if v == tree.root:
            role, parent = ROLE_ROOT, None
        elif v in tree.children[tree.root]:
            role, parent = ROLE_MID, tree.root
        else:
            role, parent = ROLE_LEAF, tree.parent[v]
        child = tree.children[v][0] if role == ROLE_MID and tree.children[v] else None
        certs[v] = {
            "role": role,
            "parent_id": None if parent is None else cfg.id_of(parent),
            "child_id": None if child is None else cfg.id_of(child),
            "root_id": cfg.id_of(tree.root),
            "bar_id": bar[v],
            "a": a[v],
            "b": b[v],
            "child_copy": None
            if child is None
            else {"id": cfg.id_of(child), "bar_id": bar[child], "a": a[child], "b": b[child]},
        }
    return certs


def root_referee(entries, n_claimed: int, fc: FieldConfig):
    """Prune fingerprint twins from the assembled (id, bar_id, a, b) entries.

    Accepts iff ids are distinct, bar-ids are exactly [1..n_claimed], and
    repeated merging of the lexicographically first qualifying pair reaches a
    single entry."""
    log = RefereeLog([])
    ids = [e["id"] for e in entries]
    bars = [e["bar_id"] for e in entries]
    if len(set(ids)) != len(ids) or sorted(bars) != list(range(1, n_claimed + 1)):
        return False, log
    if len(entries) != n_claimed:
        return False, log
    vec = {e["bar_id"]: ValidVectorEntry(e["a"] % fc.p, e["b"] % fc.p) for e in entries}
    p = fc.p
    while len(vec) > 1:
        best = None
        alive = sorted(vec)
        for i, u in enumerate(alive):
            for v in alive[i + 1 :]:
                eu, ev = vec[u], vec[v]
                if eu.a == ev.a:
                    continue
                if eu.b == ev.b or (eu.a + eu.b) % p == (ev.a + ev.b) % p:
                    best = (u, v)
                    break
            if best:
                break
        if best is None:
            return False, log
        removed, survivor = best
        merged, delta = twin_merge(vec[survivor], vec[removed], fc)
        vec[survivor] = merged
        del vec[removed]
        log.records.append((removed, survivor, delta))
    return True, log


def reconstruct(log: RefereeLog, n: int) -> Graph:
    """Reverse-replay the referee log into a graph on bar-id labels."""
    if len(log.records) != n - 1:
        raise MalformedLogError(f"expected {n - 1} records, got {len(log.records)}")
    if n == 1:
        return Graph(1, [])
    last_survivor = log.records[-1][1]
    adj = {last_survivor: set()}
    for removed, survivor, delta in reversed(log.records):
        if survivor not in adj:
            raise MalformedLogError(f"record re-inserts {removed} at absent node {survivor}")
        if removed in adj:
            raise MalformedLogError(f"record re-inserts already-present node {removed}")
        adj[removed] = set(adj[survivor])
        for u in adj[survivor]:
            adj[u].add(removed)
        if delta:
            adj[removed].add(survivor)
            adj[survivor].add(removed)
    if sorted(adj) != list(range(1, n + 1)):
        raise MalformedLogError("bar-id labels do not cover [1..n]")
    return Graph(n, [(u, v) for u in adj for v in adj[u] if u < v])


def evaluate_predicate(log: RefereeLog, n: int, predicate) -> bool:
    """Run an arbitrary graph predicate over the reconstructed input."""
    return bool(predicate(reconstruct(log, n)))


def node_check_cograph(v, cert, t, nview, cfg, fc):
    """Local verification; returns (ok, tags, extras).  The root additionally
    runs the referee and exports its log."""
    p = fc.p
    tags = []
    if cert is None:
        return False, ["malformed-cert"], {}
    if any(bc is None for bc in nview.values()):
        return False, ["malformed-broadcast"], {}
    own_id = cfg.id_of(v)

    if cert["bar_id"] < 1 or cert["a"] != phi_eval(cert["bar_id"], t, fc):
        tags.append("own-vector")
    if cert["b"] != sum(phi_eval(bc["bar_id"], t, fc) if bc["bar_id"] >= 1 else 0
                        for bc in nview.values()) % p:
        tags.append("neighborhood-sum")

    by_id = {}
    for bc in nview.values():
        by_id.setdefault(bc["id"], bc)
    role = cert["role"]
    if role == ROLE_ROOT:
        if cert["parent_id"] is not None or cert["root_id"] != own_id:
            tags.append("tree-structure")
    else:
        parent = by_id.get(cert["parent_id"])
        if cert["parent_id"] is None or parent is None:
            tags.append("tree-structure")
        elif role == ROLE_MID:
            if parent["role"] != ROLE_ROOT or cert["root_id"] != cert["parent_id"]:
                tags.append("tree-structure")
            if (cert["child_id"] is None) != (cert["child_copy"] is None):
                tags.append("tree-structure")
            if cert["child_id"] is not None:
                child = by_id.get(cert["child_id"])
                if child is None or child["role"] != ROLE_LEAF:
                    tags.append("tree-structure")
                else:
                    copy = cert["child_copy"]
                    actual = {k: child[k] for k in ("id", "bar_id", "a", "b")}
                    if copy != actual:
                        tags.append("copy-mismatch")
        elif role == ROLE_LEAF:
            if cert["child_id"] is not None or cert["child_copy"] is not None:
                tags.append("tree-structure")
            if parent["role"] != ROLE_MID or parent["child_id"] != own_id or \
                    parent["root_id"] != cert["root_id"]:
                tags.append("tree-structure")

    extras = {}
    if role == ROLE_ROOT and not tags:
        entries = [{"id": own_id, "bar_id": cert["bar_id"], "a": cert["a"], "b": cert["b"]}]
        for bc in nview.values():
            if bc["role"] == ROLE_MID and bc["parent_id"] == own_id:
                entries.append({k: bc[k] for k in ("id", "bar_id", "a", "b")})
                if bc["child_copy"] is not None:
                    entries.append(dict(bc["child_copy"]))
        try:
            ok, log = root_referee(entries, len(entries), fc)
        except FingerprintCollision:
            ok, log = False, RefereeLog([])
        if not ok:
            tags.append("referee")
        extras["referee_log"] = log.as_rows()
        extras["n_claimed"] = len(entries)
    return not tags, tags, extras


class CographProtocol:
    """Protocol object consumed by the engine run loop."""

    name = "cograph"
    shape = ("A", "M")

    def field_config(self, cfg: NetworkConfig, prime_mode: str) -> FieldConfig:
        return choose_prime(cfg.graph.n, prime_mode)

    def enc_ctx(self, cfg: NetworkConfig, fc: FieldConfig) -> EncCtx:
        return EncCtx(cfg.graph.n, cfg.max_id, fc.p)

    def cert_schema(self, merlin_idx: int):
        return _CERT_SCHEMA

    def broadcast_schema(self):
        return _BROADCAST_SCHEMA

    def honest_round(self, cfg, fc, coins, merlin_idx):
        return prove_cograph(cfg, coins[0], fc)

    def make_broadcast(self, v, certs, coins, cfg, fc):
        cert = certs[0]
        if cert is None:
            return None
        return {"id": cfg.id_of(v), **cert}

    def decide(self, v, certs, coins, nview, cfg, fc):
        return node_check_cograph(v, certs[0], coins[0], nview, cfg, fc)


COGRAPH = CographProtocol()
