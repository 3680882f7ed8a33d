"""Three-round (certificates, random challenge, certificates)
distance-hereditary recognition: per-node pruning positions and roles,
fingerprint vectors, predecessor replay at designated verifiers, and the
position-permutation sub-protocol."""
from __future__ import annotations

from functools import lru_cache

from .engine import EncCtx, F
from .fields import (
    FieldConfig,
    FingerprintCollision,
    ValidVectorEntry,
    choose_prime,
    twin_merge,
)
from .graphs import (
    NetworkConfig,
    PruningSequence,
    PruningStep,
    Role,
    compute_pruning_sequence,
)

ROLE_PENDING, ROLE_FALSE_TWIN, ROLE_TRUE_TWIN, ROLE_FINAL = 0, 1, 2, 3

_ROLE_CODE = {Role.PENDING: ROLE_PENDING, Role.FALSE_TWIN: ROLE_FALSE_TWIN,
              Role.TRUE_TWIN: ROLE_TRUE_TWIN}

_MLEAF_SCHEMA = (F("id", "id"), F("pi", "pos"))

_R1_SCHEMA = (
    F("pi", "pos"),
    F("ant_id", "id", optional=True),
    F("role", "role4"),
    F("pending_target", "id", optional=True),
    F("twin_id", "id", optional=True),
    F("ant_of_twin_id", "id", optional=True),
    F("twins_count", "count"),
    F("pending_count", "count"),
    F("m_leaf", "group", optional=True, sub=_MLEAF_SCHEMA),
    F("co_twin_id", "id", optional=True),
    F("between_count", "count", optional=True),
    F("first_twin_pi", "pos", optional=True),
    F("pre_twin_pending_count", "count"),
    F("designated_verifier_flag", "bit"),
)

_PERM_SCHEMA = (
    F("tree_parent", "id", optional=True),
    F("dist", "count"),
    F("subtree_count", "count"),
    F("subtree_sum", "felem"),
    F("n_claimed", "count"),
)

_R3_SCHEMA = (
    F("a0", "felem"),
    F("b0", "felem"),
    F("a_pi", "felem"),
    F("b_pi", "felem"),
    F("P_total", "felem"),
    F("P0", "felem"),
    F("S_interval", "felem", optional=True),
    F("perm", "group", sub=_PERM_SCHEMA),
)

_BROADCAST_SCHEMA = (F("id", "id"),) + _R1_SCHEMA + _R3_SCHEMA


def _forged_sequence(g, order) -> PruningSequence:
    """Best-effort pruning claims along an arbitrary elimination order.

    Genuine pending/twin steps are used when they exist; otherwise the node
    claims to be a true twin of its lowest-position later neighbor, which is
    syntactically well-formed but fails the fingerprint replay."""
    pos = {v: i for i, v in enumerate(order, start=1)}
    alive = set(order)
    steps = []
    for v in order[:-1]:
        nv = {u for u in g.neighbors(v) if u in alive}
        step = None
        if len(nv) == 1:
            step = PruningStep(v, Role.PENDING, next(iter(nv)))
        else:
            for u in sorted(alive):
                if u == v:
                    continue
                nu = {w for w in g.neighbors(u) if w in alive}
                if u in nv:
                    if nv | {v} == nu | {u}:
                        step = PruningStep(v, Role.TRUE_TWIN, u)
                        break
                elif nv == nu:
                    step = PruningStep(v, Role.FALSE_TWIN, u)
                    break
        if step is None:
            target = min(nv, key=pos.get) if nv else min(u for u in alive if u != v)
            step = PruningStep(v, Role.TRUE_TWIN, target)
        steps.append(step)
        alive.remove(v)
    return PruningSequence(tuple(steps), g.n)


def _bfs_tree(cfg: NetworkConfig):
    """Parent map, distances, and a reverse-BFS traversal order rooted at the
    smallest-identifier node."""
    g = cfg.graph
    root = min(g.nodes, key=cfg.id_of)
    parent = {root: None}
    dist = {root: 0}
    order = [root]
    head = 0
    while head < len(order):
        v = order[head]
        head += 1
        for u in sorted(g.neighbors(v)):
            if u not in dist:
                dist[u] = dist[v] + 1
                parent[u] = v
                order.append(u)
    return parent, dist, order


@lru_cache(maxsize=4096)
def _plan(cfg: NetworkConfig, order: tuple | None):
    """All randomness-independent prover bookkeeping for one input.

    order=None means honest (computed pruning sequence, falling back to the
    identifier order on non-member inputs); otherwise the given forged
    elimination order is used."""
    g = cfg.graph
    if order is None:
        seq = compute_pruning_sequence(g)
        if seq is None:
            seq = _forged_sequence(g, sorted(g.nodes, key=cfg.id_of))
    else:
        seq = _forged_sequence(g, list(order))

    pi = seq.pi()
    survivor = seq.survivor
    role = {survivor: None}
    target = {survivor: None}
    for s in seq.steps:
        role[s.pruned] = s.role
        target[s.pruned] = s.target
    twins = {v: [] for v in g.nodes}  # u -> twins merged into u, by pi
    pending = {v: [] for v in g.nodes}
    for s in seq.steps:
        (pending if s.role is Role.PENDING else twins)[s.target].append(s.pruned)
    for v in g.nodes:
        twins[v].sort(key=pi.get)
        pending[v].sort(key=pi.get)

    ant = {}
    for v in g.nodes:
        later = [u for u in g.neighbors(v) if pi[u] > pi[v]]
        ant[v] = min(later, key=pi.get) if later else None

    co_twin = {}
    interval = {}  # twin x of u -> pending nodes of u in (pi_x, pi_next)
    for u in g.nodes:
        chain = twins[u] + [u]
        for x, nxt in zip(twins[u], chain[1:]):
            co_twin[x] = nxt if nxt != u else None
            interval[x] = [y for y in pending[u] if pi[x] < pi[y] < pi[nxt]]
    first_twin_pi = {u: (pi[twins[u][0]] if twins[u] else None) for u in g.nodes}
    boundary = {u: (first_twin_pi[u] if twins[u] else pi[u]) for u in g.nodes}
    pre_pending = {u: [y for y in pending[u] if pi[y] < boundary[u]] for u in g.nodes}

    flag_node = twins[survivor][-1] if twins[survivor] else None
    parent, dist, bfs_order = _bfs_tree(cfg)

    def verifier_of(u):
        return ant[u] if ant[u] is not None else flag_node

    r1 = {}
    for v in g.nodes:
        is_twin = role[v] in (Role.FALSE_TWIN, Role.TRUE_TWIN)
        pend = pending[v]
        r1[v] = {
            "pi": pi[v],
            "ant_id": None if ant[v] is None else cfg.id_of(ant[v]),
            "role": ROLE_FINAL if v == survivor else _ROLE_CODE[role[v]],
            "pending_target": cfg.id_of(target[v]) if role[v] is Role.PENDING else None,
            "twin_id": cfg.id_of(target[v]) if is_twin else None,
            "ant_of_twin_id": None,
            "twins_count": len(twins[v]),
            "pending_count": len(pend),
            "m_leaf": {"id": cfg.id_of(pend[0]), "pi": pi[pend[0]]} if pend else None,
            "co_twin_id": None,
            "between_count": len(interval[v]) if is_twin else None,
            "first_twin_pi": first_twin_pi[v],
            "pre_twin_pending_count": len(pre_pending[v]),
            "designated_verifier_flag": 1 if v == flag_node else 0,
        }
        if is_twin:
            w = verifier_of(target[v])
            r1[v]["ant_of_twin_id"] = None if w is None else cfg.id_of(w)
            nxt = co_twin[v]
            r1[v]["co_twin_id"] = None if nxt is None else cfg.id_of(nxt)
    return {
        "seq": seq, "pi": pi, "survivor": survivor, "role": role,
        "twins": twins, "pending": pending, "interval": interval,
        "pre_pending": pre_pending, "r1": r1,
        "tree_parent": parent, "tree_dist": dist, "bfs_order": bfs_order,
    }


def prove_dh_round1(cfg: NetworkConfig, order=None) -> dict:
    return dict(_plan(cfg, order)["r1"])


def prove_dh_round3(cfg: NetworkConfig, t: int, fc: FieldConfig, order=None) -> dict:
    """Fingerprint certificates from the round-1 plan: initial and
    pruning-time vectors via the merge rules, the pending-set sums, and the
    permutation tree's subtree aggregates."""
    plan = _plan(cfg, order)
    g, p = cfg.graph, fc.p
    pi = plan["pi"]
    a0 = {v: pow(t, pi[v], p) for v in g.nodes}
    b0 = {v: sum(a0[u] for u in g.neighbors(v)) % p for v in g.nodes}

    a = dict(a0)
    a_pi, b_pi = {}, {}
    alive = set(g.nodes)
    for step in plan["seq"].steps:
        v = step.pruned
        a_pi[v] = a[v]
        b_pi[v] = sum(a[u] for u in g.neighbors(v) if u in alive) % p
        if step.role is not Role.PENDING:
            a[step.target] = (a[step.target] + a[v]) % p
        alive.remove(v)
    s = plan["survivor"]
    a_pi[s], b_pi[s] = a[s], 0

    parent, dist = plan["tree_parent"], plan["tree_dist"]
    sub_count = {v: 1 for v in g.nodes}
    sub_sum = {v: a0[v] for v in g.nodes}
    for v in reversed(plan["bfs_order"]):
        u = parent[v]
        if u is not None:
            sub_count[u] += sub_count[v]
            sub_sum[u] = (sub_sum[u] + sub_sum[v]) % p

    certs = {}
    for v in g.nodes:
        is_twin = plan["role"][v] in (Role.FALSE_TWIN, Role.TRUE_TWIN)
        certs[v] = {
            "a0": a0[v],
            "b0": b0[v],
            "a_pi": a_pi[v],
            "b_pi": b_pi[v],
            "P_total": sum(a_pi[y] for y in plan["pending"][v]) % p,
            "P0": sum(a_pi[y] for y in plan["pre_pending"][v]) % p,
            "S_interval": sum(a_pi[y] for y in plan["interval"][v]) % p if is_twin else None,
            "perm": {
                "tree_parent": None if parent[v] is None else cfg.id_of(parent[v]),
                "dist": dist[v],
                "subtree_count": sub_count[v],
                "subtree_sum": sub_sum[v],
                "n_claimed": g.n,
            },
        }
    return certs


def ant_replay(u_bc: dict, claimants, verifier_id: int, t: int, fc: FieldConfig):
    """Replay the pruning history of u at its designated verifier.

    claimants are the broadcasts of every node claiming twin(.) = u (the
    verifier's own record included when applicable).  Returns failure tags;
    empty means pass."""
    tags = set()
    p = fc.p
    ws = sorted(claimants, key=lambda bc: bc["pi"])
    if len(ws) != u_bc["twins_count"]:
        tags.add("replay-conservation")
        return tags
    if ws and u_bc["first_twin_pi"] != ws[0]["pi"]:
        tags.add("replay-conservation")
    for w, nxt in zip(ws, ws[1:] + [None]):
        want = None if nxt is None else nxt["id"]
        if w["co_twin_id"] != want or w["ant_of_twin_id"] != verifier_id:
            tags.add("replay-conservation")
        if w["role"] not in (ROLE_FALSE_TWIN, ROLE_TRUE_TWIN) or w["between_count"] is None \
                or w["S_interval"] is None:
            tags.add("replay-compare")
            return tags
    between = sum(w["between_count"] for w in ws)
    if between + u_bc["pre_twin_pending_count"] != u_bc["pending_count"]:
        tags.add("replay-conservation")
    if (sum(w["S_interval"] for w in ws) + u_bc["P0"]) % p != u_bc["P_total"]:
        tags.add("replay-conservation")

    state = ValidVectorEntry(u_bc["a0"], (u_bc["b0"] - u_bc["P0"]) % p)
    for w in ws:
        wv = ValidVectorEntry(w["a_pi"], w["b_pi"])
        if w["role"] == ROLE_TRUE_TWIN:
            if (wv.a + wv.b) % p != (state.a + state.b) % p:
                tags.add("replay-compare")
        else:
            if wv.b % p != state.b:
                tags.add("replay-compare")
        try:
            state, _ = twin_merge(state, wv, fc)
        except FingerprintCollision:
            tags.add("replay-compare")
            return tags
        state = ValidVectorEntry(state.a, (state.b - w["S_interval"]) % p)
    if (state.a, state.b) != (u_bc["a_pi"] % p, u_bc["b_pi"] % p):
        tags.add("replay-compare")
    return tags


def node_check_dh(v, r1, r3, t, nview, cfg, fc):
    """All local verification for one node; returns (ok, tags, extras)."""
    if r1 is None or r3 is None:
        return False, ["malformed-cert"], {}
    if any(bc is None for bc in nview.values()):
        return False, ["malformed-broadcast"], {}
    p = fc.p
    tags = set()
    own_id = cfg.id_of(v)
    perm = r3["perm"]
    n_claimed = perm["n_claimed"]
    by_id = {}
    for bc in nview.values():
        by_id.setdefault(bc["id"], bc)

    role = r1["role"]
    is_final = role == ROLE_FINAL
    is_twin = role in (ROLE_FALSE_TWIN, ROLE_TRUE_TWIN)

    # field presence / role shape
    if is_final != (r1["pi"] == n_claimed) or is_final != (r1["ant_id"] is None):
        tags.add("pending-role")
    if (r1["pending_target"] is None) == (role == ROLE_PENDING):
        tags.add("pending-role")
    if (r1["twin_id"] is None) == is_twin or (r1["ant_of_twin_id"] is None) == is_twin:
        tags.add("pending-role")
    if (r1["between_count"] is None) == is_twin or (r3["S_interval"] is None) == is_twin:
        tags.add("pending-role")
    if not is_twin and r1["co_twin_id"] is not None:
        tags.add("pending-role")
    if (r1["m_leaf"] is None) != (r1["pending_count"] == 0):
        tags.add("pending-role")
    if (r1["first_twin_pi"] is None) != (r1["twins_count"] == 0):
        tags.add("pending-role")

    # initial vector and position range
    if not 1 <= r1["pi"] <= n_claimed:
        tags.add("initial-vector")
    if r3["a0"] != pow(t, r1["pi"], p):
        tags.add("initial-vector")
    if r3["b0"] != sum(pow(t, bc["pi"], p) for bc in nview.values()) % p:
        tags.add("initial-vector")

    later = [bc for bc in nview.values() if bc["pi"] > r1["pi"]]
    if role == ROLE_PENDING:
        if len(later) != 1 or later[0]["id"] != r1["pending_target"]:
            tags.add("pending-role")
    if not is_final:
        want_ant = min(later, key=lambda bc: bc["pi"])["id"] if later else None
        if want_ant is None or r1["ant_id"] != want_ant:
            tags.add("pending-role")
    if is_twin:
        tw = by_id.get(r1["twin_id"])
        if role == ROLE_TRUE_TWIN:
            if tw is None or tw["pi"] <= r1["pi"]:
                tags.add("pending-role")
        elif tw is not None:  # a false twin is never adjacent
            tags.add("pending-role")

    # pending-set sums, validated against the real pending neighbors
    pend = [bc for bc in nview.values()
            if bc["role"] == ROLE_PENDING and bc["pending_target"] == own_id]
    if len(pend) != r1["pending_count"]:
        tags.add("pending-role")
    else:
        if r3["P_total"] != sum(bc["a_pi"] for bc in pend) % p:
            tags.add("pending-role")
        if pend:
            first = min(pend, key=lambda bc: bc["pi"])
            if r1["m_leaf"] != {"id": first["id"], "pi": first["pi"]}:
                tags.add("pending-role")
        bound = r1["first_twin_pi"] if r1["twins_count"] else r1["pi"]
        if bound is not None:
            pre = [bc for bc in pend if bc["pi"] < bound]
            if len(pre) != r1["pre_twin_pending_count"] or \
                    r3["P0"] != sum(bc["a_pi"] for bc in pre) % p:
                tags.add("pending-role")

    # permutation tree
    if any(bc["perm"]["n_claimed"] != n_claimed for bc in nview.values()):
        tags.add("perm-tree")
    children = [bc for bc in nview.values() if bc["perm"]["tree_parent"] == own_id]
    if perm["tree_parent"] is None:
        if perm["dist"] != 0 or perm["subtree_count"] != n_claimed:
            tags.add("perm-tree")
        want = 0
        for i in range(1, n_claimed + 1):
            want = (want + pow(t, i, p)) % p
        if perm["subtree_sum"] != want:
            tags.add("perm-root-identity")
    else:
        par = by_id.get(perm["tree_parent"])
        if par is None or par["perm"]["dist"] != perm["dist"] - 1:
            tags.add("perm-tree")
    if perm["subtree_count"] != 1 + sum(bc["perm"]["subtree_count"] for bc in children):
        tags.add("perm-tree")
    if perm["subtree_sum"] != (pow(t, r1["pi"], p)
                               + sum(bc["perm"]["subtree_sum"] for bc in children)) % p:
        tags.add("perm-tree")

    if is_final:
        if r3["b_pi"] != 0:
            tags.add("replay-compare")
        if r1["twins_count"] == 0:
            if r3["a_pi"] != r3["a0"] or r3["b_pi"] != (r3["b0"] - r3["P_total"]) % p:
                tags.add("replay-compare")
        claimers = [bc for bc in nview.values() if bc["twin_id"] == own_id]
        if r1["twins_count"]:
            last = max(claimers, key=lambda bc: bc["pi"], default=None)
            if last is None or last["role"] != ROLE_TRUE_TWIN or \
                    not last["designated_verifier_flag"]:
                tags.add("pending-role")

    # predecessor replays delegated to this node
    self_bc = {"id": own_id, **r1, **r3}
    for u_bc in nview.values():
        if u_bc["ant_id"] == own_id:
            claim = [bc for bc in nview.values() if bc["twin_id"] == u_bc["id"]]
            if r1["twin_id"] == u_bc["id"]:
                claim.append(self_bc)
            tags |= ant_replay(u_bc, claim, own_id, t, fc)
    if r1["designated_verifier_flag"]:
        fin = by_id.get(r1["twin_id"]) if is_twin else None
        if fin is None or fin["pi"] != n_claimed:
            tags.add("replay-compare")
        else:
            claim = [bc for bc in nview.values() if bc["twin_id"] == fin["id"]]
            claim.append(self_bc)
            tags |= ant_replay(fin, claim, own_id, t, fc)

    return not tags, sorted(tags), {}


class DhProtocol:
    """Protocol object consumed by the engine run loop."""

    name = "dh"
    shape = ("M", "A", "M")

    def field_config(self, cfg: NetworkConfig, prime_mode: str) -> FieldConfig:
        return choose_prime(cfg.graph.n, prime_mode)

    def enc_ctx(self, cfg: NetworkConfig, fc: FieldConfig) -> EncCtx:
        return EncCtx(cfg.graph.n, cfg.max_id, fc.p)

    def cert_schema(self, merlin_idx: int):
        return _R1_SCHEMA if merlin_idx == 0 else _R3_SCHEMA

    def broadcast_schema(self):
        return _BROADCAST_SCHEMA

    def honest_round(self, cfg, fc, coins, merlin_idx):
        if merlin_idx == 0:
            return prove_dh_round1(cfg)
        return prove_dh_round3(cfg, coins[0], fc)

    def forged_round(self, cfg, fc, coins, merlin_idx, order):
        order = tuple(order)
        if merlin_idx == 0:
            return prove_dh_round1(cfg, order)
        return prove_dh_round3(cfg, coins[0], fc, order)

    def make_broadcast(self, v, certs, coins, cfg, fc):
        r1, r3 = certs
        if r1 is None or r3 is None:
            return None
        return {"id": cfg.id_of(v), **r1, **r3}

    def decide(self, v, certs, coins, nview, cfg, fc):
        return node_check_dh(v, certs[0], certs[1], coins[0], nview, cfg, fc)


DH = DhProtocol()
