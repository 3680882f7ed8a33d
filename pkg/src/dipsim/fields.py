"""Prime-field arithmetic for fingerprint vectors, the two pruning update
rules, and the symbolic polynomial family used to certify evaluation points."""
from __future__ import annotations

from dataclasses import dataclass

import sympy

from .graphs import Graph, PruningSequence, Role

MERSENNE_61 = (1 << 61) - 1


class FieldError(ValueError):
    pass


class FingerprintCollision(FieldError):
    """Two claimed twins carried equal a-values; the protocol must abort."""


@dataclass(frozen=True)
class FieldConfig:
    p: int


@dataclass(frozen=True)
class ValidVectorEntry:
    """Per-node fingerprint pair: own-polynomial and neighborhood-sum values."""

    a: int
    b: int


def choose_prime(n: int, mode: str = "fixed") -> FieldConfig:
    """Fixed mode: 2^61-1, valid for all n <= 10^7 at identifier exponent
    budget c=4.  Paper mode: smallest prime >= 3 n^8, so message width
    scales with log n."""
    if n < 1:
        raise FieldError("n must be >= 1")
    if mode == "fixed":
        if n > 10**7:
            raise FieldError("fixed prime only covers n <= 10^7")
        return FieldConfig(MERSENNE_61)
    if mode == "paper":
        bound = 3 * n**8
        # sympy primality is deterministic well beyond this range
        p = bound if sympy.isprime(bound) else int(sympy.nextprime(bound))
        return FieldConfig(p)
    raise FieldError(f"unknown prime mode {mode!r}")


def phi_eval(exponent: int, t: int, fc: FieldConfig) -> int:
    if exponent < 1:
        raise FieldError("exponents are positions/ids and must be >= 1")
    return pow(t, exponent, fc.p)


def neighborhood_eval(exponents, t: int, fc: FieldConfig) -> int:
    total = 0
    for e in exponents:
        total += phi_eval(e, t, fc)
    return total % fc.p


def twin_merge(u: ValidVectorEntry, v: ValidVectorEntry, fc: FieldConfig):
    """Merge a pruned twin v into its survivor u.

    delta is 1 iff the closed-neighborhood sums agree, which (for genuine
    twins with distinct a-values) happens exactly when the twins are
    adjacent."""
    p = fc.p
    if u.a % p == v.a % p:
        raise FingerprintCollision("twin pair with equal a-values")
    delta = 1 if (u.a + u.b) % p == (v.a + v.b) % p else 0
    return ValidVectorEntry((u.a + v.a) % p, (u.b - delta * v.a) % p), delta


def pending_delete(u: ValidVectorEntry, v_a: int, fc: FieldConfig) -> ValidVectorEntry:
    """Remove a pending neighbor whose current a-value is v_a."""
    return ValidVectorEntry(u.a, (u.b - v_a) % fc.p)


# --- symbolic family ------------------------------------------------------

def _poly_eval(poly: dict, t: int, p: int) -> int:
    acc = 0
    for e, c in poly.items():
        acc += c * pow(t, e, p)
    return acc % p


def _poly_add(x: dict, y: dict) -> dict:
    out = dict(x)
    for e, c in y.items():
        out[e] = out.get(e, 0) + c
    return {e: c for e, c in out.items() if c}


def symbolic_family_states(g: Graph, seq: PruningSequence):
    """Yield, per pruning state, (alive, polys, adj): the surviving nodes,
    their basic polynomials as exponent->coefficient maps (exponents are the
    pruning positions pi), and the remaining adjacency.

    The first state is the initial graph; one more follows each step."""
    pi = seq.pi()
    polys = {v: {pi[v]: 1} for v in g.nodes}
    adj = {v: set(g.neighbors(v)) for v in g.nodes}
    alive = set(g.nodes)
    yield set(alive), dict(polys), {v: set(adj[v]) for v in alive}
    for step in seq.steps:
        v, u = step.pruned, step.target
        if step.role is not Role.PENDING:
            polys[u] = _poly_add(polys[u], polys[v])
        for w in adj[v]:
            adj[w].discard(v)
        del adj[v], polys[v]
        alive.remove(v)
        yield set(alive), dict(polys), {w: set(adj[w]) for w in alive}


def symbolic_family_trace(g: Graph, seq: PruningSequence, t: int, fc: FieldConfig):
    """Evaluated view of symbolic_family_states: yields (alive, avals, bvals)
    with a_v the value of v's basic polynomial at t and b_v its remaining
    neighborhood sum."""
    p = fc.p
    for alive, polys, adj in symbolic_family_states(g, seq):
        avals = {v: _poly_eval(polys[v], t, p) for v in alive}
        bvals = {v: sum(avals[u] for u in adj[v]) % p for v in alive}
        yield alive, avals, bvals


def canonical_family_root_count(g: Graph, seq: PruningSequence, t: int,
                                fc: FieldConfig) -> bool:
    """True iff t is a root of some non-zero basic or derived polynomial in
    the family induced by the sequence, enumerating surviving pairs at every
    step.  Derived members that vanish identically (genuine twin relations)
    are not counted.

    A False result certifies t as a good evaluation point: every fingerprint
    comparison made by the protocols separates correctly."""
    p = fc.p
    for alive, polys, adj in symbolic_family_states(g, seq):
        nodes = sorted(alive)
        sym_q = {v: {} for v in nodes}
        for v in nodes:
            for u in adj[v]:
                sym_q[v] = _poly_add(sym_q[v], polys[u])
        key = lambda poly: tuple(sorted(poly.items()))
        aval = {v: _poly_eval(polys[v], t, p) for v in nodes}
        bval = {v: _poly_eval(sym_q[v], t, p) for v in nodes}
        for v in nodes:
            if aval[v] == 0:
                return True
        for i, u in enumerate(nodes):
            ku, kqu = key(polys[u]), key(sym_q[u])
            kbu = key(_poly_add(polys[u], sym_q[u]))
            for v in nodes[i + 1 :]:
                if aval[u] == aval[v] and ku != key(polys[v]):
                    return True
                if bval[u] == bval[v] and kqu != key(sym_q[v]):
                    return True
                if (aval[u] + bval[u]) % p == (aval[v] + bval[v]) % p and \
                        kbu != key(_poly_add(polys[v], sym_q[v])):
                    return True
    return False
