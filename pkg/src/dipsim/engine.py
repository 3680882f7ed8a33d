"""Round-structured execution of dAM/dMAM protocols with shared randomness:
certificate encoding, the one-round verification broadcast, bandwidth
metering, and the adversarial prover harness."""
from __future__ import annotations

import math
import random
import zlib
from dataclasses import dataclass, field

from .fields import FieldConfig
from .graphs import NetworkConfig


class EngineError(ValueError):
    pass


class MalformedProverError(EngineError):
    """Prover emitted certificates for unknown nodes or skipped a node."""


class EncodingError(EngineError):
    """A field value exceeds its declared width."""


# --- fixed-width bitstrings ----------------------------------------------

class Bits:
    """Immutable bitstring as (value, length); leftmost bit is most
    significant."""

    __slots__ = ("val", "n")

    def __init__(self, val: int = 0, n: int = 0):
        self.val = val
        self.n = n

    def append(self, value: int, width: int) -> "Bits":
        if value < 0 or value >> width:
            raise EncodingError(f"value {value} does not fit in {width} bits")
        return Bits((self.val << width) | value, self.n + width)

    def flip(self, pos: int) -> "Bits":
        if not 0 <= pos < self.n:
            raise IndexError(pos)
        return Bits(self.val ^ (1 << (self.n - 1 - pos)), self.n)

    def to01(self) -> str:
        return format(self.val, f"0{self.n}b") if self.n else ""

    def __len__(self):
        return self.n

    def __eq__(self, other):
        return isinstance(other, Bits) and self.val == other.val and self.n == other.n

    def __repr__(self):
        return f"Bits({self.to01()!r})"


class BitReader:
    def __init__(self, bits: Bits):
        self._val = bits.val
        self._left = bits.n

    def read(self, width: int) -> int:
        if width > self._left:
            raise EncodingError("truncated bitstring")
        self._left -= width
        out = self._val >> self._left
        self._val &= (1 << self._left) - 1
        return out

    @property
    def exhausted(self) -> bool:
        return self._left == 0


# --- schemas --------------------------------------------------------------

@dataclass(frozen=True)
class F:
    """One certificate field: kind selects the width from the encoding
    context; optional fields carry a presence bit; groups nest sub-schemas."""

    name: str
    kind: str  # id | pos | count | felem | bit | role2 | role4 | group
    optional: bool = False
    sub: tuple = ()


@dataclass(frozen=True)
class EncCtx:
    n: int
    max_id: int
    p: int

    @property
    def w_id(self) -> int:
        return max(1, math.ceil(math.log2(self.max_id + 1)))

    @property
    def w_pos(self) -> int:
        return max(1, math.ceil(math.log2(self.n + 1)))

    @property
    def w_felem(self) -> int:
        return max(1, math.ceil(math.log2(self.p)))


def _width(ctx: EncCtx, kind: str) -> int:
    if kind == "id":
        return ctx.w_id
    if kind in ("pos", "count"):
        return ctx.w_pos
    if kind == "felem":
        return ctx.w_felem
    if kind == "bit":
        return 1
    if kind in ("role2", "role4"):
        return 2
    raise EngineError(f"unknown field kind {kind!r}")


def encode(schema, obj: dict, ctx: EncCtx) -> Bits:
    bits = Bits()
    for f in schema:
        value = obj.get(f.name)
        if f.optional:
            if value is None:
                bits = bits.append(0, 1)
                continue
            bits = bits.append(1, 1)
        elif value is None:
            raise EncodingError(f"missing required field {f.name}")
        if f.kind == "group":
            inner = encode(f.sub, value, ctx)
            bits = Bits((bits.val << inner.n) | inner.val, bits.n + inner.n)
        else:
            bits = bits.append(int(value), _width(ctx, f.kind))
    return bits


def _decode_into(schema, reader: BitReader, ctx: EncCtx) -> dict:
    out = {}
    for f in schema:
        if f.optional and reader.read(1) == 0:
            out[f.name] = None
            continue
        if f.kind == "group":
            out[f.name] = _decode_into(f.sub, reader, ctx)
            continue
        value = reader.read(_width(ctx, f.kind))
        if f.kind == "felem" and value >= ctx.p:
            raise EncodingError("field element out of range")
        if f.kind == "role2" and value > 2:
            raise EncodingError("invalid role tag")
        out[f.name] = value
    return out


def decode(schema, bits: Bits, ctx: EncCtx):
    """Decoded field map, or None if the bitstring is malformed."""
    reader = BitReader(bits)
    try:
        out = _decode_into(schema, reader, ctx)
    except EncodingError:
        return None
    if not reader.exhausted:
        return None
    return out


# --- run records ----------------------------------------------------------

@dataclass
class Transcript:
    rounds: list  # ("random", Bits) or ("certs", {node: Bits})
    broadcasts: dict  # node -> Bits or None


@dataclass
class Verdict:
    per_node: dict  # node -> bool
    accepted: bool
    tags: dict = field(default_factory=dict)  # node -> tuple of failure tags


@dataclass
class BandwidthReport:
    max_cert_bits: list  # per Merlin round
    max_broadcast_bits: int
    shared_random_bits: int
    cap_violated: bool = False


@dataclass(frozen=True)
class ProverStrategy:
    """behavior(protocol, cfg, fc, coins, merlin_idx, adv_seed) returns a
    node -> certificate map; values may be structured dicts or raw Bits."""

    name: str
    behavior: object


def honest_prover() -> ProverStrategy:
    def behavior(protocol, cfg, fc, coins, merlin_idx, adv_seed):
        return protocol.honest_round(cfg, fc, coins, merlin_idx)

    return ProverStrategy("honest", behavior)


# --- adversaries ----------------------------------------------------------

def _stable_seed(seed, *extra) -> int:
    text = repr((seed,) + extra).encode()
    return zlib.crc32(text) ^ (zlib.adler32(text) << 16)


def _edit_graph(cfg: NetworkConfig, rng: random.Random, k: int) -> NetworkConfig:
    """Toggle k node pairs while keeping the graph simple and connected."""
    from .graphs import Graph

    g = cfg.graph
    edges = {tuple(sorted(e)) for e in g.edges()}
    nodes = list(g.nodes)
    done = 0
    for _ in range(200 * k):
        if done == k:
            break
        u, v = rng.sample(nodes, 2)
        key = (min(u, v), max(u, v))
        trial = set(edges)
        trial.symmetric_difference_update({key})
        cand = Graph(g.n, sorted(trial))
        if cand.is_connected():
            edges = trial
            done += 1
    return NetworkConfig(Graph(g.n, sorted(edges)), cfg.ids, cfg.c_id)


def make_adversary(kind: str, params: dict | None = None) -> ProverStrategy:
    params = dict(params or {})
    if kind == "honest":
        return honest_prover()

    if kind == "wrong-graph":
        k = int(params.get("edits", 1))

        def behavior(protocol, cfg, fc, coins, merlin_idx, adv_seed):
            rng = random.Random(_stable_seed(adv_seed, "wrong-graph"))
            edited = _edit_graph(cfg, rng, k)
            return protocol.honest_round(edited, fc, coins, merlin_idx)

        return ProverStrategy("wrong-graph", behavior)

    if kind == "bit-flip":
        k = int(params.get("k", 1))

        def behavior(protocol, cfg, fc, coins, merlin_idx, adv_seed):
            certs = protocol.honest_round(cfg, fc, coins, merlin_idx)
            ctx = protocol.enc_ctx(cfg, fc)
            schema = protocol.cert_schema(merlin_idx)
            bitcerts = {v: encode(schema, c, ctx) for v, c in certs.items()}
            rng = random.Random(_stable_seed(adv_seed, "bit-flip"))
            n_merlin = sum(1 for ph in protocol.shape if ph == "M")
            nodes = sorted(bitcerts)
            for _ in range(k):
                target_round = rng.randrange(n_merlin)
                v = nodes[rng.randrange(len(nodes))]
                frac = rng.random()
                if target_round == merlin_idx and len(bitcerts[v]):
                    pos = int(frac * len(bitcerts[v]))
                    bitcerts[v] = bitcerts[v].flip(pos)
            return bitcerts

        return ProverStrategy("bit-flip", behavior)

    if kind == "cert-swap":

        def behavior(protocol, cfg, fc, coins, merlin_idx, adv_seed):
            certs = protocol.honest_round(cfg, fc, coins, merlin_idx)
            nodes = sorted(certs)
            if len(nodes) >= 2:
                rng = random.Random(_stable_seed(adv_seed, "cert-swap"))
                # pin one end to the smallest-id node so the swap always
                # crosses a structural boundary instead of permuting
                # symmetric siblings
                u = min(nodes, key=cfg.id_of)
                v = rng.choice([w for w in nodes if w != u])
                certs[u], certs[v] = certs[v], certs[u]
            return certs

        return ProverStrategy("cert-swap", behavior)

    if kind == "order-forge":

        def behavior(protocol, cfg, fc, coins, merlin_idx, adv_seed):
            if not hasattr(protocol, "forged_round"):
                raise EngineError("order-forge only applies to ordering protocols")
            rng = random.Random(_stable_seed(adv_seed, "order-forge"))
            order = list(cfg.graph.nodes)
            rng.shuffle(order)
            return protocol.forged_round(cfg, fc, coins, merlin_idx, order)

        return ProverStrategy("order-forge", behavior)

    raise EngineError(f"unknown adversary kind {kind!r}")


# --- execution ------------------------------------------------------------

def run_protocol(cfg: NetworkConfig, protocol, prover: ProverStrategy, seed,
                 prime_mode: str = "fixed", cap_bits: int | None = None,
                 lightweight: bool = False):
    """Execute the protocol's declared round pattern and the verification
    broadcast; deterministic given (cfg, prover, seed).

    lightweight=True skips the encode/decode round trip for structured
    honest certificates (verdict-equivalent; used by exhaustive tests)."""
    fc = protocol.field_config(cfg, prime_mode)
    ctx = protocol.enc_ctx(cfg, fc)
    rng = random.Random(seed)
    adv_seed = _stable_seed(seed, prover.name, cfg.ids)
    nodes = list(cfg.graph.nodes)

    coins = []
    rounds = []
    structured = []  # per Merlin round: node -> dict or None (if Bits given)
    max_cert_bits = []
    cap_violated = False
    merlin_idx = 0
    for phase in protocol.shape:
        if phase == "A":
            t = rng.randrange(fc.p)
            coins.append(t)
            rounds.append(("random", Bits(t, ctx.w_felem)))
            continue
        raw = prover.behavior(protocol, cfg, fc, coins, merlin_idx, adv_seed)
        if set(raw) != set(nodes):
            raise MalformedProverError(
                f"prover round {merlin_idx} covered nodes {sorted(raw)}"
            )
        schema = protocol.cert_schema(merlin_idx)
        bitcerts = {}
        decoded = {}
        for v in nodes:
            cert = raw[v]
            if isinstance(cert, Bits):
                bitcerts[v] = cert
                decoded[v] = decode(schema, cert, ctx)
            elif lightweight:
                bitcerts[v] = None
                decoded[v] = cert
            else:
                bitcerts[v] = encode(schema, cert, ctx)
                decoded[v] = decode(schema, bitcerts[v], ctx)
        lens = [len(b) for b in bitcerts.values() if b is not None]
        max_cert_bits.append(max(lens) if lens else 0)
        if cap_bits is not None and lens and max(lens) > cap_bits:
            cap_violated = True
        rounds.append(("certs", bitcerts))
        structured.append(decoded)
        merlin_idx += 1

    # verification round: compose all broadcasts, then deliver simultaneously
    bschema = protocol.broadcast_schema()
    raw_bc = {}
    bits_bc = {}
    view = {}
    for v in nodes:
        certs_v = [structured[i][v] for i in range(merlin_idx)]
        bc = protocol.make_broadcast(v, certs_v, coins, cfg, fc)
        raw_bc[v] = bc
        if bc is None:
            bits_bc[v] = None
            view[v] = None
        elif lightweight:
            bits_bc[v] = None
            view[v] = bc
        else:
            bits_bc[v] = encode(bschema, bc, ctx)
            view[v] = decode(bschema, bits_bc[v], ctx)
    blens = [len(b) for b in bits_bc.values() if b is not None]
    max_broadcast_bits = max(blens) if blens else 0
    if cap_bits is not None and blens and max(blens) > cap_bits:
        cap_violated = True

    per_node = {}
    tags = {}
    extras = {}
    for v in nodes:
        certs_v = [structured[i][v] for i in range(merlin_idx)]
        nview = {u: view[u] for u in cfg.graph.neighbors(v)}
        ok, vtags, vextras = protocol.decide(v, certs_v, coins, nview, cfg, fc)
        per_node[v] = ok
        if vtags:
            tags[v] = tuple(vtags)
        extras.update(vextras)

    accepted = all(per_node.values()) and not cap_violated
    verdict = Verdict(per_node, accepted, tags)
    bw = BandwidthReport(max_cert_bits, max_broadcast_bits,
                         ctx.w_felem * sum(1 for ph in protocol.shape if ph == "A"),
                         cap_violated)
    transcript = Transcript(rounds, bits_bc)
    verdict.extras = extras
    return verdict, bw, transcript


def estimate_error(instances, protocol, prover: ProverStrategy, trials: int,
                   seed, prime_mode: str = "fixed", lightweight: bool = False):
    """Acceptance frequency per instance over independent shared-randomness
    draws."""
    if trials < 1:
        raise EngineError("trials must be >= 1")
    freqs = []
    for idx, cfg in enumerate(instances):
        hits = 0
        for j in range(trials):
            run_seed = _stable_seed(seed, "trial", idx, j)
            verdict, _, _ = run_protocol(cfg, protocol, prover, run_seed,
                                         prime_mode, lightweight=lightweight)
            hits += verdict.accepted
        freqs.append(hits / trials)
    return freqs


def build_report(protocol, seed, fc: FieldConfig, coins, verdict: Verdict,
                 bw: BandwidthReport) -> dict:
    return {
        "protocol": protocol.name,
        "seed": seed,
        "p": fc.p,
        "t": coins[0] if coins else None,
        "accepted": verdict.accepted,
        "rejecting_nodes": sorted(v for v, ok in verdict.per_node.items() if not ok),
        "failure_tags": {str(v): list(ts) for v, ts in sorted(verdict.tags.items())},
        "max_cert_bits": list(bw.max_cert_bits),
        "max_broadcast_bits": bw.max_broadcast_bits,
        "cap_violated": bw.cap_violated,
        **{k: v for k, v in getattr(verdict, "extras", {}).items()},
    }
