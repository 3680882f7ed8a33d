import pytest

from dipsim.cograph import (
    COGRAPH,
    ROLE_MID,
    ROLE_ROOT,
    MalformedLogError,
    RefereeLog,
    evaluate_predicate,
    fresh_ids,
    node_check_cograph,
    prove_cograph,
    reconstruct,
    root_referee,
)
from dipsim.engine import honest_prover, run_protocol
from dipsim.fields import MERSENNE_61, FieldConfig
from dipsim.generators import gen_random_cograph
from dipsim.graphs import (
    Graph,
    NetworkConfig,
    complete_graph,
    is_cograph_oracle,
    path_graph,
    star_graph,
)

FC101 = FieldConfig(101)


def test_prover_k3_values():
    cfg = NetworkConfig(complete_graph(3))
    certs = prove_cograph(cfg, 2, FC101)
    assert [certs[v]["a"] for v in (1, 2, 3)] == [2, 4, 8]
    assert [certs[v]["b"] for v in (1, 2, 3)] == [12, 10, 6]


def test_prover_k1():
    cfg = NetworkConfig(Graph(1, []))
    cert = prove_cograph(cfg, 7, FC101)[1]
    assert cert["role"] == ROLE_ROOT and cert["a"] == 7 and cert["b"] == 0


def test_prover_star():
    cfg = NetworkConfig(star_graph(3))
    certs = prove_cograph(cfg, 5, FC101)
    assert certs[1]["role"] == ROLE_ROOT
    for leaf in (2, 3, 4):
        assert certs[leaf]["role"] == ROLE_MID and certs[leaf]["child_id"] is None


def test_referee_k3_trace():
    entries = [
        {"id": 1, "bar_id": 1, "a": 2, "b": 12},
        {"id": 2, "bar_id": 2, "a": 4, "b": 10},
        {"id": 3, "bar_id": 3, "a": 8, "b": 6},
    ]
    ok, log = root_referee(entries, 3, FC101)
    assert ok and log.records == [(1, 2, 1), (2, 3, 1)]
    assert reconstruct(log, 3) == complete_graph(3)


def test_referee_rejects_p4_with_good_t():
    cfg = NetworkConfig(path_graph(4))
    fc = FieldConfig(MERSENNE_61)
    t = 54321
    bar = fresh_ids(cfg)
    entries = [
        {"id": v, "bar_id": bar[v], "a": pow(t, bar[v], fc.p),
         "b": sum(pow(t, bar[u], fc.p) for u in cfg.graph.neighbors(v)) % fc.p}
        for v in cfg.graph.nodes
    ]
    ok, log = root_referee(entries, 4, fc)
    assert not ok


def test_referee_single_entry():
    ok, log = root_referee([{"id": 1, "bar_id": 1, "a": 5, "b": 0}], 1, FC101)
    assert ok and log.records == []


def test_referee_rejects_duplicates():
    e = [{"id": 1, "bar_id": 1, "a": 2, "b": 3}, {"id": 1, "bar_id": 2, "a": 4, "b": 3}]
    assert not root_referee(e, 2, FC101)[0]
    e = [{"id": 1, "bar_id": 1, "a": 2, "b": 3}, {"id": 2, "bar_id": 1, "a": 4, "b": 3}]
    assert not root_referee(e, 2, FC101)[0]


def test_reconstruct_malformed_log():
    with pytest.raises(MalformedLogError):
        reconstruct(RefereeLog([(1, 2, 1)]), 3)
    with pytest.raises(MalformedLogError):
        reconstruct(RefereeLog([(1, 5, 1), (2, 3, 0)]), 3)


def test_predicate_hook():
    _, log = root_referee(
        [
            {"id": 1, "bar_id": 1, "a": 2, "b": 12},
            {"id": 2, "bar_id": 2, "a": 4, "b": 10},
            {"id": 3, "bar_id": 3, "a": 8, "b": 6},
        ],
        3,
        FC101,
    )
    assert evaluate_predicate(log, 3, lambda g: g.num_edges() == 3)
    assert not evaluate_predicate(log, 3, lambda g: g.num_edges() == 2)


def test_protocol_examples():
    hp = honest_prover()
    assert run_protocol(NetworkConfig(complete_graph(3)), COGRAPH, hp, 5)[0].accepted
    assert not run_protocol(NetworkConfig(path_graph(4)), COGRAPH, hp, 5)[0].accepted
    assert run_protocol(NetworkConfig(Graph(1, [])), COGRAPH, hp, 5)[0].accepted


def test_node_check_detects_tampered_b():
    cfg = NetworkConfig(complete_graph(3))
    fc = FC101
    certs = prove_cograph(cfg, 2, fc)
    bcs = {v: {"id": cfg.id_of(v), **certs[v]} for v in cfg.graph.nodes}
    ok, tags, _ = node_check_cograph(1, certs[1], 2, {u: bcs[u] for u in (2, 3)}, cfg, fc)
    assert ok
    bad = dict(certs[1], b=(certs[1]["b"] + 1) % fc.p)
    ok, tags, _ = node_check_cograph(1, bad, 2, {u: bcs[u] for u in (2, 3)}, cfg, fc)
    assert not ok and "neighborhood-sum" in tags


def test_node_check_detects_copy_mismatch():
    cfg = gen_random_cograph(9, 0)
    fc = FC101
    certs = prove_cograph(cfg, 3, fc)
    mid = next(v for v in cfg.graph.nodes if certs[v]["child_copy"] is not None)
    bcs = {v: {"id": cfg.id_of(v), **certs[v]} for v in cfg.graph.nodes}
    forged = dict(certs[mid], child_copy=dict(certs[mid]["child_copy"], a=99))
    nview = {u: bcs[u] for u in cfg.graph.neighbors(mid)}
    ok, tags, _ = node_check_cograph(mid, forged, 3, nview, cfg, fc)
    assert not ok and "copy-mismatch" in tags


def test_reconstruction_matches_input():
    hp = honest_prover()
    for seed in range(40):
        cfg = gen_random_cograph(4 + seed % 20, seed)
        verdict, _, _ = run_protocol(cfg, COGRAPH, hp, seed)
        assert verdict.accepted
        log = RefereeLog([tuple(r) for r in verdict.extras["referee_log"]])
        rebuilt = reconstruct(log, cfg.graph.n)
        bar = fresh_ids(cfg)
        expect = sorted(
            tuple(sorted((bar[u], bar[v]))) for u, v in cfg.graph.edges()
        )
        assert sorted(map(tuple, rebuilt.edges())) == expect
        assert is_cograph_oracle(rebuilt)
