import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dipsim.generators import (
    gen_fooling_instance,
    gen_nonmember,
    gen_random_cograph,
    gen_random_dh,
    gen_yes_gadget,
)
from dipsim.graphs import (
    Graph,
    GraphError,
    complete_graph,
    is_cograph_oracle,
    is_dh_oracle,
    path_graph,
    validate_pruning_sequence,
)


def test_random_cograph_is_cograph():
    for s in range(10):
        cfg = gen_random_cograph(12, s)
        assert is_cograph_oracle(cfg.graph)
        assert cfg.graph.is_connected()


def test_random_cograph_determinism():
    a = gen_random_cograph(20, 7)
    b = gen_random_cograph(20, 7)
    assert a.graph == b.graph


def test_random_dh_sequence_is_reverse_growth():
    cfg, seq = gen_random_dh(15, 3)
    assert validate_pruning_sequence(cfg.graph, seq)
    assert is_dh_oracle(cfg.graph)


def test_random_dh_weights():
    # pending-only growth yields a tree
    cfg, _ = gen_random_dh(12, 1, weights=(1, 0, 0))
    assert cfg.graph.num_edges() == 11
    with pytest.raises(GraphError):
        gen_random_dh(5, 0, weights=(0, 0, 0))


def test_nonmember_classes():
    g = gen_nonmember("non-cograph", 8, 0).graph
    assert g.is_connected() and not is_cograph_oracle(g)
    g = gen_nonmember("non-dh", 8, 0).graph
    assert g.is_connected() and not is_dh_oracle(g)
    with pytest.raises(GraphError):
        gen_nonmember("non-cograph", 3, 0)
    with pytest.raises(GraphError):
        gen_nonmember("nope", 8, 0)


def test_yes_gadget_in_both_classes():
    for f in (Graph(1, []), complete_graph(3), gen_random_cograph(6, 2).graph):
        cfg = gen_yes_gadget(f)
        assert is_cograph_oracle(cfg.graph)
        assert is_dh_oracle(cfg.graph)
        # hub is joined to everything
        hub = cfg.graph.n
        assert cfg.graph.degree(hub) == cfg.graph.n - 1
    with pytest.raises(GraphError):
        gen_yes_gadget(path_graph(4))


def test_gadget_id_blocks_compose():
    a = gen_yes_gadget(complete_graph(2), n_label_space=20, base_offset=0)
    b = gen_yes_gadget(complete_graph(2), n_label_space=20, base_offset=6)
    assert not (set(a.ids) & set(b.ids))


def test_fooling_instance_is_a_no_instance_of_both():
    fool = gen_fooling_instance(Graph(1, []), Graph(1, []))
    assert fool.graph.n == 10
    assert fool.graph.is_connected()
    assert not is_cograph_oracle(fool.graph)
    assert not is_dh_oracle(fool.graph)


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 1000))
def test_fooling_instances_scale(k1, k2, seed):
    f1 = gen_random_cograph(k1, seed).graph
    f2 = gen_random_cograph(k2, seed + 1).graph
    fool = gen_fooling_instance(f1, f2)
    assert fool.graph.n == k1 + k2 + 8
    assert not is_cograph_oracle(fool.graph)
    assert not is_dh_oracle(fool.graph)
    assert len(set(fool.ids)) == fool.graph.n
