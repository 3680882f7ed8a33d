import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dipsim.graphs import (
    Graph,
    GraphError,
    NetworkConfig,
    PruningSequence,
    PruningStep,
    Role,
    SizeLimitError,
    bcc_spanning_tree,
    complete_graph,
    compute_pruning_sequence,
    cycle_graph,
    dh_definitional_check,
    induced_subgraph,
    is_cograph_oracle,
    is_dh_oracle,
    join_split,
    load_network,
    network_from_dict,
    network_to_dict,
    path_graph,
    star_graph,
    validate_pruning_sequence,
)
from dipsim.generators import gen_random_cograph, gen_random_dh


def test_graph_construction_rejects_bad_edges():
    with pytest.raises(GraphError):
        Graph(3, [(1, 1)])
    with pytest.raises(GraphError):
        Graph(3, [(1, 4)])
    with pytest.raises(GraphError):
        Graph(3, [(1, 2), (2, 1)])
    with pytest.raises(GraphError):
        Graph(0, [])


def test_connectivity():
    assert path_graph(5).is_connected()
    assert not Graph(4, [(1, 2), (3, 4)]).is_connected()
    assert Graph(1, []).is_connected()


def test_network_config_ids():
    cfg = NetworkConfig(path_graph(3), [5, 2, 9])
    assert cfg.id_of(3) == 9 and cfg.node_of(9) == 3 and cfg.max_id == 9
    with pytest.raises(GraphError):
        NetworkConfig(path_graph(3), [1, 1, 2])
    with pytest.raises(GraphError):
        NetworkConfig(Graph(4, [(1, 2), (3, 4)]))
    # identifier bound exponent is inferred when not given
    assert NetworkConfig(path_graph(3), [1, 2, 30]).c_id == 4


def test_cograph_oracle_known_graphs():
    assert is_cograph_oracle(complete_graph(4))
    assert is_cograph_oracle(star_graph(5))
    assert not is_cograph_oracle(path_graph(4))
    assert not is_cograph_oracle(cycle_graph(5))
    assert is_cograph_oracle(cycle_graph(4))  # C4 = K2 x K2 join


def test_dh_oracle_known_graphs():
    assert is_dh_oracle(path_graph(4))
    assert is_dh_oracle(complete_graph(5))
    assert not is_dh_oracle(cycle_graph(5))
    assert not is_dh_oracle(cycle_graph(6))
    assert is_dh_oracle(cycle_graph(4))


def test_definitional_check_limits():
    assert dh_definitional_check(path_graph(6))
    assert not dh_definitional_check(cycle_graph(5))
    with pytest.raises(SizeLimitError):
        dh_definitional_check(path_graph(11))


def test_pruning_sequence_roundtrip():
    g = complete_graph(4)
    seq = compute_pruning_sequence(g)
    assert seq is not None and validate_pruning_sequence(g, seq)
    assert seq.pi()[seq.survivor] == 4
    assert compute_pruning_sequence(cycle_graph(5)) is None


def test_pruning_tiebreak_prefers_true_twin_last():
    # the last step always merges a true twin into the survivor
    for s in range(20):
        cfg, _ = gen_random_dh(6 + s % 7, s)
        seq = compute_pruning_sequence(cfg.graph)
        assert seq.steps[-1].role is Role.TRUE_TWIN
        assert seq.steps[-1].target == seq.survivor


def test_validate_rejects_wrong_role():
    g = path_graph(3)
    bad = PruningSequence(
        (PruningStep(1, Role.TRUE_TWIN, 2), PruningStep(2, Role.TRUE_TWIN, 3)), 3
    )
    assert not validate_pruning_sequence(g, bad)


def test_induced_subgraph():
    g = cycle_graph(5)
    sub = induced_subgraph(g, [1, 2, 4])
    assert sub.n == 3 and sub.edges() == [(1, 2)]
    with pytest.raises(GraphError):
        induced_subgraph(g, [])


def test_join_split_cross_completeness():
    for s in range(15):
        cfg = gen_random_cograph(10, s)
        split = join_split(cfg.graph)
        assert split is not None
        v1, v2 = split
        assert all(cfg.graph.has_edge(u, v) for u in v1 for v in v2)
    assert join_split(path_graph(4)) is None


def test_bcc_tree_shape():
    cfg = gen_random_cograph(12, 3)
    tree = bcc_spanning_tree(cfg)
    assert tree is not None
    root_nbrs = cfg.graph.neighbors(tree.root)
    for v in cfg.graph.nodes:
        if v == tree.root:
            continue
        d = tree.depth(v)
        assert d in (1, 2)
        if d == 1:
            assert v in root_nbrs and len(tree.children[v]) <= 1
    covered = {tree.root} | set(tree.parent)
    assert covered == set(cfg.graph.nodes)
    assert bcc_spanning_tree(NetworkConfig(path_graph(4))) is None


def test_network_json_roundtrip(tmp_path):
    cfg = NetworkConfig(cycle_graph(4), [3, 1, 4, 7])
    data = network_to_dict(cfg)
    back = network_from_dict(data)
    assert back.graph == cfg.graph and back.ids == cfg.ids
    path = tmp_path / "g.json"
    path.write_text(json.dumps(data))
    assert load_network(path).graph == cfg.graph


def test_load_network_parse_error_has_line_info(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"n": 3,\n  "edges": [[1, 2],]\n}')
    with pytest.raises(GraphError, match="line"):
        load_network(path)
    (tmp_path / "shape.json").write_text('{"edges": []}')
    with pytest.raises(GraphError):
        load_network(tmp_path / "shape.json")


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 24), st.integers(0, 10**6))
def test_generated_dh_sequences_validate(n, seed):
    cfg, seq = gen_random_dh(n, seed)
    assert validate_pruning_sequence(cfg.graph, seq)
    assert is_dh_oracle(cfg.graph)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 16), st.integers(0, 10**6))
def test_cograph_induced_subgraphs_stay_cographs(n, seed):
    g = gen_random_cograph(n, seed).graph
    assert is_cograph_oracle(g)
    sub = induced_subgraph(g, list(range(1, (n + 1) // 2 + 1)))
    assert is_cograph_oracle(sub)
