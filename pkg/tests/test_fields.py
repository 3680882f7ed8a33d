import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dipsim.fields import (
    MERSENNE_61,
    FieldConfig,
    FieldError,
    FingerprintCollision,
    ValidVectorEntry,
    canonical_family_root_count,
    choose_prime,
    neighborhood_eval,
    pending_delete,
    phi_eval,
    symbolic_family_trace,
    twin_merge,
)
from dipsim.graphs import Graph, complete_graph, compute_pruning_sequence, path_graph
from dipsim.generators import gen_random_dh


def test_choose_prime_modes():
    assert choose_prime(100, "fixed").p == MERSENNE_61
    assert choose_prime(2, "paper").p == 769  # smallest prime >= 3 * 2^8
    assert choose_prime(1, "paper").p == 3
    with pytest.raises(FieldError):
        choose_prime(0)
    with pytest.raises(FieldError):
        choose_prime(4, "other")


def test_phi_and_neighborhood_eval():
    fc = FieldConfig(101)
    assert phi_eval(3, 2, fc) == 8
    assert neighborhood_eval([1, 2, 3], 2, fc) == 14
    with pytest.raises(FieldError):
        phi_eval(0, 2, fc)


def test_twin_merge_delta_cases():
    fc = FieldConfig(101)
    # equal closed-neighborhood sums: adjacent (true) twins, delta = 1
    merged, delta = twin_merge(ValidVectorEntry(4, 10), ValidVectorEntry(2, 12), fc)
    assert delta == 1 and merged == ValidVectorEntry(6, 8)
    # equal b only: false twins, delta = 0
    merged, delta = twin_merge(ValidVectorEntry(4, 7), ValidVectorEntry(2, 7), fc)
    assert delta == 0 and merged == ValidVectorEntry(6, 7)
    with pytest.raises(FingerprintCollision):
        twin_merge(ValidVectorEntry(5, 1), ValidVectorEntry(5, 2), fc)


def test_pending_delete():
    fc = FieldConfig(101)
    assert pending_delete(ValidVectorEntry(4, 10), 2, fc) == ValidVectorEntry(4, 8)


def test_canonical_family_root_count_k2():
    g = complete_graph(2)
    seq = compute_pruning_sequence(g)
    fc = FieldConfig(101)
    # t=1 collides the two basic polynomials x^1 and x^2
    assert canonical_family_root_count(g, seq, 1, fc)
    assert not canonical_family_root_count(g, seq, 2, fc)


def test_family_empty_on_single_node():
    g = Graph(1, [])
    seq = compute_pruning_sequence(g)
    assert not canonical_family_root_count(g, seq, 1, FieldConfig(101))


def test_symbolic_trace_matches_direct_evaluation():
    g = path_graph(3)
    seq = compute_pruning_sequence(g)
    fc = FieldConfig(101)
    states = list(symbolic_family_trace(g, seq, 2, fc))
    alive0, a0, b0 = states[0]
    assert alive0 == {1, 2, 3}
    assert a0 == {1: 2, 2: 4, 3: 8} and b0 == {1: 4, 2: 10, 3: 4}
    assert states[-1][0] == {seq.survivor}


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 100), st.integers(2, 100), st.integers(0, 100), st.integers(0, 100))
def test_twin_merge_algebra(a1, a2, b1, b2):
    fc = FieldConfig(101)
    u, v = ValidVectorEntry(a1 % 101, b1 % 101), ValidVectorEntry(a2 % 101, b2 % 101)
    if u.a == v.a:
        with pytest.raises(FingerprintCollision):
            twin_merge(u, v, fc)
        return
    merged, delta = twin_merge(u, v, fc)
    assert merged.a == (u.a + v.a) % 101
    assert merged.b == (u.b - delta * v.a) % 101
    assert delta == (1 if (u.a + u.b) % 101 == (v.a + v.b) % 101 else 0)


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 14), st.integers(0, 10**6))
def test_good_t_separates_all_pairs(n, seed):
    """At a certified-good t no two surviving fingerprints collide at any step."""
    cfg, seq = gen_random_dh(n, seed)
    fc = FieldConfig(MERSENNE_61)
    t = (seed * 7919 + 12345) % fc.p
    if canonical_family_root_count(cfg.graph, seq, t, fc):
        return  # bad draw; nothing to assert
    for alive, avals, _ in symbolic_family_trace(cfg.graph, seq, t, fc):
        assert all(avals[v] != 0 for v in alive)
