import pytest
from hypothesis import given, settings, strategies as st

from chibound.decomp import Decomposition, RootedTree, canonical_tagging, torso
from chibound.engine import (BIPARTITE, EXACT_SMALL, GREEDY, color, compose_blocks, congruence_from_labels,
                             shallow_combine, splendid_combine, substitution_compose)
from chibound.errors import ContractError, MalformedInputError
from chibound.factor import Base
from chibound.graph import Graph, WeightedColoring, is_proper, omega_exact, substitution, weighted_omega
from chibound.instances import shallow_instance, splendid_instance
from chibound.kexpr import parse, random_kexpr
from chibound.pipeline import run_pipeline
from chibound.semigroup import Fn

STAR = "j(1,2,u(u(v(1),v(1)),v(2)))"


def sets(*s):
    return WeightedColoring.from_sets(s)


def test_single_vertex():
    res = run_pipeline(parse("v(1)", 2), 2)
    assert res.coloring.count == 1 and res.plan == Base(0)


def test_star_pipeline():
    a = run_pipeline(parse(STAR, 2), 2)
    b = run_pipeline(parse(STAR, 2), 2)
    assert is_proper(a.graph, a.coloring) and a.coloring.count >= 2
    assert a.coloring == b.coloring and a.audit.to_text() == b.audit.to_text()


def test_weights_contract():
    res = run_pipeline(parse(STAR, 2), 2, w=[1, 2, 3])
    assert [len(s) for s in res.coloring.sets] == [1, 2, 3]
    assert res.coloring.count >= weighted_omega(res.graph, [1, 2, 3])
    with pytest.raises(MalformedInputError):
        run_pipeline(parse(STAR, 2), 2, w=[1, 0, 1])


def two_level():
    # root 0 with children 1, 2; vertices 0, 1 at node 1 and 2, 3 at node 2
    G = Graph.from_edges(4, [(0, 2), (1, 3)])
    return G, Decomposition(RootedTree.from_parents([None, 0, 0]), (1, 1, 2, 2))


def test_shallow_combine_examples():
    G, D = two_level()
    root = {0: [0], 1: [0], 2: [1], 3: [1]}
    c = shallow_combine(G, D, {0: root, 1: {0: [0], 1: [0]}, 2: {2: [0], 3: [0]}})
    assert is_proper(G, c) and c.count <= 4
    c = shallow_combine(G, D, {0: {0: [0, 1], 1: [0, 1], 2: [2, 3], 3: [2, 3]},
                               1: {0: [0, 1], 1: [0, 1]}, 2: {2: [0, 1], 3: [0, 1]}}, w=[2, 2, 2, 2])
    assert all(len(s) == 2 for s in c.sets) and is_proper(G, c, [2] * 4)
    deep = Decomposition(RootedTree.from_parents([None, 0, 1, 2]), (3,))
    with pytest.raises(ContractError):
        shallow_combine(Graph.empty(1), deep, {x: {0: [0]} for x in range(4)})


def test_congruence_examples():
    assert congruence_from_labels({Fn((1, 1))}, 2).classes == ((1, 2),)
    assert congruence_from_labels({Fn((1, 2, 3))}, 3).classes == ((1,), (2,), (3,))
    assert congruence_from_labels({Fn((1, 1, 3))}, 3).classes == ((1, 2), (3,))
    assert congruence_from_labels(set(), 2).classes == ((1,), (2,))
    with pytest.raises(ContractError):
        congruence_from_labels({Fn((1, 2)), Fn((2, 1))}, 2)


def test_substitution_compose_examples():
    K1, K2 = Graph.complete(1), Graph.complete(2)
    h = sets([0], [1])
    c = substitution_compose(h, [sets([0]), sets([0])])
    assert c.count == 2
    h = sets([0, 1], [2])
    G, _ = substitution(K2, [K2, K1])
    c = substitution_compose(h, [sets([0], [1]), sets([0])])
    assert c.count == 3 and is_proper(G, c)
    with pytest.raises(ContractError):
        substitution_compose(sets([0], [1]), [sets([0], [1]), sets([0])])
    with pytest.raises(ContractError):
        compose_blocks({0: (0,)}, {0: ({5: (0,), 6: (1,)}, 2)})


def test_splendid_one_node_delegates():
    G = Graph.complete(2)
    D = Decomposition(RootedTree.single(), (0, 0))
    tags = canonical_tagging(D, G, 1)
    c, _ = splendid_combine(G, D, tags, k=1)
    assert c.count == 2 and is_proper(G, c)


def test_base_colorers():
    for base in (BIPARTITE, GREEDY, EXACT_SMALL):
        res = run_pipeline(random_kexpr(4, 3, 30), 3, base=base)
        assert is_proper(res.graph, res.coloring)
    assert BIPARTITE.exact and not GREEDY.exact


def test_audit_root_matches():
    res = run_pipeline(random_kexpr(2, 2, 25), 2)
    assert res.audit.root.output == res.coloring.count
    assert res.audit.root.n == res.graph.n


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(2, 3), st.integers(1, 50), st.sampled_from(["depth", "search", "plugin"]))
def test_pipeline_is_proper(seed, k, leaves, split):
    res = run_pipeline(random_kexpr(seed, k, leaves), k, split=split)
    assert is_proper(res.graph, res.coloring)
    assert res.coloring.count >= omega_exact(res.graph)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 30), st.data())
def test_weighted_pipeline(seed, leaves, data):
    e = random_kexpr(seed, 2, leaves)
    w = data.draw(st.lists(st.integers(1, 3), min_size=leaves, max_size=leaves))
    res = run_pipeline(e, 2, w=w)
    assert [len(s) for s in res.coloring.sets] == w
    assert is_proper(res.graph, res.coloring, w)
    assert res.coloring.count >= weighted_omega(res.graph, w)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from([1, 2]))
def test_shallow_bound(seed, depth):
    inst = shallow_instance(seed, depth)
    c, _ = color(inst.graph, inst.decomposition, inst.tags, inst.plan, k=inst.k)
    assert c.count <= max(omega_exact(inst.graph), 1) ** 2 or c.count <= 1


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(2, 3))
def test_splendid_bound(seed, k):
    inst = splendid_instance(seed, k)
    c, _ = color(inst.graph, inst.decomposition, inst.tags, inst.plan, k=inst.k)
    om = omega_exact(inst.graph)
    assert c.count <= max(k * om * om, 1)
    for x in inst.decomposition.tree.nodes:
        H = torso(inst.decomposition, inst.graph, x)[0]
        assert H.m == 0 or omega_exact(H) == 2
