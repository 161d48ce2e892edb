import pytest
from hypothesis import given, settings, strategies as st

from chibound.decomp import diversity, eta_edge, labelling_from_tagging, torso, verify_tagging
from chibound.errors import ParseError, SemanticError
from chibound.graph import Graph, bipartition, omega_exact
from chibound.kexpr import (Intro, Join, Rename, Union_, count_leaves, evaluate, expr_to_decomposition,
                            kexpr_substitute, parse, random_kexpr, render, skeleton_expr)
from chibound.semigroup import Fn

STAR = "j(1,2,u(u(v(1),v(1)),v(2)))"
K2_EXPR = "j(1,2,u(v(1),v(2)))"


def test_parse_examples():
    assert parse(K2_EXPR, 2) == Join(1, 2, Union_(Intro(1), Intro(2)))
    with pytest.raises(SemanticError):
        parse("v(3)", 2)
    with pytest.raises(SemanticError):
        parse("j(1,1,v(1))", 2)


def test_parse_errors_carry_positions():
    with pytest.raises(ParseError) as info:
        parse("u(v(1) v(2))", 2)
    assert info.value.position == 7
    with pytest.raises(ParseError):
        parse("v(1) extra", 2)
    with pytest.raises(ParseError):
        parse("x(1)", 2)


def test_whitespace_and_render():
    e = parse(" j( 1 , 2 ,\n u(v(1), v(2)) ) ", 2)
    assert render(e) == K2_EXPR


def test_evaluate_examples():
    lg = evaluate(parse("u(v(1),v(1))", 2))
    assert lg.graph.n == 2 and lg.graph.m == 0 and lg.labels == (1, 1)
    lg = evaluate(parse(K2_EXPR, 2))
    assert lg.graph.edges() == [(0, 1)] and lg.labels == (1, 2)
    assert evaluate(parse(STAR, 2)).graph.edges() == [(0, 2), (1, 2)]


def test_rename_changes_labels():
    lg = evaluate(parse("r(1,2,u(v(1),v(3)))", 3))
    assert lg.labels == (2, 3)


def test_random_kexpr_determinism():
    a, b = random_kexpr(5, 3, 30), random_kexpr(5, 3, 30)
    assert a == b and render(a) == render(b)
    for seed in range(20):
        e = random_kexpr(seed, 2, 10)
        assert count_leaves(e) == 10 and evaluate(e).graph.n == 10
    with pytest.raises(SemanticError):
        random_kexpr(0, 1, 5)


def test_round_trip_many():
    for seed in range(1000):
        e = random_kexpr(seed, 2 + seed % 3, 1 + seed % 25)
        assert parse(render(e), 4) == e


def test_kexpr_substitute_examples():
    k2 = parse(K2_EXPR, 2)
    K2 = Graph.complete(2)
    assert evaluate(kexpr_substitute(K2, [k2, k2])).graph.edges() == Graph.complete(4).edges()
    assert evaluate(kexpr_substitute(K2, [Intro(1), k2])).graph.edges() == Graph.complete(3).edges()
    C5 = Graph.cycle(5)
    assert omega_exact(evaluate(kexpr_substitute(C5, [k2] * 5)).graph) == 4
    with pytest.raises(SemanticError):
        kexpr_substitute(C5, [k2] * 5, k=3)


def test_skeleton_expr():
    C5 = Graph.cycle(5)
    lg = evaluate(skeleton_expr(C5))
    assert lg.graph == C5 and lg.labels == (1, 2, 3, 4, 5)


def test_star_decomposition():
    D, tags, G = expr_to_decomposition(parse(STAR, 2))
    # preorder: 0 join, 1 union, 2 union, 3-4 the label-1 leaves, 5 the label-2 leaf
    assert D.eta == (3, 4, 5)
    assert eta_edge(D, G, 0, 2) == eta_edge(D, G, 1, 2) == 1
    H, verts = torso(D, G, 1)
    assert H.m == 2 and verts == [0, 1, 2]
    assert torso(D, G, 0)[0].m == 0
    assert diversity(D, G)[0] == 1
    assert verify_tagging(D, G, tags, 2)


def test_single_leaf_decomposition():
    D, tags, G = expr_to_decomposition(parse("v(1)", 2))
    assert len(D.tree) == 1 and G.n == 1
    assert torso(D, G, 0)[0].n == 1


def test_k2_diversity():
    D, _, G = expr_to_decomposition(parse(K2_EXPR, 2))
    assert diversity(D, G)[0] <= 2


def test_labelling_on_rename_and_join_edges():
    D, tags, G = expr_to_decomposition(parse("r(1,2,j(1,3,u(v(1),v(3))))", 3))
    lt = labelling_from_tagging(D, G, tags, 3)
    assert lt.labels[1] == Fn((2, 1, 3))      # rename: attained 1 -> 2, 3 stays
    assert lt.labels[2] == Fn((1, 1, 3))      # join: identity on attained {1, 3}


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(2, 4), st.integers(1, 40))
def test_decomposition_guarantees(seed, k, leaves):
    e = random_kexpr(seed, k, leaves)
    D, tags, G = expr_to_decomposition(e)
    assert G == evaluate(e).graph
    assert diversity(D, G)[0] <= k
    assert verify_tagging(D, G, tags, k)
    for x in D.tree.nodes:
        assert bipartition(torso(D, G, x)[0]) is not None
    from chibound.kexpr import expression_tree
    _, subterms, _ = expression_tree(e)
    for u, v in G.edges():
        assert isinstance(subterms[eta_edge(D, G, u, v)], Union_)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(2, 4))
def test_induced_labels_follow_renames(seed, k):
    e = random_kexpr(seed, k, 15)
    D, tags, G = expr_to_decomposition(e)
    from chibound.kexpr import expression_tree
    _, subterms, _ = expression_tree(e)
    lt = labelling_from_tagging(D, G, tags, k)
    for y, f in lt.labels.items():
        parent = subterms[D.tree.parent[y]]
        for i in set(tags[y].values()):
            if isinstance(parent, Rename):
                assert f(i) == (parent.j if i == parent.i else i)
            else:
                assert f(i) == i
