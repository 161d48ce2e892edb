import random

import pytest
from hypothesis import given, settings, strategies as st

from chibound.decomp import LabelledTree, RootedTree, diversity, labelling_from_tagging, torso
from chibound.errors import ContractError, MalformedInputError
from chibound.factor import (SHALLOW, SPLENDID, Base, Factorization, Step, build_plan, dump_plan,
                             lift_quotient, quotient, quotient_labelling)
from chibound.instances import random_labelled_tree
from chibound.kexpr import expr_to_decomposition, random_kexpr
from chibound.semigroup import Fn, depth_split, is_forward_ramsey_set, search_split

SWAP, ID = Fn((2, 1)), Fn((1, 2))
PATH = RootedTree.from_parents([None, 0, 1])


def steps(plan):
    if isinstance(plan, Step):
        yield plan
        for c in plan.children:
            yield from steps(c)


def sub_labelled(lt, nodes):
    sub = lt.tree.induced(nodes)
    return LabelledTree(sub, {y: lt.labels[y] for y in sub.nodes if sub.parent[y] is not None})


def check_kinds(lt, plan):
    for s in steps(plan):
        part = sub_labelled(lt, [x for f in s.factors for x in f])
        q = quotient_labelling(part, s.factors)
        if s.kind == SHALLOW:
            assert q.tree.depth() <= 2
        else:
            assert s.kind == SPLENDID and is_forward_ramsey_set(q.labels.values())


def plan_nodes_cover(plan):
    if isinstance(plan, Base):
        return [plan.node]
    out = []
    for f, c in zip(plan.factors, plan.children):
        got = plan_nodes_cover(c)
        assert sorted(got) == list(f)
        out.extend(got)
    return out


def test_quotient_examples():
    q, top = quotient(PATH, [[0], [1], [2]])
    assert q.parent == PATH.parent
    q, top = quotient(PATH, [[0, 1, 2]])
    assert len(q) == 1 and set(top.values()) == {0}
    q, top = quotient(PATH, [[0], [1, 2]])
    assert q.edges() == [(0, 1)] and top[2] == 1
    with pytest.raises(MalformedInputError):
        quotient(RootedTree.from_parents([None, 0, 0]), [[1, 2], [0]])
    with pytest.raises(MalformedInputError):
        Factorization(PATH, [[0], [1]])


def test_quotient_labelling_examples():
    f, g = Fn((2, 2)), SWAP
    lt = LabelledTree(PATH, {1: f, 2: g})
    q = quotient_labelling(lt, [[0, 1], [2]])
    assert q.labels == {2: f * g}
    assert quotient_labelling(lt, [[0], [1], [2]]).labels == lt.labels
    sw = LabelledTree(PATH, {1: SWAP, 2: SWAP})
    assert quotient_labelling(sw, [[0, 1], [2]]).labels == {2: ID}


def test_build_plan_examples():
    single = LabelledTree(RootedTree.single(), {})
    assert build_plan(single, {0: 1}) == Base(0)
    with pytest.raises(ContractError):
        build_plan(LabelledTree(PATH, {1: SWAP, 2: SWAP}), {0: 1, 1: 1, 2: 1})
    C1 = Fn((1, 1))
    star = LabelledTree(RootedTree.from_parents([None, 0, 0, 1]), {1: C1, 2: C1, 3: C1})
    plan = build_plan(star, {x: 1 for x in star.tree.nodes})
    assert plan.depth == 2 and plan.kind == SHALLOW
    check_kinds(star, plan)


def test_plan_dump_lines():
    lt = random_labelled_tree(5, 10, 2)
    plan = build_plan(lt, depth_split(lt.tree))
    text = dump_plan(plan, lt)
    assert text.splitlines()[0].startswith(plan.kind)
    assert sum(1 for ln in text.splitlines() if ln.strip().startswith("base")) == 10


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 60), st.integers(2, 3))
def test_depth_split_plans(seed, n, k):
    lt = random_labelled_tree(seed, n, k)
    t = depth_split(lt.tree)
    plan = build_plan(lt, t)
    assert plan.depth <= 3 * (lt.tree.depth() + 1)
    check_kinds(lt, plan)
    assert sorted(plan_nodes_cover(plan)) == sorted(lt.tree.nodes)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 40), st.integers(2, 3))
def test_search_split_plans(seed, n, k):
    lt = random_labelled_tree(seed, n, k)
    t = search_split(lt, k ** k)
    plan = build_plan(lt, t)
    assert plan.depth <= 3 * max(t.values()) <= 3 * k ** k
    check_kinds(lt, plan)


def test_lift_examples():
    D, tags, G = expr_to_decomposition(random_kexpr(8, 3, 25))
    singles = [[x] for x in D.tree.nodes]
    res = lift_quotient(D, G, tags, singles, 3)
    assert res.quotient == D
    for x in D.tree.nodes:
        assert res.torsos[x][0] == torso(D, G, x)[0]
    one = lift_quotient(D, G, tags, [list(D.tree.nodes)], 3)
    H, vmap = one.torsos[D.tree.root]
    assert len(one.quotient.tree) == 1 and H == G and vmap == list(range(G.n))


def random_factorization(rng, tree):
    factors = {}
    for x in tree.preorder:
        p = tree.parent[x]
        if p is not None and rng.random() < 0.6:
            factors[x] = factors[p]
        else:
            factors[x] = x
    groups = {}
    for x, f in factors.items():
        groups.setdefault(f, []).append(x)
    return list(groups.values())


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(2, 3), st.integers(1, 40))
def test_lift_claims_and_invariants(seed, k, leaves):
    D, tags, G = expr_to_decomposition(random_kexpr(seed, k, leaves))
    P = random_factorization(random.Random(seed), D.tree)
    res = lift_quotient(D, G, tags, P, k)
    assert len(res.claim_checks) == 5
    # vertices first appearing at each quotient node cover V(G) once
    firsts = [v for x in res.quotient.tree.nodes for v in res.quotient.verts_at[x]]
    assert sorted(firsts) == list(range(G.n))
    # torso edges partition E(G)
    all_edges = sorted(tuple(sorted((vmap[a], vmap[b]))) for H, vmap in res.torsos.values()
                       for a, b in H.edges())
    assert all_edges == G.edges()
    div, _ = diversity(D, G)
    for top, (fdec, _) in res.factor_decomps.items():
        H, _ = res.torsos[top]
        assert diversity(fdec, H)[0] <= div


def test_lift_labelling_matches_on_attained():
    D, tags, G = expr_to_decomposition(random_kexpr(21, 2, 30))
    lt = labelling_from_tagging(D, G, tags, 2)
    res = lift_quotient(D, G, tags, random_factorization(random.Random(1), D.tree), 2)
    q = res.quotient_labels
    for y, f in q.labels.items():
        for u in res.quotient.below[y]:
            assert f(tags[y][u]) == tags[q.tree.parent[y]][u]
    assert set(q.tree.nodes) <= set(lt.tree.nodes)
