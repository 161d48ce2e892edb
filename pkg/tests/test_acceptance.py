"""Acceptance suite: one test per criterion, each recording a pass/fail line.

Run with ``pytest tests/test_acceptance.py`` or directly as a script.
"""

import random
import sys
import time
from itertools import product

import pytest

from acceptance_log import record
from oracles import brute_split_violation, brute_weighted_omega, valid_quads, word_product

from chibound.decomp import diversity, torso, verify_tagging
from chibound.engine import color
from chibound.experiment import subpower_expr
from chibound.graph import (Graph, bipartition, omega_exact, substitution_power, weighted_bipartite_color,
                            weighted_omega)
from chibound.instances import random_labelled_tree, shallow_instance, splendid_instance
from chibound.kexpr import evaluate, random_kexpr
from chibound.pipeline import run_pipeline
from chibound.semigroup import (depth_split, find_word_split_violation, full_transformation_semigroup,
                                search_word_split, verify_tree_split, verify_word_split)


def suite_params():
    return [(s, 2 + s % 2, 10 + (s * 37) % 111) for s in range(500)]


def proper(G, sets):
    return all(sets[u] and not set(sets[u]) & set(sets[v]) for u, v in G.edges())


def fingerprint(res):
    return (res.graph.edges(), res.coloring.sets, res.plan_depth)


@pytest.fixture(scope="module")
def suite():
    start = time.perf_counter()
    runs = [run_pipeline(random_kexpr(s, k, leaves), k) for s, k, leaves in suite_params()]
    return runs, time.perf_counter() - start


def test_criterion_1_end_to_end(suite):
    runs, elapsed = suite
    bad = [i for i, r in enumerate(runs) if not proper(r.graph, r.coloring.sets)]
    again = [fingerprint(run_pipeline(random_kexpr(s, k, leaves), k)) for s, k, leaves in suite_params()]
    same = again == [fingerprint(r) for r in runs]
    ok = not bad and same and elapsed < 60
    record(1, ok, f"{len(runs) - len(bad)}/500 proper, rerun identical={same}, {elapsed:.1f}s")
    assert ok


def test_criterion_2_decomposition_facts(suite):
    runs, _ = suite
    failures = 0
    for r in runs:
        D, G = r.decomposition, r.graph
        if diversity(D, G)[0] > r.k or not verify_tagging(D, G, r.tags, r.k):
            failures += 1
            continue
        if any(bipartition(torso(D, G, x)[0]) is None for x in D.tree.nodes):
            failures += 1
    record(2, failures == 0, f"{failures} failing decompositions of 500")
    assert failures == 0


def test_criterion_3_shallow_bound():
    violations, depths = [], set()
    for seed in range(100):
        inst = shallow_instance(seed, 1 + seed % 2)
        depths.add(inst.decomposition.tree.depth())
        c, _ = color(inst.graph, inst.decomposition, inst.tags, inst.plan, k=inst.k)
        om = omega_exact(inst.graph)
        if not proper(inst.graph, c.sets) or c.count > om * om:
            violations.append(seed)
    ok = not violations
    record(3, ok, f"{len(violations)} violations of count <= omega^2 on 100, depths {sorted(depths)}")
    assert ok


def test_criterion_4_splendid_bound():
    violations, errors, ratio = [], [], 0.0
    for seed in range(100):
        k = 2 + seed % 2
        inst = splendid_instance(seed, k)
        try:
            # check=True asserts the edge-parity partition, congruence, constant labels and modules
            c, audit = color(inst.graph, inst.decomposition, inst.tags, inst.plan, k=inst.k, check=True)
        except Exception as exc:  # noqa: BLE001 - every failure counts against the criterion
            errors.append((seed, repr(exc)))
            continue
        om = omega_exact(inst.graph)
        if not proper(inst.graph, c.sets) or c.count > k * om * om:
            violations.append(seed)
        ratio = max(ratio, c.count / max(k * om * om, 1))
    ok = not violations and not errors
    record(4, ok, f"{len(violations)} bound violations, {len(errors)} assertion failures, "
                  f"max count/(k omega^2)={ratio:.2f}")
    assert ok, errors[:3]


def test_criterion_5_split_machinery():
    start = time.perf_counter()
    F2 = full_transformation_semigroup(2)
    rng = random.Random(5)
    quads_cache: dict[tuple, list] = {}
    mismatches = search_fail = 0
    for word in product(F2, repeat=5):
        images = [tuple(f) for f in word]
        products = {(x, y): word_product(images[x:y]) for x in range(6) for y in range(x + 1, 6)}
        for _ in range(200):
            levels = tuple(rng.randint(1, 3) for _ in range(6))
            quads = quads_cache.get(levels)
            if quads is None:
                quads = quads_cache[levels] = valid_quads(levels)
            if find_word_split_violation(list(word), levels) != brute_split_violation(images, levels, quads,
                                                                                      products):
                mismatches += 1
        found = search_word_split(list(word), 4)
        if found is None or max(found) > 4 or not verify_word_split(list(word), found):
            search_fail += 1
    depth_fail = 0
    for seed in range(1000):
        lt = random_labelled_tree(seed, 1 + seed % 60, 2 + seed % 2)
        if not verify_tree_split(lt, depth_split(lt.tree)):
            depth_fail += 1
    elapsed = time.perf_counter() - start
    ok = mismatches == 0 and search_fail == 0 and depth_fail == 0 and elapsed < 30
    record(5, ok, f"{mismatches} verifier mismatches over 204800 checks, {search_fail} search failures, "
                  f"{depth_fail} depth-split failures, {elapsed:.1f}s")
    assert ok


def test_criterion_6_plan_depth(suite):
    runs, _ = suite
    depth_bad = sum(r.plan_depth > 3 * (r.decomposition.tree.depth() + 1) for r in runs)
    searched = search_bad = 0
    for s in range(100):
        k = 2 + s % 2
        r = run_pipeline(random_kexpr(s, k, 10 + s % 50), k, split="search")
        if r.split_kind == "search":
            searched += 1
            search_bad += r.plan_depth > 3 * k ** k or not proper(r.graph, r.coloring.sets)
    ok = depth_bad == 0 and search_bad == 0
    record(6, ok, f"depth split: {depth_bad} over bound of 500; search: {search_bad} over 3k^k "
                  f"of {searched} successful searches")
    assert ok


def test_criterion_7_substitution_family():
    start = time.perf_counter()
    C5 = Graph.cycle(5)
    omegas, same, colored = [], True, True
    for i in (1, 2, 3):
        G = substitution_power(C5, i)
        omegas.append(omega_exact(G))
        expr = subpower_expr(C5, i)
        same &= evaluate(expr).graph.edges() == G.edges()
        r = run_pipeline(expr, 5)
        colored &= proper(G, r.coloring.sets)
    elapsed = time.perf_counter() - start
    ok = omegas == [2, 4, 8] and same and colored and elapsed < 10
    record(7, ok, f"omega {omegas}, identical edges={same}, proper={colored}, {elapsed:.1f}s")
    assert ok


def test_criterion_8_oracles():
    rng = random.Random(8)
    omega_bad = 0
    for _ in range(200):
        n = rng.randint(0, 12)
        p = rng.random()
        edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
        if omega_exact(Graph.from_edges(n, edges)) != brute_weighted_omega(n, edges):
            omega_bad += 1
    bip_bad = 0
    for _ in range(200):
        n = rng.randint(1, 12)
        side = [rng.random() < 0.5 for _ in range(n)]
        edges = [(u, v) for u in range(n) for v in range(u + 1, n) if side[u] != side[v] and rng.random() < 0.5]
        w = [rng.randint(1, 5) for _ in range(n)]
        G = Graph.from_edges(n, edges)
        c = weighted_bipartite_color(G, w)
        ok_one = (c.count == weighted_omega(G, w) == brute_weighted_omega(n, edges, w)
                  and all(len(c.sets[u]) == w[u] for u in range(n)) and proper(G, c.sets))
        bip_bad += not ok_one
    ok = omega_bad == 0 and bip_bad == 0
    record(8, ok, f"{omega_bad} omega mismatches of 200, {bip_bad} bipartite colouring mismatches of 200")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
