"""Seeded instance generators for tests, experiments and the acceptance suite."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .decomp import Decomposition, LabelledTree, RootedTree, Tagging, canonical_tagging, diversity, torso
from .factor import Base, Plan, Step, SHALLOW, SPLENDID
from .graph import Graph, bipartition
from .semigroup import Fn


@dataclass
class Instance:
    graph: Graph
    decomposition: Decomposition
    tags: Tagging
    k: int
    plan: Plan


def random_tree(rng: random.Random, n: int) -> RootedTree:
    """Uniform random recursive tree on nodes ``0..n-1`` rooted at 0."""
    return RootedTree.from_parents([None] + [rng.randrange(i) for i in range(1, n)])


def random_labelled_tree(seed: int, n: int, k: int) -> LabelledTree:
    rng = random.Random(seed)
    tree = random_tree(rng, n)
    labels = {y: Fn(rng.randint(1, k) for _ in range(k)) for y in tree.nodes if y != tree.root}
    return LabelledTree(tree, labels)


def _singleton_plan(tree: RootedTree, kind: str) -> Plan:
    if len(tree) == 1:
        return Base(tree.root)
    return Step(kind, tuple((x,) for x in sorted(tree.nodes)), tuple(Base(x) for x in sorted(tree.nodes)))


def shallow_instance(seed: int, depth: int, edge_prob: float = 0.5) -> Instance:
    """Decomposition of depth ``depth`` (1 or 2) whose torsos are all bipartite.

    Every node sends each child subtree, and each vertex placed at it, to one
    of two sides; edges are drawn only across sides between vertices whose
    images have that node as lowest common ancestor.
    """
    rng = random.Random(seed)
    parents: list[int | None] = [None]
    frontier = [0]
    for _ in range(depth):
        nxt = []
        for x in frontier:
            for _ in range(rng.randint(1, 3)):
                parents.append(x)
                nxt.append(len(parents) - 1)
        frontier = nxt
    tree = RootedTree.from_parents(parents)
    eta: list[int] = []
    for x in tree.nodes:
        leaf = not tree.children[x]
        for _ in range(rng.randint(1 if leaf else 0, 3)):
            eta.append(x)
    D = Decomposition(tree, tuple(eta))
    side_of_child = {x: {c: rng.randrange(2) for c in tree.children[x]} for x in tree.nodes}
    side_at = {u: rng.randrange(2) for u in range(len(eta))}
    # _branch gives the child of x whose subtree holds a node (None at x itself).
    edges = []
    n = len(eta)
    for u in range(n):
        for v in range(u + 1, n):
            x = tree.lca(eta[u], eta[v])
            cu = _branch(tree, x, eta[u])
            cv = _branch(tree, x, eta[v])
            if cu is not None and cu == cv:
                continue
            su = side_at[u] if cu is None else side_of_child[x][cu]
            sv = side_at[v] if cv is None else side_of_child[x][cv]
            if su != sv and rng.random() < edge_prob:
                edges.append((u, v))
    G = Graph.from_edges(n, edges)
    k, _ = diversity(D, G)
    tags = canonical_tagging(D, G, max(k, 1))
    return Instance(G, D, tags, max(k, 1), _singleton_plan(tree, SHALLOW))


def _branch(tree: RootedTree, x: int, y: int) -> int | None:
    if y == x:
        return None
    while tree.parent[y] != x:
        y = tree.parent[y]
    return y


def _partition(rng: random.Random, k: int) -> list[list[int]]:
    blocks: list[list[int]] = []
    for i in range(1, k + 1):
        j = rng.randrange(len(blocks) + 1)
        if j == len(blocks):
            blocks.append([i])
        else:
            blocks[j].append(i)
    return sorted(blocks)


def splendid_instance(seed: int, k: int, nodes: int = 12, join_prob: float = 0.5,
                      attempts: int = 200) -> Instance:
    """Decomposition with bipartite torsos whose edge labels form a forward Ramsey set.

    All edge labels share a kernel: a random partition of ``[k]`` with every
    class sent to one of its own points (the class of 1 always to 1).  Each
    non-root node carries anchor vertices so that every label outside the
    class of 1 is attained, which makes the induced labelling equal to the
    chosen maps.  Edges come from label joins at each node as in a
    k-expression; draws with a non-bipartite torso are rejected.
    """
    rng = random.Random(seed)
    for _ in range(attempts):
        inst = _splendid_attempt(rng, k, nodes, join_prob)
        if inst is not None:
            return inst
    raise RuntimeError(f"no bipartite-governed splendid instance after {attempts} attempts")


def _splendid_attempt(rng: random.Random, k: int, nodes: int, join_prob: float) -> Instance | None:
    tree = random_tree(rng, rng.randint(2, nodes))
    blocks = _partition(rng, k)
    outside_one = [i for b in blocks if 1 not in b for i in b]
    maps: dict[int, Fn] = {}
    for y in tree.nodes:
        if y == tree.root:
            continue
        image = [0] * k
        for b in blocks:
            target = 1 if 1 in b else rng.choice(b)
            for i in b:
                image[i - 1] = target
        maps[y] = Fn(image)
    eta: list[int] = []
    tags: dict[int, dict[int, int]] = {x: {} for x in tree.nodes}
    for x in reversed(tree.preorder):
        row = tags[x]
        for c in tree.children[x]:
            for u, t in tags[c].items():
                row[u] = maps[c](t)
        for _ in range(rng.randint(0, 2)):
            eta.append(x)
            row[len(eta) - 1] = rng.randint(1, k)
        if x != tree.root:
            have = set(row.values())
            for i in outside_one:
                if i not in have:
                    eta.append(x)
                    row[len(eta) - 1] = i
    n = len(eta)
    if n == 0:
        return None
    D = Decomposition(tree, tuple(eta))
    edges = set()
    for x in tree.nodes:
        for a in range(1, k + 1):
            for b in range(a + 1, k + 1):
                if rng.random() < join_prob:
                    A = [u for u, t in tags[x].items() if t == a]
                    B = [u for u, t in tags[x].items() if t == b]
                    edges.update((min(u, v), max(u, v)) for u in A for v in B)
    G = Graph.from_edges(n, sorted(edges))
    for x in tree.nodes:
        H, _ = torso(D, G, x)
        if bipartition(H) is None:
            return None
    return Instance(G, D, tags, k, _singleton_plan(tree, SPLENDID))
