"""Brute-force reference implementations, written independently of the package code."""

from __future__ import annotations

from itertools import combinations, product


def edge_set(n, edges):
    return {frozenset(e) for e in edges}


def brute_weighted_omega(n, edges, w=None):
    w = w or [1] * n
    E = edge_set(n, edges)
    best = 0
    for mask in range(1, 1 << n):
        verts = [v for v in range(n) if mask >> v & 1]
        if all(frozenset((a, b)) in E for a, b in combinations(verts, 2)):
            best = max(best, sum(w[v] for v in verts))
    return best


def brute_chromatic(n, edges):
    E = [tuple(e) for e in edges]
    for c in range(1, n + 1):
        for assign in product(range(c), repeat=n):
            if all(assign[u] != assign[v] for u, v in E):
                return c
    return 0


def compose_images(f, g):
    """Images of f after g: i -> f(g(i)), 1-based tuples."""
    return tuple(f[g[i] - 1] for i in range(len(g)))


def word_product(word):
    acc = tuple(word[0])
    for f in word[1:]:
        acc = compose_images(acc, tuple(f))
    return acc


def equivalent(levels, a, b):
    lo, hi = min(a, b), max(a, b)
    return levels[a] == levels[b] and all(levels[z] <= levels[a] for z in range(lo, hi + 1))


def valid_quads(levels):
    """All (x, y, x2, y2) with x<y, x2<y2 and the four positions pairwise equivalent."""
    n = len(levels)
    pairs = [(x, y) for x in range(n) for y in range(x + 1, n)]
    out = []
    for x, y in pairs:
        for x2, y2 in pairs:
            pts = (x, y, x2, y2)
            if all(equivalent(levels, a, b) for a, b in combinations(pts, 2)):
                out.append(pts)
    return out


def brute_split_violation(word, levels, quads=None, products=None):
    """First quadruple in lexicographic order violating the forward Ramsey condition."""
    if quads is None:
        quads = valid_quads(levels)
    if products is None:
        products = {(x, y): word_product(word[x:y])
                    for x in range(len(levels)) for y in range(x + 1, len(levels))}
    for x, y, x2, y2 in quads:
        e = products[(x, y)]
        if compose_images(e, products[(x2, y2)]) != e:
            return (x, y, x2, y2)
    return None
