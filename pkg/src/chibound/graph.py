"""Simple undirected graphs, weighted colorings and the exact desk-scale oracles."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

from .errors import DomainError, MalformedInputError, ResourceError

OMEGA_BUDGET = 2_000_000


@dataclass(frozen=True)
class Graph:
    """A graph on vertices ``0..n-1`` given by sorted neighbour tuples."""

    n: int
    adj: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.adj) != self.n:
            raise MalformedInputError(f"adjacency has {len(self.adj)} rows, expected {self.n}")
        for u, row in enumerate(self.adj):
            prev = -1
            for v in row:
                if not 0 <= v < self.n:
                    raise MalformedInputError(f"neighbour {v} of {u} out of range")
                if v == u:
                    raise MalformedInputError(f"self-loop at {u}")
                if v <= prev:
                    raise MalformedInputError(f"neighbours of {u} not sorted/unique")
                prev = v
        for u, row in enumerate(self.adj):
            for v in row:
                if u not in self.masks_set[v]:
                    raise MalformedInputError(f"adjacency not symmetric on {u}-{v}")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> Graph:
        rows: list[set[int]] = [set() for _ in range(n)]
        for e in edges:
            if len(e) != 2:
                raise MalformedInputError(f"edge {e!r} is not a pair")
            u, v = int(e[0]), int(e[1])
            if not (0 <= u < n and 0 <= v < n):
                raise MalformedInputError(f"edge {u}-{v} out of range for n={n}")
            if u == v:
                raise MalformedInputError(f"self-loop at {u}")
            rows[u].add(v)
            rows[v].add(u)
        return cls(n, tuple(tuple(sorted(r)) for r in rows))

    @classmethod
    def empty(cls, n: int = 0) -> Graph:
        return cls(n, tuple(() for _ in range(n)))

    @classmethod
    def complete(cls, n: int) -> Graph:
        return cls.from_edges(n, combinations(range(n), 2))

    @classmethod
    def cycle(cls, n: int) -> Graph:
        return cls.from_edges(n, [(i, (i + 1) % n) for i in range(n)])

    @cached_property
    def masks_set(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(row) for row in self.adj)

    @cached_property
    def masks(self) -> tuple[int, ...]:
        """Neighbourhoods as integer bitsets."""
        out = []
        for row in self.adj:
            m = 0
            for v in row:
                m |= 1 << v
            out.append(m)
        return tuple(out)

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in self.adj[u] if u < v]

    @property
    def m(self) -> int:
        return sum(len(r) for r in self.adj) // 2

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.masks_set[u]

    def neighbors(self, u: int) -> tuple[int, ...]:
        return self.adj[u]


@dataclass(frozen=True)
class WeightedColoring:
    """Per-vertex colour sets; ``count`` is one more than the largest colour."""

    sets: tuple[tuple[int, ...], ...]
    count: int

    @classmethod
    def from_sets(cls, sets: Iterable[Iterable[int]]) -> WeightedColoring:
        norm = tuple(tuple(sorted(set(s))) for s in sets)
        top = max((s[-1] for s in norm if s), default=-1)
        for s in norm:
            if s and s[0] < 0:
                raise MalformedInputError("negative colour")
        return cls(norm, top + 1)

    def __len__(self) -> int:
        return len(self.sets)

    def weights(self) -> list[int]:
        return [len(s) for s in self.sets]


def _check_weights(G: Graph, w: Sequence[int] | None) -> list[int]:
    if w is None:
        return [1] * G.n
    w = [int(x) for x in w]
    if len(w) != G.n:
        raise MalformedInputError(f"{len(w)} weights for {G.n} vertices")
    if any(x < 1 for x in w):
        raise MalformedInputError("weights must be positive")
    return w


def find_conflict(G: Graph, c: WeightedColoring,
                  w: Sequence[int] | None = None) -> tuple[str, tuple[int, ...]] | None:
    """Return the first reason ``c`` is not a proper weighted colouring, or None.

    The witness is ``("size", (u,))`` for a wrong set size or ``("edge", (u, v))``
    for an edge whose endpoints share a colour.
    """
    if len(c.sets) != G.n:
        raise MalformedInputError(f"colouring has {len(c.sets)} entries for {G.n} vertices")
    w = _check_weights(G, w)
    for u, s in enumerate(c.sets):
        if len(s) != w[u] or len(set(s)) != len(s):
            return ("size", (u,))
    for u, v in G.edges():
        if not set(c.sets[u]).isdisjoint(c.sets[v]):
            return ("edge", (u, v))
    return None


def is_proper(G: Graph, c: WeightedColoring, w: Sequence[int] | None = None) -> bool:
    return find_conflict(G, c, w) is None


def _iter_bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _max_weight_clique(G: Graph, w: list[int], budget: int) -> tuple[int, list[int]]:
    # Branch and bound: candidates are ordered by degeneracy, bounds come from a
    # greedy colouring where each colour class contributes its heaviest vertex.
    n = G.n
    if n == 0:
        return 0, []
    nbr = G.masks
    order = _degeneracy_order(G)
    rank = {v: i for i, v in enumerate(order)}
    best = [0, []]
    calls = [0]

    def bound_order(P: int) -> list[tuple[int, int]]:
        verts = sorted(_iter_bits(P), key=rank.__getitem__)
        out: list[tuple[int, int]] = []
        total = 0
        remaining = verts
        while remaining:
            cls_max = 0
            used = 0
            rest = []
            members = []
            for v in remaining:
                if nbr[v] & used:
                    rest.append(v)
                else:
                    used |= 1 << v
                    members.append(v)
                    if w[v] > cls_max:
                        cls_max = w[v]
            total += cls_max
            for v in members:
                out.append((v, total))
            remaining = rest
        return out

    def expand(clique: list[int], weight: int, P: int) -> None:
        calls[0] += 1
        if calls[0] > budget:
            raise ResourceError(f"clique search exceeded budget of {budget} nodes")
        ordered = bound_order(P)
        for v, b in reversed(ordered):
            if weight + b <= best[0]:
                return
            nw = weight + w[v]
            clique.append(v)
            if nw > best[0]:
                best[0] = nw
                best[1] = list(clique)
            Q = P & nbr[v]
            if Q:
                expand(clique, nw, Q)
            clique.pop()
            P &= ~(1 << v)

    expand([], 0, (1 << n) - 1)
    return best[0], sorted(best[1])


def _degeneracy_order(G: Graph) -> list[int]:
    # Repeatedly remove a minimum-degree vertex (smallest index on ties); the
    # clique search consumes this list from the back.
    deg = [len(r) for r in G.adj]
    alive = set(range(G.n))
    order = []
    while alive:
        v = min(alive, key=lambda x: (deg[x], x))
        order.append(v)
        alive.remove(v)
        for u in G.adj[v]:
            if u in alive:
                deg[u] -= 1
    return order


def max_clique(G: Graph, budget: int = OMEGA_BUDGET) -> list[int]:
    """A maximum clique of ``G`` (sorted vertex list)."""
    return _max_weight_clique(G, [1] * G.n, budget)[1]


def omega_exact(G: Graph, budget: int = OMEGA_BUDGET) -> int:
    """Exact clique number. Raises ResourceError when the search budget runs out."""
    return _max_weight_clique(G, [1] * G.n, budget)[0]


def weighted_omega(G: Graph, w: Sequence[int], budget: int = OMEGA_BUDGET) -> int:
    """Maximum over cliques of the summed vertex weights."""
    return _max_weight_clique(G, _check_weights(G, w), budget)[0]


def bipartition(G: Graph) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
    """Sides ``(A, B)`` with every edge crossing, or None if an odd cycle exists.

    Each component is searched breadth-first from its smallest vertex, which is
    placed on side A.
    """
    side = [-1] * G.n
    for s in range(G.n):
        if side[s] != -1:
            continue
        side[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v in G.adj[u]:
                if side[v] == -1:
                    side[v] = 1 - side[u]
                    queue.append(v)
                elif side[v] == side[u]:
                    return None
    a = tuple(u for u in range(G.n) if side[u] == 0)
    b = tuple(u for u in range(G.n) if side[u] == 1)
    return a, b


def weighted_bipartite_color(G: Graph, w: Sequence[int] | None = None) -> WeightedColoring:
    """Clique-exact weighted colouring of a bipartite graph.

    With ``W`` the weighted clique number, side-A vertices take the lowest
    ``w(u)`` colours and side-B vertices the highest ``w(v)`` colours below ``W``.
    """
    w = _check_weights(G, w)
    sides = bipartition(G)
    if sides is None:
        raise DomainError("graph is not bipartite")
    if G.n == 0:
        return WeightedColoring((), 0)
    top = max(w)
    for u, v in G.edges():
        top = max(top, w[u] + w[v])
    on_b = set(sides[1])
    sets = []
    for u in range(G.n):
        if u in on_b:
            sets.append(tuple(range(top - w[u], top)))
        else:
            sets.append(tuple(range(w[u])))
    return WeightedColoring(tuple(sets), top)


def greedy_color(G: Graph) -> WeightedColoring:
    """First-fit colouring in ascending vertex order."""
    return greedy_weighted_color(G, None)


def greedy_weighted_color(G: Graph, w: Sequence[int] | None = None) -> WeightedColoring:
    w = _check_weights(G, w)
    sets: list[tuple[int, ...]] = []
    for u in range(G.n):
        taken = set()
        for v in G.adj[u]:
            if v < u:
                taken.update(sets[v])
        mine = []
        c = 0
        while len(mine) < w[u]:
            if c not in taken:
                mine.append(c)
            c += 1
        sets.append(tuple(mine))
    return WeightedColoring.from_sets(sets)


def exact_weighted_color(G: Graph, w: Sequence[int] | None = None,
                         budget: int = 200_000) -> WeightedColoring:
    """Minimum-palette weighted colouring by backtracking; small graphs only."""
    w = _check_weights(G, w)
    if G.n == 0:
        return WeightedColoring((), 0)
    lower = weighted_omega(G, w)
    steps = [0]
    order = sorted(range(G.n), key=lambda u: (-len(G.adj[u]), u))

    def attempt(palette: int) -> list[tuple[int, ...]] | None:
        sets: dict[int, tuple[int, ...]] = {}

        def go(i: int) -> bool:
            if i == len(order):
                return True
            u = order[i]
            taken = set()
            for v in G.adj[u]:
                if v in sets:
                    taken.update(sets[v])
            free = [c for c in range(palette) if c not in taken]
            for choice in combinations(free, w[u]):
                steps[0] += 1
                if steps[0] > budget:
                    raise ResourceError(f"exact colouring exceeded budget of {budget}")
                sets[u] = choice
                if go(i + 1):
                    return True
                del sets[u]
            return False

        return [sets[u] for u in range(G.n)] if go(0) else None

    palette = lower
    while True:
        found = attempt(palette)
        if found is not None:
            return WeightedColoring.from_sets(found)
        palette += 1


def induced(G: Graph, S: Iterable[int]) -> tuple[Graph, list[int]]:
    """Induced subgraph on ``S``; returns it with the new-to-old vertex map."""
    keep = sorted(set(S))
    for v in keep:
        if not 0 <= v < G.n:
            raise MalformedInputError(f"vertex {v} out of range")
    index = {v: i for i, v in enumerate(keep)}
    rows = []
    for v in keep:
        rows.append(tuple(index[u] for u in G.adj[v] if u in index))
    return Graph(len(keep), tuple(rows)), keep


def substitution(G: Graph, alpha: Sequence[Graph]) -> tuple[Graph, list[tuple[int, int]]]:
    """Replace each vertex ``u`` by ``alpha[u]``, joining blocks along edges of ``G``.

    Vertices are numbered block by block in increasing ``u``; the returned map
    gives the ``(u, v)`` pair of every new vertex.
    """
    if len(alpha) != G.n:
        raise MalformedInputError(f"{len(alpha)} blocks for {G.n} vertices")
    offset = []
    pairs: list[tuple[int, int]] = []
    for u in range(G.n):
        offset.append(len(pairs))
        pairs.extend((u, v) for v in range(alpha[u].n))
    edges = []
    for u in range(G.n):
        base = offset[u]
        edges.extend((base + a, base + b) for a, b in alpha[u].edges())
    for u, v in G.edges():
        for a in range(alpha[u].n):
            for b in range(alpha[v].n):
                edges.append((offset[u] + a, offset[v] + b))
    return Graph.from_edges(len(pairs), edges), pairs


def mycielskian(G: Graph) -> Graph:
    """Mycielski construction: originals, one shadow per original, one apex."""
    n = G.n
    edges = list(G.edges())
    for u in range(n):
        for x in G.adj[u]:
            edges.append((n + u, x))
    edges.extend((n + u, 2 * n) for u in range(n))
    return Graph.from_edges(2 * n + 1, edges)


def substitution_power(F: Graph, i: int, max_vertices: int = 20_000) -> Graph:
    """``F_1 = F`` and ``F_{j+1}`` is ``F`` with every vertex replaced by ``F_j``."""
    if i < 1:
        raise DomainError("power must be positive")
    if F.n ** i > max_vertices:
        raise ResourceError(f"F_{i} would have {F.n ** i} vertices (limit {max_vertices})")
    cur = F
    for _ in range(i - 1):
        cur = substitution(F, [cur] * F.n)[0]
    return cur
