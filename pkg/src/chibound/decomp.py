"""Rooted-tree decompositions of graphs: torsos, diversity, taggings and labellings.

Node ids of a :class:`RootedTree` are arbitrary integers so that subtrees and
quotient trees can keep the ids of the tree they were cut from.  A tagging is
stored as ``{node: {vertex: label}}`` with labels in ``1..k``.

Tagging property (ii) is stated for every ancestor; since the vertex set under
an ancestor contains the vertex set under the node, it is enough to check it
against the parent, which is what :func:`find_tagging_violation` does.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .errors import CapacityError, DomainError, MalformedInputError
from .graph import Graph, induced
from .semigroup import Fn

Tagging = dict[int, dict[int, int]]


@dataclass(frozen=True)
class RootedTree:
    parent: Mapping[int, int | None]

    def __post_init__(self):
        roots = [x for x, p in self.parent.items() if p is None]
        if len(roots) != 1:
            raise MalformedInputError(f"tree must have exactly one root, found {len(roots)}")
        for x, p in self.parent.items():
            if p is not None and p not in self.parent:
                raise MalformedInputError(f"parent {p} of {x} is not a node")
        if len(self.preorder) != len(self.parent):
            raise MalformedInputError("parent pointers contain a cycle")

    @classmethod
    def from_parents(cls, parents: Sequence[int | None]) -> RootedTree:
        return cls({i: p for i, p in enumerate(parents)})

    @classmethod
    def single(cls, node: int = 0) -> RootedTree:
        return cls({node: None})

    @cached_property
    def root(self) -> int:
        return next(x for x, p in self.parent.items() if p is None)

    @cached_property
    def nodes(self) -> tuple[int, ...]:
        return tuple(sorted(self.parent))

    @cached_property
    def children(self) -> dict[int, tuple[int, ...]]:
        ch: dict[int, list[int]] = {x: [] for x in self.parent}
        for x in sorted(self.parent):
            p = self.parent[x]
            if p is not None:
                ch[p].append(x)
        return {x: tuple(c) for x, c in ch.items()}

    @cached_property
    def preorder(self) -> tuple[int, ...]:
        # Nodes on a parent cycle are unreachable from the root and get dropped,
        # which __post_init__ detects by comparing lengths.
        out = []
        stack = [x for x, p in self.parent.items() if p is None]
        ch = self.children
        while stack:
            x = stack.pop()
            out.append(x)
            stack.extend(reversed(ch[x]))
        return tuple(out)

    @cached_property
    def depth_of(self) -> dict[int, int]:
        """Edge-count depth of every node (root has depth 0)."""
        d = {}
        for x in self.preorder:
            p = self.parent[x]
            d[x] = 0 if p is None else d[p] + 1
        return d

    def __len__(self) -> int:
        return len(self.parent)

    def __contains__(self, x: int) -> bool:
        return x in self.parent

    def depth(self) -> int:
        return max(self.depth_of.values())

    def is_ancestor(self, x: int, y: int) -> bool:
        """True when ``x`` lies on the path from ``y`` to the root (``x == y`` included)."""
        dx, dy = self.depth_of[x], self.depth_of[y]
        while dy > dx:
            y = self.parent[y]
            dy -= 1
        return x == y

    def lca(self, x: int, y: int) -> int:
        dx, dy = self.depth_of[x], self.depth_of[y]
        while dx > dy:
            x = self.parent[x]
            dx -= 1
        while dy > dx:
            y = self.parent[y]
            dy -= 1
        while x != y:
            x, y = self.parent[x], self.parent[y]
        return x

    def path_to_root(self, x: int) -> list[int]:
        out = [x]
        while self.parent[x] is not None:
            x = self.parent[x]
            out.append(x)
        return out

    def subtree(self, x: int) -> list[int]:
        out = []
        stack = [x]
        while stack:
            y = stack.pop()
            out.append(y)
            stack.extend(reversed(self.children[y]))
        return out

    def induced(self, nodes: Iterable[int]) -> RootedTree:
        """The subtree on a connected node set, keeping node ids."""
        keep = set(nodes)
        par = {}
        for x in keep:
            p = self.parent[x]
            par[x] = p if p in keep else None
        return RootedTree(par)

    def edges(self) -> list[tuple[int, int]]:
        """Tree edges as ``(parent, child)`` in preorder of the child."""
        return [(self.parent[y], y) for y in self.preorder if self.parent[y] is not None]


@dataclass(frozen=True)
class Decomposition:
    tree: RootedTree
    eta: tuple[int, ...]

    def __post_init__(self):
        for u, x in enumerate(self.eta):
            if x not in self.tree:
                raise MalformedInputError(f"vertex {u} mapped to unknown node {x}")

    @cached_property
    def verts_at(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {x: [] for x in self.tree.nodes}
        for u, x in enumerate(self.eta):
            out[x].append(u)
        return out

    @cached_property
    def below(self) -> dict[int, tuple[int, ...]]:
        """``<V>_x`` for every node: vertices mapped into the subtree of ``x``."""
        acc: dict[int, list[int]] = {}
        for x in reversed(self.tree.preorder):
            vs = list(self.verts_at[x])
            for y in self.tree.children[x]:
                vs.extend(acc[y])
            acc[x] = vs
        return {x: tuple(sorted(v)) for x, v in acc.items()}

    def depth(self) -> int:
        return self.tree.depth()

    def is_shallow(self) -> bool:
        return self.depth() <= 2


def lca(tree: RootedTree, x: int, y: int) -> int:
    return tree.lca(x, y)


def depth(D: Decomposition) -> int:
    return D.depth()


def is_shallow(D: Decomposition) -> bool:
    return D.is_shallow()


def eta_edge(D: Decomposition, G: Graph, u: int, v: int) -> int:
    """The least common ancestor of the images of an edge's endpoints."""
    if not G.has_edge(u, v):
        raise DomainError(f"{u}-{v} is not an edge")
    return D.tree.lca(D.eta[u], D.eta[v])


def edges_by_node(D: Decomposition, G: Graph) -> dict[int, list[tuple[int, int]]]:
    """Partition of ``E(G)`` by the node each edge is assigned to."""
    out: dict[int, list[tuple[int, int]]] = {x: [] for x in D.tree.nodes}
    for u, v in G.edges():
        out[D.tree.lca(D.eta[u], D.eta[v])].append((u, v))
    return out


def torso(D: Decomposition, G: Graph, x: int,
          by_node: dict[int, list[tuple[int, int]]] | None = None) -> tuple[Graph, list[int]]:
    """``<G>_x``: vertices below ``x`` and the edges assigned to ``x``."""
    if x not in D.tree:
        raise MalformedInputError(f"unknown node {x}")
    verts = list(D.below[x])
    index = {v: i for i, v in enumerate(verts)}
    if by_node is None:
        es = [(u, v) for u, v in G.edges()
              if u in index and v in index and D.tree.lca(D.eta[u], D.eta[v]) == x]
    else:
        es = by_node[x]
    return Graph.from_edges(len(verts), [(index[u], index[v]) for u, v in es]), verts


def outside_classes(D: Decomposition, G: Graph) -> dict[int, list[tuple[int, ...]]]:
    """Classes of ``~_x`` for every node, each sorted, ordered by smallest member."""
    masks = G.masks
    out = {}
    for x in D.tree.nodes:
        vs = D.below[x]
        inside = 0
        for v in vs:
            inside |= 1 << v
        groups: dict[int, list[int]] = {}
        for v in vs:
            groups.setdefault(masks[v] & ~inside, []).append(v)
        out[x] = sorted((tuple(g) for g in groups.values()), key=lambda c: c[0])
    return out


def diversity(D: Decomposition, G: Graph) -> tuple[int, dict[int, list[tuple[int, ...]]]]:
    """Largest number of ``~_x`` classes over all nodes, with the per-node classes."""
    classes = outside_classes(D, G)
    return max((len(c) for c in classes.values()), default=0), classes


def canonical_tagging(D: Decomposition, G: Graph, k: int) -> Tagging:
    """Number the ``~_x`` classes ``1, 2, ...`` by smallest member at every node."""
    div, classes = diversity(D, G)
    if div > k:
        raise CapacityError(f"diversity {div} exceeds k={k}")
    tags: Tagging = {}
    for x, cls in classes.items():
        tags[x] = {v: i + 1 for i, c in enumerate(cls) for v in c}
    return tags


@dataclass(frozen=True)
class TaggingViolation:
    prop: str
    node: int
    pair: tuple[int, int]

    def __str__(self):
        return f"property ({self.prop}) fails at node {self.node} for vertices {self.pair}"


def _check_tag_shape(D: Decomposition, tags: Mapping[int, Mapping[int, int]], k: int | None):
    for x in D.tree.nodes:
        if x not in tags:
            raise MalformedInputError(f"no tags for node {x}")
        if set(tags[x]) != set(D.below[x]):
            raise MalformedInputError(f"tags at node {x} do not cover exactly <V>_x")
        if k is not None and any(not 1 <= t <= k for t in tags[x].values()):
            raise MalformedInputError(f"tag out of range 1..{k} at node {x}")


def find_tagging_violation(D: Decomposition, G: Graph, tags: Mapping[int, Mapping[int, int]],
                           k: int | None = None) -> TaggingViolation | None:
    _check_tag_shape(D, tags, k)
    masks = G.masks
    for x in D.tree.preorder:
        inside = 0
        for v in D.below[x]:
            inside |= 1 << v
        first: dict[int, int] = {}
        for v in D.below[x]:
            t = tags[x][v]
            if t in first:
                u = first[t]
                if masks[u] & ~inside != masks[v] & ~inside:
                    return TaggingViolation("i", x, (u, v))
                p = D.tree.parent[x]
                if p is not None and tags[p][u] != tags[p][v]:
                    return TaggingViolation("ii", x, (u, v))
            else:
                first[t] = v
    return None


def verify_tagging(D: Decomposition, G: Graph, tags: Mapping[int, Mapping[int, int]],
                   k: int | None = None) -> bool:
    return find_tagging_violation(D, G, tags, k) is None


@dataclass(frozen=True)
class LabelledTree:
    """A rooted tree whose edges carry transformations; edges are keyed by child."""

    tree: RootedTree
    labels: Mapping[int, Fn] = field(default_factory=dict)

    def __post_init__(self):
        for y in self.tree.nodes:
            if self.tree.parent[y] is not None and y not in self.labels:
                raise MalformedInputError(f"edge into {y} has no label")

    def label(self, parent: int, child: int) -> Fn:
        return self.labels[child]

    def word(self, x: int) -> list[Fn]:
        """Labels along the path from the root down to ``x``."""
        path = self.tree.path_to_root(x)
        return [self.labels[y] for y in reversed(path[:-1])]


def labelling_from_tagging(D: Decomposition, G: Graph | None,
                           tags: Mapping[int, Mapping[int, int]], k: int) -> LabelledTree:
    """Edge ``xy`` maps each label attained below ``y`` to that vertex's tag at ``x``; others go to 1."""
    labels = {}
    for x, y in D.tree.edges():
        image = [1] * k
        seen: dict[int, int] = {}
        for u in D.below[y]:
            i = tags[y][u]
            j = tags[x][u]
            if seen.setdefault(i, j) != j:
                raise DomainError(f"tagging is not consistent on edge {x}-{y} for label {i}")
            image[i - 1] = j
        labels[y] = Fn(tuple(image))
    return LabelledTree(D.tree, labels)


def restrict_to_vertices(D: Decomposition, tags: Mapping[int, Mapping[int, int]] | None,
                         S: Iterable[int]) -> tuple[Decomposition, Tagging | None, list[int]]:
    """Same tree, restricted to the vertices in ``S`` (renumbered increasingly).

    Returns the decomposition of the induced subgraph, the restricted tagging
    and the new-to-old vertex map.
    """
    keep = sorted(set(S))
    for v in keep:
        if not 0 <= v < len(D.eta):
            raise MalformedInputError(f"vertex {v} out of range")
    index = {v: i for i, v in enumerate(keep)}
    D2 = Decomposition(D.tree, tuple(D.eta[v] for v in keep))
    if tags is None:
        return D2, None, keep
    tags2 = {x: {index[v]: t for v, t in m.items() if v in index} for x, m in tags.items()}
    return D2, tags2, keep


def restrict_graph(G: Graph, S: Iterable[int]) -> Graph:
    return induced(G, S)[0]
