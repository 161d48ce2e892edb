"""k-expressions: parsing, evaluation, random generation and conversion to decompositions.

Concrete syntax (whitespace-insensitive)::

    E := v(L) | j(L,L,E) | r(L,L,E) | u(E,E)

``j(i,j,E)`` joins labels ``i`` and ``j``, ``r(i,j,E)`` renames ``i`` to ``j``
and ``u`` is disjoint union.  Vertices of the evaluated graph are the ``v``
leaves numbered left to right.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence, Union

from .decomp import Decomposition, RootedTree, Tagging
from .errors import ParseError, SemanticError
from .graph import Graph


@dataclass(frozen=True)
class Intro:
    label: int


@dataclass(frozen=True)
class Join:
    i: int
    j: int
    child: "KExpr"


@dataclass(frozen=True)
class Rename:
    i: int
    j: int
    child: "KExpr"


@dataclass(frozen=True)
class Union_:
    left: "KExpr"
    right: "KExpr"


KExpr = Union[Intro, Join, Rename, Union_]


@dataclass(frozen=True)
class LabelledGraph:
    graph: Graph
    labels: tuple[int, ...]


def children(e: KExpr) -> tuple[KExpr, ...]:
    if isinstance(e, Intro):
        return ()
    if isinstance(e, Union_):
        return (e.left, e.right)
    return (e.child,)


def _postorder(e: KExpr) -> list[KExpr]:
    # One entry per occurrence, children before parents.
    out = []
    stack = [(e, False)]
    while stack:
        node, done = stack.pop()
        if done:
            out.append(node)
            continue
        stack.append((node, True))
        for c in reversed(children(node)):
            stack.append((c, False))
    return out


def max_label(e: KExpr) -> int:
    top = 0
    for node in _postorder(e):
        if isinstance(node, Intro):
            top = max(top, node.label)
        elif isinstance(node, (Join, Rename)):
            top = max(top, node.i, node.j)
    return top


def count_leaves(e: KExpr) -> int:
    return sum(isinstance(node, Intro) for node in _postorder(e))


class _Parser:
    def __init__(self, text: str, k: int):
        self.s = text
        self.pos = 0
        self.k = k

    def skip(self):
        while self.pos < len(self.s) and self.s[self.pos].isspace():
            self.pos += 1

    def expect(self, ch: str):
        self.skip()
        if self.pos >= len(self.s) or self.s[self.pos] != ch:
            found = self.s[self.pos] if self.pos < len(self.s) else "end of input"
            raise ParseError(f"expected {ch!r}, found {found!r}", self.pos)
        self.pos += 1

    def label(self) -> int:
        self.skip()
        start = self.pos
        while self.pos < len(self.s) and self.s[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            raise ParseError("expected a label", start)
        value = int(self.s[start:self.pos])
        if not 1 <= value <= self.k:
            raise SemanticError(f"label {value} at position {start} outside 1..{self.k}")
        return value

    def expr(self) -> KExpr:
        self.skip()
        if self.pos >= len(self.s):
            raise ParseError("unexpected end of input", self.pos)
        op = self.s[self.pos]
        at = self.pos
        self.pos += 1
        if op == "v":
            self.expect("(")
            lab = self.label()
            self.expect(")")
            return Intro(lab)
        if op in "jr":
            self.expect("(")
            i = self.label()
            self.expect(",")
            j = self.label()
            self.expect(",")
            sub = self.expr()
            self.expect(")")
            if i == j:
                raise SemanticError(f"{op}({i},{j},...) at position {at} needs distinct labels")
            return Join(i, j, sub) if op == "j" else Rename(i, j, sub)
        if op == "u":
            self.expect("(")
            a = self.expr()
            self.expect(",")
            b = self.expr()
            self.expect(")")
            return Union_(a, b)
        raise ParseError(f"unknown operator {op!r}", at)


def parse(text: str, k: int) -> KExpr:
    p = _Parser(text, k)
    e = p.expr()
    p.skip()
    if p.pos != len(p.s):
        raise ParseError("trailing input", p.pos)
    return e


def render(e: KExpr) -> str:
    """Canonical text: no whitespace, decimal labels."""
    parts: dict[int, str] = {}
    for node in _postorder(e):
        if isinstance(node, Intro):
            s = f"v({node.label})"
        elif isinstance(node, Union_):
            s = f"u({parts[id(node.left)]},{parts[id(node.right)]})"
        else:
            op = "j" if isinstance(node, Join) else "r"
            s = f"{op}({node.i},{node.j},{parts[id(node.child)]})"
        parts[id(node)] = s
    return parts[id(e)]


def _flatten(e: KExpr) -> tuple[list[KExpr], list[int | None], list[list[int]]]:
    # Preorder occurrences; a subterm object shared between positions gets one
    # entry per position.
    nodes: list[KExpr] = []
    parent: list[int | None] = []
    kids: list[list[int]] = []
    stack: list[tuple[KExpr, int | None]] = [(e, None)]
    while stack:
        node, par = stack.pop()
        idx = len(nodes)
        nodes.append(node)
        parent.append(par)
        kids.append([])
        if par is not None:
            kids[par].append(idx)
        for c in reversed(children(node)):
            stack.append((c, idx))
    return nodes, parent, kids


def _walk_graph(e: KExpr):
    """Bottom-up evaluation over preorder occurrences.

    Returns ``(nodes, parent, labels_at, n, edges)`` where ``labels_at[i]`` maps
    every vertex built by occurrence ``i`` to its label there.
    """
    nodes, parent, kids = _flatten(e)
    leaf_id = {}
    for i, node in enumerate(nodes):
        if isinstance(node, Intro):
            leaf_id[i] = len(leaf_id)
    labels_at: list[dict[int, int]] = [{} for _ in nodes]
    edges: list[tuple[int, int]] = []
    for i in range(len(nodes) - 1, -1, -1):
        node = nodes[i]
        if isinstance(node, Intro):
            labels_at[i] = {leaf_id[i]: node.label}
        elif isinstance(node, Union_):
            a, b = kids[i]
            labels_at[i] = {**labels_at[a], **labels_at[b]}
        else:
            old = labels_at[kids[i][0]]
            if isinstance(node, Join):
                labels_at[i] = dict(old)
                a = [v for v, t in old.items() if t == node.i]
                b = [v for v, t in old.items() if t == node.j]
                edges.extend((u, v) for u in a for v in b)
            else:
                labels_at[i] = {v: (node.j if t == node.i else t) for v, t in old.items()}
    return nodes, parent, labels_at, len(leaf_id), edges


def evaluate(e: KExpr) -> LabelledGraph:
    _, _, labels_at, n, edges = _walk_graph(e)
    top = labels_at[0]
    return LabelledGraph(Graph.from_edges(n, edges), tuple(top[v] for v in range(n)))


def random_kexpr(seed: int, k: int, leaves: int, join_prob: float = 0.6,
                 max_wrappers: int = 2) -> KExpr:
    """Seeded bottom-up random k-expression with exactly ``leaves`` leaves.

    Starts from ``leaves`` random introductions and repeatedly unions two
    random subterms, wrapping the result in 0..``max_wrappers`` joins (with
    probability ``join_prob`` each) or renames.  Subterm order is preserved so
    leaf numbering stays left to right.
    """
    if leaves < 1 or k < 2:
        raise SemanticError("need leaves >= 1 and k >= 2")
    rng = random.Random(seed)
    pool: list[KExpr] = [Intro(rng.randint(1, k)) for _ in range(leaves)]
    while len(pool) > 1:
        a = rng.randrange(len(pool) - 1)
        term: KExpr = Union_(pool[a], pool[a + 1])
        for _ in range(rng.randint(0, max_wrappers)):
            i, j = rng.sample(range(1, k + 1), 2)
            term = Join(i, j, term) if rng.random() < join_prob else Rename(i, j, term)
        pool[a:a + 2] = [term]
    return pool[0]


def skeleton_expr(F: Graph, parts: Sequence[KExpr] | None = None) -> KExpr:
    """Expression building ``F`` with vertex ``u`` carrying label ``u + 1``.

    With ``parts`` given, vertex ``u`` is replaced by ``parts[u]`` with all its
    labels renamed to ``u + 1`` first.
    """
    n = F.n
    if n == 0:
        raise SemanticError("skeleton graph must have at least one vertex")
    k = max([n] + [max_label(p) for p in parts or ()])
    blocks: list[KExpr] = []
    for u in range(n):
        if parts is None:
            blocks.append(Intro(u + 1))
            continue
        term = parts[u]
        for lab in range(1, k + 1):
            if lab != u + 1:
                term = Rename(lab, u + 1, term)
        blocks.append(term)
    term = blocks[0]
    for b in blocks[1:]:
        term = Union_(term, b)
    for u, v in F.edges():
        term = Join(u + 1, v + 1, term)
    return term


def kexpr_substitute(F: Graph, parts: Sequence[KExpr], k: int | None = None) -> KExpr:
    """Expression for ``F`` with vertex ``u`` substituted by the graph of ``parts[u]``.

    Raises SemanticError when ``k`` is given and is smaller than the labels needed.
    """
    if len(parts) != F.n:
        raise SemanticError(f"{len(parts)} parts for {F.n} skeleton vertices")
    need = max([F.n] + [max_label(p) for p in parts])
    if k is not None and k < need:
        raise SemanticError(f"label budget {k} too small, need {need}")
    return skeleton_expr(F, parts)


def expression_tree(e: KExpr) -> tuple[RootedTree, list[KExpr], list[int]]:
    """Preorder-numbered tree of subterm occurrences, the subterm per node and ``eta``."""
    nodes, parent, _ = _flatten(e)
    eta = [i for i, node in enumerate(nodes) if isinstance(node, Intro)]
    return RootedTree(dict(enumerate(parent))), nodes, eta


def expr_to_decomposition(e: KExpr) -> tuple[Decomposition, Tagging, Graph]:
    """Decomposition along the expression tree with tags given by subterm labels.

    Every vertex is mapped to its introducing leaf and tagged at each node with
    its label in the graph built by that subterm.
    """
    nodes, parent, labels_at, n, edges = _walk_graph(e)
    eta = [i for i, node in enumerate(nodes) if isinstance(node, Intro)]
    tree = RootedTree(dict(enumerate(parent)))
    tags: Tagging = dict(enumerate(labels_at))
    return Decomposition(tree, tuple(eta)), tags, Graph.from_edges(n, edges)
