"""Factorizations of labelled trees, factor plans, and lifting them to graph decompositions.

A plan is a recursion tree: every :class:`Step` cuts a connected node set into
factors whose quotient tree is either *shallow* (depth at most two) or
*splendid* (its edge labels form a forward Ramsey set); every factor is
planned again until single nodes (:class:`Base`) remain.  :func:`build_plan`
follows the level-peeling induction on a forward Ramsey split, so the plan
depth is at most three times the number of distinct levels used.

Node ids are always those of the original tree.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Union

from .decomp import (Decomposition, LabelledTree, RootedTree, Tagging, diversity,
                     edges_by_node, labelling_from_tagging, find_tagging_violation, torso)
from .errors import ContractError, InvariantError, MalformedInputError
from .graph import Graph
from .semigroup import Fn, find_tree_split_violation, forward_ramsey_witness, is_forward_ramsey_set, phi

SHALLOW = "shallow"
SPLENDID = "splendid"


class Factorization:
    """Partition of a tree's nodes into connected factors, ordered by top node."""

    def __init__(self, tree: RootedTree, factors: Iterable[Iterable[int]]):
        self.tree = tree
        facs = [tuple(sorted(set(f))) for f in factors]
        if any(not f for f in facs):
            raise MalformedInputError("empty factor")
        seen: dict[int, int] = {}
        tops = []
        for f in facs:
            fs = set(f)
            heads = [x for x in f if tree.parent.get(x) not in fs]
            if len(heads) != 1:
                raise MalformedInputError(f"factor {f} is not a connected subtree")
            tops.append(heads[0])
        order = sorted(range(len(facs)), key=lambda i: tops[i])
        self.factors = tuple(facs[i] for i in order)
        self.tops = tuple(tops[i] for i in order)
        for i, f in enumerate(self.factors):
            for x in f:
                if x in seen or x not in tree:
                    raise MalformedInputError(f"node {x} repeated or unknown")
                seen[x] = i
        if len(seen) != len(tree):
            raise MalformedInputError("factors do not cover the tree")
        self.factor_of = seen

    def top_of(self, x: int) -> int:
        return self.tops[self.factor_of[x]]

    def __len__(self) -> int:
        return len(self.factors)


def quotient(tree: RootedTree, P: Factorization | Iterable[Iterable[int]]) -> tuple[RootedTree, dict[int, int]]:
    """Contract every factor to its top; returns the quotient tree and node-to-top map."""
    if not isinstance(P, Factorization):
        P = Factorization(tree, P)
    parent = {}
    for top in P.tops:
        p = tree.parent[top]
        parent[top] = None if p is None else P.top_of(p)
    return RootedTree(parent), {x: P.top_of(x) for x in tree.nodes}


def path_product(tree: RootedTree, labels: Mapping[int, Fn], upper: int, lower: int):
    """Product of edge labels on the tree path from ``upper`` down to ``lower``."""
    word = []
    x = lower
    while x != upper:
        word.append(labels[x])
        x = tree.parent[x]
        if x is None:
            raise MalformedInputError(f"{upper} is not an ancestor of {lower}")
    word.reverse()
    return phi(word)


def quotient_labelling(lt: LabelledTree, P: Factorization | Iterable[Iterable[int]]) -> LabelledTree:
    """Quotient tree whose edges carry the products of the contracted paths."""
    qt, _ = quotient(lt.tree, P)
    labels = {y: path_product(lt.tree, lt.labels, qt.parent[y], y)
              for y in qt.nodes if qt.parent[y] is not None}
    return LabelledTree(qt, labels)


@dataclass(frozen=True)
class Base:
    node: int

    @property
    def depth(self) -> int:
        return 0


@dataclass(frozen=True)
class Step:
    kind: str
    factors: tuple[tuple[int, ...], ...]
    children: tuple["Plan", ...]

    @property
    def depth(self) -> int:
        return 1 + max(c.depth for c in self.children)

    @property
    def tops(self) -> tuple[int, ...]:
        return tuple(c.node if isinstance(c, Base) else _plan_top(c) for c in self.children)


Plan = Union[Base, Step]


def _plan_top(plan: Plan) -> int:
    while isinstance(plan, Step):
        plan = plan.children[0]
    return plan.node


def plan_nodes(plan: Plan) -> list[int]:
    if isinstance(plan, Base):
        return [plan.node]
    return sorted(x for f in plan.factors for x in f)


def plan_depth(plan: Plan) -> int:
    return plan.depth


def dump_plan(plan: Plan, lt: LabelledTree | None = None) -> str:
    """Indented one-line-per-node rendering for debugging."""
    lines = []

    def go(p: Plan, indent: int):
        pad = "  " * indent
        if isinstance(p, Base):
            lines.append(f"{pad}base node={p.node}")
            return
        summary = ""
        if lt is not None:
            sub = lt.tree.induced(x for f in p.factors for x in f)
            q = quotient_labelling(LabelledTree(sub, {y: lt.labels[y] for y in sub.nodes
                                                     if sub.parent[y] is not None}), p.factors)
            labels = sorted(set(q.labels.values()), key=tuple)
            summary = " labels={" + ",".join(str(f) for f in labels) + "}"
        size = sum(len(f) for f in p.factors)
        lines.append(f"{pad}{p.kind} factors={len(p.factors)} nodes={size}{summary}")
        for c in p.children:
            go(c, indent + 1)

    go(plan, 0)
    return "\n".join(lines)


class _Planner:
    def __init__(self, lt: LabelledTree, levels: Mapping[int, int], check: bool):
        self.lt = lt
        self.tree = lt.tree
        self.t = levels
        self.check = check

    def kids(self, x: int, S: set[int]) -> list[int]:
        return [c for c in self.tree.children[x] if c in S]

    def below(self, x: int, S: set[int]) -> set[int]:
        out = set()
        stack = [x]
        while stack:
            y = stack.pop()
            out.add(y)
            stack.extend(c for c in self.tree.children[y] if c in S)
        return out

    def step(self, kind: str, parts: list[tuple[set[int], Plan]]) -> Plan:
        if len(parts) == 1:
            return parts[0][1]
        parts.sort(key=lambda fp: min(fp[0], key=self.tree.depth_of.__getitem__))
        factors = tuple(tuple(sorted(f)) for f, _ in parts)
        step = Step(kind, factors, tuple(p for _, p in parts))
        if self.check:
            self.check_step(step)
        return step

    def check_step(self, step: Step) -> None:
        nodes = [x for f in step.factors for x in f]
        sub = self.tree.induced(nodes)
        P = Factorization(sub, step.factors)
        if step.kind == SHALLOW:
            qt, _ = quotient(sub, P)
            if qt.depth() > 2:
                raise InvariantError(f"shallow step has quotient depth {qt.depth()}")
        else:
            labels = {y: self.lt.labels[y] for y in sub.nodes if sub.parent[y] is not None}
            q = quotient_labelling(LabelledTree(sub, labels), P)
            bad = forward_ramsey_witness(q.labels.values())
            if bad is not None:
                raise InvariantError(f"splendid step labels are not forward Ramsey: {bad[0]}*{bad[1]}")

    def plan(self, S: set[int], r: int) -> Plan:
        if len(S) == 1:
            return Base(r)
        top = max(self.t[x] for x in S)
        if all(self.t[x] == top for x in S):
            return self.constant(S, r)
        X = {x for x in S if self.t[x] == top}
        count = {}
        stack = [r]
        while stack:
            x = stack.pop()
            p = self.tree.parent[x]
            count[x] = (count[p] if x != r else 0) + (x in X)
            stack.extend(self.kids(x, S))
        R = {x for x in S if count[x] <= 1}
        deep = sorted(y for y in X if count[y] == 2)
        parts = [(R, self.plan_r(R, r, X, count))]
        for y in deep:
            Ty = self.below(y, S)
            parts.append((Ty, self.plan_deep(Ty, y, X)))
        return self.step(SHALLOW, parts)

    def constant(self, S: set[int], r: int) -> Plan:
        # All nodes share one level: root alone, each child subtree splendid.
        parts: list[tuple[set[int], Plan]] = [({r}, Base(r))]
        for c in self.kids(r, S):
            Tc = self.below(c, S)
            if len(Tc) == 1:
                parts.append((Tc, Base(c)))
            else:
                parts.append((Tc, self.step(SPLENDID, [({x}, Base(x)) for x in Tc])))
        return self.step(SHALLOW, parts)

    def single_top(self, F: set[int], z: int) -> Plan:
        # Only the root of F carries the top level: root alone, children recurse.
        parts: list[tuple[set[int], Plan]] = [({z}, Base(z))]
        for c in self.kids(z, F):
            Fc = self.below(c, F)
            parts.append((Fc, self.plan(Fc, c)))
        return self.step(SHALLOW, parts)

    def plan_deep(self, Ty: set[int], y: int, X: set[int]) -> Plan:
        # Factor by least ancestor in X; the quotient is splendid.
        groups: dict[int, set[int]] = {}
        stack = [(y, y)]
        while stack:
            x, owner = stack.pop()
            if x in X:
                owner = x
            groups.setdefault(owner, set()).add(x)
            stack.extend((c, owner) for c in self.kids(x, Ty))
        parts = [(F, self.single_top(F, z)) for z, F in groups.items()]
        return self.step(SPLENDID, parts)

    def plan_r(self, R: set[int], r: int, X: set[int], count: dict[int, int]) -> Plan:
        if r in X:
            return self.single_top(R, r)
        R0 = {x for x in R if count[x] == 0}
        parts = [(R0, self.plan(R0, r))]
        for x in sorted(X & R):
            Rx = self.below(x, R)
            parts.append((Rx, self.single_top(Rx, x)))
        return self.step(SHALLOW, parts)


def build_plan(lt: LabelledTree, levels: Mapping[int, int], check: bool = True) -> Plan:
    """Factor plan for a labelled tree from a forward Ramsey split.

    Raises ContractError when the split is not forward Ramsey and
    InvariantError when a constructed step fails its kind check.
    """
    if check:
        bad = find_tree_split_violation(lt, levels)
        if bad is not None:
            raise ContractError(f"split is not forward Ramsey: leaf {bad[0]}, positions {bad[1]}")
    planner = _Planner(lt, levels, check)
    plan = planner.plan(set(lt.tree.nodes), lt.tree.root)
    distinct = len(set(levels[x] for x in lt.tree.nodes))
    if plan.depth > 3 * distinct:
        raise InvariantError(f"plan depth {plan.depth} exceeds 3 x {distinct} levels")
    return plan


# ---------------------------------------------------------------------------
# Lifting factorizations to graph decompositions.
#
# The colouring engine works on ``Problem`` values that keep global vertex and
# node ids: a (sub)tree, the vertex-to-node map and the graph's edges grouped
# by the node they are assigned to.


@dataclass
class Problem:
    tree: RootedTree
    eta: dict[int, int]
    edges: dict[int, list[tuple[int, int]]]

    @property
    def vertices(self) -> list[int]:
        return sorted(self.eta)

    def all_edges(self) -> list[tuple[int, int]]:
        return [e for es in self.edges.values() for e in es]

    def verts_at(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {x: [] for x in self.tree.nodes}
        for u in sorted(self.eta):
            out[self.eta[u]].append(u)
        return out

    def restrict(self, S: Iterable[int]) -> Problem:
        keep = set(S)
        eta = {u: x for u, x in self.eta.items() if u in keep}
        edges = {x: [(u, v) for u, v in es if u in keep and v in keep] for x, es in self.edges.items()}
        return Problem(self.tree, eta, edges)

    @classmethod
    def from_decomposition(cls, D: Decomposition, G: Graph) -> Problem:
        return cls(D.tree, dict(enumerate(D.eta)), edges_by_node(D, G))


@dataclass
class Lifted:
    quotient: Problem
    parts: list[Problem]
    tops: tuple[int, ...]


def lift(prob: Problem, factors: Sequence[Sequence[int]]) -> Lifted:
    tree = prob.tree
    P = Factorization(tree, factors)
    qtree, top_of = quotient(tree, P)
    qeta = {u: top_of[x] for u, x in prob.eta.items()}
    qedges: dict[int, list[tuple[int, int]]] = {t: [] for t in P.tops}
    for x, es in prob.edges.items():
        qedges[top_of[x]].extend(es)
    at = prob.verts_at()
    parts = []
    for f, top in zip(P.factors, P.tops):
        fs = set(f)
        eta_f: dict[int, int] = {}
        stack = [(top, top)]
        while stack:
            x, cur = stack.pop()
            if x in fs:
                cur = x
            for u in at[x]:
                eta_f[u] = cur
            stack.extend((c, cur) for c in tree.children[x])
        parts.append(Problem(tree.induced(f), eta_f, {x: prob.edges[x] for x in f}))
    return Lifted(Problem(qtree, qeta, qedges), parts, P.tops)


def quotient_labels(tree: RootedTree, qtree: RootedTree, labels: Mapping[int, Fn]) -> dict[int, Fn]:
    return {y: path_product(tree, labels, qtree.parent[y], y)
            for y in qtree.nodes if qtree.parent[y] is not None}


def check_label_consistency(prob: Problem, labels: Mapping[int, Fn], tags: Mapping[int, Mapping[int, int]]):
    """Every edge label maps a vertex's tag at the child to its tag at the parent.

    Returns the first ``(child, vertex)`` that fails, or None.
    """
    tree = prob.tree
    for u, x in prob.eta.items():
        while tree.parent[x] is not None:
            p = tree.parent[x]
            if labels[x](tags[x][u]) != tags[p][u]:
                return x, u
            x = p
    return None


@dataclass
class LiftResult:
    """Public view of a lifted factorization.

    ``torsos[top]`` is the quotient torso with its new-to-old vertex map and
    ``factor_decomps[top]`` the factor's decomposition and tagging of that torso
    (in torso numbering).  ``claim_checks`` names every assertion that passed.
    """

    quotient: Decomposition
    quotient_tags: Tagging
    quotient_labels: LabelledTree
    torsos: dict[int, tuple[Graph, list[int]]]
    factor_decomps: dict[int, tuple[Decomposition, Tagging]]
    claim_checks: list[str]


def lift_quotient(D: Decomposition, G: Graph, tags: Tagging,
                  P: Factorization | Iterable[Iterable[int]], k: int) -> LiftResult:
    """Quotient decomposition, its torsos and the factor decompositions, with claim checks.

    Checked: the quotient labelling agrees with the labelling induced by the
    restricted tagging on every attained label; the quotient has diversity at
    most ``k``; each factor decomposition reproduces the original torsos; the
    factor labelling is the restriction of the original labelling; and every
    factor tagging is valid.
    """
    if not isinstance(P, Factorization):
        P = Factorization(D.tree, P)
    lt = labelling_from_tagging(D, G, tags, k)
    prob = Problem.from_decomposition(D, G)
    lifted = lift(prob, P.factors)
    q = lifted.quotient
    qdec = Decomposition(q.tree, tuple(q.eta[u] for u in range(G.n)))
    qtags = {x: dict(tags[x]) for x in q.tree.nodes}
    qlt = quotient_labelling(lt, P)
    checks = []

    induced_lt = labelling_from_tagging(qdec, G, qtags, k)
    for y in q.tree.nodes:
        x = q.tree.parent[y]
        if x is None:
            continue
        for u in qdec.below[y]:
            i = qtags[y][u]
            if induced_lt.labels[y](i) != qlt.labels[y](i):
                raise InvariantError(f"quotient labelling differs from induced labelling at {y}, label {i}")
    checks.append("labelling-commutes-on-attained-labels")

    div, _ = diversity(qdec, G)
    if div > k:
        raise InvariantError(f"quotient diversity {div} exceeds {k}")
    checks.append("quotient-diversity")

    by_node = edges_by_node(D, G)
    torsos = {}
    fdecs = {}
    for part, top in zip(lifted.parts, lifted.tops):
        H, vmap = torso(qdec, G, top)
        index = {v: i for i, v in enumerate(vmap)}
        if set(part.eta) != set(vmap):
            raise InvariantError(f"factor at {top} covers the wrong vertices")
        hedges = {tuple(sorted((index[u], index[v]))) for es in part.edges.values() for u, v in es}
        if hedges != set(H.edges()):
            raise InvariantError(f"torso at {top} does not match the factor's edges")
        fdec = Decomposition(part.tree, tuple(part.eta[v] for v in vmap))
        ftags = {x: {index[v]: t for v, t in tags[x].items()} for x in part.tree.nodes}
        for y in part.tree.nodes:
            Hy, hmap = torso(fdec, H, y)
            Gy, gmap = torso(D, G, y, by_node)
            if [vmap[v] for v in hmap] != gmap or Hy.edges() != Gy.edges():
                raise InvariantError(f"factor torso at node {y} differs from the original torso")
        flt = labelling_from_tagging(fdec, H, ftags, k)
        for y, f in flt.labels.items():
            if f != lt.labels[y]:
                raise InvariantError(f"factor labelling differs from the restricted labelling at {y}")
        bad = find_tagging_violation(fdec, H, ftags, k)
        if bad is not None:
            raise InvariantError(f"factor tagging invalid: {bad}")
        torsos[top] = (H, vmap)
        fdecs[top] = (fdec, ftags)
    checks += ["factor-torsos", "factor-labelling-restricts", "factor-tagging-valid"]
    return LiftResult(qdec, qtags, qlt, torsos, fdecs, checks)


def splendid_labels_ok(labels: Iterable[Fn]) -> bool:
    return is_forward_ramsey_set(labels)
