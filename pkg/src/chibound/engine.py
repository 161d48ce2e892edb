"""Recursive weighted colouring over factor plans.

Colourings inside the engine are ``ColorMap`` dicts from vertex id to an
ascending tuple of colours; every vertex ``u`` holds exactly ``w[u]`` colours.
Two combiners glue the colourings of the pieces of a factorization:

* the shallow combiner pairs, position by position, the colourings of the
  torsos on the root path of each vertex and renumbers the resulting tuples;
* the splendid combiner splits the vertices into classes of the label
  congruence, colours the even-depth and odd-depth edges separately by
  substituting recursive colourings into representative vertices, and pairs
  the two results.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from .decomp import Decomposition, LabelledTree, Tagging, labelling_from_tagging
from .errors import ContractError, DomainError, InvariantError, MalformedInputError
from .factor import Base, Plan, Problem, SHALLOW, SPLENDID, lift, quotient_labels
from .graph import (Graph, WeightedColoring, exact_weighted_color, find_conflict,
                    greedy_weighted_color, weighted_bipartite_color)
from .semigroup import Fn, canonical_key, forward_ramsey_witness

ColorMap = dict[int, tuple[int, ...]]
Oracle = Callable[[int, Sequence[int], Mapping[int, int]], ColorMap]


@dataclass(frozen=True)
class BaseColorer:
    """Weighted colourer for torso graphs.

    ``guarantee`` is ``"clique-exact"`` when the palette always equals the
    weighted clique number, else ``"heuristic"``.  Base colourers must accept
    edgeless graphs.
    """

    name: str
    weighted_color: Callable[[Graph, Sequence[int]], WeightedColoring]
    guarantee: str

    @property
    def exact(self) -> bool:
        return self.guarantee == "clique-exact"


BIPARTITE = BaseColorer("bipartite", weighted_bipartite_color, "clique-exact")
GREEDY = BaseColorer("greedy", greedy_weighted_color, "heuristic")
EXACT_SMALL = BaseColorer("exact-small", exact_weighted_color, "clique-exact")
BASES = {b.name: b for b in (BIPARTITE, GREEDY, EXACT_SMALL)}


@dataclass
class AuditRecord:
    step_id: str
    kind: str
    n: int
    m: int
    inputs: list
    output: int


@dataclass
class AuditLog:
    records: list[AuditRecord] = field(default_factory=list)

    def add(self, *args) -> None:
        self.records.append(AuditRecord(*args))

    @property
    def root(self) -> AuditRecord:
        return next(r for r in self.records if r.step_id == "0")

    def to_text(self) -> str:
        return "\n".join(f"{r.step_id}\t{r.kind}\tn={r.n}\tm={r.m}\tin={r.inputs}\tout={r.output}"
                         for r in self.records)

    def to_json(self) -> str:
        return json.dumps([r.__dict__ for r in self.records])


def palette(col: Mapping[int, Sequence[int]]) -> int:
    return max((s[-1] for s in col.values() if s), default=-1) + 1


def compact(col: Mapping[int, Sequence]) -> ColorMap:
    """Renumber arbitrary sortable colours to ``0, 1, ...`` in sorted order."""
    rank = {c: i for i, c in enumerate(sorted({c for s in col.values() for c in s}))}
    return {u: tuple(sorted(rank[c] for c in s)) for u, s in col.items()}


def diagonal(coords: Sequence[Mapping[int, Sequence[int]]], vertices: Sequence[int]) -> ColorMap:
    """Pair the i-th colours of every coordinate and renumber the tuples."""
    return compact({u: list(zip(*(sorted(c[u]) for c in coords))) for u in vertices})


def to_coloring(col: Mapping[int, Sequence[int]], n: int) -> WeightedColoring:
    return WeightedColoring.from_sets(col[u] for u in range(n))


def _base_color(prob: Problem, w: Mapping[int, int], base: BaseColorer) -> ColorMap:
    verts = prob.vertices
    index = {v: i for i, v in enumerate(verts)}
    H = Graph.from_edges(len(verts), [(index[u], index[v]) for u, v in prob.all_edges()])
    c = base.weighted_color(H, [w[v] for v in verts])
    return {v: c.sets[i] for i, v in enumerate(verts)}


def _check(prob: Problem, col: ColorMap, w: Mapping[int, int], sid: str) -> None:
    for u in prob.eta:
        s = col.get(u)
        if s is None or len(s) != w[u] or len(set(s)) != len(s):
            raise InvariantError(f"step {sid}: vertex {u} has colours {s}, weight {w[u]}")
    for u, v in prob.all_edges():
        if not set(col[u]).isdisjoint(col[v]):
            raise InvariantError(f"step {sid}: edge {u}-{v} is monochromatic")


def shallow_product(prob: Problem, colorings: Mapping[int, ColorMap], w: Mapping[int, int]) -> ColorMap:
    """Shallow combiner on a quotient problem of depth at most two.

    Coordinate ``d`` of vertex ``u`` is its colouring at the depth-``d`` node
    on its root path, or all of ``range(w[u])`` past the end of the path.
    """
    tree = prob.tree
    height = tree.depth()
    if height > 2:
        raise ContractError(f"shallow combine needs depth <= 2, got {height}")
    coords: dict[int, list[Sequence[int]]] = {}
    for u, x in prob.eta.items():
        path = tree.path_to_root(x)[::-1]
        row = [colorings[a][u] for a in path]
        row += [range(w[u])] * (height + 1 - len(path))
        coords[u] = row
    return compact({u: list(zip(*(sorted(c) for c in row))) for u, row in coords.items()})


def shallow_combine(G: Graph, D: Decomposition, torso_colorings: Mapping[int, Mapping[int, Sequence[int]]],
                    w: Sequence[int] | None = None) -> WeightedColoring:
    """Combine proper colourings of every torso of a depth-<=2 decomposition.

    ``torso_colorings[x]`` maps each vertex below ``x`` (original ids) to its
    colour set in ``<G>_x``.
    """
    from .decomp import edges_by_node
    ws = [1] * G.n if w is None else list(w)
    prob = Problem(D.tree, dict(enumerate(D.eta)), edges_by_node(D, G))
    col = shallow_product(prob, {x: {u: tuple(s) for u, s in c.items()} for x, c in torso_colorings.items()},
                          dict(enumerate(ws)))
    return to_coloring(col, G.n)


@dataclass(frozen=True)
class Congruence:
    classes: tuple[tuple[int, ...], ...]

    def class_of(self) -> dict[int, int]:
        return {i: n for n, c in enumerate(self.classes) for i in c}


def congruence_from_labels(A, k: int) -> Congruence:
    """Kernel of the canonically smallest element of a forward Ramsey set.

    Checks that every ``f`` in ``A`` agrees on congruent points and maps each
    point into its own class; raises ContractError otherwise.
    """
    A = sorted(set(A), key=canonical_key)
    if not A:
        return Congruence(tuple((i,) for i in range(1, k + 1)))
    e = A[0]
    groups: dict[int, list[int]] = {}
    for i in range(1, k + 1):
        groups.setdefault(e(i), []).append(i)
    cong = Congruence(tuple(sorted((tuple(g) for g in groups.values()), key=lambda c: c[0])))
    cls = cong.class_of()
    for f in A:
        for c in cong.classes:
            if len({f(i) for i in c}) != 1:
                raise ContractError(f"{f} is not constant on class {c}")
            if cls[f(c[0])] != cls[c[0]]:
                raise ContractError(f"{f} moves class {c} elsewhere")
    return cong


def compose_blocks(hcol: Mapping[int, Sequence[int]], blocks: Mapping[int, tuple[ColorMap, int]]) -> ColorMap:
    """Substitute block colourings into their representatives' sets.

    ``blocks[rep] = (colouring, palette)``; a member's colour ``c`` becomes the
    ``c``-th smallest colour of ``rep`` in ``hcol``.
    """
    out: ColorMap = {}
    for rep, (bcol, size) in blocks.items():
        target = sorted(hcol[rep])
        if len(target) != size:
            raise ContractError(f"representative {rep} has {len(target)} colours for a block palette of {size}")
        for u, s in bcol.items():
            out[u] = tuple(target[c] for c in s)
    for u, s in hcol.items():
        if u not in blocks:
            out[u] = tuple(s)
    return out


def substitution_compose(h: WeightedColoring, blocks: Sequence[WeightedColoring]) -> WeightedColoring:
    """Colouring of ``H[alpha]`` (numbered as :func:`substitution`) from ``H``'s and the blocks'."""
    if len(blocks) != len(h.sets):
        raise MalformedInputError(f"{len(blocks)} blocks for {len(h.sets)} vertices")
    sets = []
    for u, b in enumerate(blocks):
        target = h.sets[u]
        if len(target) != b.count:
            raise ContractError(f"vertex {u} has {len(target)} colours for a block palette of {b.count}")
        sets.extend(tuple(target[c] for c in s) for s in b.sets)
    return WeightedColoring.from_sets(sets)


class _Engine:
    def __init__(self, tags: Mapping[int, Mapping[int, int]], labels: Mapping[int, Fn],
                 base: BaseColorer, k: int, check: bool):
        self.tags = tags
        self.labels = labels
        self.base = base
        self.k = k
        self.check = check
        self.audit = AuditLog()

    def run(self, prob: Problem, plan: Plan, w: Mapping[int, int], sid: str) -> ColorMap:
        if isinstance(plan, Base):
            if len(prob.tree) != 1 or prob.tree.root != plan.node:
                raise ContractError(f"step {sid}: base plan node {plan.node} does not match the problem")
            try:
                col = _base_color(prob, w, self.base)
            except DomainError as exc:
                raise DomainError(f"step {sid}: {self.base.name} base colourer failed on the torso at node {plan.node}: {exc}") from exc
            self.audit.add(sid, "base", len(prob.eta), len(prob.all_edges()), [], palette(col))
        else:
            lifted = lift(prob, plan.factors)
            index = {top: i for i, top in enumerate(lifted.tops)}

            def oracle(x: int, S: Sequence[int] | None, W: Mapping[int, int]) -> ColorMap:
                i = index[x]
                part = lifted.parts[i] if S is None else lifted.parts[i].restrict(S)
                return self.run(part, plan.children[i], W, f"{sid}.{i}")

            if plan.kind == SHALLOW:
                subs = {x: oracle(x, None, w) for x in lifted.tops}
                col = shallow_product(lifted.quotient, subs, w)
                inputs = [palette(subs[x]) for x in lifted.tops]
            elif plan.kind == SPLENDID:
                col, inputs = self.splendid(lifted.quotient, prob.tree, oracle, w, sid)
            else:
                raise MalformedInputError(f"unknown step kind {plan.kind!r}")
            self.audit.add(sid, plan.kind, len(prob.eta), len(prob.all_edges()), inputs, palette(col))
        if self.check:
            _check(prob, col, w, sid)
        return col

    def splendid(self, q: Problem, tree, oracle: Oracle, w: Mapping[int, int], sid: str):
        qt = q.tree
        if len(qt) == 1:
            col = oracle(qt.root, None, w)
            return col, [palette(col)]
        qlabels = quotient_labels(tree, qt, self.labels)
        A = set(qlabels.values())
        bad = forward_ramsey_witness(A)
        if bad is not None:
            raise ContractError(f"step {sid}: quotient labels are not forward Ramsey")
        cong = congruence_from_labels(A, self.k)
        cls = cong.class_of()
        tau: dict[int, int] = {}
        for u, x in q.eta.items():
            seen = {cls[self.tags[y][u]] for y in qt.path_to_root(x)}
            if len(seen) != 1:
                raise InvariantError(f"step {sid}: vertex {u} changes congruence class along its path")
            tau[u] = seen.pop()
        members: dict[int, list[int]] = {}
        for u in sorted(tau):
            members.setdefault(tau[u], []).append(u)
        edges = sum(len(es) for es in q.edges.values())
        by_parity = [0, 0]
        for x, es in q.edges.items():
            by_parity[(qt.depth_of[x] + 1) % 2] += len(es)
        if sum(by_parity) != edges:
            raise InvariantError(f"step {sid}: parity classes do not partition the edges")
        out: ColorMap = {}
        inputs = []
        offset = 0
        for kappa in sorted(members):
            S = set(members[kappa])
            halves = [self.parity_color(q, S, p, oracle, w, sid) for p in (0, 1)]
            part = diagonal(halves, sorted(S))
            inputs.append([palette(h) for h in halves])
            for u, s in part.items():
                out[u] = tuple(c + offset for c in s)
            offset += palette(part)
        return out, inputs

    def parity_color(self, q: Problem, S: set[int], p: int, oracle: Oracle,
                     w: Mapping[int, int], sid: str) -> ColorMap:
        """Colour the edges whose node has depth parity ``p`` (root depth one) among ``S``."""
        qt = q.tree
        at: dict[int, list[int]] = {x: [] for x in qt.nodes}
        for u in sorted(S):
            at[q.eta[u]].append(u)
        col: dict[int, ColorMap] = {}
        count: dict[int, int] = {}
        for x in reversed(qt.preorder):
            if (qt.depth_of[x] + 1) % 2 != p:
                merged: ColorMap = {}
                size = 0
                for y in qt.children[x]:
                    merged.update(col[y])
                    size = max(size, count[y])
                for u in at[x]:
                    merged[u] = tuple(range(w[u]))
                    size = max(size, w[u])
                col[x], count[x] = merged, size
                continue
            singles = list(at[x])
            blocks: dict[int, tuple[ColorMap, int]] = {}
            for y in qt.children[x]:
                singles.extend(at[y])
                for z in qt.children[y]:
                    if col[z]:
                        blocks[min(col[z])] = (col[z], count[z])
            for y in qt.children[x]:
                col.pop(y)
                count.pop(y)
                for z in qt.children[y]:
                    col.pop(z)
                    count.pop(z)
            if self.check and blocks:
                self.check_modules(q, x, S, blocks, sid)
            W = {u: w[u] for u in singles}
            for rep, (_, size) in blocks.items():
                W[rep] = size
            hcol = oracle(x, sorted(W), W)
            merged = compose_blocks(hcol, blocks)
            col[x], count[x] = merged, palette(merged)
        return col[qt.root]

    def check_modules(self, q: Problem, x: int, S: set[int], blocks, sid: str) -> None:
        nbr: dict[int, set[int]] = {}
        for u, v in q.edges[x]:
            if u in S and v in S:
                nbr.setdefault(u, set()).add(v)
                nbr.setdefault(v, set()).add(u)
        for rep, (bcol, _) in blocks.items():
            inside = set(bcol)
            want = nbr.get(rep, set()) - inside
            if nbr.get(rep, set()) & inside:
                raise InvariantError(f"step {sid}: torso edge inside the block of {rep} at node {x}")
            for u in bcol:
                if nbr.get(u, set()) != want:
                    raise InvariantError(
                        f"step {sid}: block of {rep} at node {x} is not a module (vertex {u})")


def color(G: Graph, D: Decomposition, tags: Tagging, plan: Plan, base: BaseColorer = BIPARTITE,
          w: Sequence[int] | None = None, labels: LabelledTree | None = None,
          k: int | None = None, check: bool = True) -> tuple[WeightedColoring, AuditLog]:
    """Weighted colouring of ``G`` following ``plan``; the result is always verified.

    ``labels`` defaults to the labelling induced by ``tags``; pass the one the
    plan was built from when they differ.
    """
    if k is None:
        k = max((t for row in tags.values() for t in row.values()), default=1)
    if labels is None:
        labels = labelling_from_tagging(D, G, tags, k)
    ws = [1] * G.n if w is None else [int(x) for x in w]
    if len(ws) != G.n or any(x < 1 for x in ws):
        raise MalformedInputError("weights must be positive, one per vertex")
    engine = _Engine(tags, labels.labels, base, k, check)
    prob = Problem.from_decomposition(D, G)
    col = engine.run(prob, plan, dict(enumerate(ws)), "0")
    result = to_coloring(col, G.n)
    bad = find_conflict(G, result, ws)
    if bad is not None:
        raise InvariantError(f"final colouring is improper: {bad}")
    return result, engine.audit


def torso_oracle(D: Decomposition, G: Graph, base: BaseColorer = BIPARTITE) -> Oracle:
    """Oracle colouring the torso at a node, restricted to the requested vertices."""
    from .decomp import edges_by_node
    by_node = edges_by_node(D, G)

    def oracle(x: int, S: Sequence[int] | None, W: Mapping[int, int]) -> ColorMap:
        verts = sorted(D.below[x] if S is None else S)
        keep = set(verts)
        single = Problem(D.tree.induced([x]), {v: x for v in verts},
                         {x: [(u, v) for u, v in by_node[x] if u in keep and v in keep]})
        return _base_color(single, W, base)

    return oracle


def splendid_combine(G: Graph, D: Decomposition, tags: Tagging, labels: LabelledTree | None = None,
                     w: Sequence[int] | None = None, oracle: Oracle | None = None,
                     base: BaseColorer = BIPARTITE, k: int | None = None,
                     check: bool = True) -> tuple[WeightedColoring, list]:
    """Splendid combiner applied directly to ``D`` with torso colourings from ``oracle``.

    Returns the colouring and the per-class ``[palette0, palette1]`` pairs.
    """
    from .decomp import edges_by_node
    if k is None:
        k = max((t for row in tags.values() for t in row.values()), default=1)
    if labels is None:
        labels = labelling_from_tagging(D, G, tags, k)
    ws = [1] * G.n if w is None else list(w)
    engine = _Engine(tags, labels.labels, base, k, check)
    prob = Problem(D.tree, dict(enumerate(D.eta)), edges_by_node(D, G))
    col, inputs = engine.splendid(prob, D.tree, oracle or torso_oracle(D, G, base), dict(enumerate(ws)), "0")
    result = to_coloring(col, G.n)
    bad = find_conflict(G, result, ws)
    if bad is not None:
        raise InvariantError(f"splendid colouring is improper: {bad}")
    return result, inputs


__all__ = ["BaseColorer", "BIPARTITE", "GREEDY", "EXACT_SMALL", "BASES", "AuditLog", "AuditRecord",
           "Congruence", "color", "compact", "congruence_from_labels", "shallow_combine",
           "splendid_combine", "substitution_compose", "compose_blocks", "torso_oracle"]
