"""Transformation semigroups, forward Ramsey sets and splits of words and trees.

Elements only need to support ``*`` (the semigroup product), so the same
verifiers work for :class:`Fn` and for elements of a :class:`FiniteSemigroup`
given by a multiplication table.

Positions of a word of length ``n`` are ``0..n``; the segment ``(x, y)`` covers
letters ``x+1..y`` (1-based), i.e. ``word[x:y]`` in Python slicing.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from itertools import product
from typing import TYPE_CHECKING, Callable, Hashable, Iterable, Mapping, Protocol, Sequence

from .errors import DomainError, MalformedInputError, ResourceError

if TYPE_CHECKING:
    from .decomp import LabelledTree, RootedTree

SEARCH_BUDGET = 200_000


class Fn(tuple):
    """A map ``[k] -> [k]`` stored as its 1-based image tuple.

    ``f * g`` is the map ``i -> f(g(i))``.
    """

    __slots__ = ()
    _mul_cache: dict = {}

    def __new__(cls, image: Iterable[int]):
        image = tuple(int(i) for i in image)
        k = len(image)
        if k == 0 or any(not 1 <= i <= k for i in image):
            raise MalformedInputError(f"invalid function image {image!r}")
        return super().__new__(cls, image)

    @property
    def k(self) -> int:
        return len(self)

    def __call__(self, i: int) -> int:
        return tuple.__getitem__(self, i - 1)

    def __mul__(self, other: Fn) -> Fn:
        key = (self, other)
        hit = Fn._mul_cache.get(key)
        if hit is None:
            if len(other) != len(self):
                raise DomainError("cannot compose maps on different ranges")
            hit = tuple.__new__(Fn, tuple(self[j - 1] for j in other))
            if len(Fn._mul_cache) < 1_000_000:
                Fn._mul_cache[key] = hit
        return hit

    def __repr__(self) -> str:
        return "(" + " ".join(str(i) for i in self) + ")"

    __str__ = __repr__

    @classmethod
    def identity(cls, k: int) -> Fn:
        return cls(range(1, k + 1))

    @classmethod
    def const(cls, k: int, c: int) -> Fn:
        return cls([c] * k)

    @classmethod
    def parse(cls, text: str) -> Fn:
        body = text.strip()
        if not (body.startswith("(") and body.endswith(")")):
            raise MalformedInputError(f"expected '(i1 ... ik)', got {text!r}")
        try:
            return cls(int(t) for t in body[1:-1].split())
        except ValueError as exc:
            raise MalformedInputError(f"bad function text {text!r}") from exc

    def is_constant(self) -> bool:
        return len(set(self)) == 1


def full_transformation_semigroup(k: int) -> list[Fn]:
    """All ``k**k`` maps ``[k] -> [k]`` in lexicographic order of images."""
    return [Fn(img) for img in product(range(1, k + 1), repeat=k)]


class FiniteSemigroup:
    """A semigroup on ``0..m-1`` given by a multiplication table."""

    def __init__(self, table: Sequence[Sequence[int]]):
        m = len(table)
        self.table = tuple(tuple(row) for row in table)
        if any(len(r) != m or any(not 0 <= c < m for c in r) for r in self.table):
            raise MalformedInputError("multiplication table must be square over 0..m-1")
        t = self.table
        for a in range(m):
            for b in range(m):
                for c in range(m):
                    if t[t[a][b]][c] != t[a][t[b][c]]:
                        raise DomainError(f"table is not associative at ({a},{b},{c})")
        self._elems = [Elem(self, i) for i in range(m)]

    def __len__(self) -> int:
        return len(self.table)

    def __getitem__(self, i: int) -> Elem:
        return self._elems[i]

    def elements(self) -> list[Elem]:
        return list(self._elems)


@dataclass(frozen=True)
class Elem:
    sg: FiniteSemigroup
    idx: int

    def __mul__(self, other: Elem) -> Elem:
        return self.sg[self.sg.table[self.idx][other.idx]]

    def __repr__(self) -> str:
        return f"s{self.idx}"

    def __lt__(self, other: Elem) -> bool:
        return self.idx < other.idx


def compose(f, g):
    return f * g


def phi(word: Sequence):
    """Left-to-right product of a non-empty word."""
    if not word:
        raise DomainError("the product of the empty word is undefined")
    return reduce(lambda a, b: a * b, word)


def is_forward_ramsey_set(A: Iterable) -> bool:
    """True iff ``e * f == e`` for every ordered pair of members."""
    A = list(set(A))
    return all(e * f == e for e in A for f in A)


def forward_ramsey_witness(A: Iterable):
    A = sorted(set(A), key=repr)
    for e in A:
        for f in A:
            if e * f != e:
                return e, f
    return None


def split_classes(levels: Sequence[int]) -> list[list[int]]:
    """Equivalence classes of positions under a split.

    Two positions are equivalent when they share a level and no position
    between them has a higher level.  Only classes with at least two members
    are returned, in order of their first position.
    """
    classes: list[list[int]] = []
    open_at: dict[int, list[int]] = {}
    for p, lv in enumerate(levels):
        for higher in [l for l in open_at if l < lv]:
            cls = open_at.pop(higher)
            if len(cls) > 1:
                classes.append(cls)
        open_at.setdefault(lv, []).append(p)
    for cls in open_at.values():
        if len(cls) > 1:
            classes.append(cls)
    classes.sort(key=lambda c: c[0])
    return classes


def _segment_products(word: Sequence, positions: Sequence[int]) -> dict[tuple[int, int], object]:
    out = {}
    for a, x in enumerate(positions):
        acc = None
        prev = x
        for y in positions[a + 1:]:
            seg = phi(word[prev:y])
            acc = seg if acc is None else acc * seg
            out[(x, y)] = acc
            prev = y
    return out


def find_word_split_violation(word: Sequence, levels: Sequence[int]) -> tuple[int, int, int, int] | None:
    """First quadruple ``(x, y, x', y')`` breaking the forward Ramsey condition, or None.

    Quadruples are ordered lexicographically and include ``(x, y) == (x', y')``.
    """
    if len(levels) != len(word) + 1:
        raise MalformedInputError(f"split has {len(levels)} positions for a word of length {len(word)}")
    best = None
    for cls in split_classes(levels):
        segs = _segment_products(word, cls)
        keys = sorted(segs)
        for xy in keys:
            e = segs[xy]
            for xy2 in keys:
                if e * segs[xy2] != e:
                    cand = xy + xy2
                    if best is None or cand < best:
                        best = cand
                    break
    return best


def verify_word_split(word: Sequence, levels: Sequence[int]) -> bool:
    return find_word_split_violation(word, levels) is None


def find_tree_split_violation(lt: LabelledTree, levels: Mapping[int, int]):
    """First ``(leaf, quadruple)`` whose root path word is split badly, or None."""
    tree = lt.tree
    for x in tree.nodes:
        if x not in levels:
            raise MalformedInputError(f"split has no level for node {x}")
    for leaf in tree.preorder:
        if tree.children[leaf]:
            continue
        path = list(reversed(tree.path_to_root(leaf)))
        word = [lt.labels[y] for y in path[1:]]
        bad = find_word_split_violation(word, [levels[y] for y in path])
        if bad is not None:
            return leaf, bad
    return None


def verify_tree_split(lt: LabelledTree, levels: Mapping[int, int]) -> bool:
    return find_tree_split_violation(lt, levels) is None


def depth_split(tree: RootedTree) -> dict[int, int]:
    """Level ``1 + depth``: strictly increasing along every root path."""
    return {x: d + 1 for x, d in tree.depth_of.items()}


def _class_ok(word: Sequence, levels: Sequence[int], level: int) -> bool:
    # Does appending position len(levels) at `level` keep its class forward Ramsey?
    n = len(levels)
    members = [n]
    p = n - 1
    while p >= 0 and levels[p] <= level:
        if levels[p] == level:
            members.append(p)
        p -= 1
    if len(members) == 1:
        return True
    members.reverse()
    segs = set(_segment_products(word, members).values())
    return all(e * f == e for e in segs for f in segs)


def search_split(lt: LabelledTree, h_max: int, budget: int = SEARCH_BUDGET) -> dict[int, int] | None:
    """Forward Ramsey split of height at most ``h_max`` by exhaustive backtracking.

    Levels are tried in increasing order.  Subtrees of different children only
    interact through their common ancestors, so each child is solved on its own
    once its parent's level is fixed.  Returns None when no such split exists;
    raises ResourceError when more than ``budget`` level trials were needed.
    """
    tree = lt.tree
    trials = [0]
    word: list = []
    levels: list[int] = []

    def solve(x: int) -> dict[int, int] | None:
        for lv in range(1, h_max + 1):
            trials[0] += 1
            if trials[0] > budget:
                raise ResourceError(f"split search exceeded budget of {budget} trials")
            if not _class_ok(word, levels, lv):
                continue
            levels.append(lv)
            found = {x: lv}
            for c in tree.children[x]:
                word.append(lt.labels[c])
                sub = solve(c)
                word.pop()
                if sub is None:
                    found = None
                    break
                found.update(sub)
            levels.pop()
            if found is not None:
                return found
        return None

    return solve(tree.root)


def search_word_split(word: Sequence, h_max: int, budget: int = SEARCH_BUDGET) -> list[int] | None:
    """:func:`search_split` specialised to a word (a path-shaped tree)."""
    from .decomp import LabelledTree, RootedTree

    n = len(word)
    tree = RootedTree({i: (i - 1 if i else None) for i in range(n + 1)})
    found = search_split(LabelledTree(tree, {i + 1: word[i] for i in range(n)}), h_max, budget)
    return None if found is None else [found[i] for i in range(n + 1)]


class PrefixSplitter(Protocol):
    """Maps each prefix of a word to a level.

    Setting ``s(x) = level(word[:x])`` must give a forward Ramsey split for
    every word; ``height_bound`` is the declared maximum level (None when no
    bound is claimed).  Conformance is checked with :func:`check_prefix_splitter`.
    """

    height_bound: int | None

    def level(self, word: Sequence) -> int: ...


class GreedyPrefixSplitter:
    """Gives each new position the smallest level that keeps its class forward Ramsey.

    The level of a prefix only depends on the prefix, so this is a valid prefix
    map.  A fresh level above all earlier ones always works, so it never fails,
    but no height bound is claimed.
    """

    height_bound = None

    def __init__(self):
        self._memo: dict[tuple, tuple[int, ...]] = {}

    def levels(self, word: Sequence[Hashable]) -> tuple[int, ...]:
        key = tuple(word)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        if not key:
            out = (1,)
        else:
            prev = list(self.levels(key[:-1]))
            lv = 1
            while not _class_ok(list(key), prev, lv):
                lv += 1
            out = tuple(prev) + (lv,)
        if len(self._memo) < 200_000:
            self._memo[key] = out
        return out

    def level(self, word: Sequence) -> int:
        return self.levels(word)[-1]


def prefix_tree_split(lt: LabelledTree, splitter: PrefixSplitter) -> dict[int, int]:
    """Tree split ``t(x) = level(w_x)`` where ``w_x`` is the root path word of ``x``."""
    return {x: splitter.level(lt.word(x)) for x in lt.tree.nodes}


@dataclass(frozen=True)
class ConformanceReport:
    words_checked: int
    max_level: int
    violation: tuple | None

    @property
    def ok(self) -> bool:
        return self.violation is None


def check_prefix_splitter(splitter: PrefixSplitter, alphabet: Sequence, max_len: int) -> ConformanceReport:
    """Exhaustively verify a prefix splitter on all words up to ``max_len``."""
    count = 0
    top = 0
    for n in range(0, max_len + 1):
        for word in product(alphabet, repeat=n):
            levels = [splitter.level(word[:x]) for x in range(n + 1)]
            top = max(top, max(levels))
            count += 1
            bound = splitter.height_bound
            if bound is not None and max(levels) > bound:
                return ConformanceReport(count, top, (word, tuple(levels), "height"))
            bad = find_word_split_violation(word, levels)
            if bad is not None:
                return ConformanceReport(count, top, (word, tuple(levels), bad))
    return ConformanceReport(count, top, None)


def canonical_key(f) -> tuple:
    """Sort key giving a fixed order on elements (images for Fn, index otherwise)."""
    if isinstance(f, Fn):
        return tuple(f)
    return (getattr(f, "idx", 0),)


LevelFn = Callable[[Sequence], int]
