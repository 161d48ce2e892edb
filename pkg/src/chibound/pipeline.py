"""Expression to verified colouring: decomposition, labelling, split, plan, engine."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .decomp import Decomposition, LabelledTree, Tagging, labelling_from_tagging, verify_tagging
from .engine import BIPARTITE, AuditLog, BaseColorer, color
from .errors import MalformedInputError, ResourceError
from .factor import Plan, build_plan
from .graph import Graph, WeightedColoring
from .kexpr import KExpr, expr_to_decomposition
from .semigroup import GreedyPrefixSplitter, depth_split, prefix_tree_split, search_split

SPLITS = ("depth", "search", "plugin")


@dataclass
class PipelineResult:
    graph: Graph
    decomposition: Decomposition
    tags: Tagging
    labels: LabelledTree
    levels: dict[int, int]
    split_kind: str
    plan: Plan
    coloring: WeightedColoring
    audit: AuditLog
    k: int

    @property
    def split_height(self) -> int:
        return max(self.levels.values())

    @property
    def plan_depth(self) -> int:
        return self.plan.depth


def choose_split(lt: LabelledTree, k: int, split: str, budget: int | None = None) -> tuple[dict[int, int], str]:
    """Levels for ``lt`` and the kind actually used.

    ``search`` looks for a split of height at most ``k**k`` and falls back to
    the depth split (kind ``"depth-fallback"``) when the search is exhausted or
    over budget.
    """
    if split == "depth":
        return depth_split(lt.tree), "depth"
    if split == "search":
        try:
            levels = search_split(lt, k ** k) if budget is None else search_split(lt, k ** k, budget)
        except ResourceError:
            levels = None
        if levels is None:
            return depth_split(lt.tree), "depth-fallback"
        return levels, "search"
    if split == "plugin":
        return prefix_tree_split(lt, GreedyPrefixSplitter()), "plugin"
    raise MalformedInputError(f"unknown split {split!r}; choose from {', '.join(SPLITS)}")


def run_decomposition(G: Graph, D: Decomposition, tags: Tagging, k: int, split: str = "depth",
                      base: BaseColorer = BIPARTITE, w: Sequence[int] | None = None,
                      check: bool = True) -> PipelineResult:
    if check and not verify_tagging(D, G, tags, k):
        raise MalformedInputError("tagging fails its consistency properties")
    lt = labelling_from_tagging(D, G, tags, k)
    levels, kind = choose_split(lt, k, split)
    plan = build_plan(lt, levels, check=check)
    coloring, audit = color(G, D, tags, plan, base, w, labels=lt, k=k, check=check)
    return PipelineResult(G, D, tags, lt, levels, kind, plan, coloring, audit, k)


def run_pipeline(expr: KExpr, k: int, split: str = "depth", base: BaseColorer = BIPARTITE,
                 w: Sequence[int] | None = None, check: bool = True) -> PipelineResult:
    D, tags, G = expr_to_decomposition(expr)
    return run_decomposition(G, D, tags, k, split, base, w, check)
