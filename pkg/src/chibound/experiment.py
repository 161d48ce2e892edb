"""Experiment sweeps: one CSV row per instance, computed in a worker pool."""

from __future__ import annotations

import csv
import io
import multiprocessing as mp
import time
from dataclasses import asdict, dataclass
from typing import Iterable, Sequence

from .engine import BASES
from .errors import ChiboundError, MalformedInputError, ResourceError
from .graph import Graph, greedy_color, mycielskian, omega_exact, substitution_power
from .kexpr import evaluate, kexpr_substitute, random_kexpr, skeleton_expr
from .pipeline import run_pipeline

COLUMNS = ("instance_id", "seed", "k", "n", "m", "omega", "colors", "greedy_colors",
           "plan_depth", "split_height", "split_kind", "runtime_ms", "status")


@dataclass
class ExperimentRow:
    instance_id: int
    seed: int | None
    k: int
    n: int
    m: int
    omega: int | None
    colors: int | None
    greedy_colors: int
    plan_depth: int | None
    split_height: int | None
    split_kind: str
    runtime_ms: float
    status: str = "ok"


@dataclass(frozen=True)
class Task:
    instance_id: int
    seed: int | None
    k: int
    leaves: int
    split: str
    base: str
    family: str | None = None
    base_graph: str | None = None
    power: int | None = None


BASE_GRAPHS = {
    "C5": lambda: Graph.cycle(5),
    "K2": lambda: Graph.complete(2),
    "P3": lambda: Graph.from_edges(3, [(0, 1), (1, 2)]),
    "grotzsch": lambda: mycielskian(Graph.cycle(5)),
}


def parse_range(text: str) -> list[int]:
    """``"3"``, ``"1..5"`` (inclusive) or comma-separated mixtures of both."""
    out: list[int] = []
    try:
        for part in text.split(","):
            part = part.strip()
            if ".." in part:
                lo, hi = part.split("..")
                out.extend(range(int(lo), int(hi) + 1))
            elif part:
                out.append(int(part))
    except ValueError as exc:
        raise MalformedInputError(f"bad range {text!r}") from exc
    if not out:
        raise MalformedInputError(f"empty range {text!r}")
    return out


def sweep_tasks(seeds: Sequence[int], ks: Sequence[int], leaves: Sequence[int],
                split: str = "depth", base: str = "bipartite") -> list[Task]:
    tasks = []
    for seed in seeds:
        for k in ks:
            for n in leaves:
                tasks.append(Task(len(tasks), seed, k, n, split, base))
    return tasks


def family_tasks(base_graph: str, powers: Sequence[int], split: str = "depth",
                 base: str = "bipartite") -> list[Task]:
    if base_graph not in BASE_GRAPHS:
        raise MalformedInputError(f"unknown base graph {base_graph!r}; choose from {', '.join(BASE_GRAPHS)}")
    F = BASE_GRAPHS[base_graph]()
    return [Task(i, None, F.n, F.n ** p, split, base, "subpower", base_graph, p)
            for i, p in enumerate(powers)]


def subpower_expr(F: Graph, i: int):
    """Expression for the ``i``-th substitution power of ``F`` using ``|V(F)|`` labels."""
    expr = skeleton_expr(F)
    for _ in range(i - 1):
        expr = kexpr_substitute(F, [expr] * F.n)
    return expr


def run_task(task: Task) -> ExperimentRow:
    start = time.perf_counter()
    if task.family == "subpower":
        F = BASE_GRAPHS[task.base_graph]()
        expr = subpower_expr(F, task.power)
        G = substitution_power(F, task.power)
        if evaluate(expr).graph.edges() != G.edges():
            raise AssertionError("expression and direct substitution power differ")
    else:
        expr = random_kexpr(task.seed, task.k, task.leaves)
    status = "ok"
    result = None
    try:
        result = run_pipeline(expr, task.k, task.split, BASES[task.base])
        G = result.graph
    except ChiboundError as exc:
        status = f"error: {type(exc).__name__}: {exc}"
        G = evaluate(expr).graph
    try:
        omega = omega_exact(G)
    except ResourceError:
        omega = None
        if status == "ok":
            status = "omega-budget"
    return ExperimentRow(
        instance_id=task.instance_id,
        seed=task.seed,
        k=task.k,
        n=G.n,
        m=G.m,
        omega=omega,
        colors=result.coloring.count if result else None,
        greedy_colors=greedy_color(G).count,
        plan_depth=result.plan_depth if result else None,
        split_height=result.split_height if result else None,
        split_kind=result.split_kind if result else task.split,
        runtime_ms=round((time.perf_counter() - start) * 1000, 1),
        status=status,
    )


def _failed_row(task: Task, status: str) -> ExperimentRow:
    return ExperimentRow(task.instance_id, task.seed, task.k, 0, 0, None, None, 0, None, None,
                         task.split, 0.0, status)


def run_experiment(tasks: Sequence[Task], workers: int = 1, timeout: float | None = None) -> list[ExperimentRow]:
    """Rows in task order; failures and timeouts become rows with a status message."""
    if workers <= 1 and timeout is None:
        rows = []
        for t in tasks:
            try:
                rows.append(run_task(t))
            except Exception as exc:  # keep sweeping past a broken instance
                rows.append(_failed_row(t, f"error: {type(exc).__name__}: {exc}"))
        return rows
    rows = []
    pool = mp.get_context("spawn").Pool(max(1, workers))
    try:
        pending = [(t, pool.apply_async(run_task, (t,))) for t in tasks]
        for t, res in pending:
            try:
                rows.append(res.get(timeout))
            except mp.TimeoutError:
                rows.append(_failed_row(t, f"timeout after {timeout}s"))
            except Exception as exc:
                rows.append(_failed_row(t, f"error: {type(exc).__name__}: {exc}"))
    finally:
        pool.terminate()
        pool.join()
    return rows


def rows_to_csv(rows: Iterable[ExperimentRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for r in rows:
        d = asdict(r)
        writer.writerow(["" if d[c] is None else d[c] for c in COLUMNS])
    return buf.getvalue()

