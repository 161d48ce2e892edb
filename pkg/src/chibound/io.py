"""JSON file formats for graphs, colourings, decompositions, taggings and splits."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Mapping, Sequence

from .decomp import Decomposition, RootedTree, Tagging
from .errors import MalformedInputError
from .graph import Graph, WeightedColoring


def load_json(path: str | Path) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise MalformedInputError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}") from exc
    except OSError as exc:
        raise MalformedInputError(f"{path}: {exc.strerror}") from exc


def dump_json(obj: Any, path: str | Path | None = None) -> str:
    text = json.dumps(obj, separators=(",", ":"))
    if path is not None:
        Path(path).write_text(text + "\n")
    return text


def _int(x: Any, what: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise MalformedInputError(f"{what} must be an integer, got {x!r}")
    return x


def _obj(x: Any, keys: Sequence[str], what: str) -> Mapping:
    if not isinstance(x, dict):
        raise MalformedInputError(f"{what} must be a JSON object")
    for key in keys:
        if key not in x:
            raise MalformedInputError(f"{what} is missing {key!r}")
    return x


def graph_to_json(G: Graph) -> dict:
    return {"n": G.n, "edges": [list(e) for e in G.edges()]}


def graph_from_json(obj: Any) -> Graph:
    obj = _obj(obj, ("n", "edges"), "graph")
    n = _int(obj["n"], "n")
    edges = obj["edges"]
    if not isinstance(edges, list) or any(not isinstance(e, list) or len(e) != 2 for e in edges):
        raise MalformedInputError("edges must be a list of [u, v] pairs")
    return Graph.from_edges(n, [(_int(u, "vertex"), _int(v, "vertex")) for u, v in edges])


def coloring_to_json(c: WeightedColoring) -> dict:
    return {"count": c.count, "sets": [list(s) for s in c.sets]}


def coloring_from_json(obj: Any) -> WeightedColoring:
    obj = _obj(obj, ("sets",), "coloring")
    sets = obj["sets"]
    if not isinstance(sets, list) or any(not isinstance(s, list) for s in sets):
        raise MalformedInputError("sets must be a list of colour lists")
    c = WeightedColoring.from_sets([_int(x, "colour") for x in s] for s in sets)
    if "count" in obj and _int(obj["count"], "count") < c.count:
        raise MalformedInputError(f"count {obj['count']} is below the largest colour used")
    return c


def decomposition_to_json(D: Decomposition, tags: Tagging | None = None) -> dict:
    nodes = D.tree.nodes
    if sorted(nodes) != list(range(len(nodes))):
        raise MalformedInputError("decomposition JSON needs nodes numbered 0..N-1")
    out: dict[str, Any] = {
        "parent": [D.tree.parent[x] for x in range(len(nodes))],
        "root": D.tree.root,
        "eta": list(D.eta),
    }
    if tags is not None:
        out["tags"] = {str(x): {str(v): t for v, t in sorted(tags[x].items())} for x in sorted(tags)}
    return out


def decomposition_from_json(obj: Any) -> tuple[Decomposition, Tagging | None]:
    obj = _obj(obj, ("parent", "eta"), "decomposition")
    parents = obj["parent"]
    if not isinstance(parents, list):
        raise MalformedInputError("parent must be a list")
    tree = RootedTree.from_parents([None if p is None else _int(p, "parent") for p in parents])
    if "root" in obj and _int(obj["root"], "root") != tree.root:
        raise MalformedInputError(f"root {obj['root']} does not match the parent array")
    eta = obj["eta"]
    if not isinstance(eta, list):
        raise MalformedInputError("eta must be a list")
    D = Decomposition(tree, tuple(_int(x, "eta entry") for x in eta))
    tags = None
    if obj.get("tags") is not None:
        raw = obj["tags"]
        if not isinstance(raw, dict):
            raise MalformedInputError("tags must map node ids to vertex-tag maps")
        try:
            tags = {int(x): {int(v): _int(t, "tag") for v, t in row.items()} for x, row in raw.items()}
        except (ValueError, AttributeError) as exc:
            raise MalformedInputError(f"bad tags: {exc}") from exc
    return D, tags


def split_to_json(levels: Mapping[int, int] | Sequence[int]) -> dict:
    if isinstance(levels, Mapping):
        levels = [levels[x] for x in sorted(levels)]
    return {"levels": list(levels)}


def split_from_json(obj: Any) -> list[int]:
    obj = _obj(obj, ("levels",), "split")
    levels = obj["levels"]
    if not isinstance(levels, list):
        raise MalformedInputError("levels must be a list")
    out = [_int(x, "level") for x in levels]
    if any(x < 1 for x in out):
        raise MalformedInputError("levels must be positive")
    return out
