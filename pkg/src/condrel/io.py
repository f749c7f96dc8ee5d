"""Line-oriented graph files.

    # comment
    catalyst <id> <label>
    node <id> [label]
    edge <src> <dst> <catalyst-id> <probability>

Ids are dense non-negative integers.  Nodes or catalysts referenced by an
edge but never declared get default labels (``"7"``, ``"c8"``).  Each
(src, dst) pair becomes one edge whose table collects all its catalyst rows;
a repeated (src, dst, catalyst) row keeps the larger probability.
"""

from __future__ import annotations

import math
import warnings
from pathlib import Path

from .errors import GraphFormatError, StructuralError
from .graph import EdgeRecord, UncertainGraph


def _int(tok: str, what: str, lineno: int) -> int:
    try:
        v = int(tok)
    except ValueError:
        raise GraphFormatError(lineno, f"{what} {tok!r} is not an integer") from None
    if v < 0:
        raise GraphFormatError(lineno, f"{what} {v} is negative")
    return v


def parse_graph(text: str) -> UncertainGraph:
    nodes: dict[int, str] = {}
    cats: dict[int, str] = {}
    tables: dict[tuple[int, int], dict[int, float]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind = parts[0]
        if kind == "catalyst":
            if len(parts) != 3:
                raise GraphFormatError(lineno, "expected 'catalyst <id> <label>'")
            cid = _int(parts[1], "catalyst id", lineno)
            if cid in cats:
                raise GraphFormatError(lineno, f"catalyst {cid} declared twice")
            cats[cid] = parts[2]
        elif kind == "node":
            if len(parts) not in (2, 3):
                raise GraphFormatError(lineno, "expected 'node <id> [label]'")
            nid = _int(parts[1], "node id", lineno)
            if nid in nodes:
                raise GraphFormatError(lineno, f"node {nid} declared twice")
            nodes[nid] = parts[2] if len(parts) == 3 else str(nid)
        elif kind == "edge":
            if len(parts) != 5:
                raise GraphFormatError(lineno, "expected 'edge <src> <dst> <catalyst-id> <probability>'")
            u = _int(parts[1], "source", lineno)
            v = _int(parts[2], "target", lineno)
            c = _int(parts[3], "catalyst id", lineno)
            try:
                p = float(parts[4])
            except ValueError:
                raise GraphFormatError(lineno, f"probability {parts[4]!r} is not a number") from None
            if not (0.0 < p <= 1.0):
                raise GraphFormatError(lineno, f"probability {parts[4]} is outside (0, 1]")
            table = tables.setdefault((u, v), {})
            if c in table:
                warnings.warn(f"line {lineno}: duplicate edge {u} {v} {c}; keeping the larger probability")
                p = max(p, table[c])
            table[c] = p
        else:
            raise GraphFormatError(lineno, f"unknown directive {kind!r}")

    n = 1 + max([*nodes, *(x for uv in tables for x in uv)], default=-1)
    nc = 1 + max([*cats, *(c for t in tables.values() for c in t)], default=-1)
    node_labels = [nodes.get(i, str(i)) for i in range(n)]
    cat_labels = [cats.get(i, f"c{i + 1}") for i in range(nc)]
    if len(set(node_labels)) != n:
        raise GraphFormatError(None, "node labels are not unique")
    try:
        edges = tuple(EdgeRecord(u, v, dict(sorted(t.items()))) for (u, v), t in tables.items())
        return UncertainGraph(tuple(node_labels), tuple(cat_labels), edges)
    except StructuralError as e:
        raise GraphFormatError(None, str(e)) from None


def load_graph(path) -> UncertainGraph:
    return parse_graph(Path(path).read_text(encoding="utf-8"))


def format_graph(graph: UncertainGraph) -> str:
    """Text form of ``graph``; probabilities use ``repr`` so reloading is bit-exact.

    Parallel edges with the same endpoints are merged on reload.
    """
    out = [f"catalyst {i} {lab}" for i, lab in enumerate(graph.catalyst_labels)]
    out += [f"node {i} {lab}" for i, lab in enumerate(graph.node_labels)]
    for e in graph.edges:
        for c in sorted(e.table):
            out.append(f"edge {e.src} {e.dst} {c} {e.table[c]!r}")
    return "\n".join(out) + "\n"


def save_graph(graph: UncertainGraph, path) -> None:
    Path(path).write_text(format_graph(graph), encoding="utf-8")


def derive_count_probability(count: int, mu: float = 5.0) -> float:
    """Edge probability from an occurrence count via the exponential CDF with mean ``mu``."""
    if count < 0 or mu <= 0:
        raise ValueError("need count >= 0 and mu > 0")
    return -math.expm1(-count / mu)
