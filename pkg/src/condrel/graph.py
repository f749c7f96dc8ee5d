"""Uncertain graphs whose edge probabilities depend on catalysts.

Every edge carries a table ``catalyst id -> P(e|c)``.  Catalysts missing
from the table have probability zero.  Given a set of active catalysts an
edge exists if at least one independent per-catalyst trial succeeds, so its
probability is ``1 - prod(1 - P(e|c))`` over the active catalysts.

Nodes and catalysts are dense integer ids; labels are kept for I/O only.
A possible world is an ``int`` bitmask over edge indices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import StructuralError

CatalystSet = frozenset  # frozenset[int]; sorted() gives the canonical order


@dataclass(frozen=True)
class EdgeRecord:
    src: int
    dst: int
    table: Mapping[int, float]

    def __post_init__(self):
        if not self.table:
            raise StructuralError(f"edge {self.src}->{self.dst} has an empty catalyst table")
        for c, p in self.table.items():
            if not (0.0 < p <= 1.0):
                raise StructuralError(
                    f"edge {self.src}->{self.dst}: P(e|{c}) = {p!r} is outside (0, 1]"
                )

    @property
    def catalysts(self) -> frozenset[int]:
        return frozenset(self.table)


def edge_probability(edge: EdgeRecord, cats: Iterable[int]) -> float:
    """Existence probability of ``edge`` when the catalysts ``cats`` are active."""
    cats = cats if isinstance(cats, (set, frozenset)) else frozenset(cats)
    miss = 1.0
    for c, p in edge.table.items():
        if c in cats:
            miss *= 1.0 - p
    return 1.0 - miss


@dataclass(frozen=True, eq=False)
class UncertainGraph:
    """Immutable directed multigraph with per-edge catalyst tables.

    ``edge_origin`` is set on graphs derived from another graph (the
    single-catalyst multigraph, induced subgraphs) and maps each edge index
    back to the edge it came from.  ``node_origin`` does the same for nodes
    of induced subgraphs.
    """

    node_labels: tuple[str, ...]
    catalyst_labels: tuple[str, ...]
    edges: tuple[EdgeRecord, ...]
    edge_origin: tuple[int, ...] | None = None
    node_origin: tuple[int, ...] | None = None
    out_edges: tuple[tuple[int, ...], ...] = field(init=False, repr=False)
    in_edges: tuple[tuple[int, ...], ...] = field(init=False, repr=False)

    def __post_init__(self):
        n = len(self.node_labels)
        nc = len(self.catalyst_labels)
        if len(set(self.catalyst_labels)) != nc:
            raise StructuralError("catalyst labels must be unique")
        out: list[list[int]] = [[] for _ in range(n)]
        inc: list[list[int]] = [[] for _ in range(n)]
        for i, e in enumerate(self.edges):
            if not (0 <= e.src < n and 0 <= e.dst < n):
                raise StructuralError(f"edge {i} references an unknown node ({e.src}->{e.dst})")
            for c in e.table:
                if not (0 <= c < nc):
                    raise StructuralError(f"edge {i} references unknown catalyst {c}")
            out[e.src].append(i)
            inc[e.dst].append(i)
        object.__setattr__(self, "out_edges", tuple(map(tuple, out)))
        object.__setattr__(self, "in_edges", tuple(map(tuple, inc)))

    @classmethod
    def build(
        cls,
        edges: Iterable[tuple[int, int, Mapping[int, float]]],
        n_nodes: int | None = None,
        n_catalysts: int | None = None,
        node_labels: Sequence[str] | None = None,
        catalyst_labels: Sequence[str] | None = None,
    ) -> "UncertainGraph":
        """Convenience constructor from ``(src, dst, {catalyst: p})`` triples."""
        recs = tuple(EdgeRecord(u, v, dict(t)) for u, v, t in edges)
        if node_labels is None:
            if n_nodes is None:
                n_nodes = 1 + max((max(e.src, e.dst) for e in recs), default=-1)
            node_labels = [str(i) for i in range(n_nodes)]
        if catalyst_labels is None:
            if n_catalysts is None:
                n_catalysts = 1 + max((max(e.table) for e in recs), default=-1)
            catalyst_labels = [f"c{i + 1}" for i in range(n_catalysts)]
        return cls(tuple(node_labels), tuple(catalyst_labels), recs)

    @property
    def n_nodes(self) -> int:
        return len(self.node_labels)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_catalysts(self) -> int:
        return len(self.catalyst_labels)

    @property
    def all_catalysts(self) -> frozenset[int]:
        return frozenset(range(self.n_catalysts))

    def node(self, label: str) -> int:
        """Node id for ``label`` (labels that look like ids are accepted too)."""
        idx = self.__dict__.get("_node_index")
        if idx is None:
            idx = {lab: i for i, lab in enumerate(self.node_labels)}
            object.__setattr__(self, "_node_index", idx)
        if label in idx:
            return idx[label]
        if isinstance(label, int) or (isinstance(label, str) and label.isdigit()):
            i = int(label)
            if 0 <= i < self.n_nodes:
                return i
        raise StructuralError(f"unknown node {label!r}")

    def catalyst(self, label: str) -> int:
        try:
            return self.catalyst_labels.index(label)
        except ValueError:
            raise StructuralError(f"unknown catalyst {label!r}") from None

    def catalyst_set(self, *labels: str) -> frozenset[int]:
        return frozenset(self.catalyst(x) for x in labels)

    def check_node(self, v: int) -> int:
        if not (isinstance(v, int) and 0 <= v < self.n_nodes):
            raise StructuralError(f"node {v!r} is not in the graph")
        return v

    def check_catalysts(self, cats: Iterable[int]) -> frozenset[int]:
        cats = frozenset(cats)
        bad = [c for c in cats if not (0 <= c < self.n_catalysts)]
        if bad:
            raise StructuralError(f"unknown catalysts {sorted(bad)}")
        return cats

    def edge_probabilities(self, cats: Iterable[int]) -> list[float]:
        cats = frozenset(cats)
        return [edge_probability(e, cats) for e in self.edges]

    def positive_edges(self, cats: Iterable[int]) -> list[int]:
        return [i for i, p in enumerate(self.edge_probabilities(cats)) if p > 0.0]

    def local_id(self, original: int) -> int | None:
        """Id in this (induced) graph of node ``original`` of the parent graph."""
        if self.node_origin is None:
            return original if 0 <= original < self.n_nodes else None
        idx = self.__dict__.get("_origin_index")
        if idx is None:
            idx = {o: i for i, o in enumerate(self.node_origin)}
            object.__setattr__(self, "_origin_index", idx)
        return idx.get(original)

    def same_as(self, other: "UncertainGraph") -> bool:
        """Structural equality: ids, labels, tables (bitwise probabilities)."""
        return (
            self.node_labels == other.node_labels
            and self.catalyst_labels == other.catalyst_labels
            and len(self.edges) == len(other.edges)
            and all(
                a.src == b.src and a.dst == b.dst and dict(a.table) == dict(b.table)
                for a, b in zip(self.edges, other.edges)
            )
        )


def world_probability(graph: UncertainGraph, world: int, cats: Iterable[int]) -> float:
    """Probability of the possible world whose present edges are the set bits of ``world``."""
    if world < 0 or world >> graph.n_edges:
        raise StructuralError("world bitmask does not match the edge count")
    prob = 1.0
    for i, p in enumerate(graph.edge_probabilities(cats)):
        prob *= p if (world >> i) & 1 else 1.0 - p
    return prob


def subgraph_from_choices(
    choices: Iterable,
    extra_nodes: Iterable[int] = (),
    parent: UncertainGraph | None = None,
) -> UncertainGraph:
    """Graph holding exactly the given (edge, catalyst, probability) choices.

    Choices on the same parent edge are merged into one record whose table
    holds every chosen catalyst.  Nodes are renumbered in increasing order of
    their parent id; ``node_origin`` keeps the mapping.
    """
    tables: dict[int, dict[int, float]] = {}
    ends: dict[int, tuple[int, int]] = {}
    for ch in choices:
        tables.setdefault(ch.edge, {})[ch.catalyst] = ch.probability
        ends[ch.edge] = (ch.src, ch.dst)
    nodes = set(extra_nodes)
    for u, v in ends.values():
        nodes.add(u)
        nodes.add(v)
    order = sorted(nodes)
    local = {v: i for i, v in enumerate(order)}
    edge_ids = sorted(tables)
    recs = tuple(EdgeRecord(local[ends[e][0]], local[ends[e][1]], tables[e]) for e in edge_ids)
    if parent is not None:
        node_labels = tuple(parent.node_labels[v] for v in order)
        cat_labels = parent.catalyst_labels
    else:
        node_labels = tuple(str(v) for v in order)
        nc = 1 + max((c for t in tables.values() for c in t), default=-1)
        cat_labels = tuple(f"c{i + 1}" for i in range(nc))
    return UncertainGraph(node_labels, cat_labels, recs, tuple(edge_ids), tuple(order))


def induced_subgraph(graph: UncertainGraph, paths: Sequence) -> UncertainGraph:
    """Subgraph made of the (edge, catalyst) pairs used by ``paths``.

    ``paths`` may hold paths or Steiner trees; anything exposing ``choices``
    (and optionally ``nodes``) works.  Choice edge indices refer to ``graph``.
    """
    choices = []
    extra: set[int] = set()
    for p in paths:
        extra.update(getattr(p, "nodes", ()))
        for ch in p.choices:
            if not (0 <= ch.edge < graph.n_edges):
                raise StructuralError(f"path references unknown edge {ch.edge}")
            rec = graph.edges[ch.edge]
            if (rec.src, rec.dst) != (ch.src, ch.dst) or rec.table.get(ch.catalyst) != ch.probability:
                raise StructuralError(
                    f"choice (edge {ch.edge}, catalyst {ch.catalyst}) does not match the graph"
                )
            choices.append(ch)
    return subgraph_from_choices(choices, extra, graph)


def isomorphic_by_origin(a: UncertainGraph, b: UncertainGraph) -> bool:
    """Equality of two derived graphs after mapping ids back to their parent."""

    def canon(g: UncertainGraph):
        nodes = g.node_origin or tuple(range(g.n_nodes))
        eo = g.edge_origin or tuple(range(g.n_edges))
        return (
            tuple(sorted(nodes)),
            tuple(sorted((eo[i], nodes[e.src], nodes[e.dst], tuple(sorted(e.table.items())))
                         for i, e in enumerate(g.edges))),
        )

    return canon(a) == canon(b)


def log_weight(p: float) -> float:
    return -math.log(p)
