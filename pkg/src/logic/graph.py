"""
Marked graphs with loop defects.

Vertices are marked 1..m in the public API; internally they are stored in
marking order. Half-edges carry integer identifiers, leaves are the half-edges
in no edge.
"""
from __future__ import annotations

import itertools
import json
import logging
from logging.handlers import RotatingFileHandler
from dataclasses import dataclass, field
from datetime import datetime
from math import factorial
from typing import Dict, List, Optional, Sequence, Tuple, Union

import networkx as nx

from src.logic.errors import GraphError
from src.logic.helpers import LOG_FILE

logger = logging.getLogger(__name__)
logger.addHandler(RotatingFileHandler(
    LOG_FILE, maxBytes=1024*1024*5, backupCount=5, encoding="utf-8"
))
logger.setLevel(logging.INFO)


Edge = Tuple[int, int]


@dataclass(frozen=True)
class MarkedGraph:
    defects: Tuple[int, ...]
    half_edges: Tuple[Tuple[int, ...], ...]
    edges: Tuple[Edge, ...] = ()
    _owner: Dict[int, int] = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "defects", tuple(int(g) for g in self.defects))
        object.__setattr__(self, "half_edges", tuple(tuple(h) for h in self.half_edges))
        object.__setattr__(self, "edges", tuple(sorted(tuple(sorted(e)) for e in self.edges)))
        if len(self.defects) != len(self.half_edges):
            raise GraphError("One defect per vertex required")
        if not self.defects:
            raise GraphError("A marked graph needs at least one vertex")
        if any(g < 0 for g in self.defects):
            raise GraphError(f"Negative loop defect in {self.defects}")
        for v, hs in enumerate(self.half_edges):
            for h in hs:
                if h in self._owner:
                    raise GraphError(f"Half-edge {h} belongs to two vertices")
                self._owner[h] = v
        used = set()
        for a, b in self.edges:
            if a == b:
                raise GraphError(f"Edge ({a}, {b}) pairs a half-edge with itself")
            for h in (a, b):
                if h not in self._owner:
                    raise GraphError(f"Edge uses unknown half-edge {h}")
                if h in used:
                    raise GraphError(f"Half-edge {h} occurs in two edges")
                used.add(h)

    # ---------------- shape ----------------

    @property
    def m(self) -> int:
        return len(self.defects)

    def vertex_of(self, h: int) -> int:
        """Marking (1-based) of the vertex owning half-edge h."""
        return self._owner[h] + 1

    def leaves(self) -> List[int]:
        paired = {h for e in self.edges for h in e}
        return [h for hs in self.half_edges for h in hs if h not in paired]

    def leaf_counts(self) -> Tuple[int, ...]:
        paired = {h for e in self.edges for h in e}
        return tuple(sum(1 for h in hs if h not in paired) for hs in self.half_edges)

    def valency(self, v: int) -> int:
        return len(self._vertex(v))

    @property
    def half_edge_count(self) -> int:
        return sum(len(hs) for hs in self.half_edges)

    def defect(self, v: int) -> int:
        return self.defects[self._index(v)]

    def multiplicities(self) -> Dict[Tuple[int, int], int]:
        """(u, v) with u <= v (0-based) -> number of edges between them."""
        out: Dict[Tuple[int, int], int] = {}
        for a, b in self.edges:
            u, v = sorted((self._owner[a], self._owner[b]))
            out[(u, v)] = out.get((u, v), 0) + 1
        return out

    def to_networkx(self) -> nx.MultiGraph:
        graph = nx.MultiGraph()
        graph.add_nodes_from(range(self.m))
        graph.add_edges_from((self._owner[a], self._owner[b]) for a, b in self.edges)
        return graph

    def is_connected(self) -> bool:
        return nx.is_connected(self.to_networkx())

    def _index(self, v: int) -> int:
        if not 1 <= v <= self.m:
            raise GraphError(f"Vertex {v} out of range 1..{self.m}")
        return v - 1

    def _vertex(self, v: int) -> Tuple[int, ...]:
        return self.half_edges[self._index(v)]

    # ---------------- serialization ----------------

    def to_dict(self) -> dict:
        return {
            "vertices": [{"defect": g, "half_edges": list(hs)} for g, hs in zip(self.defects, self.half_edges)],
            "edges": [list(e) for e in self.edges],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MarkedGraph":
        vertices = data.get("vertices", [])
        return cls(
            defects=tuple(int(v.get("defect", 0)) for v in vertices),
            half_edges=tuple(tuple(int(h) for h in v.get("half_edges", [])) for v in vertices),
            edges=tuple((int(a), int(b)) for a, b in data.get("edges", [])),
        )

    @classmethod
    def from_profile(cls, defects: Sequence[int], leaves: Sequence[int],
                     multiplicities: Dict[Tuple[int, int], int]) -> "MarkedGraph":
        """Build a graph from defects, leaf counts and 0-based (u <= v) edge multiplicities."""
        m = len(defects)
        half_edges: List[List[int]] = [[] for _ in range(m)]
        edges: List[Edge] = []
        counter = itertools.count()
        for (u, v), k in sorted(multiplicities.items()):
            for _ in range(k):
                a, b = next(counter), next(counter)
                half_edges[u].append(a)
                half_edges[v].append(b)
                edges.append((a, b))
        for v in range(m):
            for _ in range(leaves[v]):
                half_edges[v].append(next(counter))
        return cls(tuple(defects), tuple(tuple(sorted(hs)) for hs in half_edges), tuple(edges))

    def __repr__(self) -> str:
        return f"MarkedGraph(defects={self.defects}, leaves={self.leaf_counts()}, edges={self.multiplicities()})"


# ---------------- invariants ----------------

def betti(graph: MarkedGraph) -> int:
    if not graph.is_connected():
        logger.error(f"[Graph][{datetime.now()}] betti requested on disconnected {graph!r}")
        raise GraphError("betti is defined for connected graphs only")
    return sum(graph.defects) + len(graph.edges) - graph.m + 1


def canonical_form(graph: MarkedGraph) -> bytes:
    """
    Complete invariant under marked isomorphism.

    With the marking fixed, a marked graph is determined up to isomorphism by
    its defects, leaf counts and edge multiplicities.
    """
    mult = graph.multiplicities()
    payload = {
        "g": list(graph.defects),
        "l": list(graph.leaf_counts()),
        "e": [[u, v, k] for (u, v), k in sorted(mult.items())],
    }
    return json.dumps(payload, separators=(",", ":"), sort_keys=True).encode("utf-8")


def aut_order(graph: MarkedGraph) -> int:
    order = 1
    for k in graph.leaf_counts():
        order *= factorial(k)
    for (u, v), k in graph.multiplicities().items():
        order *= factorial(k) * (2 ** k if u == v else 1)
    return order


def aut_order_bruteforce(graph: MarkedGraph) -> int:
    """Count vertex-preserving half-edge permutations that keep the edge set."""
    edge_set = {frozenset(e) for e in graph.edges}
    count = 0
    for perms in itertools.product(*(itertools.permutations(hs) for hs in graph.half_edges)):
        image = {h: p for hs, ps in zip(graph.half_edges, perms) for h, p in zip(hs, ps)}
        if all(frozenset((image[a], image[b])) in edge_set for a, b in graph.edges):
            count += 1
    return count


def relabel_swap(graph: MarkedGraph, a: int, b: int) -> MarkedGraph:
    """Exchange the marks a and b (1-based)."""
    ia, ib = graph._index(a), graph._index(b)
    defects = list(graph.defects)
    half_edges = list(graph.half_edges)
    defects[ia], defects[ib] = defects[ib], defects[ia]
    half_edges[ia], half_edges[ib] = half_edges[ib], half_edges[ia]
    return MarkedGraph(tuple(defects), tuple(half_edges), graph.edges)


def induced(graph: MarkedGraph, vertices: Sequence[int]) -> MarkedGraph:
    """Subgraph on the given 0-based vertices, remarked in the given order."""
    keep = set(vertices)
    owner = graph._owner
    edges = tuple(e for e in graph.edges if owner[e[0]] in keep and owner[e[1]] in keep)
    return MarkedGraph(
        tuple(graph.defects[v] for v in vertices),
        tuple(graph.half_edges[v] for v in vertices),
        edges,
    )


# ---------------- graph classes ----------------

@dataclass(frozen=True)
class GraphClass:
    encoding: bytes
    aut: int
    betti: int
    graph: MarkedGraph = field(compare=False, hash=False)

    @classmethod
    def of(cls, graph: MarkedGraph) -> "GraphClass":
        return cls(canonical_form(graph), aut_order(graph), betti(graph), graph)

    def to_dict(self) -> dict:
        return {"encoding": self.encoding.decode("utf-8"), "aut": self.aut, "betti": self.betti,
                "graph": self.graph.to_dict()}


# ---------------- vertex split ----------------

@dataclass(frozen=True)
class Connected:
    graph: MarkedGraph

    def encoding(self) -> bytes:
        return b"B" + canonical_form(self.graph)

    def to_dict(self) -> dict:
        return {"kind": "connected", "graph": self.graph.to_dict()}


@dataclass(frozen=True)
class Disconnected:
    """Component with mark 1, component with the last mark, and their global marks."""
    first: MarkedGraph
    second: MarkedGraph
    marks_first: Tuple[int, ...]
    marks_second: Tuple[int, ...]

    def encoding(self) -> bytes:
        payload = [
            canonical_form(self.first).decode("utf-8"),
            canonical_form(self.second).decode("utf-8"),
            list(self.marks_first),
            list(self.marks_second),
        ]
        return b"C" + json.dumps(payload, separators=(",", ":")).encode("utf-8")

    def ordered(self) -> Tuple[MarkedGraph, MarkedGraph]:
        """Components reordered by (size, canonical form)."""
        pair = sorted((self.first, self.second), key=lambda g: (g.m, canonical_form(g)))
        return pair[0], pair[1]

    def to_dict(self) -> dict:
        return {
            "kind": "disconnected",
            "first": self.first.to_dict(),
            "second": self.second.to_dict(),
            "L1": list(self.marks_first),
            "L2": list(self.marks_second),
        }


SplitResult = Union[Connected, Disconnected]


def split_vertex(graph: MarkedGraph, I: Sequence[int], J: Sequence[int], moved_defect: int = 0) -> SplitResult:
    """
    Move the half-edges J of vertex 1 onto a new last vertex.

    `moved_defect` units of the loop defect of vertex 1 travel with J.
    """
    h1 = graph.half_edges[0]
    if not I or not J:
        logger.error(f"[Split][{datetime.now()}] empty part I={list(I)} J={list(J)}")
        raise GraphError("Both parts of the split must be nonempty")
    if len(set(I)) != len(I) or len(set(J)) != len(J) or set(I) & set(J) or set(I) | set(J) != set(h1):
        logger.error(f"[Split][{datetime.now()}] I={list(I)} J={list(J)} is no partition of {list(h1)}")
        raise GraphError(f"({list(I)}, {list(J)}) is not a partition of the half-edges of vertex 1")
    if not 0 <= moved_defect <= graph.defects[0]:
        raise GraphError(f"Cannot move defect {moved_defect} off vertex 1 (defect {graph.defects[0]})")

    in_i = set(I)
    split = MarkedGraph(
        (graph.defects[0] - moved_defect,) + graph.defects[1:] + (moved_defect,),
        (tuple(h for h in h1 if h in in_i),) + graph.half_edges[1:] + (tuple(h for h in h1 if h not in in_i),),
        graph.edges,
    )
    nxg = split.to_networkx()
    if nx.is_connected(nxg):
        return Connected(split)
    last = split.m - 1
    first_part = sorted(nx.node_connected_component(nxg, 0))
    second_part = sorted(nx.node_connected_component(nxg, last))
    if len(first_part) + len(second_part) != split.m:
        logger.error(f"[Split][{datetime.now()}] input graph was not connected: {graph!r}")
        raise GraphError("split_vertex needs a connected graph")
    return Disconnected(
        induced(split, first_part),
        induced(split, second_part),
        tuple(v + 1 for v in first_part),
        tuple(v + 1 for v in second_part),
    )


def glue(graph: MarkedGraph) -> Tuple[MarkedGraph, Tuple[int, ...], Tuple[int, ...], int]:
    """Merge the last vertex into vertex 1: returns (glued, h_1, h_m, defect of vertex m)."""
    if graph.m < 2:
        raise GraphError("Gluing needs at least two vertices")
    first, last = graph.half_edges[0], graph.half_edges[-1]
    glued = MarkedGraph(
        (graph.defects[0] + graph.defects[-1],) + graph.defects[1:-1],
        (first + last,) + graph.half_edges[1:-1],
        graph.edges,
    )
    return glued, first, last, graph.defects[-1]


def disjoint_union(first: MarkedGraph, second: MarkedGraph, marks_first: Sequence[int],
                   marks_second: Sequence[int]) -> MarkedGraph:
    """Place both components on the global marks, shifting half-edge ids of the second."""
    m = len(marks_first) + len(marks_second)
    if len(marks_first) != first.m or len(marks_second) != second.m:
        raise GraphError("Label sets do not match component sizes")
    if sorted(list(marks_first) + list(marks_second)) != list(range(1, m + 1)):
        raise GraphError(f"L1={list(marks_first)} L2={list(marks_second)} do not partition 1..{m}")
    offset = 1 + max((h for hs in first.half_edges for h in hs), default=-1)
    defects: List[Optional[int]] = [None] * m
    half_edges: List[Tuple[int, ...]] = [()] * m
    for k, mark in enumerate(marks_first):
        defects[mark - 1] = first.defects[k]
        half_edges[mark - 1] = first.half_edges[k]
    for k, mark in enumerate(marks_second):
        defects[mark - 1] = second.defects[k]
        half_edges[mark - 1] = tuple(h + offset for h in second.half_edges[k])
    edges = first.edges + tuple((a + offset, b + offset) for a, b in second.edges)
    return MarkedGraph(tuple(defects), tuple(half_edges), edges)
