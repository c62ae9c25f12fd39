"""
Vertex-split bijection between split pairs (A) and connected (B) or
disconnected (C) marked graphs with one more vertex.
"""
from __future__ import annotations

import itertools
import logging
from logging.handlers import RotatingFileHandler
from dataclasses import dataclass
from datetime import datetime
from typing import Dict, List, Optional, Sequence, Tuple, Union

from src.logic.enumeration import enumerate_graphs
from src.logic.errors import GraphError
from src.logic.graph import (
    Connected, Disconnected, MarkedGraph, SplitResult, betti, canonical_form,
    disjoint_union, glue, relabel_swap, split_vertex,
)
from src.logic.helpers import LOG_FILE
from src.logic.report import Check

logger = logging.getLogger(__name__)
logger.addHandler(RotatingFileHandler(
    LOG_FILE, maxBytes=1024*1024*5, backupCount=5, encoding="utf-8"
))
logger.setLevel(logging.INFO)

DEFECT_MODES = ("redistribute", "keep")


@dataclass(frozen=True)
class PartitionClass:
    I: Tuple[int, ...]
    J: Tuple[int, ...]
    moved_defect: int
    encoding: bytes

    def to_dict(self) -> dict:
        return {"I": list(self.I), "J": list(self.J), "moved_defect": self.moved_defect}


BElement = Connected
CElement = Disconnected


def partitions_mod_equiv(graph: MarkedGraph, k1: int, k2: int, moved_defect: int = 0) -> Tuple[PartitionClass, ...]:
    """
    One representative (lexicographically smallest I) per class of splits of
    the half-edges of vertex 1, two splits being equivalent when their results
    are isomorphic.
    """
    h1 = sorted(graph.half_edges[0])
    if k1 < 1 or k2 < 1 or k1 + k2 != len(h1):
        logger.error(f"[Partitions][{datetime.now()}] k1={k1} k2={k2} against |h1|={len(h1)}")
        raise GraphError(f"Cannot split {len(h1)} half-edges into parts of size {k1} and {k2}")
    seen: Dict[bytes, PartitionClass] = {}
    for I in itertools.combinations(h1, k1):
        J = tuple(h for h in h1 if h not in I)
        enc = split_vertex(graph, I, J, moved_defect).encoding()
        if enc not in seen:
            seen[enc] = PartitionClass(tuple(I), J, moved_defect, enc)
    return tuple(seen.values())


def psi(graph: MarkedGraph, I: Sequence[int], J: Sequence[int], moved_defect: int = 0) -> SplitResult:
    """Connected results are B-elements, disconnected ones C-elements."""
    return split_vertex(graph, I, J, moved_defect)


def psi_inv(element: Union[BElement, CElement]) -> Tuple[MarkedGraph, PartitionClass]:
    if isinstance(element, Connected):
        whole = element.graph
    elif isinstance(element, Disconnected):
        m = len(element.marks_first) + len(element.marks_second)
        if not element.marks_first or element.marks_first[0] != 1:
            raise GraphError(f"L1={list(element.marks_first)} must contain mark 1")
        if not element.marks_second or element.marks_second[-1] != m:
            raise GraphError(f"L2={list(element.marks_second)} must contain mark {m}")
        if list(element.marks_first) != sorted(element.marks_first) or \
                list(element.marks_second) != sorted(element.marks_second):
            raise GraphError("Label sets must be listed in increasing order")
        whole = disjoint_union(element.first, element.second, element.marks_first, element.marks_second)
    else:
        raise GraphError(f"Not an element of B or C: {element!r}")
    if whole.m < 2:
        raise GraphError("B and C elements have at least two vertices")
    glued, I, J, moved = glue(whole)
    if not I or not J:
        raise GraphError("Vertices 1 and m must both carry half-edges")
    enc = split_vertex(glued, I, J, moved).encoding()
    return glued, PartitionClass(tuple(I), tuple(J), moved, enc)


# ---------------- the three sets ----------------

def _check_mode(mode: str) -> None:
    if mode not in DEFECT_MODES:
        raise GraphError(f"Unknown defect mode {mode!r}, expected one of {DEFECT_MODES}")


def _fits(graph: MarkedGraph, cap: Optional[int]) -> bool:
    return cap is None or graph.half_edge_count <= cap


def a_set(g: int, n: int, k1: int, k2: int, m: int, mode: str = "redistribute",
          max_half_edges: Optional[int] = None) -> List[Tuple[MarkedGraph, PartitionClass, SplitResult]]:
    """Pairs (G, class) with m-1 vertices whose split lands in betti g, with their psi image."""
    _check_mode(mode)
    out = []
    if m < 2 or k1 < 1 or k2 < 1:
        return out
    for source_betti in (g, g + 1):
        for cls in enumerate_graphs(source_betti, n, m - 1):
            graph = cls.graph
            if graph.valency(1) != k1 + k2 or not _fits(graph, max_half_edges):
                continue
            moves = range(graph.defects[0] + 1) if mode == "redistribute" else (0,)
            for moved in moves:
                for part in partitions_mod_equiv(graph, k1, k2, moved):
                    image = psi(graph, part.I, part.J, moved)
                    if isinstance(image, Connected):
                        target = betti(image.graph)
                    else:
                        target = betti(image.first) + betti(image.second)
                    if target == g:
                        out.append((graph, part, image))
    return out


def b_set(g: int, n: int, k1: int, k2: int, m: int, mode: str = "redistribute",
          max_half_edges: Optional[int] = None) -> List[BElement]:
    _check_mode(mode)
    if m < 2:
        return []
    return [
        Connected(cls.graph) for cls in enumerate_graphs(g, n, m)
        if cls.graph.valency(1) == k1 and cls.graph.valency(m) == k2
        and (mode == "redistribute" or cls.graph.defect(m) == 0)
        and _fits(cls.graph, max_half_edges)
    ]


def _label_splits(m: int, m1: int, inside: int, outside: int) -> List[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    """Label sets L1 of size m1 containing `inside` and missing `outside`, with complements."""
    others = [v for v in range(1, m + 1) if v not in (inside, outside)]
    out = []
    for rest in itertools.combinations(others, m1 - 1):
        L1 = tuple(sorted(rest + (inside,)))
        L2 = tuple(v for v in range(1, m + 1) if v not in L1)
        out.append((L1, L2))
    return out


def _component_cells(g: int, n: int, m: int):
    for m1 in range(1, m):
        for g1 in range(g + 1):
            for n1 in range(n + 1):
                yield m1, m - m1, g1, g - g1, n1, n - n1


def c_set(g: int, n: int, k1: int, k2: int, m: int, mode: str = "redistribute",
          max_half_edges: Optional[int] = None) -> List[CElement]:
    _check_mode(mode)
    out: List[CElement] = []
    if m < 2:
        return out
    for m1, m2, g1, g2, n1, n2 in _component_cells(g, n, m):
        firsts = [c.graph for c in enumerate_graphs(g1, n1, m1) if c.graph.valency(1) == k1]
        seconds = [
            c.graph for c in enumerate_graphs(g2, n2, m2)
            if c.graph.valency(m2) == k2 and (mode == "redistribute" or c.graph.defect(m2) == 0)
        ]
        if not firsts or not seconds:
            continue
        for L1, L2 in _label_splits(m, m1, 1, m):
            for first in firsts:
                for second in seconds:
                    if max_half_edges is not None and first.half_edge_count + second.half_edge_count > max_half_edges:
                        continue
                    out.append(Disconnected(first, second, L1, L2))
    return out


def b_tilde(g: int, n: int, k1: int, k2: int, m: int, i: int, j: int,
            mode: str = "redistribute", max_half_edges: Optional[int] = None) -> Tuple[int, int]:
    """(direct count, count of the relabeled image of B) for markers i < j."""
    direct = [
        c for c in enumerate_graphs(g, n, m)
        if c.graph.valency(i) == k1 and c.graph.valency(j) == k2
        and (mode == "redistribute" or c.graph.defect(j) == 0)
        and _fits(c.graph, max_half_edges)
    ]
    image = {
        canonical_form(relabel_swap(relabel_swap(b.graph, 1, i), m, j))
        for b in b_set(g, n, k1, k2, m, mode, max_half_edges)
    }
    if image != {c.encoding for c in direct}:
        logger.warning(f"[Bijection][{datetime.now()}] swapped B differs from direct B~ for markers ({i},{j})")
        return len(direct), -1
    return len(direct), len(image)


def c_tilde(g: int, n: int, k1: int, k2: int, m: int, i: int, j: int, mode: str = "redistribute",
            max_half_edges: Optional[int] = None) -> int:
    count = 0
    for m1, m2, g1, g2, n1, n2 in _component_cells(g, n, m):
        firsts = enumerate_graphs(g1, n1, m1)
        seconds = enumerate_graphs(g2, n2, m2)
        for L1, L2 in _label_splits(m, m1, i, j):
            pi, pj = L1.index(i) + 1, L2.index(j) + 1
            left = [c.graph.half_edge_count for c in firsts if c.graph.valency(pi) == k1]
            right = [
                c.graph.half_edge_count for c in seconds
                if c.graph.valency(pj) == k2 and (mode == "redistribute" or c.graph.defect(pj) == 0)
            ]
            if max_half_edges is None:
                count += len(left) * len(right)
            else:
                count += sum(1 for a in left for b in right if a + b <= max_half_edges)
    return count


# ---------------- verification ----------------

def verify_gt_bijection(g: int, n: int, k1: int, k2: int, m: int, mode: str = "redistribute",
                        tilde: bool = True, max_half_edges: Optional[int] = None) -> Check:
    """Bijection check on one cell; with a cap, only graphs with at most that many half-edges take part."""
    A = a_set(g, n, k1, k2, m, mode, max_half_edges)
    B = b_set(g, n, k1, k2, m, mode, max_half_edges)
    C = c_set(g, n, k1, k2, m, mode, max_half_edges)
    details = {"g": g, "n": n, "k1": k1, "k2": k2, "m": m, "mode": mode,
               "A": len(A), "B": len(B), "C": len(C), "max_half_edges": max_half_edges}
    name = f"gt-bijection g={g} n={n} k1={k1} k2={k2} m={m} {mode}"

    images = [image.encoding() for _, _, image in A]
    targets = [b.encoding() for b in B] + [c.encoding() for c in C]
    counterexample = None

    if len(images) != len(set(images)):
        dup = next(e for e in images if images.count(e) > 1)
        counterexample = {"reason": "psi not injective", "image": dup.decode("utf-8")}
    elif set(images) != set(targets):
        missing = sorted(set(targets) - set(images)) or sorted(set(images) - set(targets))
        counterexample = {"reason": "psi image differs from B and C", "element": missing[0].decode("utf-8")}

    if counterexample is None:
        for graph, part, image in A:
            back, back_part = psi_inv(image)
            if canonical_form(back) != canonical_form(graph) or back_part.encoding != part.encoding:
                counterexample = {"reason": "psi_inv after psi", "graph": graph.to_dict(), "partition": part.to_dict()}
                break
    if counterexample is None:
        for element in list(B) + list(C):
            back, part = psi_inv(element)
            if psi(back, part.I, part.J, part.moved_defect).encoding() != element.encoding():
                counterexample = {"reason": "psi after psi_inv", "element": element.to_dict()}
                break

    if tilde and m >= 2 and counterexample is None:
        table = []
        for i, j in itertools.combinations(range(1, m + 1), 2):
            direct, swapped = b_tilde(g, n, k1, k2, m, i, j, mode, max_half_edges)
            ct = c_tilde(g, n, k1, k2, m, i, j, mode, max_half_edges)
            table.append({"i": i, "j": j, "B~": direct, "C~": ct})
            if direct != len(B) or swapped != len(B) or ct != len(C):
                counterexample = {"reason": "tilde count mismatch", "i": i, "j": j}
        details["tilde"] = table

    passed = counterexample is None and len(A) == len(B) + len(C)
    if not passed:
        logger.warning(f"[Bijection][{datetime.now()}] {name} failed: {counterexample}")
    return Check(name, passed, details, counterexample)


def feasible_cells(max_g: int, max_n: int, max_m: int, max_k: int, max_half_edges: int = 10):
    """
    Parameter cells of a bijection sweep, in a fixed order.

    A cell is kept when its smallest graphs fit under the cap; larger graphs
    inside it are filtered one by one in verify_gt_bijection.
    """
    for g in range(max_g + 1):
        for n in range(max_n + 1):
            for m in range(2, max_m + 1):
                for k1 in range(1, max_k + 1):
                    for k2 in range(1, max_k + 1):
                        # a split keeps every edge; the fewest edges are m - 2 (disconnected result)
                        if n + 2 * (m - 2) > max_half_edges or k1 + k2 > max_half_edges:
                            continue
                        yield g, n, k1, k2, m
