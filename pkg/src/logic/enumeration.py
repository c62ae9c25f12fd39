from __future__ import annotations

import itertools
import logging
from logging.handlers import RotatingFileHandler
from datetime import datetime
from functools import lru_cache
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import networkx as nx

from src.logic.errors import ProfileError
from src.logic.graph import GraphClass, MarkedGraph
from src.logic.helpers import LOG_FILE

logger = logging.getLogger(__name__)
logger.addHandler(RotatingFileHandler(
    LOG_FILE, maxBytes=1024*1024*5, backupCount=5, encoding="utf-8"
))
logger.setLevel(logging.INFO)

Profile = Tuple[Tuple[int, int], ...]  # per vertex (valency, defect)


def compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    """Ordered tuples of `parts` nonnegative integers summing to `total`."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    for bars in itertools.combinations(range(total + parts - 1), parts - 1):
        prev = -1
        out = []
        for b in bars:
            out.append(b - prev - 1)
            prev = b
        out.append(total + parts - 1 - prev - 1)
        yield tuple(out)


def _slots(m: int) -> List[Tuple[int, int]]:
    return [(u, v) for u in range(m) for v in range(u, m)]


def _edge_valency(m: int, mult: Dict[Tuple[int, int], int]) -> List[int]:
    val = [0] * m
    for (u, v), k in mult.items():
        val[u] += k
        val[v] += k
    return val


def _connected(m: int, mult: Dict[Tuple[int, int], int]) -> bool:
    skeleton = nx.Graph()
    skeleton.add_nodes_from(range(m))
    skeleton.add_edges_from(s for s, k in mult.items() if k)
    return nx.is_connected(skeleton)


def is_stable(graph: MarkedGraph) -> bool:
    return all(2 * graph.defect(v) - 2 + graph.valency(v) > 0 for v in range(1, graph.m + 1))


def _resolve(g: Optional[int], n: Optional[int], m: int, profile: Optional[Profile]) -> List[Tuple[int, int]]:
    """Feasible (g, n) cells for the request."""
    if profile is None:
        if g is None or n is None:
            raise ProfileError("Without a profile both g and n are required")
        return [(g, n)]
    if len(profile) != m:
        raise ProfileError(f"Profile lists {len(profile)} vertices, expected {m}")
    valency = sum(p[0] for p in profile)
    defect = sum(p[1] for p in profile)
    if any(p[0] < 0 or p[1] < 0 for p in profile):
        raise ProfileError(f"Negative entry in profile {profile}")
    cells = []
    for e in range(m - 1, valency // 2 + 1):
        cells.append((defect + e - m + 1, valency - 2 * e))
    if n is not None:
        if (valency - n) % 2:
            logger.error(f"[Enumerate][{datetime.now()}] parity of valencies {valency} vs leaves {n}")
            raise ProfileError(f"Total valency {valency} and leaf count {n} differ in parity")
        cells = [c for c in cells if c[1] == n]
    if g is not None:
        cells = [c for c in cells if c[0] == g]
    return cells


@lru_cache(maxsize=None)
def _enumerate_cached(g: Optional[int], n: Optional[int], m: int, profile: Optional[Profile],
                      stable: bool) -> Tuple[GraphClass, ...]:
    found: Dict[bytes, GraphClass] = {}
    slots = _slots(m)
    for cg, cn in _resolve(g, n, m, profile):
        for total_defect in range(0, cg + 1):
            e = cg - total_defect + m - 1
            if e < m - 1:
                continue
            for defects in compositions(total_defect, m):
                if profile is not None and tuple(p[1] for p in profile) != defects:
                    continue
                for counts in compositions(e, len(slots)):
                    mult = {s: k for s, k in zip(slots, counts) if k}
                    if not _connected(m, mult):
                        continue
                    edge_val = _edge_valency(m, mult)
                    if profile is not None:
                        leaves = tuple(p[0] - ev for p, ev in zip(profile, edge_val))
                        if any(l < 0 for l in leaves) or sum(leaves) != cn:
                            continue
                        leaf_choices = [leaves]
                    else:
                        leaf_choices = compositions(cn, m)
                    for leaves in leaf_choices:
                        graph = MarkedGraph.from_profile(defects, leaves, mult)
                        if stable and not is_stable(graph):
                            continue
                        cls = GraphClass.of(graph)
                        found.setdefault(cls.encoding, cls)
    return tuple(found[k] for k in sorted(found))


def enumerate_graphs(g: Optional[int], n: Optional[int], m: int, profile: Optional[Sequence[Tuple[int, int]]] = None,
                     stable: bool = False) -> Tuple[GraphClass, ...]:
    """
    Connected marked graphs with betti g, n leaves and m vertices, one per class.

    A profile fixes (valency, defect) per vertex; g or n may then be left open.
    Output is sorted by canonical encoding.
    """
    if m < 1 or (g is not None and g < 0) or (n is not None and n < 0):
        logger.error(f"[Enumerate][{datetime.now()}] bad parameters g={g} n={n} m={m}")
        raise ProfileError(f"Invalid parameters g={g} n={n} m={m}")
    key = tuple((int(a), int(b)) for a, b in profile) if profile is not None else None
    out = _enumerate_cached(g, n, m, key, stable)
    logger.info(f"[Enumerate][{datetime.now()}] cell g={g} n={n} m={m} -> {len(out)} classes")
    return out
