from __future__ import annotations
from typing import Dict, Generic, Iterable, List, Optional, Set, Tuple, TypeVar

import marisa_trie
from rapidfuzz import fuzz

from src.logic.graph import GraphClass, MarkedGraph
from src.logic.helpers import normalize

T = TypeVar("T")


def graph_label(graph: MarkedGraph) -> str:
    """
    Readable key ordered coarse to fine, so that trie prefixes select families:
    "m2/g1,0/l0,2/e1-2x2" is a two-vertex graph with defects (1,0), two leaves
    on vertex 2 and a double edge.
    """
    mult = graph.multiplicities()
    edges = ",".join(f"{u + 1}-{v + 1}x{k}" for (u, v), k in sorted(mult.items())) or "-"
    defects = ",".join(str(g) for g in graph.defects)
    leaves = ",".join(str(l) for l in graph.leaf_counts())
    return f"m{graph.m}/g{defects}/l{leaves}/e{edges}"


class NameIndex(Generic[T]):
    """
    Named objects of an instance file.
    Tries are built on normalized names; unresolved names get fuzzy suggestions.
    """

    def __init__(self, items: Optional[Dict[str, T]] = None) -> None:
        self.by_name: Dict[str, T] = {}
        self.norm_to_names: Dict[str, Set[str]] = {}
        self._trie: marisa_trie.Trie = marisa_trie.Trie([])
        for name, item in (items or {}).items():
            self._index(name, item)
        self._rebuild_trie()

    # ---------------- build / maintenance ----------------

    def _index(self, name: str, item: T) -> None:
        self.by_name[name] = item
        self.norm_to_names.setdefault(normalize(name), set()).add(name)

    def _rebuild_trie(self) -> None:
        self._trie = marisa_trie.Trie(list(self.norm_to_names.keys()))

    def add(self, name: str, item: T) -> None:
        self._index(name, item)
        self._rebuild_trie()

    def names(self) -> List[str]:
        return sorted(self.by_name)

    def __contains__(self, name: str) -> bool:
        return self.resolve(name) is not None

    def __len__(self) -> int:
        return len(self.by_name)

    # ---------------- lookup ----------------

    def resolve(self, name: str) -> Optional[str]:
        """Exact name, else the unique name with the same normalized spelling."""
        if name in self.by_name:
            return name
        hits = self.norm_to_names.get(normalize(name), set())
        return next(iter(hits)) if len(hits) == 1 else None

    def get(self, name: str) -> T:
        key = self.resolve(name)
        if key is None:
            raise KeyError(name)
        return self.by_name[key]

    def with_prefix(self, prefix: str, cap: int = 300) -> List[str]:
        out: Set[str] = set()
        for k in self._trie.keys(normalize(prefix))[:cap]:
            out.update(self.norm_to_names.get(k, ()))
        return sorted(out)

    def suggest(self, name: str, limit: int = 3, min_score: int = 60) -> List[str]:
        query = normalize(name)
        scored: List[Tuple[float, str]] = []
        for norm, names in self.norm_to_names.items():
            score = fuzz.WRatio(norm, query)
            if score >= min_score:
                scored.extend((score, n) for n in names)
        scored.sort(key=lambda t: (-t[0], t[1]))
        return [n for _, n in scored[:limit]]


class GraphIndex:
    """Graph classes keyed by `graph_label`, with family selection by label prefix."""

    def __init__(self, classes: Iterable[GraphClass] = ()) -> None:
        self.by_label: Dict[str, GraphClass] = {}
        self.by_encoding: Dict[bytes, str] = {}
        self._trie: marisa_trie.Trie = marisa_trie.Trie([])
        self.update(list(classes))

    def update(self, classes: List[GraphClass]) -> None:
        for cls in classes:
            label = graph_label(cls.graph)
            self.by_label[label] = cls
            self.by_encoding[cls.encoding] = label
        self._trie = marisa_trie.Trie(list(self.by_label.keys()))

    def __len__(self) -> int:
        return len(self.by_label)

    def __contains__(self, graph: MarkedGraph) -> bool:
        return graph_label(graph) in self.by_label

    def labels(self) -> List[str]:
        return sorted(self.by_label)

    def get(self, label: str) -> GraphClass:
        return self.by_label[label]

    def search(
        self,
        *,
        prefix: str = "",
        betti: Optional[int] = None,
        max_aut: Optional[int] = None,
        limit: int = 1000,
    ) -> List[GraphClass]:
        """Classes whose label starts with `prefix`, filtered, in label order."""
        keys = sorted(self._trie.keys(prefix)) if prefix else self.labels()
        out = []
        for label in keys:
            cls = self.by_label[label]
            if betti is not None and cls.betti != betti:
                continue
            if max_aut is not None and cls.aut > max_aut:
                continue
            out.append(cls)
            if len(out) >= limit:
                break
        return out

    def aut_table(self) -> Dict[str, int]:
        return {label: self.by_label[label].aut for label in self.labels()}
