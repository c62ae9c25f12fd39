"""
Feynman evaluation of marked graphs against a contraction kernel, and the
Taylor families built from it.
"""
from __future__ import annotations

import itertools
import logging
from logging.handlers import RotatingFileHandler
from datetime import datetime
from fractions import Fraction
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

from src.logic.bd import BDPresentation, sgn
from src.logic.element import Element, Key, gamma_degree, key_degree, parse_scalar
from src.logic.enumeration import enumerate_graphs
from src.logic.errors import GradingError, GraphError, PresentationError
from src.logic.graded import GradedSpace, Letter, desymmetrize, koszul_sign, sym_canonicalize, word_degree
from src.logic.graph import Edge, MarkedGraph, betti
from src.logic.helpers import LOG_FILE
from src.logic.linfty import TaylorMorphism, multilinear

logger = logging.getLogger(__name__)
logger.addHandler(RotatingFileHandler(
    LOG_FILE, maxBytes=1024*1024*5, backupCount=5, encoding="utf-8"
))
logger.setLevel(logging.INFO)


class ContractionKernel:
    """Graded symmetric even pairing on the closed generators, supported in degree 6-2d."""

    def __init__(self, space: GradedSpace, d: int, entries: Optional[Dict[Tuple[Letter, Letter], Fraction]] = None) -> None:
        self.space = space
        self.d = d
        support = gamma_degree(d)
        self.entries: Dict[Tuple[Letter, Letter], Fraction] = {}
        for (a, b), value in (entries or {}).items():
            value = Fraction(value)
            if value == 0:
                continue
            if a not in space or b not in space:
                raise PresentationError(f"Kernel entry ({a!r}, {b!r}) outside the closed generators")
            if a.degree + b.degree != support:
                logger.error(f"[Kernel][{datetime.now()}] H({a.name},{b.name}) outside degree {support}")
                raise PresentationError(f"H({a.name}, {b.name}) violates the support |a|+|b| = {support}")
            mirror = value * sgn(a.degree * b.degree)
            if (b, a) in self.entries and self.entries[(b, a)] != mirror:
                logger.error(f"[Kernel][{datetime.now()}] H not graded symmetric on ({a.name},{b.name})")
                raise PresentationError(f"Kernel is not graded symmetric on ({a.name}, {b.name})")
            if a == b and a.odd:
                raise PresentationError(f"H({a.name}, {a.name}) must vanish for an odd letter")
            self.entries[(a, b)] = value
            self.entries[(b, a)] = mirror

    def __call__(self, a: Letter, b: Letter) -> Fraction:
        return self.entries.get((a, b), Fraction(0))

    def is_zero(self) -> bool:
        return not self.entries

    def mutated(self, a: str, b: str) -> "ContractionKernel":
        """Copy with the pair H(a,b), H(b,a) negated."""
        la, lb = self.space.get(a), self.space.get(b)
        flipped = {k: (-v if k in ((la, lb), (lb, la)) else v) for k, v in self.entries.items()}
        out = ContractionKernel(self.space, self.d)
        out.entries = flipped
        return out

    def to_dict(self) -> dict:
        items = sorted(self.entries.items(), key=lambda kv: (kv[0][0].sort_key(), kv[0][1].sort_key()))
        return {"entries": [[a.name, b.name, str(v)] for (a, b), v in items if a.sort_key() <= b.sort_key()]}

    @classmethod
    def from_dict(cls, data: dict, space: GradedSpace, d: int) -> "ContractionKernel":
        entries = {(space.get(a), space.get(b)): parse_scalar(v) for a, b, v in data.get("entries", [])}
        return cls(space, d, entries)


# ---------------- graph evaluation ----------------

def eval_graph(
    graph: MarkedGraph,
    decoration: Sequence[Key],
    kernel: ContractionKernel,
    edge_order: Optional[Sequence[Edge]] = None,
    flipped: FrozenSet[Edge] = frozenset(),
) -> Element:
    """
    Decorate vertex v with the desymmetrized word of decoration[v-1], contract
    every edge with the kernel after bringing its two letters to the front,
    and read the leftover letters as a symmetric word times gamma^betti.
    """
    if len(decoration) != graph.m:
        raise GraphError(f"{len(decoration)} inputs for {graph.m} vertices")
    for v, (word, g) in enumerate(decoration, start=1):
        if len(word) != graph.valency(v):
            logger.error(f"[Feynman][{datetime.now()}] vertex {v} valency {graph.valency(v)} vs word {word}")
            raise GraphError(f"Input of vertex {v} has length {len(word)}, valency is {graph.valency(v)}")
        if g != graph.defect(v):
            raise GraphError(f"Input of vertex {v} carries gamma^{g}, loop defect is {graph.defect(v)}")

    edges = list(edge_order) if edge_order is not None else list(graph.edges)
    if sorted(tuple(sorted(e)) for e in edges) != list(graph.edges):
        raise GraphError("edge_order must list every edge exactly once")
    edges = [(b, a) if tuple(sorted((a, b))) in flipped or (a, b) in flipped else (a, b) for a, b in edges]
    loops = betti(graph)
    half_edges = [h for hs in graph.half_edges for h in hs]
    s = gamma_degree(kernel.d)

    acc: Dict[Key, Fraction] = {}
    for orderings in itertools.product(*(desymmetrize(word) for word, _ in decoration)):
        coef = Fraction(1)
        letter_of: Dict[int, Letter] = {}
        for hs, tensor in zip(graph.half_edges, orderings):
            coef *= tensor.coef
            letter_of.update(zip(hs, tensor.letters))
        sequence = list(half_edges)
        for a, b in edges:
            value = kernel(letter_of[a], letter_of[b])
            if value == 0:
                coef = Fraction(0)
                break
            pa, pb = sequence.index(a), sequence.index(b)
            perm = [pa, pb] + [k for k in range(len(sequence)) if k not in (pa, pb)]
            coef *= value * koszul_sign(perm, [letter_of[h].degree for h in sequence])
            sequence = [sequence[k] for k in perm[2:]]
        if coef == 0:
            continue
        word, sign = sym_canonicalize([letter_of[h] for h in sequence])
        if sign == 0:
            continue
        key = (word, loops)
        acc[key] = acc.get(key, Fraction(0)) + coef * sign

    out = Element(kernel.space, kernel.d, acc)
    expected_word = sum(word_degree(w) for w, _ in decoration) - len(graph.edges) * s
    expected_gamma = sum(g for _, g in decoration) + len(graph.edges) - graph.m + 1
    for (word, g), _ in out.terms():
        if word_degree(word) != expected_word or g != expected_gamma:
            logger.error(f"[Feynman][{datetime.now()}] degree count violated on {graph!r}")
            raise GradingError(f"Degree count violated: word degree {word_degree(word)} (expected {expected_word}), "
                               f"gamma {g} (expected {expected_gamma})")
        shifted_in = sum(key_degree(k, kernel.d) - s for k in decoration)
        if key_degree((word, g), kernel.d) - s != shifted_in:
            raise GradingError("Graph evaluation is not of degree 0 in the shifted grading")
    return out


def _profile(keys: Sequence[Key]) -> List[Tuple[int, int]]:
    return [(len(word), g) for word, g in keys]


class KFamily:
    """The Taylor family K_m as a sum over profile-matching graph classes weighted by 1/|Aut|."""

    def __init__(self, kernel: ContractionKernel, stable: bool = False) -> None:
        self.kernel = kernel
        self.stable = stable
        self._cache: Dict[Tuple[Key, ...], Element] = {}

    def on_keys(self, keys: Sequence[Key]) -> Element:
        keys = tuple(keys)
        if keys in self._cache:
            return self._cache[keys]
        out = Element.zero(self.kernel.space, self.kernel.d)
        for cls in enumerate_graphs(None, None, len(keys), profile=_profile(keys), stable=self.stable):
            out = out + eval_graph(cls.graph, keys, self.kernel).scale(Fraction(1, cls.aut))
        self._cache[keys] = out
        return out

    def __call__(self, inputs: Sequence[Element]) -> Element:
        def single(parts: Tuple[Element, ...]) -> Element:
            coef = Fraction(1)
            for p in parts:
                coef *= p.terms()[0][1]
            return self.on_keys([p.keys()[0] for p in parts]).scale(coef)
        return multilinear(single, inputs)


def taylor_K(m: int, inputs: Sequence[Element], kernel: ContractionKernel, family: Optional[KFamily] = None) -> Element:
    if m < 1 or len(inputs) != m:
        raise GraphError(f"taylor_K needs exactly m = {m} >= 1 inputs, got {len(inputs)}")
    return (family or KFamily(kernel))(inputs)


def matchings(items: Sequence[int]) -> Iterator[List[Edge]]:
    """All partial matchings of the items."""
    if not items:
        yield []
        return
    first, rest = items[0], list(items[1:])
    for matching in matchings(rest):
        yield matching
    for k, other in enumerate(rest):
        for matching in matchings(rest[:k] + rest[k + 1:]):
            yield [(first, other)] + matching


def labeled_sum_K(keys: Sequence[Key], kernel: ContractionKernel) -> Element:
    """Sum over all connected labeled graphs on the decoration's half-edges, over the relabeling count."""
    half_edges: List[Tuple[int, ...]] = []
    counter = itertools.count()
    relabelings = 1
    for word, _ in keys:
        half_edges.append(tuple(next(counter) for _ in word))
        for k in range(2, len(word) + 1):
            relabelings *= k
    defects = tuple(g for _, g in keys)
    flat = [h for hs in half_edges for h in hs]
    out = Element.zero(kernel.space, kernel.d)
    for matching in matchings(flat):
        graph = MarkedGraph(defects, tuple(half_edges), tuple(matching))
        if not graph.is_connected():
            continue
        out = out + eval_graph(graph, keys, kernel)
    return out.scale(Fraction(1, relabelings))


# ---------------- open-closed family ----------------

def split_term(z: Element, closed: GradedSpace) -> Tuple[int, Element, Element]:
    """z = sign * x * y with x the closed letters (carrying all gamma) and y the remaining letters."""
    (word, g), coef = z.terms()[0]
    xs = [l for l in word if l in closed]
    ys = [l for l in word if l not in closed]
    x = Element.monomial(closed, z.d, xs, g, coef)
    y = Element.monomial(z.space, z.d, ys)
    product = x * y
    sign = 1 if product.terms()[0][1] == coef else -1
    return sign, x, y


def oc_taylor(pairs: Sequence[Tuple[Element, Element]], kernel: ContractionKernel, W: BDPresentation,
              family: Optional[KFamily] = None) -> Element:
    """(-1)^* K_n(x_1..x_n) * (y_1 ... y_n), the sign moving every x left of every y."""
    if not pairs:
        raise GraphError("oc_taylor needs at least one input pair")
    xs = [x for x, _ in pairs]
    ys = [y for _, y in pairs]
    degrees = []
    for x, y in pairs:
        degrees.extend([key_degree(x.keys()[0], x.d), key_degree(y.keys()[0], y.d)])
    n = len(pairs)
    perm = [2 * k for k in range(n)] + [2 * k + 1 for k in range(n)]
    sign = koszul_sign(perm, degrees)
    value = taylor_K(n, xs, kernel, family)
    for y in ys:
        value = value * y.promote(W.space)
    return value.scale(sign)


def oc_family(kernel: ContractionKernel, W: BDPresentation, name: str = "C(K(x)m)") -> TaylorMorphism:
    """Taylor family of C(K (x) m) on single-term inputs of the tensor algebra."""
    family = KFamily(kernel)

    def component(n: int):
        def f(zs: Tuple[Element, ...]) -> Element:
            sign = 1
            pairs = []
            for z in zs:
                s, x, y = split_term(z, kernel.space)
                sign *= s
                pairs.append((x, y))
            return oc_taylor(pairs, kernel, W, family).scale(sign)
        return f

    return TaylorMorphism({n: component(n) for n in range(1, 5)}, kernel.d, name)


def k_morphism(kernel: ContractionKernel, max_arity: int = 4, name: str = "K") -> TaylorMorphism:
    family = KFamily(kernel)
    return TaylorMorphism({n: family for n in range(1, max_arity + 1)}, kernel.d, name)
