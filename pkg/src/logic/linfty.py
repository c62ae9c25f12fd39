"""
Symmetric-coalgebra bookkeeping for dgla-induced L-infinity structures.

Coalgebra inputs are single-term Elements. The coalgebra shift 6-2d is even,
so Koszul signs use the unshifted parity of each input.
"""
from __future__ import annotations

import itertools
import logging
from logging.handlers import RotatingFileHandler
from datetime import datetime
from fractions import Fraction
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

from src.logic.bd import DglaView, degree_of, sgn
from src.logic.element import Element, Key, key_degree, key_order
from src.logic.graded import GradedSpace, Letter, koszul_sign, ordered_splits
from src.logic.helpers import LOG_FILE
from src.logic.report import Check

logger = logging.getLogger(__name__)
logger.addHandler(RotatingFileHandler(
    LOG_FILE, maxBytes=1024*1024*5, backupCount=5, encoding="utf-8"
))
logger.setLevel(logging.INFO)

Component = Callable[[Tuple[Element, ...]], Element]
SymTensor = Tuple[Key, ...]


def parities(inputs: Sequence[Element]) -> List[int]:
    return [degree_of(x) % 2 for x in inputs]


def front_sign(inputs: Sequence[Element], front: Sequence[int]) -> int:
    """Koszul sign of bringing the positions `front` (in order) ahead of the rest."""
    perm = list(front) + [k for k in range(len(inputs)) if k not in front]
    return koszul_sign(perm, parities(inputs))


def multilinear(f: Component, inputs: Sequence[Element]) -> Element:
    """Extend a map given on single terms to sums, input by input."""
    pieces = [list(x.split()) for x in inputs]
    if any(not p for p in pieces):
        return Element.zero(inputs[0].space, inputs[0].d)
    out: Optional[Element] = None
    for combo in itertools.product(*pieces):
        value = f(tuple(combo))
        out = value if out is None else out + value
    return out


# ---------------- coderivations ----------------

class Coderivation:
    """Taylor coefficients Q_n; missing arities are zero."""

    def __init__(self, components: Dict[int, Component], name: str = "") -> None:
        self.components = dict(components)
        self.name = name

    def arities(self) -> List[int]:
        return sorted(self.components)

    def apply(self, n: int, inputs: Sequence[Element]) -> Element:
        if n not in self.components:
            return Element.zero(inputs[0].space, inputs[0].d)
        return self.components[n](tuple(inputs))


def dgla_to_coderivation(view: DglaView) -> Coderivation:
    """Q_1 = d and Q_2(x, y) = (-1)^|x| [x, y] with |x| the coalgebra degree."""

    def q1(inputs: Tuple[Element, ...]) -> Element:
        return view.d(inputs[0])

    def q2(inputs: Tuple[Element, ...]) -> Element:
        x, y = inputs
        out = Element.zero(view.space, view.d_value)
        for part in x.split():
            out = out + view.lie(part, y).scale(sgn(degree_of(part)))
        return out

    return Coderivation({1: q1, 2: q2}, name=view.presentation.name)


def square_zero_relation(Q: Coderivation, inputs: Sequence[Element]) -> Element:
    """Sum over nonempty I of eps(I,J) Q_{|J|+1}(Q_{|I|}(x_I) . x_J)."""
    n = len(inputs)
    out = Element.zero(inputs[0].space, inputs[0].d)
    for size in range(1, n + 1):
        for I in itertools.combinations(range(n), size):
            J = [k for k in range(n) if k not in I]
            inner = Q.apply(size, [inputs[k] for k in I])
            if inner.is_zero():
                continue
            sign = front_sign(inputs, I)
            outer = Q.apply(len(J) + 1, [inner] + [inputs[k] for k in J])
            out = out + outer.scale(sign)
    return out


def input_tuples(basis: Sequence[Element], arity: int, max_words: Optional[int] = None) -> Iterator[Tuple[Element, ...]]:
    """Multisets of basis inputs, skipping repeated odd inputs and oversize totals."""
    for combo in itertools.combinations_with_replacement(basis, arity):
        if any(combo[k] == combo[k + 1] and degree_of(combo[k]) % 2 for k in range(arity - 1)):
            continue
        if max_words is not None and sum(x.max_word_length() for x in combo) > max_words:
            continue
        yield combo


def square_zero_check(Q: Coderivation, basis: Sequence[Element], max_arity: int = 3,
                      max_words: Optional[int] = None) -> List[Check]:
    checks = []
    for n in range(1, max_arity + 1):
        count, found = 0, None
        for combo in input_tuples(basis, n, max_words):
            count += 1
            value = square_zero_relation(Q, combo)
            if not value.is_zero():
                found = {"arity": n, "inputs": [x.to_dict() for x in combo], "value": value.to_dict()}
                break
        checks.append(Check(f"{Q.name}:square-zero arity {n}", found is None, {"inputs": count}, found))
        if found is not None:
            logger.warning(f"[Linfty][{datetime.now()}] Q^2 != 0 at arity {n} for {Q.name}")
    return checks


# ---------------- coalgebra elements ----------------

class CoalgebraElement:
    """Finite sum of symmetric tensors of target basis terms."""

    def __init__(self, d: int, terms: Optional[Dict[SymTensor, Fraction]] = None) -> None:
        self.d = d
        self.terms: Dict[SymTensor, Fraction] = {k: v for k, v in (terms or {}).items() if v != 0}

    @staticmethod
    def canonical(keys: Sequence[Key], d: int) -> Tuple[SymTensor, int]:
        order = sorted(range(len(keys)), key=lambda k: key_order(keys[k]))
        ordered = tuple(keys[k] for k in order)
        odd = [key_degree(k, d) % 2 for k in keys]
        for k in range(len(ordered) - 1):
            if ordered[k] == ordered[k + 1] and key_degree(ordered[k], d) % 2:
                return ordered, 0
        return ordered, koszul_sign(order, odd)

    @classmethod
    def product(cls, factors: Sequence[Element], d: int) -> "CoalgebraElement":
        """Symmetric product of algebra elements, expanded termwise."""
        acc: Dict[SymTensor, Fraction] = {}
        for combo in itertools.product(*(x.terms() for x in factors)):
            keys = [k for k, _ in combo]
            coef = Fraction(1)
            for _, c in combo:
                coef *= c
            tensor, sign = cls.canonical(keys, d)
            if sign:
                acc[tensor] = acc.get(tensor, Fraction(0)) + sign * coef
        return cls(d, acc)

    def __add__(self, other: "CoalgebraElement") -> "CoalgebraElement":
        acc = dict(self.terms)
        for k, v in other.terms.items():
            acc[k] = acc.get(k, Fraction(0)) + v
        return CoalgebraElement(self.d, acc)

    def scale(self, c) -> "CoalgebraElement":
        return CoalgebraElement(self.d, {k: v * c for k, v in self.terms.items()})

    def __eq__(self, other: object) -> bool:
        return isinstance(other, CoalgebraElement) and self.terms == other.terms

    def comultiply(self) -> Dict[Tuple[SymTensor, SymTensor], Fraction]:
        """Reduced coproduct: splits into two nonempty sides with Koszul signs."""
        acc: Dict[Tuple[SymTensor, SymTensor], Fraction] = {}
        for tensor, coef in self.terms.items():
            odd = [key_degree(k, self.d) % 2 for k in tensor]
            for I, J in ordered_splits(len(tensor)):
                sign = koszul_sign(I + J, odd)
                key = (tuple(tensor[k] for k in I), tuple(tensor[k] for k in J))
                acc[key] = acc.get(key, Fraction(0)) + sign * coef
        return {k: v for k, v in acc.items() if v != 0}

    def to_dict(self) -> dict:
        items = sorted(self.terms.items(), key=lambda kv: [key_order(k) for k in kv[0]])
        return {"terms": [
            {"factors": [{"word": [l.name for l in w], "gamma": g} for w, g in tensor], "coef": str(c)}
            for tensor, c in items
        ]}


# ---------------- Taylor morphisms ----------------

class TaylorMorphism:
    """Coefficients F_n on single-term inputs, extended multilinearly."""

    def __init__(self, components: Dict[int, Component], d: int, name: str = "") -> None:
        self.components = dict(components)
        self.d = d
        self.name = name
        self._cache: Dict[Tuple[Key, ...], Element] = {}

    def apply(self, n: int, inputs: Sequence[Element]) -> Element:
        f = self.components.get(n)
        if f is None:
            return Element.zero(inputs[0].space, inputs[0].d)

        def single(parts: Tuple[Element, ...]) -> Element:
            keys = tuple(p.keys()[0] for p in parts)
            coef = Fraction(1)
            for p in parts:
                coef *= p.terms()[0][1]
            cache_key = (n,) + keys
            if cache_key not in self._cache:
                units = tuple(Element.from_key(p.space, p.d, k) for p, k in zip(parts, keys))
                self._cache[cache_key] = f(units)
            return self._cache[cache_key].scale(coef)

        return multilinear(single, inputs)


def set_partitions(items: List[int]) -> Iterator[List[List[int]]]:
    """Unordered set partitions; blocks ordered by their least element."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for partition in set_partitions(rest):
        yield [[first]] + partition
        for k in range(len(partition)):
            yield partition[:k] + [[first] + partition[k]] + partition[k + 1:]


def extend_taylor(F: TaylorMorphism, inputs: Sequence[Element]) -> CoalgebraElement:
    """Value of the coalgebra morphism on x_1 ... x_n: blockwise F with Koszul signs."""
    total = CoalgebraElement(F.d)
    for partition in set_partitions(list(range(len(inputs)))):
        blocks = sorted((sorted(b) for b in partition), key=lambda b: b[0])
        perm = [k for b in blocks for k in b]
        sign = koszul_sign(perm, parities(inputs))
        values = [F.apply(len(b), [inputs[k] for k in b]) for b in blocks]
        if any(v.is_zero() for v in values):
            continue
        total = total + CoalgebraElement.product(values, F.d).scale(sign)
    return total


def check_coalgebra_intertwining(F: TaylorMorphism, inputs: Sequence[Element]) -> bool:
    """Reduced coproduct after C(F) equals C(F) (x) C(F) after the coproduct."""
    lhs = extend_taylor(F, inputs).comultiply()
    rhs: Dict[Tuple[SymTensor, SymTensor], Fraction] = {}
    for I, J in ordered_splits(len(inputs)):
        sign = koszul_sign(I + J, parities(inputs))
        left = extend_taylor(F, [inputs[k] for k in I])
        right = extend_taylor(F, [inputs[k] for k in J])
        for lk, lv in left.terms.items():
            for rk, rv in right.terms.items():
                rhs[(lk, rk)] = rhs.get((lk, rk), Fraction(0)) + sign * lv * rv
    return lhs == {k: v for k, v in rhs.items() if v != 0}


def morphism_defect(F: TaylorMorphism, Q: Coderivation, Qt: Coderivation, inputs: Sequence[Element]) -> Element:
    """
    Q'_1 F_n(x) + 1/2 sum_{I,J} eps Q'_2(F(x_I), F(x_J))
      - sum_i eps F_n(Q_1 x_i . rest) - 1/2 sum_{i != j} eps F_{n-1}(Q_2(x_i, x_j) . rest)
    """
    n = len(inputs)
    half = Fraction(1, 2)
    lhs = Qt.apply(1, [F.apply(n, inputs)])
    for I, J in ordered_splits(n):
        left = F.apply(len(I), [inputs[k] for k in I])
        right = F.apply(len(J), [inputs[k] for k in J])
        if left.is_zero() or right.is_zero():
            continue
        lhs = lhs + Qt.apply(2, [left, right]).scale(half * front_sign(inputs, I))
    rhs = Element.zero(lhs.space, lhs.d)
    for i in range(n):
        moved = Q.apply(1, [inputs[i]])
        if moved.is_zero():
            continue
        rest = [inputs[k] for k in range(n) if k != i]
        rhs = rhs + F.apply(n, [moved] + rest).scale(front_sign(inputs, [i]))
    if n >= 2:
        for i, j in itertools.permutations(range(n), 2):
            merged = Q.apply(2, [inputs[i], inputs[j]])
            if merged.is_zero():
                continue
            rest = [inputs[k] for k in range(n) if k not in (i, j)]
            rhs = rhs + F.apply(n - 1, [merged] + rest).scale(half * front_sign(inputs, [i, j]))
    return lhs - rhs


def check_morphism_relation(F: TaylorMorphism, Q: Coderivation, Qt: Coderivation, basis: Sequence[Element],
                            max_arity: int = 3, max_words: Optional[int] = None) -> List[Check]:
    checks = []
    for n in range(1, max_arity + 1):
        count, found = 0, None
        for combo in input_tuples(basis, n, max_words):
            count += 1
            defect = morphism_defect(F, Q, Qt, combo)
            if not defect.is_zero():
                found = {"arity": n, "inputs": [x.to_dict() for x in combo], "defect": defect.to_dict()}
                break
        checks.append(Check(f"{F.name}:morphism arity {n}", found is None, {"inputs": count}, found))
        if found is not None:
            logger.warning(f"[Linfty][{datetime.now()}] {F.name} fails the morphism relation at arity {n}")
    return checks


def identity_morphism(d: int, name: str = "id") -> TaylorMorphism:
    return TaylorMorphism({1: lambda xs: xs[0]}, d, name)


def broken_bracket_example(d: int = 3) -> Tuple[Coderivation, List[Element]]:
    """
    Q_2 on three even letters with Q_2(x,y) = z and Q_2(x,z) = x, no Q_1.
    Square-zero holds up to arity 2 and fails at arity 3 on (x, y, x).
    """
    x, y, z = Letter("x", 0), Letter("y", 0), Letter("z", 0)
    space = GradedSpace([x, y, z])
    e = {l: Element.monomial(space, d, (l,)) for l in space.letters}
    table = {(x, y): z, (y, x): z, (x, z): x, (z, x): x}

    def single(parts: Tuple[Element, ...]) -> Element:
        (u,), _ = parts[0].keys()[0]
        (v,), _ = parts[1].keys()[0]
        target = table.get((u, v))
        if target is None:
            return Element.zero(space, d)
        return e[target].scale(parts[0].terms()[0][1] * parts[1].terms()[0][1])

    return Coderivation({2: lambda inputs: multilinear(single, inputs)}, name="broken"), [e[x], e[y], e[z]]
