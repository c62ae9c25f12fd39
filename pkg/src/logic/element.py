"""Exact-rational elements of Sym(V)[[gamma]] over a finite graded space."""
from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from src.logic.errors import GradingError
from src.logic.graded import GradedSpace, Letter, SymWord, sym_canonicalize, word_degree

Key = Tuple[SymWord, int]
Scalar = Union[Fraction, int]


def gamma_degree(d: int) -> int:
    return 6 - 2 * d


def key_degree(key: Key, d: int) -> int:
    word, g = key
    return word_degree(word) + g * gamma_degree(d)


def key_order(key: Key) -> tuple:
    word, g = key
    return (len(word), g, tuple(l.sort_key() for l in word))


def parse_scalar(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, str)):
        return Fraction(value)
    raise GradingError(f"Not an exact scalar: {value!r}")


class Element:
    """
    Finite map (SymWord, gamma exponent) -> Fraction.

    Words are stored in canonical order with the Koszul sign folded into the
    coefficient. Terms with zero coefficient are never stored.
    """

    def __init__(self, space: GradedSpace, d: int, terms: Optional[Mapping[Key, Scalar]] = None) -> None:
        self.space = space
        self.d = d
        self._terms: Dict[Key, Fraction] = {}
        for (word, g), coef in (terms or {}).items():
            if g < 0:
                raise GradingError(f"Negative gamma exponent {g}")
            for letter in word:
                if letter not in space:
                    raise GradingError(f"Letter {letter!r} not in ambient space")
            word, sign = sym_canonicalize(word)
            c = Fraction(coef) * sign
            if c != 0:
                key = (word, g)
                self._terms[key] = self._terms.get(key, Fraction(0)) + c
        self._terms = {k: v for k, v in self._terms.items() if v != 0}

    # ---------------- constructors ----------------

    @classmethod
    def zero(cls, space: GradedSpace, d: int) -> "Element":
        return cls(space, d)

    @classmethod
    def unit(cls, space: GradedSpace, d: int, coef: Scalar = 1) -> "Element":
        return cls(space, d, {((), 0): coef})

    @classmethod
    def monomial(cls, space: GradedSpace, d: int, letters: Sequence[Letter], gamma: int = 0,
                 coef: Scalar = 1) -> "Element":
        word, sign = sym_canonicalize(letters)
        return cls(space, d, {(word, gamma): Fraction(coef) * sign})

    @classmethod
    def from_key(cls, space: GradedSpace, d: int, key: Key, coef: Scalar = 1) -> "Element":
        return cls(space, d, {key: coef})

    # ---------------- access ----------------

    def terms(self) -> List[Tuple[Key, Fraction]]:
        return sorted(self._terms.items(), key=lambda kv: key_order(kv[0]))

    def keys(self) -> List[Key]:
        return [k for k, _ in self.terms()]

    def coefficient(self, key: Key) -> Fraction:
        return self._terms.get(key, Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[Tuple[Key, Fraction]]:
        return iter(self.terms())

    def degrees(self) -> set:
        return {key_degree(k, self.d) for k in self._terms}

    def max_word_length(self) -> int:
        return max((len(w) for w, _ in self._terms), default=0)

    def max_gamma(self) -> int:
        return max((g for _, g in self._terms), default=0)

    def split(self) -> Iterator["Element"]:
        """Single-term summands, in canonical term order."""
        for key, coef in self.terms():
            yield Element(self.space, self.d, {key: coef})

    # ---------------- arithmetic ----------------

    def _common(self, other: "Element") -> GradedSpace:
        if other.d != self.d:
            raise GradingError(f"Elements built for different d ({self.d} vs {other.d})")
        return self.space if self.space == other.space else self.space.union(other.space)

    def promote(self, space: GradedSpace) -> "Element":
        return Element(space, self.d, self._terms)

    def __add__(self, other: "Element") -> "Element":
        space = self._common(other)
        acc = dict(self._terms)
        for k, v in other._terms.items():
            acc[k] = acc.get(k, Fraction(0)) + v
        return Element(space, self.d, acc)

    def __neg__(self) -> "Element":
        return Element(self.space, self.d, {k: -v for k, v in self._terms.items()})

    def __sub__(self, other: "Element") -> "Element":
        return self + (-other)

    def scale(self, c: Scalar) -> "Element":
        c = Fraction(c)
        return Element(self.space, self.d, {k: v * c for k, v in self._terms.items()})

    def __mul__(self, other: Union["Element", Scalar]) -> "Element":
        if not isinstance(other, Element):
            return self.scale(other)
        space = self._common(other)
        acc: Dict[Key, Fraction] = {}
        for (w1, g1), c1 in self._terms.items():
            for (w2, g2), c2 in other._terms.items():
                word, sign = sym_canonicalize(w1 + w2)
                if sign == 0:
                    continue
                key = (word, g1 + g2)
                acc[key] = acc.get(key, Fraction(0)) + sign * c1 * c2
        return Element(space, self.d, acc)

    def __rmul__(self, other: Scalar) -> "Element":
        return self.scale(other)

    def times_gamma(self, power: int = 1) -> "Element":
        return Element(self.space, self.d, {(w, g + power): c for (w, g), c in self._terms.items()})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Element):
            return NotImplemented
        return self.d == other.d and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.d, frozenset(self._terms.items())))

    # ---------------- serialization ----------------

    def to_dict(self) -> dict:
        return {
            "terms": [
                {"word": [l.name for l in w], "gamma": g, "coef": str(c)}
                for (w, g), c in self.terms()
            ]
        }

    @classmethod
    def from_dict(cls, data: dict, space: GradedSpace, d: int) -> "Element":
        out = cls.zero(space, d)
        for item in data.get("terms", []):
            letters = [space.get(name) for name in item["word"]]
            out = out + cls.monomial(space, d, letters, int(item.get("gamma", 0)), parse_scalar(item.get("coef", 1)))
        return out

    def __repr__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for (w, g), c in self.terms():
            word = ".".join(l.name for l in w) or "1"
            parts.append(f"{c}*{word}" + (f"*g^{g}" if g else ""))
        return " + ".join(parts)


def project_gn(x: Element, g: int, n: int) -> Element:
    """Keep exactly the terms of word length n and gamma exponent g."""
    return Element(x.space, x.d, {k: c for k, c in x.terms() if len(k[0]) == n and k[1] == g})


def total(elements: Iterable[Element], space: GradedSpace, d: int) -> Element:
    acc = Element.zero(space, d)
    for e in elements:
        acc = acc + e
    return acc
