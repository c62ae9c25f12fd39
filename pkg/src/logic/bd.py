"""
Twisted BD algebras given by finite presentations.

A presentation lists the differential and the bracket on generator letters.
Both extend to words of the free graded-commutative algebra: the bracket as a
biderivation, the differential by the BD relation
    d(a.w) = d(a).w + (-1)^|a| a.d(w) + gamma {a, w}
applied to the first letter of the canonical word.
"""
from __future__ import annotations

import itertools
import logging
from logging.handlers import RotatingFileHandler
from dataclasses import dataclass, field
from datetime import datetime
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from src.logic.element import Element, Key, key_degree, parse_scalar
from src.logic.errors import PresentationError
from src.logic.graded import GradedSpace, Letter, SymWord, koszul_sign, word_degree
from src.logic.helpers import LOG_FILE
from src.logic.report import Check

logger = logging.getLogger(__name__)
logger.addHandler(RotatingFileHandler(
    LOG_FILE, maxBytes=1024*1024*5, backupCount=5, encoding="utf-8"
))
logger.setLevel(logging.INFO)


def twist(d: int) -> int:
    return 2 * d - 5


def sgn(exponent: int) -> int:
    return -1 if exponent % 2 else 1


@dataclass(frozen=True)
class TruncationWindow:
    max_words: int = 4
    max_gamma: int = 2

    def __post_init__(self) -> None:
        if self.max_words < 1 or self.max_gamma < 1:
            raise PresentationError(f"Window caps must be >= 1, got ({self.max_words}, {self.max_gamma})")

    def admits(self, key: Key) -> bool:
        return len(key[0]) <= self.max_words and key[1] <= self.max_gamma

    def truncate(self, x: Element) -> Element:
        return Element(x.space, x.d, {k: c for k, c in x.terms() if self.admits(k)})

    def to_dict(self) -> dict:
        return {"max_words": self.max_words, "max_gamma": self.max_gamma}

    @classmethod
    def from_dict(cls, data: dict) -> "TruncationWindow":
        return cls(int(data.get("max_words", 4)), int(data.get("max_gamma", 2)))


# ---------------- derivations ----------------

class Derivation:
    """Derivation of the free algebra given on generators; gamma is constant."""

    def __init__(self, space: GradedSpace, d: int, images: Mapping[Letter, Element], degree: int = 1) -> None:
        self.space = space
        self.d = d
        self.degree = degree
        self.images: Dict[Letter, Element] = {}
        for letter, image in images.items():
            for key in image.keys():
                if key_degree(key, d) != letter.degree + degree:
                    logger.error(f"[Derivation][{datetime.now()}] {letter!r} -> {image!r} has wrong degree")
                    raise PresentationError(f"Image of {letter.name} is not of degree {letter.degree + degree}")
            self.images[letter] = image
        self._cache: Dict[SymWord, Element] = {}

    def on_word(self, word: SymWord) -> Element:
        if word in self._cache:
            return self._cache[word]
        out = Element.zero(self.space, self.d)
        for k, letter in enumerate(word):
            image = self.images.get(letter)
            if image is None or image.is_zero():
                continue
            sign = sgn(self.degree * word_degree(word[:k]))
            prefix = Element.monomial(self.space, self.d, word[:k])
            suffix = Element.monomial(self.space, self.d, word[k + 1:])
            out = out + (prefix * image * suffix).scale(sign)
        self._cache[word] = out
        return out

    def __call__(self, x: Element) -> Element:
        out = Element.zero(self.space, self.d)
        for (word, g), c in x.terms():
            out = out + self.on_word(word).times_gamma(g).scale(c)
        return out

    def is_zero(self) -> bool:
        return all(image.is_zero() for image in self.images.values())

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "images": {l.name: self.images[l].to_dict() for l in sorted(self.images, key=Letter.sort_key)},
        }

    @classmethod
    def from_dict(cls, data: dict, space: GradedSpace, d: int) -> "Derivation":
        images = {space.get(name): Element.from_dict(e, space, d) for name, e in data.get("images", {}).items()}
        return cls(space, d, images, int(data.get("degree", 1)))


# ---------------- presentations ----------------

class BDPresentation:
    """Differential and bracket on generators of Sym(V)[[gamma]]."""

    def __init__(
        self,
        space: GradedSpace,
        d: int,
        differential: Mapping[Letter, Element],
        bracket: Mapping[Tuple[Letter, Letter], Element],
        window: Optional[TruncationWindow] = None,
        name: str = "",
        check_symmetry: bool = True,
    ) -> None:
        self.space = space
        self.d = d
        self.window = window or TruncationWindow()
        self.name = name
        self.r = twist(d)

        self.d_gen: Dict[Letter, Element] = {}
        for letter, image in differential.items():
            self._check_letter(letter)
            for key in image.keys():
                if key_degree(key, d) != letter.degree + 1:
                    logger.error(f"[BD][{datetime.now()}] d({letter.name}) = {image!r} not of degree {letter.degree + 1}")
                    raise PresentationError(f"d({letter.name}) must have degree {letter.degree + 1}")
            if not image.is_zero():
                self.d_gen[letter] = image.promote(space)

        self.bracket_gen: Dict[Tuple[Letter, Letter], Element] = {}
        for (a, b), value in bracket.items():
            self._check_letter(a)
            self._check_letter(b)
            for key in value.keys():
                if key_degree(key, d) != a.degree + b.degree + self.r:
                    logger.error(f"[BD][{datetime.now()}] {{{a.name},{b.name}}} = {value!r} violates degree r={self.r}")
                    raise PresentationError(f"{{{a.name},{b.name}}} must have degree {a.degree + b.degree + self.r}")
            value = value.promote(space)
            mirror = value.scale(sgn(a.degree * b.degree))
            if check_symmetry:
                if (b, a) in self.bracket_gen and self.bracket_gen[(b, a)] != mirror:
                    logger.error(f"[BD][{datetime.now()}] bracket entries ({a.name},{b.name}) not graded symmetric")
                    raise PresentationError(f"Bracket entries for ({a.name}, {b.name}) are not graded symmetric")
                if a == b and not value.is_zero() and a.odd:
                    raise PresentationError(f"{{{a.name},{a.name}}} must vanish for an odd letter")
            if value.is_zero():
                continue
            self.bracket_gen[(a, b)] = value
            if check_symmetry:
                self.bracket_gen[(b, a)] = mirror

        self._d_cache: Dict[SymWord, Element] = {}
        self._br_cache: Dict[Tuple[SymWord, SymWord], Element] = {}

    def _check_letter(self, letter: Letter) -> None:
        if letter not in self.space:
            raise PresentationError(f"Letter {letter!r} is not a generator of this presentation")

    @property
    def gamma_degree(self) -> int:
        return 1 - self.r

    # ---------------- building elements ----------------

    def zero(self) -> Element:
        return Element.zero(self.space, self.d)

    def one(self) -> Element:
        return Element.unit(self.space, self.d)

    def word(self, names: Sequence[str], gamma: int = 0, coef=1) -> Element:
        return Element.monomial(self.space, self.d, [self.space.get(n) for n in names], gamma, coef)

    def basis(self, max_words: Optional[int] = None, min_words: int = 0, gammas: Iterable[int] = (0,)) -> List[Element]:
        """Single-term basis elements in canonical order."""
        cap = self.window.max_words if max_words is None else max_words
        out = []
        for g in gammas:
            for w in self.space.words(cap, min_words):
                out.append(Element.from_key(self.space, self.d, (w, g)))
        return out

    # ---------------- structure maps ----------------

    def _word_bracket(self, u: SymWord, v: SymWord) -> Element:
        cached = self._br_cache.get((u, v))
        if cached is not None:
            return cached
        out = self.zero()
        joined = u + v
        degrees = [l.degree for l in joined]
        for p in range(len(u)):
            for q in range(len(v)):
                value = self.bracket_gen.get((u[p], v[q]))
                if value is None:
                    continue
                front = [p, len(u) + q]
                perm = front + [k for k in range(len(joined)) if k not in front]
                sign = koszul_sign(perm, degrees)
                rest = [joined[k] for k in perm[2:]]
                out = out + (value * Element.monomial(self.space, self.d, rest)).scale(sign)
        self._br_cache[(u, v)] = out
        return out

    def bracket(self, x: Element, y: Element) -> Element:
        out = self.zero()
        for (u, gu), cu in x.terms():
            for (v, gv), cv in y.terms():
                out = out + self._word_bracket(u, v).times_gamma(gu + gv).scale(cu * cv)
        return out

    def _word_d(self, word: SymWord) -> Element:
        cached = self._d_cache.get(word)
        if cached is not None:
            return cached
        if not word:
            out = self.zero()
        elif len(word) == 1:
            out = self.d_gen.get(word[0], self.zero())
        else:
            a, rest = word[0], word[1:]
            A = Element.monomial(self.space, self.d, (a,))
            W = Element.monomial(self.space, self.d, rest)
            out = (self._word_d((a,)) * W
                   + (A * self._word_d(rest)).scale(sgn(a.degree))
                   + self._word_bracket((a,), rest).times_gamma(1))
        self._d_cache[word] = out
        return out

    def differential(self, x: Element) -> Element:
        out = self.zero()
        for (word, g), c in x.terms():
            out = out + self._word_d(word).times_gamma(g).scale(c)
        return out

    def product(self, x: Element, y: Element) -> Element:
        return x * y

    # ---------------- derived presentations ----------------

    def mutated(self, kind: str, a: str, b: Optional[str] = None) -> "BDPresentation":
        """Copy with one sign flipped: kind 'bracket' flips the oriented entry {a,b}, 'differential' flips d(a)."""
        la = self.space.get(a)
        d_gen = dict(self.d_gen)
        bracket = dict(self.bracket_gen)
        if kind == "bracket":
            lb = self.space.get(b)
            if (la, lb) not in bracket:
                raise PresentationError(f"No bracket entry ({a}, {b}) to corrupt")
            bracket[(la, lb)] = -bracket[(la, lb)]
        elif kind == "differential":
            if la not in d_gen:
                raise PresentationError(f"No differential on {a} to corrupt")
            d_gen[la] = -d_gen[la]
        else:
            raise PresentationError(f"Unknown mutation kind {kind!r}")
        return BDPresentation(self.space, self.d, d_gen, bracket, self.window, f"{self.name}~{kind}", check_symmetry=False)

    def with_window(self, window: TruncationWindow) -> "BDPresentation":
        return BDPresentation(self.space, self.d, self.d_gen, self.bracket_gen, window, self.name,
                              check_symmetry=False)

    # ---------------- serialization ----------------

    def to_dict(self) -> dict:
        entries = []
        for (a, b), value in sorted(self.bracket_gen.items(), key=lambda kv: (kv[0][0].sort_key(), kv[0][1].sort_key())):
            if (b.sort_key(), a.sort_key()) < (a.sort_key(), b.sort_key()):
                continue
            entries.append({"a": a.name, "b": b.name, "value": value.to_dict()})
        return {
            "name": self.name,
            "d": self.d,
            "space": self.space.to_dict(),
            "window": self.window.to_dict(),
            "differential": {l.name: self.d_gen[l].to_dict() for l in sorted(self.d_gen, key=Letter.sort_key)},
            "bracket": entries,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "BDPresentation":
        space = GradedSpace.from_dict(data["space"])
        d = int(data["d"])
        differential = {space.get(n): Element.from_dict(e, space, d) for n, e in data.get("differential", {}).items()}
        bracket = {
            (space.get(item["a"]), space.get(item["b"])): Element.from_dict(item["value"], space, d)
            for item in data.get("bracket", [])
        }
        return cls(space, d, differential, bracket, TruncationWindow.from_dict(data.get("window", {})),
                   data.get("name", ""))

    def __repr__(self) -> str:
        return f"BDPresentation({self.name!r}, d={self.d}, {len(self.space)} letters)"


# ---------------- the free closed sector ----------------

@dataclass
class FreeBVData:
    """Generating data of the free closed sector: linear d1, optional b1 and a pairing omega."""
    space: GradedSpace
    d: int
    d1: Dict[Letter, Element] = field(default_factory=dict)
    b1: Dict[Letter, Element] = field(default_factory=dict)
    omega: Dict[Tuple[Letter, Letter], Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        r = twist(self.d)
        filled: Dict[Tuple[Letter, Letter], Fraction] = {}
        for (a, b), value in self.omega.items():
            value = Fraction(value)
            if value == 0:
                continue
            if a.degree + b.degree != -r:
                logger.error(f"[FreeBV][{datetime.now()}] omega({a.name},{b.name}) outside degree {-r}")
                raise PresentationError(f"omega({a.name}, {b.name}) violates the support |a|+|b| = {-r}")
            mirror = value * sgn(a.degree * b.degree)
            if (b, a) in filled and filled[(b, a)] != mirror:
                raise PresentationError(f"omega is not graded symmetric on ({a.name}, {b.name})")
            if a == b and a.odd:
                raise PresentationError(f"omega({a.name}, {a.name}) must vanish for an odd letter")
            filled[(a, b)] = value
            filled[(b, a)] = mirror
        self.omega = filled
        for part in (self.d1, self.b1):
            for letter, image in part.items():
                if image.max_word_length() > 1 or any(len(k[0]) != 1 or k[1] != 0 for k in image.keys()):
                    raise PresentationError(f"Image of {letter.name} must be linear in the generators")
        self.linear = Derivation(self.space, self.d, self.combined())
        for letter in self.space.letters:
            x = Element.monomial(self.space, self.d, (letter,))
            if not self.linear(self.linear(x)).is_zero():
                logger.error(f"[FreeBV][{datetime.now()}] (d1+b1)^2 != 0 on {letter.name}")
                raise PresentationError(f"(d1 + b1)^2 does not vanish on {letter.name}")
        for a, b in itertools.product(self.space.letters, repeat=2):
            if self.chain_defect(a, b) != 0:
                logger.error(f"[FreeBV][{datetime.now()}] omega is no chain map on ({a.name},{b.name})")
                raise PresentationError(f"omega is not compatible with d1 + b1 on ({a.name}, {b.name})")

    def combined(self) -> Dict[Letter, Element]:
        out: Dict[Letter, Element] = {}
        for letter in self.space.letters:
            image = self.d1.get(letter, Element.zero(self.space, self.d)) + self.b1.get(letter, Element.zero(self.space, self.d))
            if not image.is_zero():
                out[letter] = image
        return out

    def pair(self, x: Element, y: Element) -> Fraction:
        """omega extended bilinearly to linear elements."""
        total = Fraction(0)
        for ((u,), _), cu in x.terms():
            for ((v,), _), cv in y.terms():
                total += cu * cv * self.omega.get((u, v), Fraction(0))
        return total

    def chain_defect(self, a: Letter, b: Letter) -> Fraction:
        A = Element.monomial(self.space, self.d, (a,))
        B = Element.monomial(self.space, self.d, (b,))
        return self.pair(self.linear(A), B) + sgn(a.degree) * self.pair(A, self.linear(B))

    def flipped(self, kind: str, a: str, b: Optional[str] = None) -> "FreeBVData":
        """
        The generating data with one sign flipped, matching BDPresentation.mutated:
        'bracket' flips the oriented omega(a, b) and 'differential' flips d1(a) + b1(a).
        Raises PresentationError when the flipped data is no longer valid.
        """
        la = self.space.get(a)
        d1, b1 = dict(self.d1), dict(self.b1)
        if kind == "bracket":
            lb = self.space.get(b)
            if (la, lb) not in self.omega:
                raise PresentationError(f"No omega entry ({a}, {b}) to flip")
            # the flipped entry goes first so its mirror is compared with the old value
            omega = {(la, lb): -self.omega[(la, lb)]}
            omega.update((k, v) for k, v in self.omega.items() if k != (la, lb))
        elif kind == "differential":
            if la not in self.combined():
                raise PresentationError(f"No differential on {a} to flip")
            omega = dict(self.omega)
            for part in (d1, b1):
                if la in part:
                    part[la] = -part[la]
        else:
            raise PresentationError(f"Unknown mutation kind {kind!r}")
        return FreeBVData(self.space, self.d, d1, b1, omega)

    def to_dict(self) -> dict:
        def linear(part):
            return {l.name: part[l].to_dict() for l in sorted(part, key=Letter.sort_key)}
        omega = [
            [a.name, b.name, str(v)] for (a, b), v in sorted(self.omega.items(), key=lambda kv: (kv[0][0].sort_key(), kv[0][1].sort_key()))
            if a.sort_key() <= b.sort_key()
        ]
        return {"space": self.space.to_dict(), "d": self.d, "d1": linear(self.d1), "b1": linear(self.b1), "omega": omega}

    @classmethod
    def from_dict(cls, data: dict) -> "FreeBVData":
        space = GradedSpace.from_dict(data["space"])
        d = int(data["d"])
        def linear(part):
            return {space.get(n): Element.from_dict(e, space, d) for n, e in (part or {}).items()}
        omega = {(space.get(a), space.get(b)): parse_scalar(v) for a, b, v in data.get("omega", [])}
        return cls(space, d, linear(data.get("d1")), linear(data.get("b1")), omega)


def free_closed_sector(data: FreeBVData, window: Optional[TruncationWindow] = None, name: str = "closed") -> BDPresentation:
    """Bracket generated by omega, differential d1 + b1 + gamma * contraction with omega."""
    unit = Element.unit(data.space, data.d)
    bracket = {(a, b): unit.scale(v) for (a, b), v in data.omega.items()}
    return BDPresentation(data.space, data.d, data.combined(), bracket, window, name)


def trivialized(data: FreeBVData, window: Optional[TruncationWindow] = None, variant: str = "t") -> BDPresentation:
    """Zero-bracket presentations: 't' keeps d1 + b1, 'Tr' keeps d1 only."""
    if variant == "t":
        differential = data.combined()
    elif variant == "Tr":
        differential = {l: e for l, e in data.d1.items() if not e.is_zero()}
        only_d1 = Derivation(data.space, data.d, differential)
        for letter in data.space.letters:
            x = Element.monomial(data.space, data.d, (letter,))
            if not only_d1(only_d1(x)).is_zero():
                raise PresentationError(f"d1^2 does not vanish on {letter.name}")
    else:
        raise PresentationError(f"Unknown closed-sector variant {variant!r}")
    return BDPresentation(data.space, data.d, differential, {}, window, f"closed-{variant}")


def laplacian(data: FreeBVData) -> Callable[[Element], Element]:
    """Second-order operator contracting pairs of letters with omega."""
    space, d = data.space, data.d

    def on_word(word: SymWord) -> Element:
        out = Element.zero(space, d)
        degrees = [l.degree for l in word]
        for p, q in itertools.combinations(range(len(word)), 2):
            value = data.omega.get((word[p], word[q]))
            if not value:
                continue
            perm = [p, q] + [k for k in range(len(word)) if k not in (p, q)]
            rest = [word[k] for k in perm[2:]]
            out = out + Element.monomial(space, d, rest, coef=value * koszul_sign(perm, degrees))
        return out

    def apply(x: Element) -> Element:
        out = Element.zero(space, d)
        for (word, g), c in x.terms():
            out = out + on_word(word).times_gamma(g).scale(c)
        return out

    return apply


def laplacian_checks(data: FreeBVData, window: TruncationWindow) -> List[Check]:
    """Delta^2 = 0 and D Delta + Delta D = 0 on all basis words of the window."""
    delta = laplacian(data)
    D = data.linear
    square, commutator = None, None
    count = 0
    for w in data.space.words(window.max_words):
        x = Element.from_key(data.space, data.d, (w, 0))
        count += 1
        if square is None and not delta(delta(x)).is_zero():
            square = {"word": x.to_dict()}
        if commutator is None and not (D(delta(x)) + delta(D(x))).is_zero():
            commutator = {"word": x.to_dict()}
    return [
        Check("laplacian-square", square is None, {"words": count}, square),
        Check("laplacian-commutes-with-d", commutator is None, {"words": count}, commutator),
    ]


# ---------------- tensor products ----------------

def tensor_bd(A: BDPresentation, B: BDPresentation, name: Optional[str] = None) -> BDPresentation:
    """A (x) B presented on the union of generators, with no cross brackets."""
    if A.r != B.r:
        logger.error(f"[Tensor][{datetime.now()}] twist mismatch {A.r} vs {B.r}")
        raise PresentationError(f"Twist mismatch: {A.r} vs {B.r}")
    shared = set(A.space.names()) & set(B.space.names())
    if shared:
        raise PresentationError(f"Tensor factors share generator names {sorted(shared)}")
    space = A.space.union(B.space)
    differential = {l: e.promote(space) for l, e in list(A.d_gen.items()) + list(B.d_gen.items())}
    bracket = {k: e.promote(space) for k, e in list(A.bracket_gen.items()) + list(B.bracket_gen.items())}
    window = TruncationWindow(max(A.window.max_words, B.window.max_words), max(A.window.max_gamma, B.window.max_gamma))
    return BDPresentation(space, A.d, differential, bracket, window, name or f"{A.name}(x){B.name}")


def tenbra(A: BDPresentation, B: BDPresentation, a1: Element, a2: Element, b1: Element, b2: Element) -> Element:
    """
    Lie bracket of a1(x)b1 and a2(x)b2 assembled factorwise:
    (-1)^{|a2|(|b1|+r)} a1a2 (x) [b1,b2] + (-1)^{|b1|(|a2|+r)} [a1,a2] (x) b1b2,
    read as an element of the union presentation. Inputs are single terms.
    """
    r = A.r
    lie_A, lie_B = induced_dgla(A), induced_dgla(B)
    da2, db1 = degree_of(a2), degree_of(b1)
    first = (a1 * a2) * lie_B.lie(b1, b2)
    second = lie_A.lie(a1, a2) * (b1 * b2)
    return first.scale(sgn(da2 * (db1 + r))) + second.scale(sgn(db1 * (da2 + r)))


def degree_of(x: Element) -> int:
    degrees = x.degrees()
    if len(degrees) != 1:
        raise PresentationError(f"Element {x!r} is not homogeneous")
    return next(iter(degrees))


# ---------------- dgla view ----------------

class DglaView:
    """Shifted Lie view: degrees read through the offset r, product hidden."""

    def __init__(self, presentation: BDPresentation) -> None:
        self.presentation = presentation
        self.r = presentation.r

    @property
    def space(self) -> GradedSpace:
        return self.presentation.space

    @property
    def d_value(self) -> int:
        return self.presentation.d

    def shifted_degree(self, x: Element) -> int:
        return degree_of(x) + self.r

    def bracket_degree(self) -> int:
        """Degree of the Lie bracket in the shifted grading."""
        return 0

    def differential_degree(self) -> int:
        return 1

    def d(self, x: Element) -> Element:
        return self.presentation.differential(x)

    def lie(self, x: Element, y: Element) -> Element:
        """[x, y] = (-1)^|x| {x, y}, termwise in x."""
        out = self.presentation.zero()
        for part in x.split():
            out = out + self.presentation.bracket(part, y).scale(sgn(degree_of(part)))
        return out

    def jacobi_shifted(self, a: Element, b: Element, c: Element) -> Element:
        """[a,[b,c]] - [[a,b],c] - (-1)^{s(a)s(b)} [b,[a,c]]"""
        sa, sb = self.shifted_degree(a), self.shifted_degree(b)
        return (self.lie(a, self.lie(b, c)) - self.lie(self.lie(a, b), c)
                - self.lie(b, self.lie(a, c)).scale(sgn(sa * sb)))

    def jacobi_unshifted(self, a: Element, b: Element, c: Element) -> Element:
        """{a,{b,c}} + (-1)^|a| {{a,b},c} - (-1)^{(|a|+r)(|b|+r)} {b,{a,c}}"""
        br = self.presentation.bracket
        da, db = degree_of(a), degree_of(b)
        return (br(a, br(b, c)) + br(br(a, b), c).scale(sgn(da))
                - br(b, br(a, c)).scale(sgn((da + self.r) * (db + self.r))))


def induced_dgla(A: BDPresentation) -> DglaView:
    return DglaView(A)


# ---------------- axiom checks ----------------

def _first(items, predicate) -> Tuple[int, Optional[dict]]:
    count = 0
    found = None
    for item in items:
        count += 1
        if found is None:
            found = predicate(item)
    return count, found


def check_bd_axioms(A: BDPresentation, window: Optional[TruncationWindow] = None) -> List[Check]:
    """
    d^2 = 0, the BD relation, bracket symmetry, Jacobi, Leibniz and the
    compatibility of d with the bracket, on basis words of the window.
    Binary and ternary checks range over inputs of total length <= max_words.
    """
    window = window or A.window
    n_max = window.max_words
    singles = A.basis(n_max, gammas=range(window.max_gamma + 1))
    words = A.basis(n_max)
    by_len = lambda x: x.max_word_length()
    pairs = [(x, y) for x in words for y in words if by_len(x) + by_len(y) <= n_max]
    triples = [(x, y, z) for x in words for y in words for z in words
               if 1 <= by_len(x) and 1 <= by_len(y) and 1 <= by_len(z) and by_len(x) + by_len(y) + by_len(z) <= n_max]
    view = induced_dgla(A)

    def d_square(x):
        v = A.differential(A.differential(x))
        return None if v.is_zero() else {"input": x.to_dict(), "value": v.to_dict()}

    def bd_relation(p):
        a, b = p
        lhs = A.differential(a * b)
        rhs = (A.differential(a) * b + (a * A.differential(b)).scale(sgn(degree_of(a)))
               + A.bracket(a, b).times_gamma(1))
        diff = lhs - rhs
        return None if diff.is_zero() else {"a": a.to_dict(), "b": b.to_dict(), "difference": diff.to_dict()}

    def symmetry(p):
        a, b = p
        diff = A.bracket(a, b) - A.bracket(b, a).scale(sgn(degree_of(a) * degree_of(b)))
        return None if diff.is_zero() else {"a": a.to_dict(), "b": b.to_dict(), "difference": diff.to_dict()}

    def d_bracket(p):
        a, b = p
        diff = (A.differential(A.bracket(a, b)) + A.bracket(A.differential(a), b)
                + A.bracket(a, A.differential(b)).scale(sgn(degree_of(a))))
        return None if diff.is_zero() else {"a": a.to_dict(), "b": b.to_dict(), "difference": diff.to_dict()}

    def jacobi(t):
        diff = view.jacobi_shifted(*t)
        return None if diff.is_zero() else {"inputs": [x.to_dict() for x in t], "difference": diff.to_dict()}

    def leibniz(t):
        u, v1, v2 = t
        lhs = A.bracket(u, v1 * v2)
        rhs = A.bracket(u, v1) * v2 + (v1 * A.bracket(u, v2)).scale(sgn(degree_of(v1) * (degree_of(u) + A.r)))
        diff = lhs - rhs
        return None if diff.is_zero() else {"inputs": [x.to_dict() for x in t], "difference": diff.to_dict()}

    checks = []
    for name, items, predicate in (
        ("d-squared", singles, d_square),
        ("bd-relation", pairs, bd_relation),
        ("bracket-symmetry", pairs, symmetry),
        ("d-bracket", pairs, d_bracket),
        ("jacobi", triples, jacobi),
        ("leibniz", triples, leibniz),
    ):
        count, found = _first(items, predicate)
        checks.append(Check(f"{A.name}:{name}", found is None, {"inputs": count, "window": window.to_dict()}, found))
        if found is not None:
            logger.warning(f"[BD][{datetime.now()}] {A.name} fails {name}")
    return checks
