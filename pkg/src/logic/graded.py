"""
Graded letters, symmetric words and Koszul-sign bookkeeping.

Degrees are plain integers of the unshifted BD algebra. Every shift used by
other modules (5-2d, 6-2d) is applied as an offset at their interface.
"""
from __future__ import annotations

import itertools
import logging
from logging.handlers import RotatingFileHandler
from dataclasses import dataclass
from datetime import datetime
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, NamedTuple, Sequence, Tuple

from src.logic.errors import GradingError
from src.logic.helpers import LOG_FILE, normalize

logger = logging.getLogger(__name__)
logger.addHandler(RotatingFileHandler(
    LOG_FILE, maxBytes=1024*1024*5, backupCount=5, encoding="utf-8"
))
logger.setLevel(logging.INFO)


@dataclass(frozen=True)
class Letter:
    name: str
    degree: int

    @property
    def odd(self) -> bool:
        return self.degree % 2 != 0

    def sort_key(self) -> Tuple[int, str]:
        return (self.degree, self.name)

    def to_dict(self) -> dict:
        return {"name": self.name, "degree": self.degree}

    @classmethod
    def from_dict(cls, data: dict) -> "Letter":
        return cls(name=str(data["name"]), degree=int(data["degree"]))

    def __repr__(self) -> str:
        return f"{self.name}[{self.degree}]"


SymWord = Tuple[Letter, ...]


class TensorWord(NamedTuple):
    letters: Tuple[Letter, ...]
    coef: Fraction


def word_degree(letters: Iterable[Letter]) -> int:
    return sum(l.degree for l in letters)


def parity(degree: int) -> int:
    return degree % 2


class GradedSpace:
    """Finite graded space given by its basis letters."""

    def __init__(self, letters: Iterable[Letter]) -> None:
        self._by_name: Dict[str, Letter] = {}
        for letter in letters:
            if letter.name in self._by_name:
                logger.error(f"[GradedSpace][{datetime.now()}] duplicate letter {letter.name}")
                raise GradingError(f"Duplicate letter name: {letter.name}")
            self._by_name[letter.name] = letter
        self._letters: Tuple[Letter, ...] = tuple(sorted(self._by_name.values(), key=Letter.sort_key))

    @property
    def letters(self) -> Tuple[Letter, ...]:
        return self._letters

    def get(self, name: str) -> Letter:
        if name in self._by_name:
            return self._by_name[name]
        # instance files may spell names with accents or stray case
        key = normalize(name)
        for known, letter in self._by_name.items():
            if normalize(known) == key:
                return letter
        raise KeyError(name)

    def names(self) -> List[str]:
        return [l.name for l in self._letters]

    def __contains__(self, letter: object) -> bool:
        return isinstance(letter, Letter) and self._by_name.get(letter.name) == letter

    def __len__(self) -> int:
        return len(self._letters)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, GradedSpace) and self._letters == other._letters

    def __hash__(self) -> int:
        return hash(self._letters)

    def union(self, other: "GradedSpace") -> "GradedSpace":
        clash = set(self._by_name) & set(other._by_name)
        clash = {n for n in clash if self._by_name[n] != other._by_name[n]}
        if clash:
            logger.error(f"[GradedSpace][{datetime.now()}] union clash on {sorted(clash)}")
            raise GradingError(f"Letters with the same name but different degree: {sorted(clash)}")
        return GradedSpace(list(self._letters) + [l for l in other._letters if l.name not in self._by_name])

    def words(self, max_length: int, min_length: int = 0) -> Iterator[SymWord]:
        """All nonzero canonical words with min_length <= length <= max_length."""
        for n in range(min_length, max_length + 1):
            for combo in itertools.combinations_with_replacement(self._letters, n):
                if any(combo[k] == combo[k + 1] and combo[k].odd for k in range(n - 1)):
                    continue
                yield combo

    def to_dict(self) -> dict:
        return {"letters": [l.to_dict() for l in self._letters]}

    @classmethod
    def from_dict(cls, data: dict) -> "GradedSpace":
        return cls(Letter.from_dict(item) for item in data["letters"])

    def __repr__(self) -> str:
        return f"GradedSpace({', '.join(repr(l) for l in self._letters)})"


# ---------------- signs ----------------

def koszul_sign(permutation: Sequence[int], degrees: Sequence[int]) -> int:
    """
    Sign of rearranging items so that position k receives item permutation[k].

    Every transposition of two odd items contributes -1.
    """
    if len(permutation) != len(degrees):
        logger.error(f"[Koszul][{datetime.now()}] length mismatch {len(permutation)} != {len(degrees)}")
        raise GradingError("Permutation and degree list differ in length")
    if sorted(permutation) != list(range(len(permutation))):
        raise GradingError(f"Not a permutation: {list(permutation)}")
    odd = [degrees[p] % 2 != 0 for p in permutation]
    inversions = 0
    for a in range(len(permutation)):
        if not odd[a]:
            continue
        for b in range(a + 1, len(permutation)):
            if odd[b] and permutation[a] > permutation[b]:
                inversions += 1
    return -1 if inversions % 2 else 1


def front_sign(degrees: Sequence[int], front: Sequence[int]) -> int:
    """Sign of bringing the positions in `front` (in that order) ahead of the rest."""
    rest = [k for k in range(len(degrees)) if k not in front]
    return koszul_sign(list(front) + rest, degrees)


def sym_canonicalize(letters: Sequence[Letter]) -> Tuple[SymWord, int]:
    """Sort into the global letter order. Sign 0 marks a repeated odd letter."""
    order = sorted(range(len(letters)), key=lambda k: letters[k].sort_key())
    word = tuple(letters[k] for k in order)
    for k in range(len(word) - 1):
        if word[k] == word[k + 1] and word[k].odd:
            return word, 0
    return word, koszul_sign(order, [l.degree for l in letters])


def desymmetrize(letters: Sequence[Letter]) -> List[TensorWord]:
    """All j! signed orderings of the word, before any cancellation."""
    degrees = [l.degree for l in letters]
    out: List[TensorWord] = []
    for perm in itertools.permutations(range(len(letters))):
        out.append(TensorWord(tuple(letters[p] for p in perm), Fraction(koszul_sign(perm, degrees))))
    return out


def tensor_sum(terms: Iterable[TensorWord]) -> Dict[Tuple[Letter, ...], Fraction]:
    acc: Dict[Tuple[Letter, ...], Fraction] = {}
    for t in terms:
        acc[t.letters] = acc.get(t.letters, Fraction(0)) + t.coef
    return {k: v for k, v in acc.items() if v != 0}


def comultiply(word: Sequence[Letter]) -> List[Tuple[Fraction, SymWord, SymWord]]:
    """Shuffle coproduct over splits with both sides nonempty."""
    n = len(word)
    degrees = [l.degree for l in word]
    out: List[Tuple[Fraction, SymWord, SymWord]] = []
    for mask in range(1, (1 << n) - 1):
        left = [k for k in range(n) if mask >> k & 1]
        right = [k for k in range(n) if not mask >> k & 1]
        sign = koszul_sign(left + right, degrees)
        out.append((Fraction(sign), tuple(word[k] for k in left), tuple(word[k] for k in right)))
    return out


def ordered_splits(n: int) -> Iterator[Tuple[List[int], List[int]]]:
    """Ordered pairs (I, J) partitioning range(n), both nonempty."""
    for mask in range(1, (1 << n) - 1):
        yield [k for k in range(n) if mask >> k & 1], [k for k in range(n) if not mask >> k & 1]
