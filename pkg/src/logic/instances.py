"""
Seeded random instances and the two fixed instances used by the campaigns.
"""
from __future__ import annotations

import itertools
import random
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from src.logic.bd import BDPresentation, Derivation, FreeBVData, TruncationWindow, free_closed_sector, sgn, twist
from src.logic.element import Element, gamma_degree
from src.logic.feynman import ContractionKernel
from src.logic.graded import GradedSpace, Letter

DEGREES = range(-2, 3)


def random_scalar(rng: random.Random) -> Fraction:
    return Fraction(rng.choice([-2, -1, 1, 2]), rng.choice([1, 1, 2, 3]))


def random_space(rng: random.Random, count: int, prefix: str, degrees: Sequence[int] = DEGREES) -> GradedSpace:
    return GradedSpace(Letter(f"{prefix}{k}", rng.choice(list(degrees))) for k in range(1, count + 1))


def _random_pairing(rng: random.Random, space: GradedSpace, support: int, density: float) -> Dict[Tuple[Letter, Letter], Fraction]:
    entries: Dict[Tuple[Letter, Letter], Fraction] = {}
    for a, b in itertools.combinations_with_replacement(space.letters, 2):
        if a.degree + b.degree != support or (a == b and a.odd):
            continue
        if rng.random() < density:
            entries[(a, b)] = random_scalar(rng)
    return entries


def random_kernel(rng: random.Random, space: GradedSpace, d: int = 3, density: float = 0.6) -> ContractionKernel:
    return ContractionKernel(space, d, _random_pairing(rng, space, gamma_degree(d), density))


def random_free_bv(rng: random.Random, space: GradedSpace, d: int = 3, density: float = 0.7) -> FreeBVData:
    """omega only; with no linear part the chain condition holds for any pairing."""
    return FreeBVData(space, d, omega=_random_pairing(rng, space, -twist(d), density))


def random_chain_bv(rng: random.Random, d: int = 3, count: int = 4, prefix: str = "y", min_blocks: int = 0,
                    density: float = 0.7) -> FreeBVData:
    """
    Random free data with both a linear differential and a pairing.

    Letters come in blocks closed under d1. A block x -> y, s -> t pairs x with t
    and y with s, scaled so that the chain condition holds; when 2 - d is odd a
    block may also be a single x -> y of degrees (2 - d, 3 - d) paired with
    itself. Letters left over carry no differential and pair only among
    themselves.
    """
    r = twist(d)
    low = -(r + 1) // 2
    names = (f"{prefix}{k}" for k in itertools.count(1))
    letters: List[Letter] = []
    d1_spec: List[Tuple[Letter, Letter, Fraction]] = []
    omega: Dict[Tuple[Letter, Letter], Fraction] = {}
    remaining, blocks = count, 0
    while remaining >= 2 and (blocks < min_blocks or rng.random() < 0.6):
        c = random_scalar(rng)
        if low % 2 and (remaining < 4 or rng.random() < 0.5):
            x, y = Letter(next(names), low), Letter(next(names), low + 1)
            letters += [x, y]
            d1_spec.append((x, y, c))
            omega[(x, y)] = random_scalar(rng)
            remaining -= 2
        elif remaining >= 4:
            k = rng.choice(list(DEGREES))
            x, y = Letter(next(names), k), Letter(next(names), k + 1)
            s, t = Letter(next(names), -r - k - 1), Letter(next(names), -r - k)
            c2, alpha = random_scalar(rng), random_scalar(rng)
            letters += [x, y, s, t]
            d1_spec += [(x, y, c), (s, t, c2)]
            # omega(d1 x, s) + (-1)^|x| omega(x, d1 s) = 0
            omega[(x, t)] = alpha
            omega[(y, s)] = -sgn(k) * c2 * alpha / c
            remaining -= 4
        else:
            break
        blocks += 1
    loose = [Letter(next(names), rng.choice(list(DEGREES))) for _ in range(remaining)]
    if loose:
        omega.update(_random_pairing(rng, GradedSpace(loose), -r, density))
    space = GradedSpace(letters + loose)
    d1 = {x: Element.monomial(space, d, (y,), coef=c) for x, y, c in d1_spec}
    return FreeBVData(space, d, d1=d1, omega=omega)


def random_w(rng: random.Random, d: int = 3, count: int = 4, window: Optional[TruncationWindow] = None,
             prefix: str = "y", min_blocks: int = 0) -> BDPresentation:
    return free_closed_sector(random_chain_bv(rng, d, count, prefix, min_blocks), window, name="W")


def random_inputs(rng: random.Random, space: GradedSpace, d: int, m: int, max_len: int = 3,
                  max_gamma: int = 1) -> List[Element]:
    """m nonzero single-term elements; each word has between 1 and max_len letters."""
    out = []
    while len(out) < m:
        letters = [rng.choice(space.letters) for _ in range(rng.randint(1, max_len))]
        x = Element.monomial(space, d, letters, rng.randint(0, max_gamma))
        if not x.is_zero():
            out.append(x)
    return out


def kil_instance(d: int = 3) -> Tuple[FreeBVData, ContractionKernel]:
    """Abelian closed sector p -> q, t -> u with a chain-map kernel pairing p with u and q with t."""
    p, q, t, u = Letter("p", 0), Letter("q", 1), Letter("t", -1), Letter("u", 0)
    space = GradedSpace([p, q, t, u])
    d1 = {p: Element.monomial(space, d, (q,)), t: Element.monomial(space, d, (u,))}
    data = FreeBVData(space, d, d1=d1)
    kernel = ContractionKernel(space, d, {(p, u): Fraction(1), (q, t): Fraction(-1)})
    return data, kernel


def gauge_instance(d: int = 3) -> Tuple[FreeBVData, Derivation, Element]:
    """omega(a, b) = 1, the degree-0 derivation a -> c and S = ab + a."""
    a, b, c = Letter("a", 0), Letter("b", -1), Letter("c", 0)
    space = GradedSpace([a, b, c])
    data = FreeBVData(space, d, omega={(a, b): Fraction(1)})
    D = Derivation(space, d, {a: Element.monomial(space, d, (c,))}, degree=0)
    S = Element.monomial(space, d, (a, b)) + Element.monomial(space, d, (a,))
    return data, D, S


def mixed_instance(d: int = 3, prefix: str = "m") -> FreeBVData:
    """p -> q, s -> t with omega(p, t) = 1 and omega(q, s) = -1; both d1 and omega are nonzero."""
    p, q = Letter(f"{prefix}p", 0), Letter(f"{prefix}q", 1)
    s, t = Letter(f"{prefix}s", -twist(d) - 1), Letter(f"{prefix}t", -twist(d))
    space = GradedSpace([p, q, s, t])
    d1 = {p: Element.monomial(space, d, (q,)), s: Element.monomial(space, d, (t,))}
    return FreeBVData(space, d, d1=d1, omega={(p, t): Fraction(1), (q, s): Fraction(-1)})
