from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from src.logic.element import Element, project_gn
from src.logic.errors import GradingError
from src.logic.graded import (
    GradedSpace, Letter, comultiply, desymmetrize, koszul_sign, sym_canonicalize, tensor_sum,
)


def make_space(*pairs):
    """make_space(("a", 1), ("x", 0)) -> GradedSpace"""
    return GradedSpace(Letter(name, deg) for name, deg in pairs)


def test_koszul_identity_and_transpositions():
    assert koszul_sign([0, 1, 2], [1, 1, 1]) == 1
    assert koszul_sign([1, 0], [1, 1]) == -1
    assert koszul_sign([1, 0], [1, 0]) == 1
    assert koszul_sign([2, 1, 0], [1, 1, 1]) == -1


def test_koszul_rejects_length_mismatch():
    with pytest.raises(GradingError):
        koszul_sign([0, 1], [1])


@given(st.permutations(list(range(6))), st.lists(st.integers(-3, 3), min_size=6, max_size=6))
def test_koszul_inverse_has_same_sign(perm, degrees):
    inverse = [0] * len(perm)
    for k, p in enumerate(perm):
        inverse[p] = k
    moved = [degrees[p] for p in perm]
    assert koszul_sign(perm, degrees) == koszul_sign(inverse, moved)


def test_sym_canonicalize_signs():
    a, b, x = Letter("a", 1), Letter("b", 1), Letter("x", 0)
    assert sym_canonicalize([b, a]) == ((a, b), -1)
    assert sym_canonicalize([a, x]) == ((x, a), 1)
    assert sym_canonicalize([a, x, a])[1] == 0
    assert sym_canonicalize([x, x]) == ((x, x), 1)


def test_desymmetrize_counts_and_signs():
    a, b, x = Letter("a", 1), Letter("b", 1), Letter("x", 0)
    assert len(desymmetrize([a, b, x])) == 6
    assert tensor_sum(desymmetrize([a, b])) == {(a, b): Fraction(1), (b, a): Fraction(-1)}
    assert desymmetrize([]) == [((), Fraction(1))]


@given(st.permutations(list(range(4))))
def test_desymmetrize_orderings_canonicalize_back(perm):
    letters = [Letter("p", 1), Letter("q", 0), Letter("r", 1), Letter("s", 2)]
    shuffled = [letters[k] for k in perm]
    _, base = sym_canonicalize(shuffled)
    for word, coef in desymmetrize(shuffled):
        _, sign = sym_canonicalize(word)
        assert coef * sign == base


def test_comultiply_splits():
    a, b, x = Letter("a", 1), Letter("b", 1), Letter("x", 0)
    splits = comultiply((a, b, x))
    assert len(splits) == 6
    signs = {(left, right): s for s, left, right in splits}
    assert signs[((b,), (a, x))] == -1
    assert signs[((a,), (b, x))] == 1
    assert signs[((x,), (a, b))] == 1


def test_space_union_and_lookup():
    left = make_space(("a", 1), ("x", 0))
    right = make_space(("y", 2))
    both = left.union(right)
    assert both.names() == ["x", "a", "y"]
    assert both.get("Á") == Letter("a", 1)
    with pytest.raises(GradingError):
        left.union(make_space(("a", 0)))
    with pytest.raises(GradingError):
        make_space(("a", 1), ("a", 2))


def test_space_words_skip_repeated_odd():
    space = make_space(("a", 1), ("x", 0))
    words = list(space.words(2))
    assert ((Letter("a", 1), Letter("a", 1))) not in words
    assert (Letter("x", 0), Letter("x", 0)) in words
    assert len(words) == 1 + 2 + 2


def test_element_product_signs():
    space = make_space(("a", 1), ("b", 1), ("x", 0))
    a = Element.monomial(space, 3, [space.get("a")])
    b = Element.monomial(space, 3, [space.get("b")])
    assert (a * a).is_zero()
    assert a * b == -(b * a)
    assert (a * b + b * a).is_zero()


def test_element_constructor_canonicalizes_keys():
    space = make_space(("a", 1), ("b", 1), ("x", 0))
    a, b, x = space.get("a"), space.get("b"), space.get("x")
    assert Element(space, 3, {((a, x), 0): 2}) == Element.monomial(space, 3, [x, a], coef=2)
    assert Element(space, 3, {((b, a), 1): 3}) == Element.monomial(space, 3, [a, b], gamma=1, coef=-3)
    assert Element(space, 3, {((b, a), 1): 3}).keys() == [((a, b), 1)]
    assert Element(space, 3, {((a, a), 0): 1}).is_zero()
    assert Element(space, 3, {((a, b), 0): 1, ((b, a), 0): 1}).is_zero()
    assert Element(space, 3, {((x, a, x), 0): 1, ((x, x, a), 0): 1}) == Element.monomial(space, 3, [x, x, a], coef=2)


def test_project_gn_keeps_one_cell():
    space = make_space(("x", 0), ("y", 2))
    x, y = space.get("x"), space.get("y")
    elem = (Element.monomial(space, 3, [x, y], gamma=1, coef=2)
            + Element.monomial(space, 3, [x], gamma=1)
            + Element.monomial(space, 3, [x, y], gamma=0, coef=5))
    projected = project_gn(elem, 1, 2)
    assert projected == Element.monomial(space, 3, [x, y], gamma=1, coef=2)
    assert project_gn(elem, 3, 0).is_zero()


def test_element_serialization_round_trip():
    space = make_space(("a", 1), ("x", 0))
    elem = Element.monomial(space, 3, [space.get("a"), space.get("x")], gamma=2, coef=Fraction(-3, 4))
    assert Element.from_dict(elem.to_dict(), space, 3) == elem
    assert elem.to_dict()["terms"][0]["coef"] == "-3/4"


def main():
    tests = [
        test_koszul_identity_and_transpositions,
        test_koszul_rejects_length_mismatch,
        test_koszul_inverse_has_same_sign,
        test_sym_canonicalize_signs,
        test_desymmetrize_counts_and_signs,
        test_desymmetrize_orderings_canonicalize_back,
        test_comultiply_splits,
        test_space_union_and_lookup,
        test_space_words_skip_repeated_odd,
        test_element_product_signs,
        test_element_constructor_canonicalizes_keys,
        test_project_gn_keeps_one_cell,
        test_element_serialization_round_trip,
    ]
    passed = 0
    for t in tests:
        try:
            t()
            print(f"[OK] {t.__name__}")
            passed += 1
        except AssertionError as e:
            print(f"[FAIL] {t.__name__}: {e}")
        except Exception as e:
            print(f"[ERROR] {t.__name__}: {e}")

    print(f"\n{passed}/{len(tests)} tests passed.")


if __name__ == "__main__":
    main()
