import random
from fractions import Fraction

import pytest

from src.logic.bd import (
    BDPresentation, Derivation, FreeBVData, TruncationWindow, check_bd_axioms, free_closed_sector,
    induced_dgla, laplacian_checks, tenbra, tensor_bd, trivialized, twist,
)
from src.logic.controller import mutation_checks
from src.logic.element import Element
from src.logic.errors import PresentationError
from src.logic.graded import GradedSpace, Letter
from src.logic.instances import (
    gauge_instance, kil_instance, mixed_instance, random_chain_bv, random_free_bv, random_inputs, random_space, random_w,
)
from src.logic.verify import gauge_exp, mce_residual, mce_residual_expanded, verify_gauge_bracket

SMALL = TruncationWindow(3, 1)


def gauge_closed() -> BDPresentation:
    data, _, _ = gauge_instance()
    return free_closed_sector(data, SMALL)


def test_twist_and_window():
    assert twist(3) == 1 and twist(4) == 3
    A = gauge_closed()
    assert A.gamma_degree == 0
    x = A.word(["a", "b", "c"]) + A.word(["a", "a", "b", "c"]) + A.word(["a"], gamma=2)
    assert SMALL.truncate(x) == A.word(["a", "b", "c"])
    with pytest.raises(PresentationError):
        TruncationWindow(0, 1)


def test_bd_relation_on_generators():
    A = gauge_closed()
    assert A.differential(A.word(["a", "b"])) == A.one().times_gamma(1)
    assert A.bracket(A.word(["a"]), A.word(["b"])) == A.one()
    assert A.bracket(A.word(["a"]), A.word(["c"])).is_zero()


def test_fixed_instances_satisfy_axioms():
    data, _ = kil_instance()
    for A in (gauge_closed(), free_closed_sector(data, SMALL), trivialized(data, SMALL, "Tr")):
        for check in check_bd_axioms(A):
            assert check.passed, check.to_dict()


def test_random_presentations_satisfy_axioms():
    for seed in range(4):
        W = random_w(random.Random(seed), window=SMALL)
        for check in check_bd_axioms(W):
            assert check.passed, (seed, check.to_dict())


def test_corrupted_bracket_is_caught():
    A = gauge_closed().mutated("bracket", "a", "b")
    failed = {c.name for c in check_bd_axioms(A) if not c.passed}
    assert "closed~bracket:bracket-symmetry" in failed


def test_presentations_with_differential_and_bracket():
    presentations = [free_closed_sector(mixed_instance(), SMALL)]
    for seed in range(20):
        data = random_chain_bv(random.Random(seed), count=4, min_blocks=1)
        assert data.d1 and data.omega
        presentations.append(free_closed_sector(data, SMALL, name=f"mixed{seed}"))
    for A in presentations:
        assert A.d_gen and A.bracket_gen
        for check in check_bd_axioms(A):
            assert check.passed, (A.name, check.to_dict())


def test_mixed_instance_values():
    A = free_closed_sector(mixed_instance(), SMALL)
    assert A.differential(A.word(["mp"])) == A.word(["mq"])
    assert A.bracket(A.word(["mp"]), A.word(["mt"])) == A.one()
    assert A.differential(A.word(["mp", "mt"])) == A.word(["mq", "mt"]) + A.one().times_gamma(1)


def test_tensor_of_mixed_presentations():
    for seed in range(3):
        other = random_chain_bv(random.Random(seed), count=2, prefix="z", min_blocks=1)
        T = tensor_bd(free_closed_sector(mixed_instance(), SMALL), free_closed_sector(other, SMALL))
        for check in check_bd_axioms(T):
            assert check.passed, (seed, check.to_dict())


def test_every_flip_of_mixed_data_is_caught():
    data = mixed_instance()
    A = free_closed_sector(data, SMALL)
    flips = [("bracket", a.name, b.name) for a, b in A.bracket_gen] + [("differential", a.name) for a in A.d_gen]
    assert len(flips) == 6
    for kind, *names in flips:
        assert any(not c.passed for c in check_bd_axioms(A.mutated(kind, *names))), (kind, names)
        with pytest.raises(PresentationError):
            data.flipped(kind, *names)


def test_mutations_are_judged_by_validity():
    kil_data, _ = kil_instance()
    gauge_data, _, _ = gauge_instance()
    cases = [gauge_data, kil_data, mixed_instance()]
    cases += [random_chain_bv(random.Random(seed), count=4, min_blocks=1) for seed in range(3)]
    for data in cases:
        A = free_closed_sector(data, SMALL)
        checks = mutation_checks(A, SMALL, data)
        assert len(checks) == len(A.bracket_gen) + len(A.d_gen)
        for check in checks:
            assert check.passed, check.to_dict()
    # omega vanishes on the abelian closed sector, so flipping its differential stays valid
    kil_checks = mutation_checks(free_closed_sector(kil_data, SMALL), SMALL, kil_data)
    assert kil_checks and all(c.details["still_valid"] and not c.details["detected_by"] for c in kil_checks)


def test_mutations_without_generating_data():
    checks = mutation_checks(gauge_closed(), SMALL)
    assert [c.name for c in checks] == ["mutation closed:bracket(b,a)", "mutation closed:bracket(a,b)"]
    assert all(c.passed and c.details["detected_by"] for c in checks)


def test_laplacian_checks():
    data, _, _ = gauge_instance()
    assert all(c.passed for c in laplacian_checks(data, SMALL))


def test_presentation_rejects_bad_degrees():
    p = Letter("p", 0)
    space = GradedSpace([p])
    with pytest.raises(PresentationError):
        BDPresentation(space, 3, {p: Element.monomial(space, 3, (p,))}, {})
    with pytest.raises(PresentationError):
        Derivation(space, 3, {p: Element.monomial(space, 3, (p,))}, degree=1)
    with pytest.raises(PresentationError):
        FreeBVData(space, 3, omega={(p, p): Fraction(1)})


def test_tensor_product_rules():
    A = gauge_closed()
    with pytest.raises(PresentationError):
        tensor_bd(A, A)
    other = BDPresentation(GradedSpace([Letter("z", 0)]), 4, {}, {})
    with pytest.raises(PresentationError):
        tensor_bd(A, other)


def test_tenbra_matches_union_bracket():
    A = gauge_closed()
    W = random_w(random.Random(7), window=SMALL)
    T = tensor_bd(A, W)
    lie = induced_dgla(T).lie
    letters = [Element.monomial(W.space, W.d, (l,)) for l in W.space.letters]
    for a1, a2 in ((A.word(["a"]), A.word(["b"])), (A.word(["b"]), A.word(["a", "c"]))):
        for b1 in letters:
            for b2 in letters:
                assert lie(a1 * b1, a2 * b2) == tenbra(A, W, a1, a2, b1, b2)


def test_presentation_serialization():
    A = gauge_closed()
    again = BDPresentation.from_dict(A.to_dict())
    assert again.to_dict() == A.to_dict()
    assert again.differential(again.word(["a", "b"])) == A.differential(A.word(["a", "b"]))


# ---------------- Maurer-Cartan and gauge ----------------

def test_mce_residual_matches_expansion():
    data, _, S = gauge_instance()
    A = free_closed_sector(data, SMALL)
    assert mce_residual(S, A) == mce_residual_expanded(S, data)
    assert mce_residual(S, A) == A.one().times_gamma(1) + A.one().scale(2) * A.word(["a"])


def test_mce_residual_random():
    for seed in range(3):
        rng = random.Random(seed)
        data = random_free_bv(rng, random_space(rng, 4, "x"))
        A = free_closed_sector(data, SMALL)
        S = random_inputs(rng, data.space, 3, 1)[0] + random_inputs(rng, data.space, 3, 1)[0]
        assert mce_residual(S, A) == mce_residual_expanded(S, data)


def test_gauge_exponential():
    data, D, S = gauge_instance()
    A = free_closed_sector(data, SMALL)
    expected = A.word(["a", "b"]) + A.word(["a"]) + A.word(["b", "c"]) + A.word(["c"])
    assert gauge_exp(D, S, TruncationWindow(4, 2)) == expected
    assert verify_gauge_bracket(D, S, A, TruncationWindow(4, 2)).passed


def test_gauge_exponential_must_truncate():
    data, _, S = gauge_instance()
    a = data.space.get("a")
    loop = Derivation(data.space, data.d, {a: Element.monomial(data.space, data.d, (a,))}, degree=0)
    with pytest.raises(PresentationError):
        gauge_exp(loop, S, TruncationWindow(2, 1))


def main():
    tests = [
        test_twist_and_window,
        test_bd_relation_on_generators,
        test_fixed_instances_satisfy_axioms,
        test_random_presentations_satisfy_axioms,
        test_corrupted_bracket_is_caught,
        test_presentations_with_differential_and_bracket,
        test_mixed_instance_values,
        test_tensor_of_mixed_presentations,
        test_every_flip_of_mixed_data_is_caught,
        test_mutations_are_judged_by_validity,
        test_mutations_without_generating_data,
        test_laplacian_checks,
        test_presentation_rejects_bad_degrees,
        test_tensor_product_rules,
        test_tenbra_matches_union_bracket,
        test_presentation_serialization,
        test_mce_residual_matches_expansion,
        test_mce_residual_random,
        test_gauge_exponential,
        test_gauge_exponential_must_truncate,
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
