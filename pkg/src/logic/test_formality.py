import itertools
import random

import pytest

from src.logic.bd import TruncationWindow, check_bd_axioms, free_closed_sector
from src.logic.element import Element
from src.logic.enumeration import enumerate_graphs
from src.logic.errors import CertificateError, GraphError, PresentationError
from src.logic.feynman import ContractionKernel, eval_graph, taylor_K
from src.logic.graph import MarkedGraph
from src.logic.instances import kil_instance, mixed_instance, random_inputs, random_kernel, random_space, random_w
from src.logic.report import Check
from src.logic.verify import (
    certify_bdr, reduction_chain, verify_aut_weights, verify_bvinf, verify_commutation,
    verify_easy_lemma, verify_key_lemma,
)

SMALL = TruncationWindow(3, 1)


def kil():
    data, kernel = kil_instance()
    return data, kernel, free_closed_sector(data, SMALL)


def key(x: Element):
    return x.keys()[0]


# ---------------- graph evaluation ----------------

def test_small_taylor_values():
    _, kernel, A = kil()
    assert taylor_K(1, [A.word(["p"])], kernel) == A.word(["p"])
    assert taylor_K(1, [A.word(["p", "u"])], kernel) == A.word(["p", "u"]) + A.one().times_gamma(1)
    assert taylor_K(1, [A.word(["t", "q"])], kernel) == A.word(["t", "q"]) + A.one().times_gamma(1)
    assert taylor_K(2, [A.word(["p"]), A.word(["u"])], kernel) == A.one()
    assert taylor_K(2, [A.word(["q"]), A.word(["t"])], kernel) == A.one().scale(-1)
    with pytest.raises(GraphError):
        taylor_K(2, [A.word(["p"])], kernel)


def test_eval_graph_validates_decoration():
    _, kernel, A = kil()
    edge = MarkedGraph.from_profile((0, 0), (0, 0), {(0, 1): 1})
    with pytest.raises(GraphError):
        eval_graph(edge, [key(A.word(["p", "u"])), key(A.word(["u"]))], kernel)
    with pytest.raises(GraphError):
        eval_graph(edge, [key(A.word(["p"]))], kernel)


def test_eval_graph_ignores_edge_orientation_and_order():
    _, kernel, A = kil()
    edge = MarkedGraph.from_profile((0, 0), (0, 0), {(0, 1): 1})
    decoration = [key(A.word(["q"])), key(A.word(["t"]))]
    base = eval_graph(edge, decoration, kernel)
    assert base == A.one().scale(-1)
    assert eval_graph(edge, decoration, kernel, flipped=frozenset(edge.edges)) == base

    double = MarkedGraph.from_profile((0, 0), (0, 0), {(0, 1): 2})
    decoration = [key(A.word(["p", "q"])), key(A.word(["t", "u"]))]
    base = eval_graph(double, decoration, kernel)
    assert not base.is_zero()
    assert eval_graph(double, decoration, kernel, edge_order=list(reversed(double.edges))) == base
    with pytest.raises(GraphError):
        eval_graph(double, decoration, kernel, edge_order=double.edges[:1])


def test_eval_graph_on_a_self_loop():
    _, kernel, A = kil()
    loop = MarkedGraph.from_profile((0,), (0,), {(0, 0): 1})
    assert eval_graph(loop, [key(A.word(["p", "u"]))], kernel) == A.one().times_gamma(1).scale(2)
    word, g = key(A.word(["t", "q"]))
    assert eval_graph(loop, [(word, g)], kernel) == A.one().times_gamma(1).scale(2 * kernel(word[0], word[1]))


def test_eval_graph_ignores_random_edge_labels():
    _, kernel, A = kil()
    cases = [(kernel, [A.word(["p", "u", "u"])]), (kernel, [A.word(["p", "u"]), A.word(["p", "u"])]),
             (kernel, [A.word(["t", "q"]), A.word(["p"]), A.word(["u"])])]
    for seed in range(3):
        rng = random.Random(seed)
        space = random_space(rng, 4, "x")
        k = random_kernel(rng, space)
        cases += [(k, random_inputs(rng, space, 3, m, max_len=2)) for m in (1, 2, 3)]
    rng = random.Random(11)
    nonzero = 0
    for kern, inputs in cases:
        keys = [key(x) for x in inputs]
        for cls in enumerate_graphs(None, None, len(keys), profile=[(len(w), g) for w, g in keys]):
            graph = cls.graph
            base = eval_graph(graph, keys, kern)
            nonzero += not base.is_zero()
            for _ in range(4):
                order = rng.sample(list(graph.edges), len(graph.edges))
                flipped = frozenset(e for e in graph.edges if rng.random() < 0.5)
                value = eval_graph(graph, keys, kern, edge_order=order, flipped=flipped)
                assert value == base, (graph, order, sorted(flipped))
    assert nonzero > 0


def test_kernel_validation():
    data, kernel, _ = kil()
    p, q = data.space.get("p"), data.space.get("q")
    with pytest.raises(PresentationError):
        ContractionKernel(data.space, 3, {(p, q): 1})
    assert ContractionKernel.from_dict(kernel.to_dict(), data.space, 3).entries == kernel.entries


def test_aut_weights_match_labeled_sum():
    _, kernel, A = kil()
    cases = [
        [A.word(["p", "u"])],
        [A.word(["p", "u", "u"])],
        [A.word(["p"]), A.word(["u"])],
        [A.word(["p", "u"]), A.word(["p", "u"])],
        [A.word(["t", "q"]), A.word(["p"]), A.word(["u"])],
    ]
    for inputs in cases:
        check = verify_aut_weights(inputs, kernel)
        assert check.passed, check.to_dict()
    for seed in range(3):
        rng = random.Random(seed)
        space = random_space(rng, 4, "x")
        k = random_kernel(rng, space)
        for m in (1, 2, 3):
            check = verify_aut_weights(random_inputs(rng, space, 3, m, max_len=2), k)
            assert check.passed, (seed, check.to_dict())


# ---------------- BV-infinity ----------------

def test_bvinf_on_fixed_kernel():
    _, kernel, A = kil()
    inputs = [A.word(["p"]), A.word(["u"])]
    assert verify_bvinf(inputs, 1, 2, kernel).passed
    assert verify_bvinf(inputs, 2, 1, kernel).passed
    inputs = [A.word(["q"]), A.word(["t", "u"]), A.word(["p"])]
    for i, j in itertools.permutations(range(1, 4), 2):
        check = verify_bvinf(inputs, i, j, kernel)
        assert check.passed, check.to_dict()
    with pytest.raises(GraphError):
        verify_bvinf(inputs[:1], 1, 1, kernel)


def test_bvinf_with_zero_kernel_is_the_product():
    data, _, A = kil()
    zero = ContractionKernel(data.space, 3, {})
    x1, x2 = A.word(["q"]), A.word(["t", "u"])
    for i, j in ((1, 2), (2, 1)):
        check = verify_bvinf([x1, x2], i, j, zero)
        assert check.passed, check.to_dict()
        assert check.details["lhs"] == (x1 * x2).to_dict()


def test_bvinf_on_random_kernels():
    for seed in range(4):
        rng = random.Random(seed)
        space = random_space(rng, 4, "x")
        kernel = random_kernel(rng, space)
        for m in (2, 3):
            inputs = random_inputs(rng, space, 3, m, max_len=2)
            for i, j in itertools.permutations(range(1, m + 1), 2):
                check = verify_bvinf(inputs, i, j, kernel)
                assert check.passed, (seed, check.to_dict())


# ---------------- W-side lemmas ----------------

def test_easy_lemma_and_bdr_on_random_w():
    for seed in range(3):
        rng = random.Random(seed)
        W = random_w(rng, window=SMALL)
        assert certify_bdr(W).passed
        ys = random_inputs(rng, W.space, 3, 3, max_len=2, max_gamma=0)
        for L1 in ([0], [1], [0, 2]):
            check = verify_easy_lemma(ys, L1, W)
            assert check.passed, (seed, check.to_dict())
    with pytest.raises(GraphError):
        verify_easy_lemma(ys, [0, 1, 2], W)


def test_key_lemma():
    data, kernel, _ = kil()
    for seed in range(4):
        rng = random.Random(seed)
        W = random_w(rng, count=3, window=SMALL, min_blocks=1)
        for check in check_bd_axioms(W):
            assert check.passed, (seed, check.to_dict())
        assert certify_bdr(W).passed
        for m in (2, 3):
            xs = random_inputs(rng, data.space, 3, m, max_len=2, max_gamma=1)
            ys = random_inputs(rng, W.space, 3, m, max_len=1, max_gamma=0)
            check = verify_key_lemma(list(zip(xs, ys)), kernel, W)
            assert check.passed, (seed, check.to_dict())


# ---------------- certificates and the reduction ----------------

def test_commutation_requires_certificates():
    data, kernel, A = kil()
    W = random_w(random.Random(0), count=2, window=SMALL)
    good = Check("ok", True)
    with pytest.raises(CertificateError):
        verify_commutation(A, A, kernel, W, None, good)
    with pytest.raises(CertificateError):
        verify_commutation(A, A, kernel, W, good, Check("bdr", False))


def sample_pairs(A, W):
    y1, y2 = [Element.monomial(W.space, W.d, (l,)) for l in W.space.letters[:2]]
    return [
        [(A.word(["p"]), y1), (A.word(["u"]), y2)],
        [(A.word(["q"]), y2), (A.word(["t"]), y1)],
    ]


def test_reduction_chain_on_fixed_instance():
    data, kernel, A = kil()
    for W in (random_w(random.Random(1), count=2, window=SMALL),
              free_closed_sector(mixed_instance(), SMALL, name="W")):
        checks = reduction_chain(data, kernel, W, sample_pairs(A, W), SMALL)
        for check in checks:
            assert check.passed, (W.name, check.to_dict())
        assert checks[-1].details["commutation"] is True


def test_reduction_chain_with_broken_kernel():
    data, kernel, A = kil()
    W = random_w(random.Random(1), count=2, window=SMALL)
    checks = reduction_chain(data, kernel.mutated("q", "t"), W, sample_pairs(A, W), SMALL)
    by_name = {c.name: c for c in checks}
    assert not by_name["kil-certificate"].passed
    assert not by_name["commutation"].passed
    assert by_name["reduction-implication"].passed


def main():
    tests = [
        test_small_taylor_values,
        test_eval_graph_validates_decoration,
        test_eval_graph_ignores_edge_orientation_and_order,
        test_eval_graph_on_a_self_loop,
        test_eval_graph_ignores_random_edge_labels,
        test_kernel_validation,
        test_aut_weights_match_labeled_sum,
        test_bvinf_on_fixed_kernel,
        test_bvinf_with_zero_kernel_is_the_product,
        test_bvinf_on_random_kernels,
        test_easy_lemma_and_bdr_on_random_w,
        test_key_lemma,
        test_commutation_requires_certificates,
        test_reduction_chain_on_fixed_instance,
        test_reduction_chain_with_broken_kernel,
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
