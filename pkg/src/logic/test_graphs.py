import itertools

import pytest

from src.logic.bijection import (
    a_set, b_set, c_set, feasible_cells, partitions_mod_equiv, psi, psi_inv, verify_gt_bijection,
)
from src.logic.enumeration import enumerate_graphs
from src.logic.errors import GraphError, ProfileError
from src.logic.graph import (
    Connected, Disconnected, MarkedGraph, aut_order, aut_order_bruteforce, betti,
    canonical_form, relabel_swap, split_vertex,
)
from src.logic.indexer import GraphIndex, graph_label


def star(leaves: int, defect: int = 0) -> MarkedGraph:
    return MarkedGraph((defect,), (tuple(range(leaves)),))


def self_loop(extra_leaves: int = 0) -> MarkedGraph:
    return MarkedGraph((0,), (tuple(range(2 + extra_leaves)),), ((0, 1),))


def two_vertex(parallel: int, defects=(0, 0), leaves=(0, 0)) -> MarkedGraph:
    return MarkedGraph.from_profile(defects, leaves, {(0, 1): parallel})


# ---------------- invariants ----------------

def test_betti_examples():
    assert betti(star(0, defect=2)) == 2
    assert betti(self_loop()) == 1
    assert betti(two_vertex(2, defects=(1, 0))) == 2


def test_betti_rejects_disconnected():
    with pytest.raises(GraphError):
        betti(MarkedGraph((0, 0), ((), ())))


def test_malformed_graphs_rejected():
    with pytest.raises(GraphError):
        MarkedGraph((0, 0), ((0,), (0,)))
    with pytest.raises(GraphError):
        MarkedGraph((0,), ((0, 1, 2),), ((0, 1), (1, 2)))
    with pytest.raises(GraphError):
        MarkedGraph((-1,), ((),))


def test_canonical_form_examples():
    assert canonical_form(MarkedGraph((0,), ((1, 0),), ((0, 1),))) == canonical_form(self_loop())
    asym = two_vertex(1, defects=(1, 0))
    assert canonical_form(asym) != canonical_form(relabel_swap(asym, 1, 2))
    loops = MarkedGraph((0, 0), ((0, 1), (2, 3)), ((0, 1), (2, 3)))
    assert canonical_form(two_vertex(2)) != canonical_form(loops)


def test_aut_order_examples():
    assert aut_order(star(3)) == 6
    assert aut_order(self_loop()) == 2
    for k in range(1, 4):
        assert aut_order(two_vertex(k)) == aut_order_bruteforce(two_vertex(k)) == [1, 2, 6][k - 1]


def test_aut_order_matches_bruteforce():
    for g, n, m in itertools.product(range(3), range(3), range(1, 3)):
        for cls in enumerate_graphs(g, n, m):
            half_edges = sum(len(hs) for hs in cls.graph.half_edges)
            if half_edges <= 8:
                assert cls.aut == aut_order_bruteforce(cls.graph), repr(cls.graph)


def test_relabel_swap_involution():
    graph = MarkedGraph.from_profile((1, 0, 2), (0, 1, 2), {(0, 1): 1, (1, 2): 2})
    assert relabel_swap(graph, 1, 1) == graph
    assert relabel_swap(relabel_swap(graph, 1, 3), 1, 3) == graph
    with pytest.raises(GraphError):
        relabel_swap(graph, 0, 2)


# ---------------- enumeration ----------------

def test_enumeration_examples():
    assert len(enumerate_graphs(0, 2, 1)) == 1
    assert len(enumerate_graphs(1, 0, 1)) == 2
    assert len(enumerate_graphs(0, 0, 2)) == 1


def test_enumeration_parameters_hold():
    for g, n, m in itertools.product(range(3), range(4), range(1, 4)):
        for cls in enumerate_graphs(g, n, m):
            assert cls.betti == g
            assert cls.graph.m == m
            assert len(cls.graph.leaves()) == n
            assert cls.graph.is_connected()


def test_enumeration_is_deterministic():
    first = [c.encoding for c in enumerate_graphs(1, 2, 3)]
    again = [c.encoding for c in enumerate_graphs(1, 2, 3)]
    assert first == again == sorted(first)


def test_enumeration_with_profile():
    classes = enumerate_graphs(None, None, 1, profile=[(2, 0)])
    assert len(classes) == 2
    assert {c.betti for c in classes} == {0, 1}
    with pytest.raises(ProfileError):
        enumerate_graphs(None, 1, 1, profile=[(2, 0)])


def test_stable_filter():
    assert len(enumerate_graphs(1, 0, 1, stable=True)) == 0
    assert len(enumerate_graphs(0, 3, 1, stable=True)) == 1


def test_graph_index_prefix_search():
    index = GraphIndex(list(enumerate_graphs(1, 1, 2)) + list(enumerate_graphs(1, 1, 1)))
    one_vertex = index.search(prefix="m1/")
    assert len(one_vertex) == len(enumerate_graphs(1, 1, 1))
    for cls in index.search(prefix="m2/g0,0/"):
        assert cls.graph.defects == (0, 0)
    assert graph_label(two_vertex(2)) == "m2/g0,0/l0,0/e1-2x2"


# ---------------- split and bijection ----------------

def test_split_examples():
    assert isinstance(split_vertex(star(3), (0,), (1, 2)), Disconnected)
    result = split_vertex(self_loop(), (0,), (1,))
    assert isinstance(result, Connected)
    assert result.graph.m == 2 and len(result.graph.edges) == 1
    pendant = MarkedGraph((0, 0), ((0, 2), (1,)), ((0, 1),))
    assert isinstance(split_vertex(pendant, (0,), (2,)), Disconnected)


def test_split_rejects_bad_partition():
    with pytest.raises(GraphError):
        split_vertex(star(2), (0,), ())
    with pytest.raises(GraphError):
        split_vertex(star(3), (0,), (1,))


def test_split_conserves_counts():
    for cls in enumerate_graphs(1, 2, 2):
        graph = cls.graph
        h1 = sorted(graph.half_edges[0])
        for k in range(1, len(h1)):
            for I in itertools.combinations(h1, k):
                J = tuple(h for h in h1 if h not in I)
                result = split_vertex(graph, I, J)
                parts = [result.graph] if isinstance(result, Connected) else [result.first, result.second]
                assert sum(sum(p.defects) for p in parts) == sum(graph.defects)
                assert sum(len(p.edges) for p in parts) == len(graph.edges)
                assert sum(len(p.leaves()) for p in parts) == len(graph.leaves())
                assert sum(betti(p) for p in parts) == betti(graph) - (1 if isinstance(result, Connected) else 0)


def test_partitions_mod_equiv_examples():
    assert len(partitions_mod_equiv(star(2), 1, 1)) == 1
    classes = partitions_mod_equiv(self_loop(extra_leaves=1), 1, 2)
    assert len(classes) == 2
    with pytest.raises(GraphError):
        partitions_mod_equiv(star(3), 1, 1)


def test_psi_examples():
    image = psi(star(2), (0,), (1,))
    assert isinstance(image, Disconnected)
    assert image.marks_first == (1,) and image.marks_second == (2,)
    assert image.first.leaf_counts() == (1,) and image.second.leaf_counts() == (1,)
    loop = psi(self_loop(), (0,), (1,))
    assert isinstance(loop, Connected) and len(loop.graph.edges) == 1


def test_psi_round_trip():
    for g, n, m in itertools.product(range(3), range(4), range(2, 4)):
        for k1, k2 in itertools.product(range(1, 3), repeat=2):
            for graph, part, image in a_set(g, n, k1, k2, m):
                back, back_part = psi_inv(image)
                assert canonical_form(back) == canonical_form(graph)
                assert back_part.encoding == part.encoding


def test_psi_inv_rejects_bad_labels():
    single = MarkedGraph((0,), ((0,),))
    with pytest.raises(GraphError):
        psi_inv(Disconnected(single, single, (2,), (1,)))


def test_bijection_smallest_cell():
    check = verify_gt_bijection(0, 2, 1, 1, 2)
    assert check.passed
    assert (check.details["A"], check.details["B"], check.details["C"]) == (1, 0, 1)


def test_bijection_sweep_both_modes():
    cells = list(feasible_cells(2, 4, 3, 3, max_half_edges=10))
    assert len(cells) == 270
    for mode in ("redistribute", "keep"):
        for g, n, k1, k2, m in cells:
            check = verify_gt_bijection(g, n, k1, k2, m, mode=mode, max_half_edges=10)
            assert check.passed, check.to_dict()


def test_half_edge_cap_filters_graphs_not_cells():
    assert (2, 4, 3, 3, 3) in list(feasible_cells(2, 4, 3, 3, max_half_edges=10))
    assert (0, 4, 3, 3, 3) not in list(feasible_cells(0, 4, 3, 3, max_half_edges=5))
    full = verify_gt_bijection(1, 2, 1, 2, 2)
    for cap in (0, 4, 6):
        capped = verify_gt_bijection(1, 2, 1, 2, 2, max_half_edges=cap)
        assert capped.passed, capped.to_dict()
        assert capped.details["max_half_edges"] == cap
        assert capped.details["A"] <= full.details["A"]
        assert all(graph.half_edge_count <= cap for graph, _, _ in a_set(1, 2, 1, 2, 2, max_half_edges=cap))
        assert all(b.graph.half_edge_count <= cap for b in b_set(1, 2, 1, 2, 2, max_half_edges=cap))
    assert verify_gt_bijection(1, 2, 1, 2, 2, max_half_edges=0).details["A"] == 0


def test_bijection_infeasible_cell_is_empty():
    assert a_set(0, 1, 3, 3, 2) == []
    assert b_set(0, 1, 3, 3, 2) == [] and c_set(0, 1, 3, 3, 2) == []
    assert verify_gt_bijection(0, 1, 3, 3, 2).passed


def main():
    tests = [
        test_betti_examples,
        test_betti_rejects_disconnected,
        test_malformed_graphs_rejected,
        test_canonical_form_examples,
        test_aut_order_examples,
        test_aut_order_matches_bruteforce,
        test_relabel_swap_involution,
        test_enumeration_examples,
        test_enumeration_parameters_hold,
        test_enumeration_is_deterministic,
        test_enumeration_with_profile,
        test_stable_filter,
        test_graph_index_prefix_search,
        test_split_examples,
        test_split_rejects_bad_partition,
        test_split_conserves_counts,
        test_partitions_mod_equiv_examples,
        test_psi_examples,
        test_psi_round_trip,
        test_psi_inv_rejects_bad_labels,
        test_bijection_smallest_cell,
        test_bijection_sweep_both_modes,
        test_half_edge_cap_filters_graphs_not_cells,
        test_bijection_infeasible_cell_is_empty,
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
