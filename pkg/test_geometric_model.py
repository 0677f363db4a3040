"""
Tests for the triangulated models used as the independent oracle.
"""

from itertools import product as cartesian
from math import comb, factorial, prod

import pytest

from complex_core import IndexSet, SimplicialComplex
from decomposition import decompose, regrade
from errors import BudgetExceededError, UnsupportedFamilyError
from exact_linalg import ZZ, CoefficientRing
from geometric_model import (
    FactorModel,
    LiftedDecomposition,
    VerificationReport,
    build_model,
    build_smash_model,
    direct_ring,
    projection_pullback,
    verify_eta_ring,
    verify_splitting,
)
from pairs import ConePair, GradedRing, PairFamily, SimplicialPair

TWO_POINTS = SimplicialComplex(2, [(1,), (2,)])
SQUARE = SimplicialComplex.cycle(4)
PENTAGON = SimplicialComplex.cycle(5)


def test_full_edge_gives_a_triangulated_square():
    model = build_model(SimplicialComplex.simplex(2), PairFamily.disk_sphere(1, 2))
    assert len(model) == 11
    assert sum(1 for s in model.simplices if len(s) == 3) == 2
    assert model.betti_profile() == {0: (1, ())}


def test_two_points_with_intervals_is_a_square_loop():
    model = build_model(TWO_POINTS, PairFamily.disk_sphere(1, 2))
    assert len(model.vertices) == 4
    assert len(model) == 8
    assert model.dimension == 1
    assert model.betti_profile() == {0: (1, ()), 1: (1, ())}


def test_staircase_of_a_prism():
    segment = SimplicialPair(SimplicialComplex.simplex(2), SimplicialComplex(2, [(1,)]), "segment")
    triangle = SimplicialPair(SimplicialComplex.simplex(3), SimplicialComplex(3, [(1,)]), "triangle")
    model = build_model(SimplicialComplex.simplex(2), PairFamily((segment, triangle)))
    assert len(model.vertices) == 6
    assert sum(1 for s in model.simplices if len(s) == 4) == 3
    assert model.betti_profile() == {0: (1, ())}


def test_disk_factor_cochains():
    disk = FactorModel.disk(2)
    assert disk.X.vertices == (1, 2, 3)
    assert disk.sphere_cochain == {(2, 3): 1}
    assert disk.disk_cochain == {(1, 2, 3): 1}
    assert (1, 2, 3) not in disk.A
    assert FactorModel.disk(1).disk_cochain == {(1, 2): 1}
    assert disk.basepoint == 1


def test_two_points_with_disks_is_a_three_sphere():
    model = build_model(TWO_POINTS, PairFamily.disk_sphere(2, 2))
    assert model.betti_profile() == {0: (1, ()), 3: (1, ())}


def test_smash_model_on_empty_index_is_a_point():
    smash = build_smash_model(SQUARE, PairFamily.disk_sphere(1, 4), IndexSet.of([], 4))
    assert len(smash) == 1
    assert smash.betti_profile() == {0: (1, ())}


def test_smash_model_of_two_points():
    smash = build_smash_model(TWO_POINTS, PairFamily.disk_sphere(1, 2), IndexSet.of([1, 2], 2))
    assert smash.smash
    assert smash.collapsed()
    assert smash.betti_profile() == {1: (1, ())}


def test_smash_over_a_vertex_is_contractible():
    K = SimplicialComplex(1, [(1,)])
    smash = build_smash_model(K, PairFamily.disk_sphere(1, 1), IndexSet.of([1], 1))
    assert smash.betti_profile() == {}


def test_smash_over_a_ghost_vertex_is_the_subspace():
    K = SimplicialComplex(2, [(1,)])
    smash = build_smash_model(K, PairFamily.disk_sphere(1, 2), IndexSet.of([2], 2))
    assert len(smash.vertices) == 2
    assert smash.betti_profile() == {0: (1, ())}


def test_empty_subspace_uses_a_disjoint_basepoint(caplog):
    edge = SimplicialPair(SimplicialComplex.simplex(2), SimplicialComplex.empty(2), "edge")
    with caplog.at_level("WARNING"):
        model = build_model(SimplicialComplex.simplex(2), PairFamily((edge, edge)))
    assert "disjoint basepoint" in caplog.text
    assert model.betti_profile() == {0: (1, ())}


@pytest.mark.parametrize("K, n, ring", [
    (TWO_POINTS, 2, ZZ),
    (TWO_POINTS, 1, ZZ),
    (SQUARE, 1, ZZ),
    (PENTAGON, 1, CoefficientRing(2)),
    (SimplicialComplex.simplex(3), 1, ZZ),
])
def test_splitting_and_ring_agree_with_the_model(K, n, ring):
    family = PairFamily.disk_sphere(n, K.m)
    splitting = verify_splitting(K, family, ring)
    assert splitting.passed, splitting.lines()
    ring_check = verify_eta_ring(K, family, ring)
    assert ring_check.passed, ring_check.lines()
    assert ring_check.counterexample is None


def test_pentagon_over_the_integers():
    family = PairFamily.disk_sphere(1, 5)
    assert verify_splitting(PENTAGON, family).passed
    assert verify_eta_ring(PENTAGON, family).passed


@pytest.mark.slow
def test_square_with_disks_on_the_model():
    family = PairFamily.disk_sphere(2, 4)
    assert verify_splitting(SQUARE, family, budget=400000).passed
    assert verify_eta_ring(SQUARE, family, budget=400000).passed


def test_lifted_generators_span_the_circle():
    family = PairFamily.disk_sphere(1, 2)
    module = decompose(TWO_POINTS, family)
    lifted = LiftedDecomposition(build_model(TWO_POINTS, family), module)
    assert lifted.is_isomorphism(1)[0]
    assert lifted.coordinates(1) in ([1], [-1])
    assert lifted.express({}, 1) == {}


def test_direct_ring_on_the_torus():
    family = PairFamily.disk_sphere(1, 4)
    table = direct_ring(SQUARE, family)
    module = decompose(SQUARE, family)
    a = next(k for k, g in enumerate(module.generators) if g.index.members == (1, 3))
    b = next(k for k, g in enumerate(module.generators) if g.index.members == (2, 4))
    assert table[(a, a)] == {}
    assert len(table[(a, b)]) == 1
    assert table[(a, b)] == {k: -c for k, c in table[(b, a)].items()}


def test_explicit_budget_is_enforced():
    with pytest.raises(BudgetExceededError) as excinfo:
        build_model(SQUARE, PairFamily.disk_sphere(1, 4), budget=5)
    assert excinfo.value.budget == 5
    assert excinfo.value.exit_code == 3


def test_family_budget_for_disks():
    with pytest.raises(BudgetExceededError):
        build_model(PENTAGON, PairFamily.disk_sphere(2, 5))


def test_cone_pairs_have_no_model():
    circle = GradedRing.sphere(1)
    with pytest.raises(UnsupportedFamilyError):
        build_model(TWO_POINTS, PairFamily((ConePair(circle), ConePair(circle))))


def test_projection_pullback_of_zero():
    family = PairFamily.disk_sphere(1, 2)
    total = build_model(TWO_POINTS, family)
    smash = build_smash_model(TWO_POINTS, family, IndexSet.of([1, 2], 2))
    assert projection_pullback(total, smash, {}, 1) == {}


def test_relabelled_complex_has_the_same_profile():
    path = SimplicialComplex.from_facets(3, [(1, 2), (2, 3)])
    moved = path.relabel({1: 2, 2: 1, 3: 3})
    family = PairFamily.disk_sphere(1, 3)
    assert build_model(path, family).betti_profile() == build_model(moved, family).betti_profile()


def test_report_lines():
    report = VerificationReport("demo")
    report.add("first", True)
    report.add("second", False, "mismatch")
    assert not report.passed
    assert report.lines() == ["demo: FAIL", "  PASS first", "  FAIL second: mismatch"]
    assert report.to_dict()["checks"][1] == {"label": "second", "passed": False, "detail": "mismatch"}


RP2 = SimplicialComplex.from_facets(6, [
    (1, 2, 3), (1, 3, 4), (1, 4, 5), (1, 5, 6), (1, 2, 6),
    (2, 3, 5), (2, 4, 5), (2, 4, 6), (3, 4, 6), (3, 5, 6),
])


def test_projective_plane_with_intervals_over_the_integers():
    family = PairFamily.disk_sphere(1, 6)
    splitting = verify_splitting(RP2, family)
    assert splitting.passed, splitting.lines()
    assert splitting.counterexample is None
    ring_check = verify_eta_ring(RP2, family)
    assert ring_check.passed, ring_check.lines()


def test_torsion_degree_is_bijective_on_the_model():
    family = PairFamily.disk_sphere(1, 6)
    module = decompose(RP2, family)
    lifted = LiftedDecomposition(build_model(RP2, family), module)
    assert lifted.basis(3).torsion == [2]
    ok, detail, witness = lifted.is_isomorphism(3)
    assert ok, detail
    assert witness is None


@pytest.mark.parametrize("K", [SQUARE, PENTAGON])
def test_ring_check_modulo_three(K):
    family = PairFamily.disk_sphere(1, K.m)
    ring_check = verify_eta_ring(K, family, CoefficientRing(3))
    assert ring_check.passed, ring_check.lines()
    assert verify_splitting(K, family, CoefficientRing(3)).passed


def test_mismatched_decomposition_reports_a_counterexample():
    module = decompose(TWO_POINTS, PairFamily.disk_sphere(1, 2))
    report = verify_splitting(TWO_POINTS, PairFamily.disk_sphere(2, 2), module=module)
    assert not report.passed
    assert report.counterexample["check"] == "total model against decomposition"
    assert report.counterexample["degree"] == 1
    assert report.counterexample["model_profile"] == "0:1, 3:1"
    assert report.counterexample["summand_profile"] == "0:1, 1:1"


def test_missing_lift_is_reported_with_a_witness():
    family = PairFamily.disk_sphere(1, 2)
    lifted = LiftedDecomposition(build_model(TWO_POINTS, family), decompose(TWO_POINTS, family))
    lifted.lifts[1] = {}
    ok, detail, witness = lifted.is_isomorphism(1)
    assert not ok
    assert detail == "rational rank 0 of 1"
    assert witness == {"rational_rank": 0, "model_free_rank": 1}


def test_three_sphere_class_pulls_back_to_a_generator():
    family = PairFamily.disk_sphere(2, 2)
    total = build_model(TWO_POINTS, family)
    smash = build_smash_model(TWO_POINTS, family, IndexSet.of([1, 2], 2))
    u = smash.cochains(ZZ).cohomology(3).generators[0]
    pulled = projection_pullback(total, smash, u, 3)
    assert total.cochains(ZZ).is_cocycle(pulled, 3)
    assert total.cochains(ZZ).cohomology(3).coordinates(pulled) in ([1], [-1])


def _chain_count(multiplicities):
    """Sequences of nonempty subsets in which coordinate i occurs multiplicities[i] times."""
    total = 0
    for t in range(sum(multiplicities) + 1):
        for j in range(t + 1):
            term = comb(t, j)
            for e in multiplicities:
                term *= comb(t - j, e)
            total += (-1) ** j * term
    return total


def _staircase_size(vertex_counts):
    """Simplices of the staircase triangulation of a product of full simplices."""
    total = 0
    for sizes in cartesian(*(range(1, n + 1) for n in vertex_counts)):
        ways = prod(comb(n, f) for n, f in zip(vertex_counts, sizes))
        total += ways * _chain_count([f - 1 for f in sizes])
    return total


@pytest.mark.parametrize("vertex_counts", [(2, 3), (2, 2, 2), (3, 3), (2, 3, 2), (4, 2)])
def test_full_products_follow_the_chain_count(vertex_counts):
    pairs = tuple(
        SimplicialPair(SimplicialComplex.simplex(n), SimplicialComplex(n, [(1,)]), f"simplex{n}")
        for n in vertex_counts
    )
    model = build_model(SimplicialComplex.simplex(len(pairs)), PairFamily(pairs))
    assert len(model) == _staircase_size(vertex_counts)
    dims = [n - 1 for n in vertex_counts]
    tops = factorial(sum(dims)) // prod(factorial(d) for d in dims)
    assert sum(1 for s in model.simplices if len(s) == sum(dims) + 1) == tops


def test_disk_models_stay_small():
    assert len(build_model(TWO_POINTS, PairFamily.disk_sphere(2, 2))) == 90


@pytest.mark.slow
def test_square_with_disks_model_size():
    assert len(build_model(SQUARE, PairFamily.disk_sphere(2, 4))) == 89910


def test_pentagon_disk_profile_through_the_interval_model():
    mod2 = CoefficientRing(2)
    intervals = decompose(PENTAGON, PairFamily.disk_sphere(1, 5), mod2)
    assert verify_splitting(PENTAGON, PairFamily.disk_sphere(1, 5), mod2, module=intervals).passed
    disks = decompose(PENTAGON, PairFamily.disk_sphere(2, 5), mod2)
    assert regrade(intervals, (1,) * 5).betti() == disks.betti()
