"""
Randomized checks over seeded simplicial complexes on at most five vertices,
and exhaustive ones over every complex on at most four.
"""

import random
from itertools import combinations, permutations

import pytest

from cohomology import CochainComplex
from complex_core import SimplicialComplex
from decomposition import decompose, regrade
from exact_linalg import ZZ, CoefficientRing, smith_normal_form
from geometric_model import verify_eta_ring, verify_splitting
from pairs import PairFamily
from star_ring import multiplication_table

SEEDS = range(200)


def random_complex(seed: int, max_vertices: int = 5) -> SimplicialComplex:
    rng = random.Random(seed)
    m = rng.randint(1, max_vertices)
    facets = []
    for _ in range(rng.randint(1, 2 * m)):
        size = rng.randint(1, min(3, m))
        facets.append(tuple(sorted(rng.sample(range(1, m + 1), size))))
    return SimplicialComplex.from_facets(m, facets)


@pytest.mark.parametrize("seed", SEEDS)
def test_euler_characteristic_matches_ranks(seed):
    K = random_complex(seed)
    for ring in (ZZ, CoefficientRing(2)):
        C = CochainComplex.from_complex(K, ring)
        alternating = sum((-1) ** q * C.cohomology(q).free_rank for q in C.degrees)
        assert alternating == C.euler_characteristic()


@pytest.mark.parametrize("seed", SEEDS)
def test_coboundary_smith_forms_reconstruct(seed):
    C = CochainComplex.from_complex(random_complex(seed), ZZ)
    for q in C.degrees:
        M = C.coboundary_matrix(q)
        snf = smith_normal_form(M)
        assert snf.reconstructs(M)
        assert all(b % a == 0 for a, b in zip(snf.diagonal, snf.diagonal[1:]))


@pytest.mark.parametrize("seed", SEEDS)
def test_disk_tables_are_graded_commutative_and_associative(seed):
    K = random_complex(seed)
    S = multiplication_table(K, PairFamily.disk_sphere(2, K.m))
    assert S.check_properties() == []
    unit = S.unit()
    for k in range(len(S.generators)):
        assert unit * S.element(k) == S.element(k)


@pytest.mark.parametrize("seed", range(0, 200, 10))
def test_regrade_agrees_with_suspension(seed):
    K = random_complex(seed)
    rng = random.Random(seed + 1)
    T = tuple(rng.randint(0, 2) for _ in range(K.m))
    base = decompose(K, PairFamily.disk_sphere(1, K.m))
    suspended = decompose(K, PairFamily.disk_sphere(1, K.m, suspension=T))
    assert regrade(base, T).betti() == suspended.betti()


@pytest.mark.parametrize("seed", range(0, 200, 20))
def test_small_interval_families_split(seed):
    K = random_complex(seed, max_vertices=3)
    assert verify_splitting(K, PairFamily.disk_sphere(1, K.m)).passed


def all_complexes(m: int):
    """Every simplicial complex on m vertices (ghosts allowed), one per isomorphism class."""
    candidates = [face for size in range(1, m + 1) for face in combinations(range(1, m + 1), size)]
    seen, found = set(), []
    for mask in range(1 << len(candidates)):
        faces = {candidates[k] for k in range(len(candidates)) if mask >> k & 1}
        if any(face[:k] + face[k + 1:] not in faces for face in faces for k in range(len(face))
               if len(face) > 1):
            continue
        canonical = min(
            tuple(sorted(tuple(sorted(perm[v - 1] for v in face)) for face in faces))
            for perm in permutations(range(1, m + 1))
        )
        if canonical not in seen:
            seen.add(canonical)
            found.append(SimplicialComplex(m, faces))
    return found


SMALL_CORPUS = [K for m in (1, 2, 3) for K in all_complexes(m)]
FOUR_VERTEX_CORPUS = all_complexes(4)


@pytest.mark.parametrize("ring", [ZZ, CoefficientRing(2), CoefficientRing(3)], ids=lambda R: R.label)
@pytest.mark.parametrize("K", SMALL_CORPUS, ids=repr)
def test_small_complexes_with_intervals(K, ring):
    family = PairFamily.disk_sphere(1, K.m)
    splitting = verify_splitting(K, family, ring)
    assert splitting.passed, splitting.lines()
    ring_check = verify_eta_ring(K, family, ring)
    assert ring_check.passed, ring_check.lines()


@pytest.mark.parametrize("K", SMALL_CORPUS, ids=repr)
def test_small_complexes_with_disks(K):
    family = PairFamily.disk_sphere(2, K.m)
    splitting = verify_splitting(K, family)
    assert splitting.passed, splitting.lines()
    ring_check = verify_eta_ring(K, family)
    assert ring_check.passed, ring_check.lines()


@pytest.mark.parametrize("K", FOUR_VERTEX_CORPUS, ids=repr)
def test_four_vertex_complexes_with_intervals(K):
    family = PairFamily.disk_sphere(1, K.m)
    assert verify_splitting(K, family).passed
    assert verify_eta_ring(K, family).passed
