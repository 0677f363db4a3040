"""
Tests for simplicial complexes, full subcomplexes, joins and vertex maps.
"""

import pytest

from complex_core import (
    IndexSet,
    SimplicialComplex,
    SimplicialMap,
    canonical_join_inclusion,
    full_subcomplex,
    join,
    parse_complex,
    permutation_sign,
    subsets,
)
from errors import ComplexFormatError, OverlapError, PreconditionError


def test_parse_text_and_json_agree():
    text = parse_complex("m=4; facets={1,2},{2,3},{3,4},{4,1}")
    document = parse_complex('{"m": 4, "facets": [[1, 2], [2, 3], [3, 4], [1, 4]]}')
    assert text == document == SimplicialComplex.cycle(4)


def test_parse_rejects_bad_input():
    with pytest.raises(ComplexFormatError):
        parse_complex("facets={1,2}")
    with pytest.raises(ComplexFormatError):
        parse_complex("m=2; facets={1,3}")
    with pytest.raises(ComplexFormatError):
        parse_complex("m=2; facets={1,x}")


def test_faces_must_be_closed_under_subsets():
    with pytest.raises(ComplexFormatError):
        SimplicialComplex(3, [(1,), (1, 2)])


def test_facets_and_f_vector():
    K = SimplicialComplex.cycle(5)
    assert K.f_vector() == [1, 5, 5]
    assert K.dimension == 1
    assert set(K.facets) == {(1, 2), (2, 3), (3, 4), (4, 5), (1, 5)}
    assert SimplicialComplex.simplex(3).f_vector() == [1, 3, 3, 1]


def test_empty_complex_has_only_the_empty_face():
    K = SimplicialComplex.empty(2)
    assert K.faces == ((),)
    assert K.dimension == -1
    assert K.vertices == ()


def test_full_subcomplex_reindexes():
    K = SimplicialComplex.cycle(5)
    K13 = full_subcomplex(K, IndexSet.of([1, 3], 5))
    assert K13.m == 2
    assert set(K13.faces) == {(), (1,), (2,)}
    path = full_subcomplex(K, IndexSet.of([1, 2, 3, 4], 5))
    assert set(path.facets) == {(1, 2), (2, 3), (3, 4)}


def test_full_subcomplex_on_ghost_vertex():
    K = SimplicialComplex(3, [(1,), (2,)])
    ghost = full_subcomplex(K, IndexSet.of([3], 3))
    assert ghost == SimplicialComplex.empty(1)


def test_join_of_two_point_sets_is_a_square():
    points = SimplicialComplex(2, [(1,), (2,)])
    square = join(points, points)
    assert square.m == 4
    assert set(square.facets) == {(1, 3), (1, 4), (2, 3), (2, 4)}


def test_index_set_helpers():
    I = IndexSet.of([4, 2], 5)
    assert I.members == (2, 4)
    assert I.label() == "{2,4}"
    assert I.position(4) == 2
    assert I.to_local((2, 4)) == (1, 2)
    assert I.to_global((2,)) == (4,)
    with pytest.raises(PreconditionError):
        IndexSet((3, 1), 5)
    with pytest.raises(PreconditionError):
        IndexSet((6,), 5)


def test_subsets_order_by_size_then_lexicographic():
    labels = [I.label() for I in subsets(3)]
    assert labels == ["{}", "{1}", "{2}", "{3}", "{1,2}", "{1,3}", "{2,3}", "{1,2,3}"]


def test_permutation_sign():
    assert permutation_sign((1, 2, 3)) == 1
    assert permutation_sign((2, 1, 3)) == -1
    assert permutation_sign((3, 1, 2)) == 1


def test_simplicial_map_images():
    K = SimplicialComplex.simplex(3)
    f = SimplicialMap(K, K, (2, 1, 3))
    assert f.image((1, 2)) == ((1, 2), -1)
    assert f.image((1, 3)) == ((2, 3), 1)
    collapse = SimplicialMap.constant(K, K, 1)
    assert collapse.image((1, 2)) is None
    assert SimplicialMap.identity(K).image((1, 2, 3)) == ((1, 2, 3), 1)


def test_canonical_join_inclusion():
    K = SimplicialComplex.cycle(4)
    J, L = IndexSet.of([1, 3], 4), IndexSet.of([2, 4], 4)
    inclusion = canonical_join_inclusion(K, J, L)
    assert inclusion.vertex_map == (1, 3, 2, 4)
    assert inclusion.image((2, 3)) == ((2, 3), -1)
    assert inclusion.target.m == 4


def test_canonical_join_inclusion_rejects_overlap():
    K = SimplicialComplex.cycle(4)
    with pytest.raises(OverlapError):
        canonical_join_inclusion(K, IndexSet.of([1, 2], 4), IndexSet.of([2, 3], 4))


def test_relabel_by_rotation():
    K = SimplicialComplex.cycle(5)
    rotated = K.relabel({v: v % 5 + 1 for v in range(1, 6)})
    assert rotated == K


RP2 = SimplicialComplex.from_facets(6, [
    (1, 2, 3), (1, 3, 4), (1, 4, 5), (1, 5, 6), (1, 2, 6),
    (2, 3, 5), (2, 4, 5), (2, 4, 6), (3, 4, 6), (3, 5, 6),
])


@pytest.mark.parametrize("K", [SimplicialComplex.cycle(5), RP2, SimplicialComplex(3, [(1,), (2,)])])
def test_full_subcomplexes_nest(K):
    for I in subsets(K.m):
        K_I = full_subcomplex(K, I)
        assert full_subcomplex(K_I, IndexSet.full(len(I))) == K_I
        for J in subsets(len(I)):
            inner = IndexSet.of([I.members[j - 1] for j in J], K.m)
            assert full_subcomplex(K_I, J) == full_subcomplex(K, inner)


@pytest.mark.parametrize("K1, K2", [
    (SimplicialComplex.cycle(4), SimplicialComplex(2, [(1,), (2,)])),
    (SimplicialComplex.simplex(3), SimplicialComplex.cycle(5)),
    (RP2, SimplicialComplex(3, [(1,)])),
])
def test_join_multiplies_face_counts(K1, K2):
    assert len(join(K1, K2)) == len(K1) * len(K2)


def test_join_with_the_empty_complex():
    K = SimplicialComplex.cycle(4)
    assert join(K, SimplicialComplex.empty(0)) == K
    assert join(SimplicialComplex.empty(0), K) == K
    ghosts = join(K, SimplicialComplex.empty(2))
    assert ghosts.m == 6
    assert set(ghosts.faces) == set(K.faces)
