"""
Abstract simplicial complexes on ordered vertex sets.
Full subcomplexes, joins and the vertex maps that realize partial diagonals.
"""

import json
import logging
import re
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from errors import ComplexFormatError, OverlapError, PreconditionError

logger = logging.getLogger(__name__)

Face = Tuple[int, ...]


def permutation_sign(seq: Sequence) -> int:
    """Sign of the permutation that sorts a sequence of distinct items."""
    inversions = 0
    for a in range(len(seq)):
        for b in range(a + 1, len(seq)):
            if seq[a] > seq[b]:
                inversions += 1
    return -1 if inversions % 2 else 1


@dataclass(frozen=True)
class IndexSet:
    """Increasing subsequence I of [m] = (1, ..., m)."""
    members: Tuple[int, ...]
    m: int

    def __post_init__(self):
        members = tuple(self.members)
        if list(members) != sorted(set(members)):
            raise PreconditionError(f"Index set {members} is not sorted and duplicate-free")
        if members and (members[0] < 1 or members[-1] > self.m):
            raise PreconditionError(f"Index set {members} leaves [1..{self.m}]")
        object.__setattr__(self, "members", members)

    @classmethod
    def of(cls, members: Iterable[int], m: int) -> "IndexSet":
        return cls(tuple(sorted(set(members))), m)

    @classmethod
    def full(cls, m: int) -> "IndexSet":
        return cls(tuple(range(1, m + 1)), m)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, v) -> bool:
        return v in self.members

    def union(self, other: "IndexSet") -> "IndexSet":
        return IndexSet.of(self.members + other.members, self.m)

    def intersection(self, other: "IndexSet") -> "IndexSet":
        return IndexSet.of(set(self.members) & set(other.members), self.m)

    def isdisjoint(self, other: "IndexSet") -> bool:
        return not set(self.members) & set(other.members)

    def position(self, v: int) -> int:
        """1-based position of a global vertex inside I."""
        return self.members.index(v) + 1

    def to_local(self, face: Iterable[int]) -> Face:
        return tuple(self.position(v) for v in face)

    def to_global(self, face: Iterable[int]) -> Face:
        return tuple(self.members[v - 1] for v in face)

    def sort_key(self) -> Tuple[int, Tuple[int, ...]]:
        return (len(self.members), self.members)

    def label(self) -> str:
        return "{" + ",".join(str(v) for v in self.members) + "}"


def subsets(m: int) -> List[IndexSet]:
    """All I ⊆ [m], ordered by size and then lexicographically."""
    return [IndexSet(c, m) for k in range(m + 1) for c in combinations(range(1, m + 1), k)]


class SimplicialComplex:
    """Faces closed under subsets on the vertices 1..m; the empty face is always present."""

    def __init__(self, m: int, faces: Iterable[Iterable[int]]):
        if m < 0:
            raise ComplexFormatError(f"Vertex count must be nonnegative, got {m}")
        normalized = {()}
        for face in faces:
            face = tuple(face)
            if len(set(face)) != len(face):
                raise ComplexFormatError(f"Duplicate vertex in face {face}")
            for v in face:
                if not 1 <= v <= m:
                    raise ComplexFormatError(f"Vertex {v} out of range 1..{m}")
            normalized.add(tuple(sorted(face)))
        for face in normalized:
            for k in range(len(face)):
                if face[:k] + face[k + 1:] not in normalized:
                    raise ComplexFormatError(f"Face set is not closed under subsets at {face}")
        self.m = m
        self._faces = frozenset(normalized)
        self.faces: Tuple[Face, ...] = tuple(sorted(normalized, key=lambda f: (len(f), f)))

    @classmethod
    def from_facets(cls, m: int, facets: Iterable[Iterable[int]]) -> "SimplicialComplex":
        closure = set()
        for facet in facets:
            facet = tuple(facet)
            if len(set(facet)) != len(facet):
                raise ComplexFormatError(f"Duplicate vertex within facet {facet}")
            for v in facet:
                if not 1 <= v <= m:
                    raise ComplexFormatError(f"Vertex {v} out of range 1..{m}")
            facet = tuple(sorted(facet))
            for k in range(len(facet) + 1):
                closure.update(combinations(facet, k))
        return cls(m, closure)

    @classmethod
    def simplex(cls, m: int) -> "SimplicialComplex":
        return cls.from_facets(m, [range(1, m + 1)])

    @classmethod
    def empty(cls, m: int = 0) -> "SimplicialComplex":
        """The complex {∅}, optionally carrying m ghost vertices."""
        return cls(m, [])

    @classmethod
    def cycle(cls, m: int) -> "SimplicialComplex":
        return cls.from_facets(m, [(i, i % m + 1) for i in range(1, m + 1)])

    def __contains__(self, face) -> bool:
        return tuple(face) in self._faces

    def __len__(self) -> int:
        return len(self.faces)

    def __iter__(self):
        return iter(self.faces)

    def __eq__(self, other) -> bool:
        return isinstance(other, SimplicialComplex) and self.m == other.m and self._faces == other._faces

    def __hash__(self) -> int:
        return hash((self.m, self._faces))

    def __repr__(self) -> str:
        facets = ",".join("{" + ",".join(map(str, f)) + "}" for f in self.facets)
        return f"SimplicialComplex(m={self.m}; facets={facets})"

    @property
    def dimension(self) -> int:
        return len(self.faces[-1]) - 1

    @property
    def facets(self) -> Tuple[Face, ...]:
        maximal = []
        for face in self.faces:
            if not any(len(face) < len(other) and set(face) <= set(other) for other in self.faces):
                maximal.append(face)
        return tuple(maximal)

    @property
    def vertices(self) -> Tuple[int, ...]:
        return tuple(f[0] for f in self.faces if len(f) == 1)

    def faces_of_dim(self, d: int) -> List[Face]:
        return [f for f in self.faces if len(f) == d + 1]

    def f_vector(self) -> List[int]:
        counts = [0] * (self.dimension + 2)
        for face in self.faces:
            counts[len(face)] += 1
        return counts

    def is_subcomplex_of(self, other: "SimplicialComplex") -> bool:
        return self.m <= other.m and self._faces <= other._faces

    def relabel(self, mapping: Dict[int, int]) -> "SimplicialComplex":
        return SimplicialComplex(self.m, [[mapping[v] for v in f] for f in self.faces])

    def describe(self) -> str:
        facets = ",".join("{" + ",".join(map(str, f)) + "}" for f in self.facets if f)
        return f"m={self.m}; facets={facets}"


_FACET_PATTERN = re.compile(r"\{([^{}]*)\}")


def parse_complex(text: str) -> SimplicialComplex:
    """Parse `m=<int>; facets={a,b,...},{...}` or a JSON document with keys m, facets."""
    text = text.strip()
    if text.startswith("{") and '"m"' in text:
        try:
            document = json.loads(text)
            return SimplicialComplex.from_facets(int(document["m"]), document.get("facets", []))
        except (ValueError, KeyError, TypeError) as e:
            raise ComplexFormatError(f"Invalid JSON complex description: {e}") from e

    m_match = re.search(r"\bm\s*=\s*(-?\d+)", text)
    if not m_match:
        raise ComplexFormatError("Complex description must declare m=<int>")
    m = int(m_match.group(1))
    facets_at = text.find("facets")
    facets: List[List[int]] = []
    if facets_at >= 0:
        body = text[facets_at:].split("=", 1)[-1]
        for group in _FACET_PATTERN.findall(body):
            entries = [e.strip() for e in group.split(",") if e.strip()]
            try:
                facets.append([int(e) for e in entries])
            except ValueError as e:
                raise ComplexFormatError(f"Non-integer vertex in facet {{{group}}}") from e
    complex_ = SimplicialComplex.from_facets(m, facets)
    logger.debug(f"Parsed complex with {len(complex_)} faces on {m} vertices")
    return complex_


def full_subcomplex(K: SimplicialComplex, I: IndexSet) -> SimplicialComplex:
    """K_I = {σ ∩ I : σ ∈ K}, re-indexed to 1..|I| in the order inherited from I."""
    members = set(I.members)
    faces = {I.to_local(v for v in face if v in members) for face in K.faces}
    return SimplicialComplex(len(I), faces)


def join(K1: SimplicialComplex, K2: SimplicialComplex) -> SimplicialComplex:
    """K1 * K2 on the ordered disjoint union of the vertex sets."""
    shift = K1.m
    faces = [a + tuple(v + shift for v in b) for a in K1.faces for b in K2.faces]
    return SimplicialComplex(K1.m + K2.m, faces)


@dataclass(frozen=True)
class SimplicialMap:
    """Vertex map source -> target; vertex_map[v - 1] is the image of v."""
    source: SimplicialComplex
    target: SimplicialComplex
    vertex_map: Tuple[int, ...]

    def image(self, face: Face) -> Optional[Tuple[Face, int]]:
        """Image of an ordered face as (sorted face, orientation sign), or None when degenerate."""
        image = [self.vertex_map[v - 1] for v in face]
        if len(set(image)) != len(image):
            return None
        return tuple(sorted(image)), permutation_sign(image)

    @classmethod
    def identity(cls, K: SimplicialComplex) -> "SimplicialMap":
        return cls(K, K, tuple(range(1, K.m + 1)))

    @classmethod
    def constant(cls, source: SimplicialComplex, target: SimplicialComplex, vertex: int) -> "SimplicialMap":
        return cls(source, target, tuple([vertex] * source.m))


def canonical_join_inclusion(K: SimplicialComplex, J: IndexSet, L: IndexSet) -> SimplicialMap:
    """The map K_{J∪L} -> K_J * K_L sending each vertex to its copy in the J or L factor."""
    if not J.isdisjoint(L):
        raise OverlapError(f"Index sets {J.label()} and {L.label()} overlap")
    I = J.union(L)
    source = full_subcomplex(K, I)
    target = join(full_subcomplex(K, J), full_subcomplex(K, L))
    vertex_map = tuple(J.position(v) if v in J else len(J) + L.position(v) for v in I)
    inclusion = SimplicialMap(source, target, vertex_map)
    for face in source.faces:
        image = inclusion.image(face)
        if image is None or image[0] not in target:
            raise PreconditionError(f"Face {I.to_global(face)} does not land in the join")
    return inclusion
