"""
Simplicial cochain complexes and their cohomology.

Simplices are sorted tuples of comparable vertex labels (integers for
abstract complexes, grid tuples for triangulated products). Cohomology
bases come out of two Smith reductions and keep representative cocycles
plus the matrix that expresses any cocycle in the basis.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Hashable, Iterable, List, Optional, Tuple, Union

from complex_core import SimplicialComplex, SimplicialMap
from errors import PreconditionError
from exact_linalg import ZZ, CoefficientRing, IntMatrix, smith_normal_form

logger = logging.getLogger(__name__)

Simplex = Tuple[Hashable, ...]
Cochain = Dict[Simplex, int]


class CochainComplex:
    """Cochains on a finite ordered simplicial complex, optionally augmented or relative."""

    def __init__(self, simplices: Iterable[Simplex], ring: CoefficientRing = ZZ, augmented: bool = False,
                 excluded: Optional[Callable[[Simplex], bool]] = None):
        self.ring = ring
        self.augmented = augmented
        by_degree: Dict[int, List[Simplex]] = {}
        for s in simplices:
            s = tuple(s)
            if not s or (excluded is not None and excluded(s)):
                continue
            by_degree.setdefault(len(s) - 1, []).append(s)
        if augmented:
            by_degree[-1] = [()]
        self.min_degree = -1 if augmented else 0
        self.top_degree = max(by_degree) if by_degree else self.min_degree - 1
        self.basis: Dict[int, List[Simplex]] = {q: sorted(v) for q, v in by_degree.items()}
        self.index: Dict[int, Dict[Simplex, int]] = {
            q: {s: k for k, s in enumerate(faces)} for q, faces in self.basis.items()
        }
        self._coboundary: Dict[int, IntMatrix] = {}
        self._diagonal: Dict[int, List[int]] = {}
        self._cohomology: Dict[int, "CohomologyBasis"] = {}

    @classmethod
    def from_complex(cls, K: SimplicialComplex, ring: CoefficientRing = ZZ, augmented: bool = True) -> "CochainComplex":
        return cls(K.faces, ring, augmented=augmented)

    def _build_coboundary(self, q: int) -> IntMatrix:
        rows, cols = self.basis.get(q + 1, []), self.index.get(q, {})
        entries = {}
        for i, s in enumerate(rows):
            for k in range(len(s)):
                j = cols.get(s[:k] + s[k + 1:])
                if j is not None:
                    entries[(i, j)] = self.ring.reduce(-1 if k % 2 else 1)
        return IntMatrix(len(rows), len(self.basis.get(q, [])), entries)

    @property
    def degrees(self) -> range:
        return range(self.min_degree, self.top_degree + 1)

    def size(self, q: int) -> int:
        return len(self.basis.get(q, []))

    def __len__(self) -> int:
        return sum(len(v) for v in self.basis.values())

    def coboundary_matrix(self, q: int) -> IntMatrix:
        """δ_q, built on first use and checked against its already built neighbours."""
        if q in self._coboundary:
            return self._coboundary[q]
        if not self.min_degree <= q < self.top_degree:
            return IntMatrix(self.size(q + 1), self.size(q))
        delta = self._coboundary[q] = self._build_coboundary(q)
        for upper, lower in ((self._coboundary.get(q + 1), delta), (delta, self._coboundary.get(q - 1))):
            if upper is not None and lower is not None and not (upper @ lower).reduce(self.ring).is_zero():
                raise PreconditionError(f"Coboundary squares to a nonzero map next to degree {q}")
        return delta

    def vector(self, cochain: Cochain, q: int) -> List[int]:
        vec = [0] * self.size(q)
        index = self.index.get(q, {})
        for s, v in cochain.items():
            if s in index:
                vec[index[s]] = self.ring.reduce(vec[index[s]] + v)
        return vec

    def cochain(self, vector: Iterable[int], q: int) -> Cochain:
        faces = self.basis.get(q, [])
        return {faces[k]: self.ring.reduce(v) for k, v in enumerate(vector) if self.ring.reduce(v)}

    def coboundary(self, cochain: Cochain, q: int) -> Cochain:
        return self.cochain(self.coboundary_matrix(q).matvec(self.vector(cochain, q)), q + 1)

    def is_cocycle(self, cochain: Cochain, q: int) -> bool:
        return not self.coboundary(cochain, q)

    def euler_characteristic(self) -> int:
        return sum((-1) ** q * self.size(q) for q in self.degrees)

    def invariant_factors(self, q: int) -> List[int]:
        """Nonzero invariant factors of δ_q, without tracking any transform."""
        if q not in self._diagonal:
            self._diagonal[q] = smith_normal_form(self.coboundary_matrix(q), self.ring,
                                                  left=False, right=False).diagonal
        return self._diagonal[q]

    def cohomology(self, q: int) -> "CohomologyBasis":
        if q not in self._cohomology:
            free, torsion = self._profile_entry(q)
            if free or torsion:
                self._cohomology[q] = _compute_basis(self, q)
            else:
                self._cohomology[q] = CohomologyBasis(q, self.ring, membership=IntMatrix(0, self.size(q)),
                                                      complex=self)
        return self._cohomology[q]

    def _profile_entry(self, q: int) -> Tuple[int, Tuple[int, ...]]:
        if not self.size(q):
            return 0, ()
        incoming = self.invariant_factors(q - 1)
        free = self.size(q) - len(self.invariant_factors(q)) - len(incoming)
        torsion = () if self.ring.is_field else tuple(d for d in incoming if d > 1)
        return free, torsion

    def betti_profile(self) -> Dict[int, Tuple[int, Tuple[int, ...]]]:
        """Degree -> (free rank, torsion coefficients), nonzero degrees only.

        Read off the invariant factors alone, so no cohomology basis is built.
        """
        profile = {}
        for q in self.degrees:
            free, torsion = self._profile_entry(q)
            if free or torsion:
                profile[q] = (free, torsion)
        return profile


@dataclass
class CohomologyBasis:
    """Generators of H^q: free ones first, then torsion ones by invariant factor."""
    degree: int
    ring: CoefficientRing
    generators: List[Cochain] = field(default_factory=list)
    orders: List[int] = field(default_factory=list)
    membership: Optional[IntMatrix] = None
    complex: Optional[CochainComplex] = None

    @property
    def free_rank(self) -> int:
        return sum(1 for d in self.orders if d == 0)

    @property
    def torsion(self) -> List[int]:
        return [d for d in self.orders if d]

    @property
    def rank(self) -> int:
        return len(self.generators)

    def coordinates(self, cochain: Cochain) -> List[int]:
        """Coefficients of a cocycle's class; torsion entries are taken modulo their order."""
        if not self.generators:
            return []
        raw = self.membership.matvec(self.complex.vector(cochain, self.degree))
        return [v % d if d else self.ring.reduce(v) for v, d in zip(raw, self.orders)]

    def is_zero_class(self, cochain: Cochain) -> bool:
        return not any(self.coordinates(cochain))

    def combination(self, coefficients: Iterable[int]) -> Cochain:
        total: Cochain = {}
        for c, g in zip(coefficients, self.generators):
            if not c:
                continue
            for s, v in g.items():
                total[s] = self.ring.reduce(total.get(s, 0) + c * v)
        return {s: v for s, v in total.items() if v}


def _compute_basis(C: CochainComplex, q: int) -> CohomologyBasis:
    n = C.size(q)
    if n == 0:
        return CohomologyBasis(q, C.ring, membership=IntMatrix(0, 0), complex=C)
    ring = C.ring
    # cocycles: column operations on δ_q leave the kernel basis in V
    cocycle_snf = smith_normal_form(C.coboundary_matrix(q), ring, left=False)
    r = cocycle_snf.rank
    kernel_coords = cocycle_snf.V_inv.select_rows(list(range(r, n)))
    boundaries = (kernel_coords @ C.coboundary_matrix(q - 1)).reduce(ring)
    # classes: row operations on the boundaries, written in kernel coordinates
    quotient_snf = smith_normal_form(boundaries, ring, right=False)
    k, r2 = n - r, quotient_snf.rank

    kept = list(range(r2, k)) + [j for j in range(r2) if not ring.is_field and quotient_snf.diagonal[j] > 1]
    orders = [0 if j >= r2 else quotient_snf.diagonal[j] for j in kept]
    generators = []
    for j in kept:
        padded = [0] * r + quotient_snf.U_inv.column(j)
        generators.append(C.cochain(cocycle_snf.V.matvec(padded), q))
    membership = (quotient_snf.U.select_rows(kept) @ kernel_coords).reduce(ring)
    logger.debug(f"H^{q}: free rank {orders.count(0)}, torsion {[d for d in orders if d]}")
    return CohomologyBasis(q, ring, generators, orders, membership, C)


def reduced_cohomology(K: SimplicialComplex, R: CoefficientRing, q: int) -> CohomologyBasis:
    """H̃^q(K; R) through the augmented cochain complex; degree -1 is nonzero only for {∅}."""
    return CochainComplex.from_complex(K, R, augmented=True).cohomology(q)


def cup_product(C: Union[CochainComplex, SimplicialComplex], u: Cochain, p: int, v: Cochain, q: int,
                ring: Optional[CoefficientRing] = None) -> Cochain:
    """(u⌣v)(v0<...<v_{p+q}) = u(v0..vp)·v(vp..v_{p+q})."""
    if p < 0 or q < 0 or not u or not v:
        return {}
    if isinstance(C, SimplicialComplex):
        ring = ring or ZZ
        simplices = C.faces_of_dim(p + q)
    else:
        ring = ring or C.ring
        simplices = C.basis.get(p + q, [])
    product: Cochain = {}
    for s in simplices:
        a = u.get(s[:p + 1])
        if not a:
            continue
        b = v.get(s[p:])
        if b:
            value = ring.reduce(a * b)
            if value:
                product[s] = value
    return product


def pullback(f: SimplicialMap, u: Cochain, q: int, ring: CoefficientRing = ZZ) -> Cochain:
    """(f^#u)(σ) = u(f(σ)) with orientation sign; degenerate images contribute 0."""
    result: Cochain = {}
    for face in f.source.faces_of_dim(q):
        image = f.image(face)
        if image is None:
            continue
        value = ring.reduce(image[1] * u.get(image[0], 0))
        if value:
            result[face] = value
    return result


def induced_map(f: SimplicialMap, u: Cochain, q: int, source_basis: CohomologyBasis) -> List[int]:
    """Class of f^*u expressed in the source cohomology basis."""
    return source_basis.coordinates(pullback(f, u, q, source_basis.ring))


def quotient_cohomology(K: SimplicialComplex, A: SimplicialComplex, ring: CoefficientRing = ZZ) -> CochainComplex:
    """Cochains of K vanishing on A; their cohomology is H̃^*(K/A) when A is nonempty."""
    if A.m > K.m or not all(face in K for face in A.faces):
        raise PreconditionError("Collapsed complex is not a subcomplex")
    if not A.vertices:
        return CochainComplex.from_complex(K, ring, augmented=True)
    return CochainComplex(K.faces, ring, augmented=False, excluded=lambda s: s in A)
