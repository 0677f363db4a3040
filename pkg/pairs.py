"""
Pair families (X_i, A_i) attached to the vertices of K.

Three descriptor kinds are supported: disk-sphere pairs (D^n, S^{n-1}),
explicit simplicial pairs and cone pairs given by a graded ring
presentation of the reduced cohomology of X. An optional suspension
vector is applied on top of any family.
"""

import logging
from dataclasses import dataclass, field
from itertools import product as cartesian
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from complex_core import IndexSet, SimplicialComplex, join
from errors import DimensionError, PreconditionError, RingPresentationError, UnsupportedFamilyError

logger = logging.getLogger(__name__)

# two points, the simplicial S^0
SPHERE_ZERO = SimplicialComplex(2, [(1,), (2,)])


@dataclass(frozen=True)
class DiskSphere:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise PreconditionError(f"Disk dimension must be at least 1, got {self.n}")

    def label(self) -> str:
        return f"disk-sphere:{self.n}"


@dataclass(frozen=True)
class SimplicialPair:
    """A subcomplex A of X, both on the vertices of X."""
    X: SimplicialComplex
    A: SimplicialComplex
    name: str = "pair"

    def __post_init__(self):
        A = self.A
        if A.m < self.X.m:
            A = SimplicialComplex(self.X.m, A.faces)
            object.__setattr__(self, "A", A)
        if not A.is_subcomplex_of(self.X) or A.m != self.X.m:
            raise PreconditionError(f"A is not a subcomplex of X in pair {self.name}")
        if not self.X.vertices:
            raise PreconditionError(f"X is empty in pair {self.name}")

    @property
    def disjoint_basepoint(self) -> bool:
        return not self.A.vertices

    @property
    def basepoint(self) -> Optional[int]:
        return min(self.A.vertices) if self.A.vertices else None

    def suspended(self, t: int) -> "SimplicialPair":
        """(X * S^0, A * S^0) applied t times."""
        X, A = self.X, self.A
        for _ in range(t):
            X, A = join(X, SPHERE_ZERO), join(SimplicialComplex(X.m, A.faces), SPHERE_ZERO)
        return SimplicialPair(X, A, f"{self.name}+s{t}" if t else self.name)

    def label(self) -> str:
        return f"pair-file:{self.name}"


Vector = Dict[int, int]


@dataclass
class GradedRing:
    """
    Finite presentation of a reduced cohomology ring: named generators in
    positive degrees and products g_i·g_j = Σ c_k g_k (missing entries are zero).
    """
    names: List[str]
    degrees: List[int]
    products: Dict[Tuple[int, int], Vector] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.names) != len(self.degrees):
            raise RingPresentationError("Generator names and degrees differ in length")
        if len(set(self.names)) != len(self.names):
            raise RingPresentationError("Generator names must be distinct")
        for name, d in zip(self.names, self.degrees):
            if d < 1:
                raise RingPresentationError(f"Generator {name} has nonpositive degree {d}")
        self.products = {k: {t: c for t, c in v.items() if c} for k, v in self.products.items()}
        self._complete_by_commutativity()
        self.validate()

    @classmethod
    def sphere(cls, d: int, name: str = "s") -> "GradedRing":
        return cls([name], [d], {})

    def __len__(self) -> int:
        return len(self.names)

    def _complete_by_commutativity(self):
        for (i, j), value in list(self.products.items()):
            if (j, i) not in self.products:
                sign = -1 if self.degrees[i] * self.degrees[j] % 2 else 1
                self.products[(j, i)] = {k: sign * c for k, c in value.items()}

    def product(self, i: int, j: int) -> Vector:
        return self.products.get((i, j), {})

    def multiply(self, x: Vector, y: Vector) -> Vector:
        result: Vector = {}
        for i, a in x.items():
            for j, b in y.items():
                for k, c in self.product(i, j).items():
                    result[k] = result.get(k, 0) + a * b * c
        return {k: v for k, v in result.items() if v}

    def validate(self):
        n = len(self.names)
        for (i, j), value in self.products.items():
            if not (0 <= i < n and 0 <= j < n):
                raise RingPresentationError(f"Product ({i},{j}) names an unknown generator")
            for k in value:
                if not 0 <= k < n:
                    raise RingPresentationError(f"Product ({i},{j}) lands on an unknown generator")
                if self.degrees[k] != self.degrees[i] + self.degrees[j]:
                    raise RingPresentationError(
                        f"{self.names[i]}·{self.names[j]} has a term {self.names[k]} of the wrong degree"
                    )
            sign = -1 if self.degrees[i] * self.degrees[j] % 2 else 1
            swapped = self.product(j, i)
            if {k: sign * c for k, c in value.items()} != swapped:
                raise RingPresentationError(
                    f"{self.names[i]}·{self.names[j]} violates graded commutativity"
                )
        for i, j, k in cartesian(range(n), repeat=3):
            left = self.multiply(self.product(i, j), {k: 1})
            right = self.multiply({i: 1}, self.product(j, k))
            if left != right:
                raise RingPresentationError(
                    f"Associativity fails on ({self.names[i]}, {self.names[j]}, {self.names[k]})"
                )

    def suspended(self, t: int) -> "GradedRing":
        """Reduced cohomology of the t-fold suspension: degrees +t, all products zero."""
        if t == 0:
            return self
        return GradedRing(list(self.names), [d + t for d in self.degrees], {})


@dataclass(frozen=True)
class ConePair:
    """(CX, X) described through the reduced cohomology ring of X."""
    ring: GradedRing
    name: str = "cone"

    def label(self) -> str:
        return f"cone:{self.name}"


Descriptor = Union[DiskSphere, SimplicialPair, ConePair]


@dataclass
class PairFamily:
    descriptors: Tuple[Descriptor, ...]
    suspension: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        self.descriptors = tuple(self.descriptors)
        if self.suspension is not None:
            self.suspension = tuple(self.suspension)
            if len(self.suspension) != len(self.descriptors):
                raise DimensionError(
                    f"Suspension vector has length {len(self.suspension)}, expected {len(self.descriptors)}"
                )
            if any(t < 0 for t in self.suspension):
                raise PreconditionError("Suspension shifts must be nonnegative")
        kinds = {type(d) for d in self.descriptors}
        if ConePair in kinds and len(kinds) > 1:
            raise UnsupportedFamilyError("Cone pairs cannot be mixed with other descriptors")

    @classmethod
    def disk_sphere(cls, n: Union[int, Sequence[int]], m: int, suspension=None) -> "PairFamily":
        ns = [n] * m if isinstance(n, int) else list(n)
        return cls(tuple(DiskSphere(k) for k in ns), suspension)

    @property
    def m(self) -> int:
        return len(self.descriptors)

    @property
    def shifts(self) -> Tuple[int, ...]:
        return self.suspension or (0,) * self.m

    @property
    def kind(self) -> str:
        kinds = {type(d) for d in self.descriptors}
        if kinds <= {DiskSphere}:
            return "disk-sphere"
        if kinds == {ConePair}:
            return "cone"
        return "simplicial"

    def check_length(self, m: int):
        if self.m != m:
            raise DimensionError(f"Pair family has {self.m} descriptors but K has {m} vertices")

    def effective(self) -> "PairFamily":
        """The family with the suspension vector folded into each descriptor."""
        if not any(self.shifts):
            return PairFamily(self.descriptors)
        folded = []
        for d, t in zip(self.descriptors, self.shifts):
            if isinstance(d, DiskSphere):
                folded.append(DiskSphere(d.n + t))
            elif isinstance(d, SimplicialPair):
                folded.append(d.suspended(t))
            else:
                folded.append(ConePair(d.ring.suspended(t), d.name))
        return PairFamily(tuple(folded))

    def is_suspension_factor(self, i: int) -> bool:
        """Vertex i (1-based) carries a pair whose reduced diagonal is null-homotopic."""
        d, t = self.descriptors[i - 1], self.shifts[i - 1]
        return t >= 1 or (isinstance(d, DiskSphere) and d.n >= 2)

    def sphere_dims(self) -> Dict[int, int]:
        """N_i = n_i - 1 of the effective disk-sphere family."""
        family = self.effective()
        if family.kind != "disk-sphere":
            raise UnsupportedFamilyError(f"{family.kind} family has no disk dimensions")
        return {i: d.n - 1 for i, d in enumerate(family.descriptors, start=1)}

    def shift(self, I: IndexSet) -> int:
        """Total-degree shift of the I-summand: Σ_{i∈I}(n_i - 1) + 1."""
        dims = self.sphere_dims()
        return sum(dims[i] for i in I) + 1

    def label(self) -> str:
        labels = [d.label() for d in self.descriptors]
        text = labels[0] if len(set(labels)) == 1 and labels else "[" + ",".join(labels) + "]"
        if self.suspension is not None:
            text += ";suspend:[" + ",".join(map(str, self.suspension)) + "]"
        return text


def suspension_offsets(I: Iterable[int], dims: Mapping[int, int]) -> Dict[int, int]:
    """a_j = Σ_{l∈I, l<j} N_l for every j in I."""
    offsets, running = {}, 0
    for j in sorted(I):
        offsets[j] = running
        running += dims[j]
    return offsets


def epsilon_sign(I: Iterable[int], sigma: Iterable[int], dims: Mapping[int, int]) -> int:
    """(-1)^{Σ_{j∈σ} a_j}, the sign attached to the face σ ⊆ I by the suspension cochain map."""
    offsets = suspension_offsets(I, dims)
    return -1 if sum(offsets[j] for j in sigma) % 2 else 1


def disjoint_sign_exponent(J: Iterable[int], L: Iterable[int], q: int, dims: Mapping[int, int]) -> int:
    """c(J,L) + (q+1)·N(J) for a product of a J-class with an L-class of internal degree q."""
    J, L = list(J), list(L)
    crossing = sum(dims[j] * dims[l] for j in J for l in L if l < j)
    return crossing + (q + 1) * sum(dims[j] for j in J)


def cone_sign_exponent(J: Sequence[int], L: Sequence[int], x_degrees: Mapping[int, int],
                       y_degrees: Mapping[int, int], q_b: int) -> int:
    """(q_b+1)·|x| + Σ_{j∈J,l∈L,l<j}|x_j||y_l| for swapping the X-factors past the real part."""
    total_x = sum(x_degrees[j] for j in J)
    crossing = sum(x_degrees[j] * y_degrees[l] for j in J for l in L if l < j)
    return (q_b + 1) * total_x + crossing
