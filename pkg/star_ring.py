"""
The star product on the decomposition and the full multiplication table.

Products of generators at J and L land in the J∪L summand. Disjoint
indices use the join inclusion of K_{J∪L} into K_J * K_L, overlapping
indices vanish on suspension factors, cone pairs combine the real part
with the products of the given rings, and everything else is computed on
the geometric model.
"""

import logging
from dataclasses import dataclass, field
from itertools import product as cartesian
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from cohomology import Cochain, pullback
from complex_core import IndexSet, SimplicialComplex, canonical_join_inclusion
from decomposition import DecompositionModule, Generator, decompose
from errors import DimensionError, PreconditionError, VerificationFailure
from exact_linalg import ZZ, CoefficientRing
from pairs import PairFamily, cone_sign_exponent, disjoint_sign_exponent

logger = logging.getLogger(__name__)

Coefficients = Dict[int, int]


def star_disjoint(K: SimplicialComplex, J: IndexSet, L: IndexSet, u: Cochain, p: int, v: Cochain, q: int,
                  dims: Optional[Mapping[int, int]] = None, ring: CoefficientRing = ZZ) -> Cochain:
    """
    Representative on K_{J∪L} (local faces, internal degree p+q+1) of the
    product of a K_J cocycle of degree p with a K_L cocycle of degree q.
    dims holds n_i - 1 per vertex; it defaults to the (D¹, S⁰) case.
    """
    inclusion = canonical_join_inclusion(K, J, L)
    offset = len(J)
    joined: Cochain = {}
    for a, x in u.items():
        if len(a) != p + 1:
            continue
        for b, y in v.items():
            if len(b) == q + 1:
                joined[a + tuple(k + offset for k in b)] = x * y
    product = pullback(inclusion, joined, p + q + 1, ring)
    dims = dims or {i: 0 for i in range(1, K.m + 1)}
    if disjoint_sign_exponent(J, L, q, dims) % 2:
        product = {s: ring.reduce(-c) for s, c in product.items()}
    return product


@dataclass
class RingElement:
    """Finite combination of generators of a StarRing."""
    ring: "StarRing"
    coefficients: Coefficients = field(default_factory=dict)

    def __post_init__(self):
        self.coefficients = self.ring.normalize(self.coefficients)

    @property
    def components(self) -> Dict[Tuple[IndexSet, int], Coefficients]:
        parts: Dict[Tuple[IndexSet, int], Coefficients] = {}
        for k, c in self.coefficients.items():
            g = self.ring.generators[k]
            parts.setdefault((g.index, g.degree), {})[k] = c
        return parts

    def is_zero(self) -> bool:
        return not self.coefficients

    def __eq__(self, other) -> bool:
        return isinstance(other, RingElement) and self.ring is other.ring and self.coefficients == other.coefficients

    def __add__(self, other: "RingElement") -> "RingElement":
        self.ring.check_member(other)
        total = dict(self.coefficients)
        for k, c in other.coefficients.items():
            total[k] = total.get(k, 0) + c
        return RingElement(self.ring, total)

    def __neg__(self) -> "RingElement":
        return RingElement(self.ring, {k: -c for k, c in self.coefficients.items()})

    def __sub__(self, other: "RingElement") -> "RingElement":
        return self + (-other)

    def __rmul__(self, scalar: int) -> "RingElement":
        return RingElement(self.ring, {k: scalar * c for k, c in self.coefficients.items()})

    def __mul__(self, other):
        if isinstance(other, int):
            return other * self
        return star_product(self.ring, self, other)

    def __repr__(self) -> str:
        if not self.coefficients:
            return "0"
        return " + ".join(f"{c}*{self.ring.generators[k].label()}" for k, c in sorted(self.coefficients.items()))


@dataclass
class StarRing:
    module: DecompositionModule
    table: Dict[Tuple[int, int], Coefficients]
    provenance: Dict[Tuple[int, int], str]

    @property
    def ring(self) -> CoefficientRing:
        return self.module.ring

    @property
    def generators(self) -> List[Generator]:
        return self.module.generators

    @property
    def unit_index(self) -> int:
        for k, g in enumerate(self.generators):
            if not len(g.index):
                return k
        raise PreconditionError("Decomposition has no unit summand")

    def unit(self) -> RingElement:
        return RingElement(self, {self.unit_index: 1})

    def element(self, k: int, coefficient: int = 1) -> RingElement:
        return RingElement(self, {k: coefficient})

    def normalize(self, coefficients: Coefficients) -> Coefficients:
        result = {}
        for k, c in coefficients.items():
            order = self.generators[k].order
            c = c % order if order else self.ring.reduce(c)
            if c:
                result[k] = c
        return result

    def check_member(self, u: RingElement):
        if u.ring is not self:
            raise PreconditionError("Ring elements belong to different rings")

    def multiply_generators(self, a: int, b: int) -> Coefficients:
        return self.table.get((a, b), {})

    def _times(self, x: Coefficients, y: Coefficients) -> Coefficients:
        total: Coefficients = {}
        for a, c in x.items():
            for b, d in y.items():
                for k, e in self.multiply_generators(a, b).items():
                    total[k] = total.get(k, 0) + c * d * e
        return self.normalize(total)

    def check_properties(self, associativity: bool = True) -> List[str]:
        """Violations of the target rule, degree additivity, graded commutativity and associativity."""
        problems = []
        gens = self.generators
        n = len(gens)
        for (a, b), value in self.table.items():
            union = gens[a].index.union(gens[b].index)
            for k in value:
                if gens[k].index != union:
                    problems.append(f"{gens[a].label()}*{gens[b].label()} leaves the {union.label()} summand")
                if gens[k].degree != gens[a].degree + gens[b].degree:
                    problems.append(f"{gens[a].label()}*{gens[b].label()} breaks degree additivity")
        for a in range(n):
            for b in range(a + 1, n):
                sign = -1 if gens[a].degree * gens[b].degree % 2 else 1
                swapped = self.normalize({k: sign * c for k, c in self.multiply_generators(b, a).items()})
                if self.normalize(self.multiply_generators(a, b)) != swapped:
                    problems.append(f"{gens[a].label()} and {gens[b].label()} do not graded-commute")
        if associativity:
            for a in range(n):
                for b in range(n):
                    ab = self.multiply_generators(a, b)
                    for c in range(n):
                        left = self._times(ab, {c: 1})
                        right = self._times({a: 1}, self.multiply_generators(b, c))
                        if left != right:
                            problems.append(
                                f"({gens[a].label()}*{gens[b].label()})*{gens[c].label()} differs from the other bracketing"
                            )
        return problems

    def nonzero_products(self) -> List[Tuple[int, int, Coefficients]]:
        return [(a, b, v) for (a, b), v in sorted(self.table.items()) if v]

    def to_document(self) -> dict:
        generators = []
        for g in self.generators:
            summand = self.module.summands[g.summand]
            cochain = summand.basis.generators[g.position]
            if summand.source == "geometric":
                representative = {str(list(map(list, s))): v for s, v in sorted(cochain.items())}
            else:
                representative = {"{" + ",".join(map(str, g.index.to_global(s))) + "}": v
                                  for s, v in sorted(cochain.items())}
            generators.append({
                "label": g.label(),
                "I": list(g.index.members),
                "degree": g.degree,
                "internal_degree": g.internal,
                "order": g.order,
                "factors": list(g.factors),
                "representative": representative,
            })
        return {
            "coefficients": self.ring.label,
            "family": self.module.family.label(),
            "generators": generators,
            "products": [[a, b, k, c] for a, b, value in self.nonzero_products() for k, c in sorted(value.items())],
            "provenance": {f"{a},{b}": tag for (a, b), tag in sorted(self.provenance.items()) if tag != "unit"},
        }

    def lines(self) -> List[str]:
        gens = self.generators
        out = [f"generators ({len(gens)}):"]
        for k, g in enumerate(gens):
            torsion = f" order {g.order}" if g.order else ""
            out.append(f"  [{k}] {g.label()} degree {g.degree}{torsion}")
        out.append("products:")
        for a, b, value in self.nonzero_products():
            terms = " + ".join(f"{c}*[{k}]" for k, c in sorted(value.items()))
            out.append(f"  [{a}]*[{b}] = {terms}  ({self.provenance.get((a, b), '')})")
        return out


class _ProductEngine:
    """Computes generator products, dispatching by index overlap and pair family."""

    def __init__(self, module: DecompositionModule, budget: Optional[int] = None):
        self.module = module
        self.budget = budget
        self.K = module.complex
        self.ring = module.ring
        self.family = module.family
        self.kind = module.family.effective().kind
        self._lifted = None
        self._real_ring: Optional[StarRing] = None

    @property
    def lifted(self):
        if self._lifted is None:
            from geometric_model import LiftedDecomposition, build_model

            logger.info("Falling back to the geometric model for overlapping products")
            total = build_model(self.K, self.family, self.ring, self.budget)
            self._lifted = LiftedDecomposition(total, self.module, self.ring)
        return self._lifted

    @property
    def real_ring(self) -> StarRing:
        """The (D¹, S⁰) ring on the same K, used for the real part of cone products."""
        if self._real_ring is None:
            real = PairFamily.disk_sphere(1, self.K.m)
            self._real_ring = multiplication_table(self.K, real, self.ring, self.budget)
        return self._real_ring

    def product(self, a: int, b: int) -> Tuple[Coefficients, str]:
        ga, gb = self.module.generators[a], self.module.generators[b]
        if not len(ga.index):
            return {b: 1}, "unit"
        if not len(gb.index):
            return {a: 1}, "unit"
        if self.kind == "simplicial":
            return self.lifted.product(a, b), "geometric"
        J, L = ga.index, gb.index
        if J.isdisjoint(L):
            if self.kind == "cone":
                return cone_pair_product(self, ga, gb), "cone"
            return self._disjoint(ga, gb), "disjoint"
        if all(self.family.is_suspension_factor(i) for i in J.intersection(L)):
            return {}, "vanishing"
        if self.kind == "cone":
            return cone_pair_product(self, ga, gb), "cone"
        return self.lifted.product(a, b), "geometric"

    def _expand(self, I: IndexSet, internal: int, cochain: Cochain, factors: Tuple[int, ...] = ()) -> Coefficients:
        target = self.module.find(I, internal, factors)
        if target is None:
            return {}
        first = self.module.first_generator(target)
        coords = self.module.summands[target].basis.coordinates(cochain)
        return {first + j: c for j, c in enumerate(coords) if c}

    def _representatives(self, ga: Generator, gb: Generator):
        sa, sb = self.module.summands[ga.summand], self.module.summands[gb.summand]
        return sa.basis.generators[ga.position], sa.internal, sb.basis.generators[gb.position], sb.internal

    def _disjoint(self, ga: Generator, gb: Generator) -> Coefficients:
        u, p, v, q = self._representatives(ga, gb)
        dims = self.family.sphere_dims()
        cochain = star_disjoint(self.K, ga.index, gb.index, u, p, v, q, dims, self.ring)
        return self._expand(ga.index.union(gb.index), p + q + 1, cochain)

    def real_part(self, ga: Generator, gb: Generator) -> Tuple[int, Dict[int, int]]:
        """a ⋆ b at the (D¹, S⁰) level as (internal degree, coordinates in the K_{J∪L} basis)."""
        u, p, v, q = self._representatives(ga, gb)
        J, L = ga.index, gb.index
        I, r = J.union(L), p + q + 1
        if J.isdisjoint(L):
            cochain = star_disjoint(self.K, J, L, u, p, v, q, None, self.ring)
            target = next((k for k, s in enumerate(self.module.summands) if s.index == I and s.internal == r), None)
            if target is None:
                return r, {}
            coords = self.module.summands[target].basis.coordinates(cochain)
            return r, {j: c for j, c in enumerate(coords) if c}
        real = self.real_ring
        a = real.module.first_generator(real.module.find(J, p)) + ga.position
        b = real.module.first_generator(real.module.find(L, q)) + gb.position
        return r, {real.generators[k].position: c for k, c in real.multiply_generators(a, b).items()}


def cone_pair_product(engine: _ProductEngine, ga: Generator, gb: Generator) -> Coefficients:
    """(a⊗x)*(b⊗y) = ±(a⋆b)⊗z with z_i = x_i·y_i on J∩L."""
    J, L = ga.index, gb.index
    I = J.union(L)
    rings = {i: engine.family.effective().descriptors[i - 1].ring for i in I}
    x = dict(zip(J, ga.factors))
    y = dict(zip(L, gb.factors))
    choices = []
    for i in I:
        if i in x and i in y:
            z = {k: engine.ring.reduce(c) for k, c in rings[i].multiply({x[i]: 1}, {y[i]: 1}).items()}
            z = {k: c for k, c in z.items() if c}
            if not z:
                return {}
        else:
            z = {x[i] if i in x else y[i]: 1}
        choices.append(list(z.items()))

    r, real = engine.real_part(ga, gb)
    if not real:
        return {}
    x_degrees = {j: rings[j].degrees[x[j]] for j in J}
    y_degrees = {l: rings[l].degrees[y[l]] for l in L}
    q_b = engine.module.summands[gb.summand].internal
    sign = -1 if cone_sign_exponent(list(J), list(L), x_degrees, y_degrees, q_b) % 2 else 1

    result: Coefficients = {}
    for combo in cartesian(*choices):
        factors = tuple(k for k, _ in combo)
        weight = 1
        for _, c in combo:
            weight *= c
        target = engine.module.find(I, r, factors)
        if target is None:
            continue
        first = engine.module.first_generator(target)
        for j, c in real.items():
            result[first + j] = result.get(first + j, 0) + sign * weight * c
    return result


def star_product(S: StarRing, u: RingElement, v: RingElement) -> RingElement:
    S.check_member(u)
    S.check_member(v)
    return RingElement(S, S._times(u.coefficients, v.coefficients))


def multiplication_table(K: SimplicialComplex, P: PairFamily, R: CoefficientRing = ZZ,
                         budget: Optional[int] = None, module: Optional[DecompositionModule] = None) -> StarRing:
    """Star products of every ordered pair of generators.

    Disjoint pairs use the join pullback, overlapping pairs the vanishing rule
    or the cone formula, and the rest go to the geometric model.

    Returns:
        A StarRing with the table and where each entry came from.
    """
    module = module or decompose(K, P, R, budget)
    engine = _ProductEngine(module, budget)
    table: Dict[Tuple[int, int], Coefficients] = {}
    provenance: Dict[Tuple[int, int], str] = {}
    count = len(module.generators)
    for a in range(count):
        for b in range(count):
            value, tag = engine.product(a, b)
            table[(a, b)] = value
            provenance[(a, b)] = tag
            logger.debug(f"[{a}]*[{b}] = {value} via {tag}")
    S = StarRing(module, table, provenance)
    S.table = {key: S.normalize(value) for key, value in table.items()}
    problems = S.check_properties(associativity=False)
    if problems:
        raise VerificationFailure(f"Multiplication table is inconsistent: {problems[0]}", report={"problems": problems})
    logger.info(f"Multiplication table with {count} generators, {len(S.nonzero_products())} nonzero products")
    return S


@dataclass
class IsoVerdict:
    passed: bool
    correspondence: List[Tuple[str, str]] = field(default_factory=list)
    counterexample: Optional[dict] = None

    def lines(self) -> List[str]:
        out = [f"ungraded isomorphism: {'PASS' if self.passed else 'FAIL'}"]
        out += [f"  {a} <-> {b}" for a, b in self.correspondence]
        if self.counterexample:
            out.append(f"  counterexample: {self.counterexample}")
        return out

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "correspondence": [list(p) for p in self.correspondence],
            "counterexample": self.counterexample,
        }


def _suspended(P: PairFamily, T: Sequence[int]) -> PairFamily:
    return PairFamily(P.descriptors, tuple(a + b for a, b in zip(P.shifts, T)))


def ungraded_iso_check(K: SimplicialComplex, P: PairFamily, T: Sequence[int], T2: Sequence[int],
                       R: CoefficientRing = ZZ, budget: Optional[int] = None) -> IsoVerdict:
    """Compare the tables of Σ^T and Σ^{T'} under the generator correspondence fixing I and the internal class."""
    T, T2 = tuple(T), tuple(T2)
    if len(T) != K.m or len(T2) != K.m:
        raise DimensionError(f"Shift vectors must have length {K.m}")
    if any((a - b) % 2 for a, b in zip(T, T2)):
        raise PreconditionError(f"Shift vectors {list(T)} and {list(T2)} differ in parity")
    first = multiplication_table(K, _suspended(P, T), R, budget)
    second = multiplication_table(K, _suspended(P, T2), R, budget)
    g1, g2 = first.generators, second.generators
    verdict = IsoVerdict(True)
    if len(g1) != len(g2):
        verdict.passed = False
        verdict.counterexample = {"generator_counts": [len(g1), len(g2)]}
        return verdict
    for a, b in zip(g1, g2):
        if (a.index, a.internal, a.position, a.factors, a.order) != (b.index, b.internal, b.position, b.factors, b.order):
            verdict.passed = False
            verdict.counterexample = {"unmatched": [a.label(), b.label()]}
            return verdict
        verdict.correspondence.append((a.label(), b.label()))
    for key in sorted(first.table):
        if first.table[key] != second.table.get(key, {}):
            a, b = key
            verdict.passed = False
            verdict.counterexample = {
                "pair": [g1[a].label(), g1[b].label()],
                "first": {g1[k].label(): c for k, c in first.table[key].items()},
                "second": {g2[k].label(): c for k, c in second.table.get(key, {}).items()},
            }
            break
    logger.info(f"Ungraded comparison {'passed' if verdict.passed else 'failed'} on {len(g1)} generators")
    return verdict
