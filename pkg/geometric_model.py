"""
Explicit simplicial models of polyhedral products and their smash summands.

Products are triangulated by staircase chains of grid tuples, so every
coordinate projection is simplicial. Smash summands are kept as relative
cochains that vanish on the fat wedge. The models serve as an independent
oracle for the decomposition and the star product, and as the production
path for products that have no combinatorial formula.
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from itertools import product as cartesian
from typing import Dict, List, Optional, Sequence, Tuple

from cohomology import Cochain, CochainComplex, CohomologyBasis, Simplex, cup_product
from complex_core import IndexSet, SimplicialComplex, full_subcomplex, subsets
from config import compute_config
from errors import BudgetExceededError, UnsupportedFamilyError, VerificationFailure
from exact_linalg import ZZ, CoefficientRing, IntMatrix, columns_matrix, rank_mod_p, rank_over_rationals, solve_in_image
from pairs import DiskSphere, PairFamily, SimplicialPair, epsilon_sign

logger = logging.getLogger(__name__)


@dataclass
class FactorModel:
    """One triangulated pair (X, A) with its basepoint and, for disks, the cochains L and T with δL = T."""
    X: SimplicialComplex
    A: SimplicialComplex
    basepoint: Optional[int]
    name: str
    dim: Optional[int] = None
    sphere_cochain: Cochain = field(default_factory=dict)
    disk_cochain: Cochain = field(default_factory=dict)

    @classmethod
    def disk(cls, n: int) -> "FactorModel":
        """The n-simplex on vertices 1..n+1 relative to its boundary, based at vertex 1."""
        top = tuple(range(1, n + 2))
        X = SimplicialComplex.from_facets(n + 1, [top])
        A = SimplicialComplex.from_facets(n + 1, list(combinations(top, n)))
        return cls(X, A, 1, f"D{n}", n - 1, {top[1:]: 1}, {top: 1})

    @classmethod
    def of(cls, descriptor) -> "FactorModel":
        if isinstance(descriptor, DiskSphere):
            return cls.disk(descriptor.n)
        if isinstance(descriptor, SimplicialPair):
            return cls(descriptor.X, descriptor.A, descriptor.basepoint, descriptor.name)
        raise UnsupportedFamilyError(f"{type(descriptor).__name__} has no simplicial model")

    @property
    def vertices(self) -> Tuple[int, ...]:
        return self.X.vertices


@dataclass
class TriangulatedModel:
    """
    Staircase model of Z(K; (X, A)) over the vertices of K.
    When index is set, the model stands for the smash summand of K_I and
    the fat wedge is collapsed.
    """
    complex: SimplicialComplex
    factors: Tuple[FactorModel, ...]
    simplices: List[Simplex]
    index: Optional[IndexSet] = None
    _cochains: Dict[int, CochainComplex] = field(default_factory=dict, repr=False)

    @property
    def smash(self) -> bool:
        return self.index is not None

    def __len__(self) -> int:
        return len(self.simplices)

    @property
    def dimension(self) -> int:
        return max((len(s) - 1 for s in self.simplices), default=-1)

    @property
    def vertices(self) -> List[Tuple[int, ...]]:
        return [s[0] for s in self.simplices if len(s) == 1]

    def in_fat_wedge(self, s: Simplex) -> bool:
        for k, factor in enumerate(self.factors):
            if factor.basepoint is not None and all(w[k] == factor.basepoint for w in s):
                return True
        return False

    def collapsed(self) -> List[Simplex]:
        return [s for s in self.simplices if self.in_fat_wedge(s)] if self.smash else []

    def cochains(self, ring: CoefficientRing = ZZ) -> CochainComplex:
        if ring.p not in self._cochains:
            excluded = self.in_fat_wedge if self.smash else None
            self._cochains[ring.p] = CochainComplex(self.simplices, ring, augmented=False, excluded=excluded)
        return self._cochains[ring.p]

    def betti_profile(self, ring: CoefficientRing = ZZ) -> Dict[int, Tuple[int, Tuple[int, ...]]]:
        return self.cochains(ring).betti_profile()


def check_family_budget(family: PairFamily, ring: CoefficientRing, m: int):
    """Vertex-count limits per family; explicit simplicial pairs are bounded by the simplex budget alone."""
    if not compute_config["enforce_family_budget"]:
        return
    if any(isinstance(d, SimplicialPair) for d in family.descriptors):
        return
    top = max((d.n for d in family.descriptors), default=1)
    if top == 1:
        limit = 6
    elif top == 2:
        limit = 5 if ring.is_field else 4
    else:
        limit = 3
    if m > limit:
        raise BudgetExceededError(
            f"Geometric model for disks up to dimension {top} over {ring.label} is limited to m <= {limit}, got m = {m}",
            size=m, budget=limit,
        )


def _staircase(K: SimplicialComplex, factors: Sequence[FactorModel], budget: int) -> List[Simplex]:
    """Chains of grid tuples, increasing in product order, lying in some D(σ)."""

    def support(projections) -> Tuple[int, ...]:
        return tuple(k + 1 for k, (p, f) in enumerate(zip(projections, factors)) if p not in f.A)

    vertices = []
    for w in cartesian(*(f.vertices for f in factors)):
        if support(tuple((x,) for x in w)) in K:
            vertices.append(w)
    successors = {
        w: [u for u in vertices if u != w and all(a <= b for a, b in zip(w, u))]
        for w in vertices
    }
    simplices: List[Simplex] = []
    stack = [((w,), tuple((x,) for x in w)) for w in reversed(vertices)]
    while stack:
        chain, projections = stack.pop()
        simplices.append(chain)
        if len(simplices) > budget:
            raise BudgetExceededError(
                f"Triangulated model exceeds the budget of {budget} simplices", size=len(simplices), budget=budget
            )
        for u in reversed(successors[chain[-1]]):
            extended = tuple(p if p[-1] == x else p + (x,) for p, x in zip(projections, u))
            if all(p in f.X for p, f in zip(extended, factors)) and support(extended) in K:
                stack.append((chain + (u,), extended))
    return simplices


def _factors(family: PairFamily) -> Tuple[FactorModel, ...]:
    if family.kind == "cone":
        raise UnsupportedFamilyError("Cone pairs are given by a ring presentation and have no geometric model")
    factors = tuple(FactorModel.of(d) for d in family.descriptors)
    for i, f in enumerate(factors, start=1):
        if f.basepoint is None:
            logger.warning(f"Pair at vertex {i} has empty A; using a disjoint basepoint for the smash summands")
    return factors


def build_model(K: SimplicialComplex, P: PairFamily, ring: CoefficientRing = ZZ,
                budget: Optional[int] = None) -> TriangulatedModel:
    """Staircase triangulation of the whole polyhedral product.

    Raises BudgetExceededError once the chain enumeration passes the budget
    (the configured one when budget is None).
    """
    P.check_length(K.m)
    family = P.effective()
    factors = _factors(family)
    check_family_budget(family, ring, K.m)
    simplices = _staircase(K, factors, budget or compute_config["simplex_budget"])
    logger.info(f"Built model of Z(K) with {len(simplices)} simplices over {K.m} factors")
    return TriangulatedModel(K, factors, simplices)


def build_smash_model(K: SimplicialComplex, P: PairFamily, I: IndexSet, ring: CoefficientRing = ZZ,
                      budget: Optional[int] = None) -> TriangulatedModel:
    P.check_length(K.m)
    family = P.effective()
    factors = _factors(family)
    check_family_budget(family, ring, len(I))
    local = tuple(factors[i - 1] for i in I)
    K_I = full_subcomplex(K, I)
    simplices = _staircase(K_I, local, budget or compute_config["simplex_budget"])
    logger.debug(f"Built smash model for I={I.label()} with {len(simplices)} simplices")
    return TriangulatedModel(K_I, local, simplices, I)


def projection_pullback(total: TriangulatedModel, smash: TriangulatedModel, u: Cochain, degree: int,
                        ring: CoefficientRing = ZZ) -> Cochain:
    """Pull a relative cocycle of the I-smash model back along the coordinate projection onto I."""
    coords = [i - 1 for i in smash.index]
    result: Cochain = {}
    if not u:
        return result
    for s in total.cochains(ring).basis.get(degree, []):
        image = tuple(tuple(w[c] for c in coords) for w in s)
        if len(set(image)) < len(image):
            continue
        value = ring.reduce(u.get(image, 0))
        if value:
            result[s] = value
    return result


def _cross_value(s: Simplex, coords: Sequence[int], pieces: Sequence[Tuple[int, Cochain]]) -> int:
    value, start = 1, 0
    for coord, (d, x) in zip(coords, pieces):
        projected = tuple(w[coord] for w in s[start:start + d + 1])
        if len(set(projected)) != len(projected):
            return 0
        c = x.get(projected)
        if not c:
            return 0
        value *= c
        start += d
    return value


def suspension_lift(model: TriangulatedModel, coords: Sequence[int], face_cochain: Cochain, q: int,
                    ring: CoefficientRing = ZZ) -> Cochain:
    """
    Image of a cochain on K_I (local faces, internal degree q) under the
    cochain map σ ↦ ε(σ)·×_k (T_k if k∈σ else L_k), realized on the model
    through the coordinates listed in coords (0-based, in the order of I).
    """
    factors = [model.factors[c] for c in coords]
    if any(f.dim is None for f in factors):
        raise UnsupportedFamilyError("Suspension lift needs disk-sphere factors")
    dims = {k: f.dim for k, f in enumerate(factors, start=1)}
    local = list(range(1, len(factors) + 1))
    terms = []
    for sigma, c in face_cochain.items():
        pieces = [(f.dim + 1, f.disk_cochain) if k in sigma else (f.dim, f.sphere_cochain)
                  for k, f in enumerate(factors, start=1)]
        terms.append((epsilon_sign(local, sigma, dims) * c, pieces))
    degree = q + sum(dims.values()) + 1
    result: Cochain = {}
    for s in model.cochains(ring).basis.get(degree, []):
        value = ring.reduce(sum(coeff * _cross_value(s, coords, pieces) for coeff, pieces in terms))
        if value:
            result[s] = value
    return result


def lift_generator(total: TriangulatedModel, module, generator, ring: CoefficientRing = ZZ) -> Cochain:
    """Representative on the total model of a decomposition generator."""
    summand = module.summands[generator.summand]
    cochain = summand.basis.generators[generator.position]
    if summand.source == "geometric":
        return projection_pullback(total, summand.model, cochain, summand.degree, ring)
    if summand.source != "combinatorial":
        raise UnsupportedFamilyError(f"Summands of kind {summand.source} cannot be lifted")
    return suspension_lift(total, [i - 1 for i in summand.index], cochain, summand.internal, ring)


class LiftedDecomposition:
    """Decomposition generators carried to the total model, with the change of basis they define."""

    def __init__(self, total: TriangulatedModel, module, ring: CoefficientRing = ZZ):
        self.total = total
        self.module = module
        self.ring = ring
        self.cochains = total.cochains(ring)
        self.lifts = [lift_generator(total, module, g, ring) for g in module.generators]
        self.by_degree: Dict[int, List[int]] = {}
        for k, g in enumerate(module.generators):
            self.by_degree.setdefault(g.degree, []).append(k)
        self._matrices: Dict[Tuple[int, bool], IntMatrix] = {}

    def basis(self, degree: int) -> CohomologyBasis:
        return self.cochains.cohomology(degree)

    def coordinates(self, k: int) -> List[int]:
        g = self.module.generators[k]
        return self.basis(g.degree).coordinates(self.lifts[k])

    def matrix(self, degree: int, with_torsion: bool = True) -> IntMatrix:
        """Columns: total-basis coordinates of the lifts in this degree, then d·e_k for torsion rows."""
        key = (degree, with_torsion)
        if key not in self._matrices:
            basis = self.basis(degree)
            columns = [dict(enumerate(self.coordinates(k))) for k in self.by_degree.get(degree, [])]
            if with_torsion:
                columns += [{row: d} for row, d in enumerate(basis.orders) if d]
            self._matrices[key] = columns_matrix(basis.rank, columns)
        return self._matrices[key]

    def express(self, cochain: Cochain, degree: int) -> Optional[Dict[int, int]]:
        """Coefficients of a total-model cocycle on the lifted generators, or None if it is not reached."""
        target = self.basis(degree).coordinates(cochain)
        if not any(target):
            return {}
        solution = solve_in_image(self.matrix(degree), target, self.ring)
        if solution is None:
            return None
        result = {}
        for k, value in zip(self.by_degree.get(degree, []), solution):
            order = self.module.generators[k].order
            value = value % order if order else self.ring.reduce(value)
            if value:
                result[k] = value
        return result

    def product(self, a: int, b: int) -> Dict[int, int]:
        ga, gb = self.module.generators[a], self.module.generators[b]
        cup = cup_product(self.cochains, self.lifts[a], ga.degree, self.lifts[b], gb.degree)
        degree = ga.degree + gb.degree
        expansion = self.express(cup, degree)
        if expansion is None:
            raise VerificationFailure(
                f"Cup product of {ga.label()} and {gb.label()} leaves the span of the lifted generators",
                report={"pair": [ga.label(), gb.label()], "cup": _witness(cup)},
            )
        return expansion

    def is_isomorphism(self, degree: int) -> Tuple[bool, str, Optional[dict]]:
        """Whether the lifted generators of this degree give a basis of H^degree of the model.

        Returns:
            (passed, detail, witness); the witness names what went wrong and
            is None on success.
        """
        basis = self.basis(degree)
        indices = self.by_degree.get(degree, [])
        orders = sorted(self.module.generators[k].order for k in indices)
        if orders != sorted(basis.orders):
            return False, f"generator orders {orders} against {sorted(basis.orders)}", {
                "generator_orders": orders, "model_orders": sorted(basis.orders)}
        lifts = self.matrix(degree, with_torsion=False)
        if self.ring.is_field:
            rank = rank_mod_p(lifts, self.ring.p)
            if rank != basis.rank:
                return False, f"rank {rank} of {basis.rank}", {"rank": rank, "model_rank": basis.rank}
            return True, f"rank {rank} of {basis.rank}", None
        # torsion rows carry no rational rank
        free_rows = [r for r, d in enumerate(basis.orders) if d == 0]
        rank = rank_over_rationals(lifts.select_rows(free_rows))
        if rank != basis.free_rank:
            return False, f"rational rank {rank} of {basis.free_rank}", {
                "rational_rank": rank, "model_free_rank": basis.free_rank}
        for k in indices:
            d = self.module.generators[k].order
            coords = self.coordinates(k)
            if d and any(d * c % e if e else d * c for c, e in zip(coords, basis.orders)):
                label = self.module.generators[k].label()
                return False, f"{label} has order {d} but its lift does not", {
                    "generator": label, "order": d, "class": coords}
        # a surjection between isomorphic finitely generated groups is an isomorphism
        full = self.matrix(degree)
        for row in range(basis.rank):
            unit = [1 if k == row else 0 for k in range(basis.rank)]
            if solve_in_image(full, unit, self.ring) is None:
                return False, f"basis class {row} is not reached", {
                    "uncovered_class": row, "generator": _witness(basis.generators[row])}
        return True, f"free rank {rank}, torsion {basis.torsion}", None


def _witness(cochain: Cochain, limit: int = 8) -> List[str]:
    return [f"{s}: {v}" for s, v in sorted(cochain.items())[:limit]]


@dataclass
class CheckResult:
    label: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.label}" + (f": {self.detail}" if self.detail else "")


@dataclass
class VerificationReport:
    name: str
    checks: List[CheckResult] = field(default_factory=list)
    counterexample: Optional[dict] = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, label: str, passed: bool, detail: str = "") -> bool:
        self.checks.append(CheckResult(label, passed, detail))
        return passed

    def lines(self) -> List[str]:
        verdict = "PASS" if self.passed else "FAIL"
        return [f"{self.name}: {verdict}"] + ["  " + c.line() for c in self.checks]

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "checks": [{"label": c.label, "passed": c.passed, "detail": c.detail} for c in self.checks],
            "counterexample": self.counterexample,
        }


def _format_profile(profile: Dict[int, Tuple[int, Tuple[int, ...]]]) -> str:
    return ", ".join(f"{n}:{r}" + (f"+Z/{list(t)}" if t else "") for n, (r, t) in sorted(profile.items())) or "0"


def verify_splitting(K: SimplicialComplex, P: PairFamily, R: CoefficientRing = ZZ, module=None,
                     budget: Optional[int] = None) -> VerificationReport:
    """Total model cohomology against the sum of the summands, degree by degree.

    Args:
        K: the simplicial complex.
        P: the pair family; cone families are rejected by the model builder.
        R: coefficients.
        module: a decomposition to reuse; computed when omitted.
        budget: simplex budget for every model built here.

    Returns:
        The report. On failure its counterexample records the first check
        that failed, with both profiles and the offending degree or summand.
    """
    from decomposition import decompose

    module = module or decompose(K, P, R)
    total = build_model(K, P, R, budget)
    report = VerificationReport("splitting")

    def record(check: str, **details):
        if report.counterexample is None:
            report.counterexample = {"check": check, **details}

    # Compare the whole model with the summed decomposition
    total_profile = total.betti_profile(R)
    summed = module.betti()
    if not report.add("total model against decomposition", total_profile == summed,
                      f"model {_format_profile(total_profile)}; summands {_format_profile(summed)}"):
        differing = sorted(q for q in set(total_profile) | set(summed) if total_profile.get(q) != summed.get(q))
        record("total model against decomposition", degree=differing[0],
               model_profile=_format_profile(total_profile), summand_profile=_format_profile(summed))

    # Check each smash summand on its own
    if P.effective().kind == "disk-sphere":
        for I in subsets(K.m):
            smash = build_smash_model(K, P, I, R, budget)
            expected = module.betti(index=I)
            found = smash.betti_profile(R)
            if found != expected:
                report.add(f"smash summand {I.label()}", False,
                           f"model {_format_profile(found)}; summand {_format_profile(expected)}")
                record("smash summand", index=I.label(),
                       model_profile=_format_profile(found), summand_profile=_format_profile(expected))
        if report.passed:
            report.add("smash summands against shifted full subcomplexes", True)

    # Carry the generators over and test bijectivity per degree
    lifted = LiftedDecomposition(total, module, R)
    for degree in total.cochains(R).degrees:
        if degree in total_profile or lifted.by_degree.get(degree):
            ok, detail, witness = lifted.is_isomorphism(degree)
            report.add(f"projections jointly bijective in degree {degree}", ok, detail)
            if not ok:
                record("projections jointly bijective", degree=degree, **witness)
    logger.info(f"Splitting check {'passed' if report.passed else 'failed'} with {len(report.checks)} checks")
    return report


def direct_ring(K: SimplicialComplex, P: PairFamily, R: CoefficientRing = ZZ, module=None,
                pairs: Optional[Sequence[Tuple[int, int]]] = None, budget: Optional[int] = None,
                lifted: Optional[LiftedDecomposition] = None) -> Dict[Tuple[int, int], Dict[int, int]]:
    """
    Products of decomposition generators computed by cup products on the
    total model, expanded back in the lifted generators.
    """
    from decomposition import decompose

    if lifted is None:
        module = module or decompose(K, P, R)
        lifted = LiftedDecomposition(build_model(K, P, R, budget), module, R)
    count = len(lifted.module.generators)
    wanted = pairs if pairs is not None else [(a, b) for a in range(count) for b in range(count)]
    table = {(a, b): lifted.product(a, b) for a, b in wanted}
    logger.info(f"Computed {len(table)} products on the geometric model")
    return table


def verify_eta_ring(K: SimplicialComplex, P: PairFamily, R: CoefficientRing = ZZ, star=None,
                    budget: Optional[int] = None) -> VerificationReport:
    """Cup products of lifted generators against lifts of the star products."""
    from star_ring import multiplication_table

    # Build the star table and lift its generators
    star = star or multiplication_table(K, P, R, budget=budget)
    module = star.module
    lifted = LiftedDecomposition(build_model(K, P, R, budget), module, R)
    report = VerificationReport("ring isomorphism")
    generators = module.generators
    for a in range(len(generators)):
        for b in range(a, len(generators)):
            ga, gb = generators[a], generators[b]
            cup = cup_product(lifted.cochains, lifted.lifts[a], ga.degree, lifted.lifts[b], gb.degree)
            expected: Cochain = {}
            for k, c in star.table.get((a, b), {}).items():
                for s, v in lifted.lifts[k].items():
                    expected[s] = R.reduce(expected.get(s, 0) + c * v)
            degree = ga.degree + gb.degree
            difference = {s: R.reduce(cup.get(s, 0) - expected.get(s, 0)) for s in set(cup) | set(expected)}
            ok = lifted.basis(degree).is_zero_class(difference)
            label = f"{ga.label()} * {gb.label()} [{star.provenance.get((a, b), 'zero')}]"
            report.add(label, ok)
            logger.debug(f"Compared {label}: {'agree' if ok else 'differ'}")
            if not ok and report.counterexample is None:
                report.counterexample = {
                    "pair": [ga.label(), gb.label()],
                    "star_product": {generators[k].label(): c for k, c in star.table.get((a, b), {}).items()},
                    "cup_class": lifted.basis(degree).coordinates(cup),
                    "star_class": lifted.basis(degree).coordinates(expected),
                    "cup_witness": _witness(cup),
                    "star_witness": _witness(expected),
                }
    logger.info(f"Ring check {'passed' if report.passed else 'failed'} on {len(report.checks)} generator pairs")
    return report
