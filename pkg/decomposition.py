"""
Additive side of the splitting: the cohomology of Z(K; (X, A)) as a direct
sum over I ⊆ [m] of the cohomology of the smash summands, with total
degrees worked out per pair family.
"""

import logging
from dataclasses import dataclass, field, replace
from itertools import product as cartesian
from typing import Dict, List, Optional, Sequence, Tuple

import sympy

from cohomology import CochainComplex, CohomologyBasis
from complex_core import IndexSet, SimplicialComplex, full_subcomplex, subsets
from errors import DimensionError, PreconditionError
from exact_linalg import ZZ, CoefficientRing
from pairs import PairFamily

logger = logging.getLogger(__name__)


@dataclass
class Summand:
    """One (I, degree) piece of the decomposition."""
    index: IndexSet
    degree: int
    internal: Optional[int]
    basis: CohomologyBasis
    source: str
    factors: Tuple[int, ...] = ()
    model: object = None

    @property
    def rank(self) -> int:
        return self.basis.rank


@dataclass(frozen=True)
class Generator:
    summand: int
    position: int
    index: IndexSet
    degree: int
    internal: Optional[int]
    order: int = 0
    factors: Tuple[int, ...] = ()

    def label(self) -> str:
        text = f"{self.index.label()}^{self.degree}#{self.position}"
        if self.factors:
            text += "<" + ",".join(map(str, self.factors)) + ">"
        return text


@dataclass
class DecompositionModule:
    complex: SimplicialComplex
    family: PairFamily
    ring: CoefficientRing
    summands: List[Summand]
    suspension: Tuple[int, ...] = ()
    _generators: Optional[List[Generator]] = field(default=None, repr=False)

    @property
    def generators(self) -> List[Generator]:
        if self._generators is None:
            self._generators = [
                Generator(k, j, s.index, s.degree, s.internal, s.basis.orders[j], s.factors)
                for k, s in enumerate(self.summands)
                for j in range(s.rank)
            ]
        return self._generators

    def generators_by_degree(self) -> Dict[int, List[Generator]]:
        table: Dict[int, List[Generator]] = {}
        for g in self.generators:
            table.setdefault(g.degree, []).append(g)
        return table

    def find(self, index: IndexSet, internal: int, factors: Tuple[int, ...] = ()) -> Optional[int]:
        """Position of the summand with this index, internal degree and factor choice."""
        for k, s in enumerate(self.summands):
            if s.index == index and s.internal == internal and s.factors == factors:
                return k
        return None

    def first_generator(self, summand: int) -> int:
        for k, g in enumerate(self.generators):
            if g.summand == summand:
                return k
        raise PreconditionError(f"Summand {summand} carries no generators")

    def betti(self, index: Optional[IndexSet] = None) -> Dict[int, Tuple[int, Tuple[int, ...]]]:
        """Total degree -> (free rank, sorted torsion), optionally restricted to one I."""
        free: Dict[int, int] = {}
        torsion: Dict[int, List[int]] = {}
        for s in self.summands:
            if index is not None and s.index != index:
                continue
            free[s.degree] = free.get(s.degree, 0) + s.basis.free_rank
            torsion.setdefault(s.degree, []).extend(s.basis.torsion)
        return {
            n: (free.get(n, 0), tuple(sorted(torsion.get(n, []))))
            for n in sorted(set(free) | set(torsion))
            if free.get(n, 0) or torsion.get(n)
        }

    def reduced_betti(self) -> Dict[int, int]:
        ranks: Dict[int, int] = {}
        for s in self.summands:
            if len(s.index):
                ranks[s.degree] = ranks.get(s.degree, 0) + s.basis.free_rank
        return {n: r for n, r in sorted(ranks.items()) if r}


def _combinatorial_summands(K: SimplicialComplex, family: PairFamily, R: CoefficientRing) -> List[Summand]:
    summands = []
    cone = family.kind == "cone"
    for I in subsets(K.m):
        C = CochainComplex.from_complex(full_subcomplex(K, I), R, augmented=True)
        for q in C.degrees:
            basis = C.cohomology(q)
            if not basis.rank:
                continue
            if not cone:
                summands.append(Summand(I, q + family.shift(I), q, basis, "combinatorial"))
                continue
            rings = [family.descriptors[i - 1].ring for i in I]
            for choice in cartesian(*(range(len(r)) for r in rings)):
                degree = q + 1 + sum(r.degrees[c] for r, c in zip(rings, choice))
                summands.append(Summand(I, degree, q, basis, "cone", tuple(choice)))
    return summands


def _geometric_summands(K: SimplicialComplex, family: PairFamily, R: CoefficientRing,
                        budget: Optional[int]) -> List[Summand]:
    from geometric_model import build_smash_model

    summands = []
    for I in subsets(K.m):
        model = build_smash_model(K, family, I, R, budget)
        C = model.cochains(R)
        for n in C.degrees:
            basis = C.cohomology(n)
            if basis.rank:
                summands.append(Summand(I, n, None, basis, "geometric", model=model))
    return summands


def decompose(K: SimplicialComplex, P: PairFamily, R: CoefficientRing = ZZ,
              budget: Optional[int] = None) -> DecompositionModule:
    """Wedge decomposition of the cohomology of Z(K; P) into full-subcomplex summands.

    Args:
        K: the simplicial complex on m vertices.
        P: a family of m pairs; suspension shifts are folded in first.
        R: coefficients.
        budget: simplex budget, used only by families that need models.

    Returns:
        The module with one summand per (I, degree), each carrying a basis.
    """
    P.check_length(K.m)
    family = P.effective()
    if family.kind == "simplicial":
        summands = _geometric_summands(K, family, R, budget)
    else:
        summands = _combinatorial_summands(K, family, R)
    module = DecompositionModule(K, P, R, summands, P.shifts)
    logger.info(f"Decomposed {family.kind} family over {R.label}: {len(summands)} summands, "
                f"{len(module.generators)} generators")
    return module


def poincare_series(D: DecompositionModule) -> sympy.Poly:
    t = sympy.Symbol("t")
    ranks = {}
    for s in D.summands:
        ranks[s.degree] = ranks.get(s.degree, 0) + s.basis.free_rank
    return sympy.Poly(sum((r * t ** n for n, r in ranks.items()), sympy.Integer(0)), t)


def regrade(D: DecompositionModule, T: Sequence[int]) -> DecompositionModule:
    """Move every I-summand up by Σ_{i∈I} t_i."""
    T = tuple(T)
    if len(T) != D.complex.m:
        raise DimensionError(f"Shift vector has length {len(T)}, expected {D.complex.m}")
    if any(t < 0 for t in T):
        raise PreconditionError("Shift vector entries must be nonnegative")
    summands = [replace(s, degree=s.degree + sum(T[i - 1] for i in s.index)) for s in D.summands]
    previous = D.suspension or (0,) * D.complex.m
    total = tuple(a + b for a, b in zip(previous, T))
    family = PairFamily(D.family.descriptors, total if any(total) else None)
    return DecompositionModule(D.complex, family, D.ring, summands, total)


def betti_table(D: DecompositionModule) -> List[dict]:
    """One row per (I, degree) ordered by |I|, I and degree."""
    rows: Dict[Tuple, dict] = {}
    for s in D.summands:
        key = (s.index.sort_key(), s.degree)
        row = rows.setdefault(key, {"I": s.index.label(), "degree": s.degree, "rank": 0, "torsion": []})
        row["rank"] += s.basis.free_rank
        row["torsion"] = sorted(row["torsion"] + s.basis.torsion)
    return [rows[k] for k in sorted(rows)]


def hochster_table(D: DecompositionModule) -> Dict[Tuple[int, int], int]:
    """Free ranks bigraded by (|I|, internal degree); summands without one use their total degree."""
    table: Dict[Tuple[int, int], int] = {}
    for s in D.summands:
        key = (len(s.index), s.internal if s.internal is not None else s.degree)
        table[key] = table.get(key, 0) + s.basis.free_rank
    return {k: v for k, v in sorted(table.items()) if v}
