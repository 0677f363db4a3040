"""
Exact linear algebra over the integers and prime fields.

Smith normal form with unimodular transforms, ranks modulo p and solving
M·x = b are all done on sparse dict-of-rows storage with Python integers,
so no entry ever overflows.
"""

import logging
import heapq
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from sympy import isprime

from errors import DimensionError, PreconditionError

logger = logging.getLogger(__name__)

Vector = List[int]


@dataclass(frozen=True)
class CoefficientRing:
    """The integers (p = 0) or the field with p elements."""
    p: int = 0

    def __post_init__(self):
        if self.p != 0 and not isprime(self.p):
            raise PreconditionError(f"Coefficient modulus {self.p} is not prime")

    @classmethod
    def parse(cls, text: str) -> "CoefficientRing":
        text = text.strip()
        if text in ("Z", "ZZ"):
            return cls(0)
        if text.startswith("Zp:") or text.startswith("GF:"):
            try:
                return cls(int(text.split(":", 1)[1]))
            except ValueError as e:
                raise PreconditionError(f"Invalid coefficient ring {text!r}") from e
        raise PreconditionError(f"Invalid coefficient ring {text!r}; use Z or Zp:<prime>")

    @property
    def is_field(self) -> bool:
        return self.p != 0

    @property
    def label(self) -> str:
        return f"Zp:{self.p}" if self.p else "Z"

    def reduce(self, x: int) -> int:
        return x % self.p if self.p else x

    def inverse(self, x: int) -> int:
        if self.p:
            return pow(x % self.p, -1, self.p)
        if x in (1, -1):
            return x
        raise PreconditionError(f"{x} is not a unit in Z")

    def quotient(self, a: int, b: int) -> int:
        """q with |a - q·b| minimal in the Euclidean sense (exact over a field)."""
        if self.p:
            return a * pow(b, -1, self.p) % self.p
        return a // b


ZZ = CoefficientRing(0)


class IntMatrix:
    """Sparse matrix of arbitrary-precision integers; zero entries are never stored."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Optional[Dict[Tuple[int, int], int]] = None):
        self.rows = rows
        self.cols = cols
        self.entries: Dict[Tuple[int, int], int] = {}
        for (i, j), v in (entries or {}).items():
            if not (0 <= i < rows and 0 <= j < cols):
                raise DimensionError(f"Entry ({i}, {j}) outside a {rows}x{cols} matrix")
            if v:
                self.entries[(i, j)] = v

    @classmethod
    def from_dense(cls, data: Sequence[Sequence[int]]) -> "IntMatrix":
        rows = len(data)
        cols = len(data[0]) if rows else 0
        return cls(rows, cols, {(i, j): v for i, row in enumerate(data) for j, v in enumerate(row)})

    @classmethod
    def from_row_dicts(cls, cols: int, rows: Sequence[Dict[int, int]]) -> "IntMatrix":
        return cls(len(rows), cols, {(i, j): v for i, row in enumerate(rows) for j, v in row.items()})

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, {(i, i): 1 for i in range(n)})

    @classmethod
    def zero(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols)

    def __eq__(self, other) -> bool:
        return (isinstance(other, IntMatrix) and self.rows == other.rows
                and self.cols == other.cols and self.entries == other.entries)

    def __repr__(self) -> str:
        return f"IntMatrix({self.rows}x{self.cols}, nnz={len(self.entries)})"

    def __getitem__(self, key: Tuple[int, int]) -> int:
        return self.entries.get(key, 0)

    @property
    def density(self) -> float:
        cells = self.rows * self.cols
        return len(self.entries) / cells if cells else 0.0

    def is_zero(self) -> bool:
        return not self.entries

    def to_dense(self) -> List[List[int]]:
        dense = [[0] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            dense[i][j] = v
        return dense

    def row_dicts(self) -> List[Dict[int, int]]:
        rows: List[Dict[int, int]] = [dict() for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            rows[i][j] = v
        return rows

    def column(self, j: int) -> Vector:
        col = [0] * self.rows
        for (i, jj), v in self.entries.items():
            if jj == j:
                col[i] = v
        return col

    def transpose(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows, {(j, i): v for (i, j), v in self.entries.items()})

    def reduce(self, ring: CoefficientRing) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, {k: ring.reduce(v) for k, v in self.entries.items()})

    def select_rows(self, indices: Sequence[int]) -> "IntMatrix":
        position = {r: k for k, r in enumerate(indices)}
        return IntMatrix(len(indices), self.cols,
                         {(position[i], j): v for (i, j), v in self.entries.items() if i in position})

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise DimensionError(f"Cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        right_rows = other.row_dicts()
        product: Dict[Tuple[int, int], int] = defaultdict(int)
        for (i, k), a in self.entries.items():
            for j, b in right_rows[k].items():
                product[(i, j)] += a * b
        return IntMatrix(self.rows, other.cols, product)

    def matvec(self, x: Sequence[int]) -> Vector:
        if len(x) != self.cols:
            raise DimensionError(f"Vector of length {len(x)} against {self.cols} columns")
        y = [0] * self.rows
        for (i, j), v in self.entries.items():
            if x[j]:
                y[i] += v * x[j]
        return y


@dataclass
class SmithDecomposition:
    """U·M·V = diag(d_1, ..., d_r, 0, ...) with each d_i dividing d_{i+1}.

    Transforms that were not requested are None: ``U``/``U_inv`` need
    ``left=True`` and ``V``/``V_inv`` need ``right=True``.
    """
    U: Optional[IntMatrix]
    V: Optional[IntMatrix]
    U_inv: Optional[IntMatrix]
    V_inv: Optional[IntMatrix]
    diagonal: List[int]
    rank: int
    ring: CoefficientRing
    shape: Tuple[int, int]

    def diagonal_matrix(self) -> IntMatrix:
        return IntMatrix(self.shape[0], self.shape[1], {(k, k): d for k, d in enumerate(self.diagonal)})

    def reconstructs(self, M: IntMatrix) -> bool:
        """Exact check of U·M·V = D over the decomposition's ring."""
        if self.U is None or self.V is None:
            raise PreconditionError("Reconstruction needs both transforms")
        return ((self.U @ M) @ self.V).reduce(self.ring) == self.diagonal_matrix().reduce(self.ring)


# Share of nonzero cells in the active block above which elimination goes dense.
DENSE_FILL = 0.3


def _axpy(target: Dict[int, int], source: Dict[int, int], k: int, ring: CoefficientRing) -> List[int]:
    """target += k·source in place; returns the keys whose presence changed."""
    changed = []
    for key, v in source.items():
        new = ring.reduce(target.get(key, 0) + k * v)
        if new:
            if key not in target:
                changed.append(key)
            target[key] = new
        elif key in target:
            del target[key]
            changed.append(key)
    return changed


def _combine(x: Dict[int, int], y: Dict[int, int], a: int, b: int) -> Dict[int, int]:
    out: Dict[int, int] = {}
    for key in set(x) | set(y):
        v = a * x.get(key, 0) + b * y.get(key, 0)
        if v:
            out[key] = v
    return out


def _extended_gcd(a: int, b: int) -> Tuple[int, int, int]:
    if b == 0:
        return (a, 1, 0) if a >= 0 else (-a, -1, 0)
    g, s, t = _extended_gcd(b, a % b)
    return g, t, s - (a // b) * t


class _Eliminator:
    """Working state for one Smith reduction; owns exclusive copies of everything it touches.

    Candidate pivot rows sit in a heap keyed by (least entry magnitude, row
    length). Every row operation pushes a fresh key for the rows it changed,
    so a popped entry whose key no longer matches its row is simply dropped.
    """

    def __init__(self, M: IntMatrix, ring: CoefficientRing, left: bool, right: bool):
        self.ring = ring
        self.left = left
        self.right = right
        self.A: List[Dict[int, int]] = [dict() for _ in range(M.rows)]
        self.rows_in_col: Dict[int, set] = defaultdict(set)
        self.nnz = 0
        for (i, j), v in M.entries.items():
            v = ring.reduce(v)
            if v:
                self.A[i][j] = v
                self.rows_in_col[j].add(i)
                self.nnz += 1
        self.active = {i for i in range(M.rows) if self.A[i]}
        self.heap: List[Tuple[Tuple[int, int], int]] = []
        for r in sorted(self.active):
            self._push(r)
        if left:
            self.U_rows = [{i: 1} for i in range(M.rows)]
            self.U_inv_cols = [{i: 1} for i in range(M.rows)]
        if right:
            self.V_cols = [{j: 1} for j in range(M.cols)]
            self.V_inv_rows = [{j: 1} for j in range(M.cols)]

    def _magnitude(self, v: int) -> int:
        return 0 if self.ring.is_field else abs(v)

    def _row_key(self, r: int) -> Tuple[int, int]:
        row = self.A[r]
        return min(self._magnitude(v) for v in row.values()), len(row)

    def _push(self, r: int):
        if self.A[r]:
            heapq.heappush(self.heap, (self._row_key(r), r))
        else:
            self.active.discard(r)

    # transform bookkeeping, shared by the sparse and the dense phase

    def _row_op(self, r: int, s: int, k: int):
        if self.left:
            _axpy(self.U_rows[r], self.U_rows[s], k, self.ring)
            _axpy(self.U_inv_cols[s], self.U_inv_cols[r], -k, self.ring)

    def _col_op(self, c: int, s: int, k: int):
        if self.right:
            _axpy(self.V_cols[c], self.V_cols[s], k, self.ring)
            _axpy(self.V_inv_rows[s], self.V_inv_rows[c], -k, self.ring)

    def _scale_op(self, r: int, unit: int):
        if self.left:
            inverse = self.ring.inverse(unit)
            self.U_rows[r] = {c: self.ring.reduce(v * unit) for c, v in self.U_rows[r].items()}
            self.U_inv_cols[r] = {c: self.ring.reduce(v * inverse) for c, v in self.U_inv_cols[r].items()}

    def add_row(self, r: int, s: int, k: int):
        """row_r += k·row_s"""
        for c in _axpy(self.A[r], self.A[s], k, self.ring):
            if c in self.A[r]:
                self.rows_in_col[c].add(r)
                self.nnz += 1
            else:
                self.rows_in_col[c].discard(r)
                self.nnz -= 1
        self._push(r)
        self._row_op(r, s, k)

    def add_col(self, c: int, s: int, k: int):
        """col_c += k·col_s"""
        for r in list(self.rows_in_col[s]):
            had = c in self.A[r]
            new = self.ring.reduce(self.A[r].get(c, 0) + k * self.A[r][s])
            if new:
                self.A[r][c] = new
                self.rows_in_col[c].add(r)
            else:
                self.A[r].pop(c, None)
                self.rows_in_col[c].discard(r)
            self.nnz += (c in self.A[r]) - had
            self._push(r)
        self._col_op(c, s, k)

    def scale_row(self, r: int, unit: int):
        self.A[r] = {c: self.ring.reduce(v * unit) for c, v in self.A[r].items()}
        self._scale_op(r, unit)

    def choose_pivot(self) -> Optional[Tuple[int, int]]:
        """Row with the least entry magnitude and fewest entries, then its sparsest column."""
        while self.heap:
            key, r = heapq.heappop(self.heap)
            if r not in self.active or not self.A[r] or key != self._row_key(r):
                continue
            row = self.A[r]
            c = min(row, key=lambda c: (self._magnitude(row[c]), len(self.rows_in_col[c]), c))
            return r, c
        return None

    def reduce_pivot(self, pr: int, pc: int) -> Tuple[int, int]:
        """Clear the pivot's row and column, moving the pivot to smaller remainders as they appear."""
        while True:
            moved = False
            for r in sorted(self.rows_in_col[pc]):
                if r == pr:
                    continue
                self.add_row(r, pr, -self.ring.quotient(self.A[r][pc], self.A[pr][pc]))
                if pc in self.A[r]:
                    pr, moved = r, True
                    break
            if moved:
                continue
            for c in sorted(self.A[pr]):
                if c == pc:
                    continue
                self.add_col(c, pc, -self.ring.quotient(self.A[pr][c], self.A[pr][pc]))
                if c in self.A[pr]:
                    pc, moved = c, True
                    break
            if not moved:
                return pr, pc

    def retire(self, pr: int, pc: int):
        self.rows_in_col[pc].discard(pr)
        self.nnz -= len(self.A[pr])
        self.A[pr] = {}
        self.active.discard(pr)

    def fill(self, free_cols: int) -> float:
        cells = len(self.active) * free_cols
        return self.nnz / cells if cells else 0.0

    def finish_dense(self, pivots: List[Tuple[int, int]], diagonal: List[int]):
        """Eliminate what is left of the matrix as a dense block of lists."""
        ring = self.ring
        rows = sorted(self.active)
        cols = sorted({c for r in rows for c in self.A[r]})
        D = [[self.A[r].get(c, 0) for c in cols] for r in rows]
        for r in rows:
            self.A[r] = {}
        self.active.clear()
        self.rows_in_col.clear()
        self.nnz = 0
        live_rows, live_cols = set(range(len(rows))), set(range(len(cols)))
        while True:
            best, best_key = None, None
            for i in sorted(live_rows):
                for j in sorted(live_cols):
                    v = D[i][j]
                    if v and (best_key is None or self._magnitude(v) < best_key):
                        best, best_key = (i, j), self._magnitude(v)
            if best is None:
                break
            i, j = best
            while True:
                moved = False
                for x in sorted(live_rows):
                    if x == i or not D[x][j]:
                        continue
                    k = -ring.quotient(D[x][j], D[i][j])
                    D[x] = [ring.reduce(a + k * b) for a, b in zip(D[x], D[i])]
                    self._row_op(rows[x], rows[i], k)
                    if D[x][j]:
                        i, moved = x, True
                        break
                if moved:
                    continue
                for y in sorted(live_cols):
                    if y == j or not D[i][y]:
                        continue
                    k = -ring.quotient(D[i][y], D[i][j])
                    for row in D:
                        if row[j]:
                            row[y] = ring.reduce(row[y] + k * row[j])
                    self._col_op(cols[y], cols[j], k)
                    if D[i][y]:
                        j, moved = y, True
                        break
                if not moved:
                    break
            d = D[i][j]
            if ring.is_field and d != 1:
                self._scale_op(rows[i], ring.inverse(d))
                d = 1
            elif not ring.is_field and d < 0:
                self._scale_op(rows[i], -1)
                d = -d
            pivots.append((rows[i], cols[j]))
            diagonal.append(d)
            live_rows.discard(i)
            live_cols.discard(j)

    def fix_divisibility(self, pivots: List[Tuple[int, int]], diagonal: List[int]):
        for i in range(len(diagonal)):
            for j in range(i + 1, len(diagonal)):
                a, b = diagonal[i], diagonal[j]
                if b % a == 0:
                    continue
                g, s, t = _extended_gcd(a, b)
                (r1, c1), (r2, c2) = pivots[i], pivots[j]
                if self.left:
                    u1, u2 = self.U_rows[r1], self.U_rows[r2]
                    self.U_rows[r1] = _combine(u1, u2, s, t)
                    self.U_rows[r2] = _combine(u1, u2, -(b // g), a // g)
                    w1, w2 = self.U_inv_cols[r1], self.U_inv_cols[r2]
                    self.U_inv_cols[r1] = _combine(w1, w2, a // g, b // g)
                    self.U_inv_cols[r2] = _combine(w1, w2, -t, s)
                if self.right:
                    v1, v2 = self.V_cols[c1], self.V_cols[c2]
                    self.V_cols[c1] = _combine(v1, v2, 1, 1)
                    self.V_cols[c2] = _combine(v1, v2, -t * (b // g), s * (a // g))
                    x1, x2 = self.V_inv_rows[c1], self.V_inv_rows[c2]
                    self.V_inv_rows[c1] = _combine(x1, x2, s * (a // g), t * (b // g))
                    self.V_inv_rows[c2] = _combine(x1, x2, -1, 1)
                diagonal[i], diagonal[j] = g, a * b // g


def smith_normal_form(M: IntMatrix, ring: CoefficientRing = ZZ,
                      left: bool = True, right: bool = True) -> SmithDecomposition:
    """Smith normal form of M over the integers or a prime field.

    Args:
        M: the matrix; it is not modified.
        ring: ZZ or a prime field.
        left: track U and U_inv (row operations).
        right: track V and V_inv (column operations).

    Returns:
        A SmithDecomposition whose diagonal lists the nonzero invariant
        factors, units first.
    """
    work = _Eliminator(M, ring, left, right)
    pivots: List[Tuple[int, int]] = []
    diagonal: List[int] = []
    dense = M.density > DENSE_FILL
    while not dense:
        pivot = work.choose_pivot()
        if pivot is None:
            break
        pr, pc = work.reduce_pivot(*pivot)
        d = work.A[pr][pc]
        if ring.is_field and d != 1:
            work.scale_row(pr, ring.inverse(d))
        elif not ring.is_field and d < 0:
            work.scale_row(pr, -1)
        pivots.append((pr, pc))
        diagonal.append(work.A[pr][pc])
        work.retire(pr, pc)
        dense = work.fill(M.cols - len(pivots)) > DENSE_FILL
    if dense:
        logger.debug(f"Dense elimination of {M!r} after {len(pivots)} sparse pivots")
        work.finish_dense(pivots, diagonal)

    if not ring.is_field:
        # unit factors already divide everything; only the rest need the gcd/lcm pass
        units = [k for k, d in enumerate(diagonal) if d == 1]
        rest = [k for k, d in enumerate(diagonal) if d != 1]
        rest_pivots = [pivots[k] for k in rest]
        rest_diagonal = [diagonal[k] for k in rest]
        work.fix_divisibility(rest_pivots, rest_diagonal)
        pivots = [pivots[k] for k in units] + rest_pivots
        diagonal = [1] * len(units) + rest_diagonal

    rank = len(diagonal)
    row_order = [r for r, _ in pivots] + sorted(set(range(M.rows)) - {r for r, _ in pivots})
    col_order = [c for _, c in pivots] + sorted(set(range(M.cols)) - {c for _, c in pivots})
    U = U_inv = V = V_inv = None
    if left:
        U = IntMatrix.from_row_dicts(M.rows, [work.U_rows[r] for r in row_order])
        U_inv = IntMatrix.from_row_dicts(M.rows, [work.U_inv_cols[r] for r in row_order]).transpose()
    if right:
        V = IntMatrix.from_row_dicts(M.cols, [work.V_cols[c] for c in col_order]).transpose()
        V_inv = IntMatrix.from_row_dicts(M.cols, [work.V_inv_rows[c] for c in col_order])
    logger.debug(f"Smith form of {M!r} over {ring.label}: rank {rank}")
    return SmithDecomposition(U, V, U_inv, V_inv, diagonal, rank, ring, (M.rows, M.cols))


def rank_mod_p(M: IntMatrix, p: int) -> int:
    """Rank of M over the field with p elements."""
    return smith_normal_form(M, CoefficientRing(p), left=False, right=False).rank


def rank_over_rationals(M: IntMatrix) -> int:
    return smith_normal_form(M, ZZ, left=False, right=False).rank


def solve_in_image(M: IntMatrix, b: Sequence[int], ring: CoefficientRing = ZZ,
                   snf: Optional[SmithDecomposition] = None) -> Optional[Vector]:
    """Some x with M·x = b over the ring, or None when b is not in the image."""
    if len(b) != M.rows:
        raise DimensionError(f"Right-hand side of length {len(b)} against {M.rows} rows")
    snf = snf or smith_normal_form(M, ring)
    c = [ring.reduce(v) for v in snf.U.matvec(list(b))]
    y = [0] * M.cols
    for k, d in enumerate(snf.diagonal):
        if ring.is_field:
            y[k] = ring.reduce(c[k] * ring.inverse(d))
        elif c[k] % d:
            return None
        else:
            y[k] = c[k] // d
    if any(c[k] for k in range(snf.rank, M.rows)):
        return None
    return [ring.reduce(v) for v in snf.V.matvec(y)]


def columns_matrix(rows: int, columns: Iterable[Dict[int, int]]) -> IntMatrix:
    """Matrix whose j-th column is the j-th sparse vector."""
    return IntMatrix.from_row_dicts(rows, list(columns)).transpose()
