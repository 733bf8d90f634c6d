"""Exact integer and rational linear algebra kernels.

Everything here is arbitrary precision: Smith normal form, Hermite forms,
saturated kernel lattices, cokernel structure, Gram determinants, and exact
Fuglede-Kadison determinants over the trivial group.  Floating point appears
only when a natural logarithm of an exact value is finally requested.

The Fuglede-Kadison determinant of an integer matrix A is the product of its
nonzero singular values.  Its square is an integer: the sum of the squares of
all maximal-rank minors (Cauchy-Binet).  Three independent evaluation routes
are implemented:

  * minor-sum enumeration (small matrices; the literal Cauchy-Binet sum),
  * image-lattice factorization det(J^T J) * det(S S^T) where A = J S with J a
    basis of the column lattice (medium),
  * kernel/torsion/cokernel factorization whose dense work scales with the
    corank rather than the rank (large, sparse tower matrices).

The routes cross-check each other in the test suite; `fk_factorization_check`
keeps the first two strictly independent of the third.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb, gcd
from typing import Optional, Sequence

from .errors import DimensionMismatch, IdentityViolation

__all__ = [
    "IntMatrix",
    "SmithForm",
    "FKDet",
    "smith_normal_form",
    "kernel_lattice",
    "cokernel_structure",
    "fk_determinant",
    "fk_factorization_check",
    "gram_determinant",
    "column_hnf",
    "solve_in_lattice",
    "lattice_contains",
    "det_bareiss",
    "ln_of_fraction",
]


# ---------------------------------------------------------------------------
# IntMatrix
# ---------------------------------------------------------------------------

class IntMatrix:
    """Dense arbitrary-precision integer matrix, row-major, immutable.

    Empty matrices (0 rows and/or 0 columns) are legal and represent zero
    modules and empty maps.
    """

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Sequence[int]):
        if rows < 0 or cols < 0:
            raise DimensionMismatch("negative matrix dimensions")
        entries = tuple(int(x) for x in entries)
        if len(entries) != rows * cols:
            raise DimensionMismatch(
                f"expected {rows * cols} entries, got {len(entries)}"
            )
        self.rows = rows
        self.cols = cols
        self.entries = entries

    # -- constructors -------------------------------------------------------

    @classmethod
    def _raw(cls, rows: int, cols: int, entries: tuple) -> "IntMatrix":
        m = cls.__new__(cls)
        m.rows = rows
        m.cols = cols
        m.entries = entries
        return m

    @classmethod
    def from_rows(cls, data: Sequence[Sequence[int]]) -> "IntMatrix":
        rows = len(data)
        cols = len(data[0]) if rows else 0
        flat = []
        for r in data:
            if len(r) != cols:
                raise DimensionMismatch("ragged rows")
            flat.extend(int(x) for x in r)
        return cls(rows, cols, flat)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, (0,) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        e = [0] * (n * n)
        for i in range(n):
            e[i * n + i] = 1
        return cls(n, n, e)

    @classmethod
    def diagonal(cls, diag: Sequence[int], rows: Optional[int] = None,
                 cols: Optional[int] = None) -> "IntMatrix":
        k = len(diag)
        rows = k if rows is None else rows
        cols = k if cols is None else cols
        e = [0] * (rows * cols)
        for i, d in enumerate(diag):
            e[i * cols + i] = int(d)
        return cls(rows, cols, e)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], nrows: int) -> "IntMatrix":
        ncols = len(columns)
        e = [0] * (nrows * ncols)
        for j, col in enumerate(columns):
            if len(col) != nrows:
                raise DimensionMismatch("column of wrong length")
            for i, v in enumerate(col):
                e[i * ncols + j] = int(v)
        return cls(nrows, ncols, e)

    # -- access --------------------------------------------------------------

    def __getitem__(self, ij) -> int:
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple:
        c = self.cols
        return self.entries[i * c:(i + 1) * c]

    def column(self, j: int) -> tuple:
        c = self.cols
        return tuple(self.entries[i * c + j] for i in range(self.rows))

    def to_lists(self) -> list:
        c = self.cols
        return [list(self.entries[i * c:(i + 1) * c]) for i in range(self.rows)]

    def is_zero(self) -> bool:
        return all(x == 0 for x in self.entries)

    @property
    def shape(self) -> tuple:
        return (self.rows, self.cols)

    def nnz(self) -> int:
        return sum(1 for x in self.entries if x)

    # -- arithmetic -----------------------------------------------------------

    def transpose(self) -> "IntMatrix":
        r, c, e = self.rows, self.cols, self.entries
        if r == 0 or c == 0:
            return IntMatrix._raw(c, r, ())
        rows = [e[i * c:(i + 1) * c] for i in range(r)]
        out = tuple(itertools.chain.from_iterable(zip(*rows)))
        return IntMatrix._raw(c, r, out)

    def __neg__(self) -> "IntMatrix":
        return IntMatrix._raw(self.rows, self.cols,
                              tuple(-x for x in self.entries))

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if self.shape != other.shape:
            raise DimensionMismatch("shape mismatch in +")
        return IntMatrix._raw(
            self.rows, self.cols,
            tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        if self.shape != other.shape:
            raise DimensionMismatch("shape mismatch in -")
        return IntMatrix._raw(
            self.rows, self.cols,
            tuple(a - b for a, b in zip(self.entries, other.entries)))

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise DimensionMismatch(
                f"cannot multiply {self.shape} by {other.shape}")
        n, k, m = self.rows, self.cols, other.cols
        a, b = self.entries, other.entries
        out = [0] * (n * m)
        for i in range(n):
            abase = i * k
            obase = i * m
            for t in range(k):
                v = a[abase + t]
                if v:
                    bbase = t * m
                    if v == 1:
                        for j in range(m):
                            out[obase + j] += b[bbase + j]
                    elif v == -1:
                        for j in range(m):
                            out[obase + j] -= b[bbase + j]
                    else:
                        for j in range(m):
                            out[obase + j] += v * b[bbase + j]
        return IntMatrix._raw(n, m, tuple(out))

    def scale(self, c: int) -> "IntMatrix":
        return IntMatrix._raw(self.rows, self.cols,
                              tuple(c * x for x in self.entries))

    def __eq__(self, other) -> bool:
        return (isinstance(other, IntMatrix) and self.shape == other.shape
                and self.entries == other.entries)

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def __repr__(self):
        return f"IntMatrix({self.rows}x{self.cols})"

    # -- block helpers ---------------------------------------------------------

    @staticmethod
    def vstack(top: "IntMatrix", bottom: "IntMatrix") -> "IntMatrix":
        if top.cols != bottom.cols:
            raise DimensionMismatch("vstack column mismatch")
        return IntMatrix._raw(top.rows + bottom.rows, top.cols,
                               top.entries + bottom.entries)

    @staticmethod
    def hstack(left: "IntMatrix", right: "IntMatrix") -> "IntMatrix":
        if left.rows != right.rows:
            raise DimensionMismatch("hstack row mismatch")
        out = []
        for i in range(left.rows):
            out.extend(left.row(i))
            out.extend(right.row(i))
        return IntMatrix(left.rows, left.cols + right.cols, out)


# ---------------------------------------------------------------------------
# Sparse row machinery (private).  A sparse matrix is a list of row dicts
# {col: value}; column index sets are rebuilt where needed.
# ---------------------------------------------------------------------------

def _sparse_rows(A: IntMatrix) -> list:
    c = A.cols
    e = A.entries
    out = []
    for i in range(A.rows):
        base = i * c
        out.append({j: e[base + j] for j in range(c) if e[base + j]})
    return out


def _row_axpy(dst: dict, src: dict, q: int) -> None:
    """dst += q * src, in place, dropping zeros."""
    if q == 0:
        return
    if q == 1:
        for j, v in src.items():
            w = dst.get(j, 0) + v
            if w:
                dst[j] = w
            else:
                del dst[j]
    elif q == -1:
        for j, v in src.items():
            w = dst.get(j, 0) - v
            if w:
                dst[j] = w
            else:
                del dst[j]
    else:
        for j, v in src.items():
            w = dst.get(j, 0) + q * v
            if w:
                dst[j] = w
            else:
                del dst[j]


def _symmetric_quotient(b: int, a: int) -> int:
    """Quotient q minimizing |b - q*a| for a > 0."""
    q, r = divmod(b, a)
    if 2 * r > a:
        q += 1
    return q


def _xgcd(a: int, b: int):
    """Return (g, u, v) with u*a + v*b = g = gcd(a, b), g >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def _row_hnf_clean(rows: list, ncols: int, transform: bool = False,
                   reduce_off_pivots: bool = True):
    """Sparse row Hermite normal form.

    Returns (pivots, hrows, urows): `pivots` is the ordered list of
    (pivot_col, work_index), `hrows` the reduced nonzero rows in pivot order,
    and `urows` (when transform=True) the rows of a unimodular U with
    U @ input = output, the rows producing zero output rows (kernel rows)
    appended after the pivot rows.
    """
    work = [dict(r) for r in rows]
    n = len(work)
    urows = [{i: 1} for i in range(n)] if transform else None
    active = list(range(n))
    pivots = []
    for col in range(ncols):
        cand = [i for i in active if col in work[i]]
        if not cand:
            continue
        while len(cand) > 1:
            cand.sort(key=lambda i: (abs(work[i][col]), len(work[i]), i))
            i0 = cand[0]
            if work[i0][col] < 0:
                work[i0] = {j: -v for j, v in work[i0].items()}
                if transform:
                    urows[i0] = {j: -v for j, v in urows[i0].items()}
            a = work[i0][col]
            progressed = False
            nxt = [i0]
            for i in cand[1:]:
                b = work[i].get(col, 0)
                if not b:
                    progressed = True
                    continue
                q = _symmetric_quotient(b, a)
                if q:
                    _row_axpy(work[i], work[i0], -q)
                    if transform:
                        _row_axpy(urows[i], urows[i0], -q)
                if col in work[i]:
                    if abs(work[i][col]) < a:
                        progressed = True
                    nxt.append(i)
                else:
                    progressed = True
            cand = nxt
            if not progressed and len(cand) > 1:
                # b was an exact multiple everywhere yet entries remain: means
                # q == 0 cases with |b| < |a| cannot happen here; force Bezout.
                i1 = cand[1]
                a, b = work[i0][col], work[i1][col]
                g, u, v = _xgcd(a, b)
                r0, r1 = work[i0], work[i1]
                new0: dict = {}
                _row_axpy(new0, r0, u)
                _row_axpy(new0, r1, v)
                new1: dict = {}
                _row_axpy(new1, r1, a // g)
                _row_axpy(new1, r0, -(b // g))
                work[i0], work[i1] = new0, new1
                if transform:
                    u0, u1 = urows[i0], urows[i1]
                    nu0: dict = {}
                    _row_axpy(nu0, u0, u)
                    _row_axpy(nu0, u1, v)
                    nu1: dict = {}
                    _row_axpy(nu1, u1, a // g)
                    _row_axpy(nu1, u0, -(b // g))
                    urows[i0], urows[i1] = nu0, nu1
                cand = [i for i in cand if col in work[i]]
        piv = cand[0]
        if work[piv][col] < 0:
            work[piv] = {j: -v for j, v in work[piv].items()}
            if transform:
                urows[piv] = {j: -v for j, v in urows[piv].items()}
        pivots.append((col, piv))
        active.remove(piv)
    if reduce_off_pivots:
        for idx, (col, piv) in enumerate(pivots):
            p = work[piv][col]
            for col2, piv2 in pivots[:idx] + pivots[idx + 1:]:
                v = work[piv2].get(col, 0)
                if v:
                    q = v // p
                    if q:
                        _row_axpy(work[piv2], work[piv], -q)
                        if transform:
                            _row_axpy(urows[piv2], urows[piv], -q)
    hrows = [work[piv] for _, piv in pivots]
    if transform:
        ukeep = [urows[piv] for _, piv in pivots]
        ukeep += [urows[i] for i in active]
        return pivots, hrows, ukeep
    return pivots, hrows, None


def _dicts_to_matrix(rows: list, ncols: int) -> IntMatrix:
    flat = []
    for r in rows:
        row = [0] * ncols
        for j, v in r.items():
            row[j] = v
        flat.extend(row)
    return IntMatrix._raw(len(rows), ncols, tuple(flat))


def column_hnf(A: IntMatrix) -> IntMatrix:
    """Canonical basis of the column lattice of A, as columns in Hermite form.

    Columns are returned with strictly increasing pivot rows; the result has
    full column rank equal to rank(A).
    """
    rows = _sparse_rows(A.transpose())
    _, hrows, _ = _row_hnf_clean(rows, A.rows)
    return _dicts_to_matrix(hrows, A.rows).transpose()


def _is_identity(M: IntMatrix) -> bool:
    if M.rows != M.cols:
        return False
    n = M.rows
    e = M.entries
    for i in range(n):
        base = i * n
        for j in range(n):
            if e[base + j] != (1 if i == j else 0):
                return False
    return True


def kernel_lattice(A: IntMatrix) -> IntMatrix:
    """Z-basis of ker(A) as a saturated sublattice, columns in Hermite form."""
    if A.rows == 0 or A.is_zero():
        return IntMatrix.identity(A.cols)
    rows = _sparse_rows(A.transpose())
    pivots, hrows, urows = _row_hnf_clean(rows, A.rows, transform=True,
                                          reduce_off_pivots=False)
    nker = A.cols - len(pivots)
    kvecs = urows[len(pivots):]
    assert len(kvecs) == nker
    if nker == 0:
        return IntMatrix.zeros(A.cols, 0)
    K = _dicts_to_matrix(kvecs, A.cols)       # rows are kernel vectors
    # canonicalize: column HNF of the basis matrix (kernel vectors as columns)
    return column_hnf(K.transpose())


def _pivot_rows_of_colhnf(B: IntMatrix) -> list:
    """Pivot row of each column of a column-Hermite matrix."""
    piv = []
    for j in range(B.cols):
        col = B.column(j)
        i = next(i for i, v in enumerate(col) if v)
        piv.append(i)
    return piv


def solve_in_lattice(B: IntMatrix, C: IntMatrix) -> Optional[IntMatrix]:
    """Solve B @ X = C over the integers, for B a column-Hermite lattice basis.

    Returns X with shape (B.cols, C.cols) or None when some column of C lies
    outside the lattice spanned by the columns of B.
    """
    if B.rows != C.rows:
        raise DimensionMismatch("solve_in_lattice shape mismatch")
    if _is_identity(B):
        return C
    piv = _pivot_rows_of_colhnf(B)
    bcols = [B.column(j) for j in range(B.cols)]
    out_cols = []
    for j in range(C.cols):
        resid = {i: v for i, v in enumerate(C.column(j)) if v}
        y = [0] * B.cols
        for t in range(B.cols):
            p = piv[t]
            v = resid.get(p, 0)
            if v:
                pivval = bcols[t][p]
                q, r = divmod(v, pivval)
                if r:
                    return None
                y[t] = q
                for i, w in enumerate(bcols[t]):
                    if w:
                        nv = resid.get(i, 0) - q * w
                        if nv:
                            resid[i] = nv
                        else:
                            resid.pop(i, None)
        if resid:
            return None
        out_cols.append(y)
    return IntMatrix.from_columns(out_cols, B.cols)


def lattice_contains(B: IntMatrix, v: Sequence[int]) -> bool:
    """Whether the vector v lies in the column lattice of column-Hermite B."""
    C = IntMatrix.from_columns([list(v)], B.rows)
    return solve_in_lattice(B, C) is not None


def _colhnf_with_transform(A: IntMatrix):
    """Column HNF with transform: returns (H, V) with A @ V = [H | 0].

    V is unimodular of size A.cols; H has rank(A) columns.
    """
    rows = _sparse_rows(A.transpose())
    pivots, hrows, urows = _row_hnf_clean(rows, A.rows, transform=True)
    H = _dicts_to_matrix(hrows, A.rows).transpose()
    V = _dicts_to_matrix(urows, A.cols).transpose()
    return H, V


def solve_general(A: IntMatrix, C: IntMatrix) -> Optional[IntMatrix]:
    """Any integer solution X of A @ X = C, or None if none exists."""
    H, V = _colhnf_with_transform(A)
    Y = solve_in_lattice(H, C) if H.cols else (
        IntMatrix.zeros(0, C.cols) if C.is_zero() else None)
    if Y is None:
        return None
    # pad Y with zero rows for the non-pivot transform columns
    pad = IntMatrix.vstack(Y, IntMatrix.zeros(A.cols - H.cols, C.cols))
    return V @ pad


def saturation(A: IntMatrix) -> IntMatrix:
    """Saturation of the column lattice of A inside Z^rows (column-Hermite)."""
    D = kernel_lattice(A.transpose())
    return kernel_lattice(D.transpose())


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SmithForm:
    """Invariant factors d_1 | d_2 | ... | d_k (units included), rank k.

    When transforms are present, left @ A @ right equals the diagonal form.
    """
    invariant_factors: tuple
    rank: int
    left_transform: Optional[IntMatrix] = None
    right_transform: Optional[IntMatrix] = None


def _chain_divisibility(diag: list) -> list:
    """Normalize a diagonal multiset into the divisibility chain."""
    d = [abs(x) for x in diag if x]
    changed = True
    while changed:
        changed = False
        for i in range(len(d)):
            for j in range(i + 1, len(d)):
                if d[j] % d[i]:
                    g = gcd(d[i], d[j])
                    l = d[i] // g * d[j]
                    d[i], d[j] = g, l
                    changed = True
        d.sort()
    return d


def _nearest_quotient(b: int, a: int) -> int:
    """Quotient q minimizing |b - q*a|, any sign of a != 0."""
    if a < 0:
        return -_symmetric_quotient(b, -a)
    return _symmetric_quotient(b, a)


def _snf_diagonal_sparse(A: IntMatrix) -> list:
    """Diagonal entries (no chain normalization) of a Smith form of A.

    Textbook alternating row/column reduction on a sparse row-dict store,
    with pivots chosen by minimal absolute value then Markowitz fill count.
    """
    rows = _sparse_rows(A)
    colindex: dict = {}
    for i, r in enumerate(rows):
        for j in r:
            colindex.setdefault(j, set()).add(i)

    def row_axpy_idx(dst: int, src: int, q: int) -> None:
        if not q:
            return
        drow = rows[dst]
        for j, v in rows[src].items():
            w = drow.get(j, 0) + q * v
            if w:
                if j not in drow:
                    colindex.setdefault(j, set()).add(dst)
                drow[j] = w
            elif j in drow:
                del drow[j]
                colindex[j].discard(dst)

    def col_axpy_idx(dst: int, src: int, q: int) -> None:
        if not q:
            return
        for i in list(colindex.get(src, ())):
            v = rows[i].get(src, 0)
            if v:
                w = rows[i].get(dst, 0) + q * v
                if w:
                    if dst not in rows[i]:
                        colindex.setdefault(dst, set()).add(i)
                    rows[i][dst] = w
                elif dst in rows[i]:
                    del rows[i][dst]
                    colindex[dst].discard(i)

    def pick_pivot():
        best = None
        best_key = None
        for j, rowset in colindex.items():
            for i in rowset:
                v = rows[i].get(j)
                if not v:
                    continue
                a = abs(v)
                key = (a, (len(rows[i]) - 1) * (len(rowset) - 1), i, j)
                if best_key is None or key < best_key:
                    best_key = key
                    best = (i, j)
                    if a == 1 and key[1] <= 1:
                        return best
        return best

    diag = []
    while True:
        pv = pick_pivot()
        if pv is None:
            break
        pi, pj = pv
        while True:
            # Row ops until column pj holds only the pivot.
            while True:
                others = [i for i in colindex.get(pj, ())
                          if i != pi and pj in rows[i]]
                if not others:
                    break
                a = rows[pi][pj]
                next_pi = pi
                for i in others:
                    b = rows[i].get(pj, 0)
                    if not b:
                        continue
                    row_axpy_idx(i, pi, -_nearest_quotient(b, a))
                    rem = rows[i].get(pj, 0)
                    if rem and abs(rem) < abs(rows[next_pi][pj]):
                        next_pi = i
                pi = next_pi
            # Column ops until row pi holds only the pivot.  These touch only
            # row pi (column pj is clean), so the column stays clean unless
            # the pivot migrates to another column.
            pivot_moved = False
            while True:
                others = [j for j in rows[pi] if j != pj]
                if not others:
                    break
                a = rows[pi][pj]
                next_pj = pj
                for j in others:
                    b = rows[pi].get(j, 0)
                    if not b:
                        continue
                    col_axpy_idx(j, pj, -_nearest_quotient(b, a))
                    rem = rows[pi].get(j, 0)
                    if rem and abs(rem) < abs(rows[pi][next_pj]):
                        next_pj = j
                if next_pj != pj:
                    pj = next_pj
                    pivot_moved = True
                    break
            if not pivot_moved:
                break
        diag.append(abs(rows[pi][pj]))
        del rows[pi][pj]
        colindex[pj].discard(pi)
        for j in list(rows[pi]):
            colindex[j].discard(pi)
        rows[pi] = {}
    return diag


def smith_normal_form(A: IntMatrix, with_transforms: bool = False) -> SmithForm:
    """Smith normal form of A; factors chained, units d_j = 1 kept.

    The transforms, when requested, satisfy left @ A @ right = diag(factors)
    extended by zeros to the shape of A, with |det| = 1 on both sides.
    """
    if not with_transforms:
        diag = _snf_diagonal_sparse(A)
        factors = _chain_divisibility(diag)
        return SmithForm(tuple(factors), len(factors))
    # Dense transform-tracking variant for desk-size matrices.
    n, m = A.rows, A.cols
    M = A.to_lists()
    L = IntMatrix.identity(n).to_lists()
    R = IntMatrix.identity(m).to_lists()

    def row_op(i, k, q):      # row_i -= q row_k
        Mi, Mk = M[i], M[k]
        for j in range(m):
            Mi[j] -= q * Mk[j]
        Li, Lk = L[i], L[k]
        for j in range(n):
            Li[j] -= q * Lk[j]

    def col_op(j, k, q):      # col_j -= q col_k
        for i in range(n):
            M[i][j] -= q * M[i][k]
        for i in range(m):
            R[i][j] -= q * R[i][k]

    def swap_rows(i, k):
        M[i], M[k] = M[k], M[i]
        L[i], L[k] = L[k], L[i]

    def swap_cols(j, k):
        for i in range(n):
            M[i][j], M[i][k] = M[i][k], M[i][j]
        for i in range(m):
            R[i][j], R[i][k] = R[i][k], R[i][j]

    t = 0
    while True:
        # find pivot among rows/cols >= t
        best = None
        for i in range(t, n):
            for j in range(t, m):
                if M[i][j] and (best is None or abs(M[i][j]) < best[0]):
                    best = (abs(M[i][j]), i, j)
        if best is None:
            break
        _, bi, bj = best
        swap_rows(t, bi)
        swap_cols(t, bj)
        while True:
            done = True
            for i in range(t + 1, n):
                if M[i][t]:
                    q = _symmetric_quotient(M[i][t], M[t][t]) if M[t][t] > 0 \
                        else -_symmetric_quotient(M[i][t], -M[t][t])
                    row_op(i, t, q)
                    if M[i][t]:
                        swap_rows(i, t)
                        done = False
            for j in range(t + 1, m):
                if M[t][j]:
                    q = _symmetric_quotient(M[t][j], M[t][t]) if M[t][t] > 0 \
                        else -_symmetric_quotient(M[t][j], -M[t][t])
                    col_op(j, t, q)
                    if M[t][j]:
                        swap_cols(j, t)
                        done = False
            if done:
                break
        if M[t][t] < 0:
            for j in range(m):
                M[t][j] = -M[t][j]
            for j in range(n):
                L[t][j] = -L[t][j]
        t += 1
        if t == min(n, m):
            break
    diag = [M[i][i] for i in range(min(n, m)) if M[i][i]]
    # enforce divisibility chain with explicit ops so transforms stay valid
    k = len(diag)
    changed = True
    while changed:
        changed = False
        for i in range(k):
            for j in range(i + 1, k):
                a, b = M[i][i], M[j][j]
                if b % a:
                    # standard trick: add col j to col i, then clear
                    col_op(i, j, -1)
                    # now column i has entries a (row i) and b (row j)
                    while M[j][i]:
                        q = _symmetric_quotient(M[j][i], M[i][i]) if M[i][i] > 0 \
                            else -_symmetric_quotient(M[j][i], -M[i][i])
                        row_op(j, i, q)
                        if M[j][i]:
                            swap_rows(j, i)
                    # clear the fill in row i / row j
                    if M[i][j]:
                        q = M[i][j] // M[i][i]
                        col_op(j, i, q)
                    if M[j][j] < 0:
                        for jj in range(m):
                            M[j][jj] = -M[j][jj]
                        for jj in range(n):
                            L[j][jj] = -L[j][jj]
                    if M[i][i] < 0:
                        for jj in range(m):
                            M[i][jj] = -M[i][jj]
                        for jj in range(n):
                            L[i][jj] = -L[i][jj]
                    changed = True
    diag = [M[i][i] for i in range(min(n, m)) if M[i][i]]
    return SmithForm(tuple(diag), len(diag),
                     IntMatrix.from_rows(L), IntMatrix.from_rows(R))


def invariant_factors(A: IntMatrix, drop_units: bool = False) -> tuple:
    """Chained invariant factors of A; optionally without the unit factors."""
    f = smith_normal_form(A).invariant_factors
    if drop_units:
        f = tuple(x for x in f if x != 1)
    return f


def rank(A: IntMatrix) -> int:
    rows = _sparse_rows(A.transpose())
    pivots, _, _ = _row_hnf_clean(rows, A.rows, reduce_off_pivots=False)
    return len(pivots)


def cokernel_structure(A: IntMatrix) -> tuple:
    """Structure (free_rank, factors) of coker(A) for A: Z^cols -> Z^rows.

    Factors are chained with every unit dropped, so each d_j >= 2.
    """
    sf = smith_normal_form(A)
    free_rank = A.rows - sf.rank
    facs = tuple(d for d in sf.invariant_factors if d != 1)
    return free_rank, facs


# ---------------------------------------------------------------------------
# Determinants
# ---------------------------------------------------------------------------

def det_bareiss(M: Sequence[Sequence[int]]) -> int:
    """Exact determinant of a square integer matrix (fraction-free Bareiss)."""
    n = len(M)
    if n == 0:
        return 1
    A = [list(map(int, row)) for row in M]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if A[i][k]), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        pk = A[k][k]
        for i in range(k + 1, n):
            Ai, Ak = A[i], A[k]
            aik = Ai[k]
            for j in range(k + 1, n):
                Ai[j] = (pk * Ai[j] - aik * Ak[j]) // prev
            Ai[k] = 0
        prev = pk
    return sign * A[n - 1][n - 1]


def det_bareiss_psd(M: Sequence[Sequence[int]]) -> int:
    """Bareiss determinant specialized to symmetric PSD integer matrices.

    Pivots on the diagonal and updates only the upper triangle; a zero
    diagonal entry on a PSD matrix forces a zero row, hence det 0.
    """
    n = len(M)
    if n == 0:
        return 1
    A = [list(map(int, row)) for row in M]
    order = list(range(n))
    prev = 1
    for step in range(n - 1):
        # choose remaining diagonal pivot of minimal nonzero magnitude
        best = None
        for t in range(step, n):
            v = A[order[t]][order[t]]
            if v and (best is None or abs(v) < best[0]):
                best = (abs(v), t)
        if best is None:
            return 0
        order[step], order[best[1]] = order[best[1]], order[step]
        k = order[step]
        pk = A[k][k]
        rest = order[step + 1:]
        ak = A[k]
        for ii, i in enumerate(rest):
            aik = A[i][k]
            Ai = A[i]
            if aik:
                for j in rest[ii:]:
                    Ai[j] = (pk * Ai[j] - aik * ak[j]) // prev
            elif prev != 1 or pk != 1:
                for j in rest[ii:]:
                    if Ai[j]:
                        Ai[j] = (pk * Ai[j]) // prev
            for j in rest[ii:]:
                A[j][i] = Ai[j]
        prev = pk
    last = order[n - 1]
    return A[last][last]


def det_fraction(M: Sequence[Sequence[Fraction]]) -> Fraction:
    """Exact determinant of a square matrix of Fractions."""
    n = len(M)
    if n == 0:
        return Fraction(1)
    A = [[Fraction(x) for x in row] for row in M]
    det = Fraction(1)
    for k in range(n):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if A[i][k]), None)
            if swap is None:
                return Fraction(0)
            A[k], A[swap] = A[swap], A[k]
            det = -det
        det *= A[k][k]
        inv = 1 / A[k][k]
        for i in range(k + 1, n):
            f = A[i][k] * inv
            if f:
                Ai, Ak = A[i], A[k]
                for j in range(k, n):
                    Ai[j] -= f * Ak[j]
    return det


def gram_determinant(vectors: Sequence[Sequence]) -> Fraction:
    """det of the Gram matrix <v_i, v_j> under the standard inner product.

    Accepts integer or Fraction coordinates; the empty list gives 1; the
    result is 0 exactly when the vectors are linearly dependent.
    """
    vecs = [list(v) for v in vectors]
    if not vecs:
        return Fraction(1)
    dim = len(vecs[0])
    if any(len(v) != dim for v in vecs):
        raise DimensionMismatch("gram_determinant: mixed vector dimensions")
    g = [[Fraction(sum(Fraction(a) * Fraction(b) for a, b in zip(v, w)))
          for w in vecs] for v in vecs]
    return det_fraction(g)


def _gram_int(B: IntMatrix) -> list:
    """B^T B as list-of-lists, using column sparsity."""
    cols = [
        {i: v for i, v in enumerate(B.column(j)) if v}
        for j in range(B.cols)
    ]
    n = B.cols
    G = [[0] * n for _ in range(n)]
    for a in range(n):
        ca = cols[a]
        for b in range(a, n):
            cb = cols[b]
            if len(cb) < len(ca):
                ca2, cb2 = cb, ca
            else:
                ca2, cb2 = ca, cb
            s = 0
            for i, v in ca2.items():
                w = cb2.get(i)
                if w is not None:
                    s += v * w
            G[a][b] = s
            G[b][a] = s
    return G


def ln_of_fraction(x) -> float:
    """Natural log of a positive int or Fraction, safe for huge values."""
    if isinstance(x, Fraction):
        return _ln_int(x.numerator) - _ln_int(x.denominator)
    return _ln_int(int(x))


def _ln_int(n: int) -> float:
    if n <= 0:
        raise ValueError("log of nonpositive value")
    if n.bit_length() <= 900:
        return math.log(n)
    shift = n.bit_length() - 500
    return math.log(n >> shift) + shift * math.log(2)


# ---------------------------------------------------------------------------
# Fuglede-Kadison determinants (trivial group)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FKDet:
    """log_value = (1/2) ln(square_exact); square_exact is exact and >= 1."""
    log_value: float
    square_exact: Fraction

    def __post_init__(self):
        if self.square_exact < 1:
            raise IdentityViolation(
                f"FK determinant square {self.square_exact} < 1")


_MINOR_BUDGET = 2_000_000


def _fk_square_minor_sum(A: IntMatrix, r: Optional[int] = None):
    """Cauchy-Binet: sum of squares of all rank x rank minors.

    Returns None when the enumeration exceeds the work budget (the number of
    minors weighted by the cubed minor size).
    """
    if r is None:
        r = rank(A)
    if r == 0:
        return 1
    nrow, ncol = A.rows, A.cols
    work = comb(nrow, r) * comb(ncol, r) * max(1, r ** 3)
    if work > _MINOR_BUDGET:
        return None
    rows = A.to_lists()
    total = 0
    for I in itertools.combinations(range(nrow), r):
        sub = [rows[i] for i in I]
        for J in itertools.combinations(range(ncol), r):
            m = [[row[j] for j in J] for row in sub]
            d = det_bareiss(m)
            total += d * d
    return total


def _fk_square_image_lattice(A: IntMatrix) -> int:
    """det(J^T J) * det(S S^T) where A = J @ S, J a column-lattice basis."""
    J = column_hnf(A)
    if J.cols == 0:
        return 1
    S = solve_in_lattice(J, A)
    assert S is not None, "columns of A must lie in their own column lattice"
    dj = det_bareiss_psd(_gram_int(J))
    ds = det_bareiss_psd(_gram_int(S.transpose()))
    return dj * ds


def _fk_structure_parts(A: IntMatrix, K: Optional[IntMatrix] = None,
                        D: Optional[IntMatrix] = None):
    """(kernel square, torsion order, cokernel-projection square, rank).

    The three values are the squared FK determinants of the kernel inclusion
    and torsion-free cokernel projection, and |tors(coker A)|; all exact.
    Precomputed saturated kernel bases of A and A^T may be passed in.
    """
    if K is None:
        K = kernel_lattice(A)
    r = A.cols - K.cols
    jk_sq = det_bareiss_psd(_gram_int(K)) if K.cols else 1
    sf = smith_normal_form(A)
    if sf.rank != r:
        raise IdentityViolation("rank mismatch between kernel and Smith form")
    tors = 1
    for d in sf.invariant_factors:
        tors *= d
    if D is None:
        D = kernel_lattice(A.transpose())
    if D.cols == 0:
        prc_sq: Fraction = Fraction(1)
    else:
        L = column_hnf(D.transpose())
        piv = _pivot_rows_of_colhnf(L)
        detL = 1
        for j, p in enumerate(piv):
            detL *= L[p, j]
        gram_d = det_bareiss_psd(_gram_int(D))
        prc_sq = Fraction(gram_d, detL * detL)
    return jk_sq, tors, prc_sq, r


def _fk_square_structure(A: IntMatrix, K: Optional[IntMatrix] = None,
                         D: Optional[IntMatrix] = None) -> Fraction:
    jk_sq, tors, prc_sq, _ = _fk_structure_parts(A, K, D)
    sq = Fraction(jk_sq) * tors * tors * prc_sq
    if sq.denominator != 1:
        raise IdentityViolation("non-integer FK determinant square")
    return sq


_DENSE_LIMIT = 64


def fk_determinant(A: IntMatrix, kernel: Optional[IntMatrix] = None,
                   left_kernel: Optional[IntMatrix] = None) -> FKDet:
    """Fuglede-Kadison determinant of A over the trivial group, exactly.

    square_exact equals the Cauchy-Binet sum of squared maximal-rank minors;
    rank 0 gives the empty product 1.  Saturated kernel bases of A and A^T
    may be supplied to avoid recomputing them.
    """
    if A.rows == 0 or A.cols == 0 or A.is_zero():
        return FKDet(0.0, Fraction(1))
    if max(A.rows, A.cols) <= _DENSE_LIMIT:
        sq = _fk_square_minor_sum(A)
        if sq is None:
            sq = _fk_square_image_lattice(A)
        sq = Fraction(sq)
    else:
        r = A.cols - kernel.cols if kernel is not None else rank(A)
        corank_cost = (A.cols - r) ** 3 + (A.rows - r) ** 3
        if kernel is None and left_kernel is None and 2 * r ** 3 < corank_cost:
            sq = Fraction(_fk_square_image_lattice(A))
        else:
            sq = Fraction(_fk_square_structure(A, kernel, left_kernel))
    return FKDet(0.5 * ln_of_fraction(sq), sq)


def fk_factorization_check(A: IntMatrix) -> dict:
    """Verify det(u) = det(j_k) * |tors(coker u)| * det(pr_c) exactly.

    det(u) is evaluated by a route independent of the factorization (minor
    enumeration, falling back to the image-lattice split); the right-hand
    factors come from the kernel Gram, the Smith form, and the cokernel
    projection Gram.  The three sandwich inequalities are also asserted.
    Raises IdentityViolation on any failure; returns the four values.
    """
    sq_u = _fk_square_minor_sum(A)
    if sq_u is None:
        sq_u = _fk_square_image_lattice(A)
    sq_u = Fraction(sq_u)
    jk_sq, tors, prc_sq, _ = _fk_structure_parts(A)
    product = Fraction(jk_sq) * tors * tors * prc_sq
    if product != sq_u:
        raise IdentityViolation(
            f"FK factorization mismatch: det(u)^2 = {sq_u}, "
            f"factors give {product}")
    for name, val in (("j_k", Fraction(jk_sq)),
                      ("tors", Fraction(tors * tors)),
                      ("pr_c", prc_sq)):
        if not (1 <= val <= sq_u):
            raise IdentityViolation(
                f"sandwich violated for {name}: {val} vs det^2 {sq_u}")
    return {
        "det_u": FKDet(0.5 * ln_of_fraction(sq_u), sq_u),
        "det_jk": FKDet(0.5 * ln_of_fraction(Fraction(jk_sq)), Fraction(jk_sq)),
        "tors_coker": tors,
        "det_prc": FKDet(0.5 * ln_of_fraction(prc_sq), prc_sq),
    }
