"""Chain complexes over Z[Z^m] and base change to finite quotients.

Laurent-polynomial matrices represent differentials over the group ring of
G = Z^m.  Base change to the finite quotient G / (N_1 Z x ... x N_m Z)
reduces every entry modulo (x_j^{N_j} - 1) and expands it through the regular
representation of the quotient group, producing an integer chain complex of
rank index * rank together with the permutation action of each generator on
every chain level.

The example library lives here as well: the circle, torus Koszul complexes,
products with a circle, and algebraic mapping tori 0 -> Z[t^+-]^k --(tA-I)-->
Z[t^+-]^k -> 0 whose quotient torsion obeys |tors H_0(C[i])| = |det(A^i - I)|.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

from .chain_complex import IntChainComplex
from .errors import (
    DimensionMismatch,
    IncompatibleAction,
    InvalidComplex,
    NonSquareMatrix,
)
from .exact_linalg import (
    IntMatrix,
    column_hnf,
    smith_normal_form,
    solve_in_lattice,
)

__all__ = [
    "LaurentPoly",
    "LaurentChainComplex",
    "QuotientSpec",
    "QuotientComplex",
    "ModuleWithAction",
    "base_change",
    "homology_with_action",
    "operator_norm_bound",
    "circle_complex",
    "torus_complex",
    "product_with_circle",
    "mapping_torus_complex",
]


class LaurentPoly:
    """Element of Z[x_1^{+-1}, ..., x_m^{+-1}]: exponent tuple -> coefficient.

    Zero coefficients are never stored; terms are kept in a dict and compared
    canonically.
    """

    __slots__ = ("m", "terms")

    def __init__(self, m: int, terms: Optional[Dict[tuple, int]] = None):
        self.m = m
        clean = {}
        if terms:
            for e, c in terms.items():
                c = int(c)
                if c:
                    e = tuple(int(x) for x in e)
                    if len(e) != m:
                        raise DimensionMismatch("exponent arity mismatch")
                    clean[e] = clean.get(e, 0) + c
        self.terms = {e: c for e, c in clean.items() if c}

    @classmethod
    def zero(cls, m: int) -> "LaurentPoly":
        return cls(m, {})

    @classmethod
    def const(cls, m: int, c: int) -> "LaurentPoly":
        return cls(m, {(0,) * m: c})

    @classmethod
    def monomial(cls, m: int, exponents: Sequence[int], c: int = 1) -> "LaurentPoly":
        return cls(m, {tuple(exponents): c})

    @classmethod
    def variable(cls, m: int, j: int) -> "LaurentPoly":
        e = [0] * m
        e[j] = 1
        return cls(m, {tuple(e): 1})

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        t = dict(self.terms)
        for e, c in other.terms.items():
            t[e] = t.get(e, 0) + c
        return LaurentPoly(self.m, t)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly(self.m, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        t: Dict[tuple, int] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = t.get(e, 0) + c1 * c2
        return LaurentPoly(self.m, t)

    def scale(self, c: int) -> "LaurentPoly":
        return LaurentPoly(self.m, {e: c * v for e, v in self.terms.items()})

    def coeff_abs_sum(self) -> int:
        return sum(abs(c) for c in self.terms.values())

    def augmentation(self) -> int:
        """Sum of coefficients; the image under all variables -> 1."""
        return sum(self.terms.values())

    def __eq__(self, other) -> bool:
        return (isinstance(other, LaurentPoly) and self.m == other.m
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.m, tuple(sorted(self.terms.items()))))

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for e, c in sorted(self.terms.items()):
            mono = "*".join(f"x{j}^{k}" for j, k in enumerate(e) if k)
            bits.append(f"{c}" + (f"*{mono}" if mono else ""))
        return " + ".join(bits)


class LaurentChainComplex:
    """Finite based free chain complex over Z[Z^m]."""

    __slots__ = ("m", "top_degree", "dims", "differentials")

    def __init__(self, m: int, dims: Sequence[int],
                 differentials: Sequence[Sequence[Sequence[LaurentPoly]]]):
        self.m = m
        self.dims = list(int(d) for d in dims)
        if len(differentials) != len(self.dims) - 1:
            raise InvalidComplex("wrong number of differentials")
        mats: List[List[List[LaurentPoly]]] = []
        for n, mat in enumerate(differentials, start=1):
            rows, cols = self.dims[n - 1], self.dims[n]
            mat = [list(r) for r in mat]
            if len(mat) != rows or any(len(r) != cols for r in mat):
                raise InvalidComplex(f"differential {n} has wrong shape",
                                     degree=n)
            mats.append(mat)
        self.top_degree = len(self.dims) - 1
        self.differentials = mats
        for n in range(1, self.top_degree):
            prod = _poly_matmul(self.differentials[n - 1], self.differentials[n], m)
            if any(not p.is_zero() for row in prod for p in row):
                raise InvalidComplex(f"c_{n} c_{n+1} != 0 over the group ring",
                                     degree=n)

    def differential(self, n: int) -> List[List[LaurentPoly]]:
        return self.differentials[n - 1]

    def dim(self, n: int) -> int:
        if 0 <= n <= self.top_degree:
            return self.dims[n]
        return 0

    def __repr__(self):
        return f"LaurentChainComplex(m={self.m}, dims={self.dims})"


def _poly_matmul(A, B, m):
    rows = len(A)
    inner = len(B)
    cols = len(B[0]) if inner else 0
    out = [[LaurentPoly.zero(m) for _ in range(cols)] for _ in range(rows)]
    for i in range(rows):
        for k in range(inner):
            p = A[i][k]
            if p.is_zero():
                continue
            for j in range(cols):
                q = B[k][j]
                if not q.is_zero():
                    out[i][j] = out[i][j] + p * q
    return out


@dataclass(frozen=True)
class QuotientSpec:
    """Finite quotient of Z^m by N_1 Z x ... x N_m Z."""
    moduli: tuple

    def __post_init__(self):
        if not self.moduli or any(n < 1 for n in self.moduli):
            raise DimensionMismatch("moduli must be positive")
        object.__setattr__(self, "moduli", tuple(int(n) for n in self.moduli))

    @property
    def m(self) -> int:
        return len(self.moduli)

    @property
    def index(self) -> int:
        out = 1
        for n in self.moduli:
            out *= n
        return out

    def elements(self) -> list:
        """Lexicographically ordered exponent tuples of the quotient group."""
        return list(itertools.product(*[range(n) for n in self.moduli]))


@dataclass
class QuotientComplex:
    """Base-changed complex with the deck action of each group generator."""
    complex: IntChainComplex
    quotient: QuotientSpec
    actions: List[List[IntMatrix]]     # per degree, one matrix per generator
    source: "LaurentChainComplex" = None

    @property
    def index(self) -> int:
        return self.quotient.index


@dataclass
class ModuleWithAction:
    """Finitely generated abelian group with commuting finite-order actions.

    The group is coker(presentation); each action matrix acts on the
    generators and must descend to the quotient, commute pairwise, and have
    the order prescribed by `generator_orders`, all modulo the relations.
    """
    presentation: IntMatrix            # generators x relations
    generators_action: List[IntMatrix]
    generator_orders: List[int]

    def __post_init__(self):
        g = self.presentation.rows
        for A in self.generators_action:
            if A.shape != (g, g):
                raise IncompatibleAction("action matrix has wrong shape")
        if len(self.generator_orders) != len(self.generators_action):
            raise IncompatibleAction("one order per acting generator required")
        lat = self._relation_lattice()
        for A in self.generators_action:
            if not _maps_into(A @ self.presentation, lat):
                raise IncompatibleAction("action does not preserve relations")
        for A, B in itertools.combinations(self.generators_action, 2):
            if not _maps_into((A @ B) - (B @ A), lat):
                raise IncompatibleAction("actions do not commute mod relations")
        for A, order in zip(self.generators_action, self.generator_orders):
            P = IntMatrix.identity(g)
            for _ in range(order):
                P = A @ P
            if not _maps_into(P - IntMatrix.identity(g), lat):
                raise IncompatibleAction(
                    f"action does not have order dividing {order}")

    def _relation_lattice(self) -> Optional[IntMatrix]:
        if self.presentation.cols == 0:
            return None
        return column_hnf(self.presentation)

    def relation_hnf(self) -> Optional[IntMatrix]:
        return self._relation_lattice()

    @property
    def num_generators(self) -> int:
        return self.presentation.rows

    def structure(self) -> tuple:
        """(free_rank, chained nonunit invariant factors) of the group."""
        sf = smith_normal_form(self.presentation)
        facs = tuple(d for d in sf.invariant_factors if d != 1)
        return self.presentation.rows - sf.rank, facs

    def order(self) -> Optional[int]:
        free, facs = self.structure()
        if free:
            return None
        out = 1
        for d in facs:
            out *= d
        return out

    def group_order(self) -> int:
        out = 1
        for n in self.generator_orders:
            out *= n
        return out


def _maps_into(M: IntMatrix, lattice_hnf: Optional[IntMatrix]) -> bool:
    """Whether every column of M lies in the given column-Hermite lattice."""
    if M.is_zero():
        return True
    if lattice_hnf is None or lattice_hnf.cols == 0:
        return False
    return solve_in_lattice(lattice_hnf, M) is not None


# ---------------------------------------------------------------------------
# base change
# ---------------------------------------------------------------------------

def _regular_entry_add(entries: list, total_cols: int, row0: int, col0: int,
                       poly: LaurentPoly, q: QuotientSpec,
                       positions: Dict[tuple, int]) -> None:
    """Add the regular-representation block of `poly` at block (row0, col0)."""
    idx = q.elements()
    n = q.index
    mod = q.moduli
    for e, c in poly.terms.items():
        red = tuple(x % N for x, N in zip(e, mod))
        for vpos, v in enumerate(idx):
            target = tuple((a + b) % N for a, b, N in zip(red, v, mod))
            entries[(row0 + positions[target]) * total_cols + col0 + vpos] += c


def base_change(C: LaurentChainComplex, q: QuotientSpec) -> QuotientComplex:
    """C[i] = Z[G/G_i] tensor_{ZG} C via the regular representation.

    Output dims are index * input dims; the composite of consecutive
    differentials is re-verified; the action matrices of the group generators
    on every chain level are returned alongside.
    """
    if q.m != C.m:
        raise DimensionMismatch("quotient arity differs from complex arity")
    idx = q.elements()
    n_g = q.index
    positions = {g: k for k, g in enumerate(idx)}
    dims = [d * n_g for d in C.dims]
    diffs = []
    for n in range(1, C.top_degree + 1):
        rows, cols = dims[n - 1], dims[n]
        entries = [0] * (rows * cols)
        mat = C.differential(n)
        for i in range(C.dims[n - 1]):
            for j in range(C.dims[n]):
                p = mat[i][j]
                if not p.is_zero():
                    _regular_entry_add(entries, cols, i * n_g, j * n_g, p, q,
                                       positions)
        diffs.append(IntMatrix(rows, cols, entries))
    complex_ = IntChainComplex(dims, diffs)   # re-checks boundary composition
    actions = []
    perms = []
    for j in range(q.m):
        perm = [0] * n_g
        for g, k in positions.items():
            g2 = list(g)
            g2[j] = (g2[j] + 1) % q.moduli[j]
            perm[k] = positions[tuple(g2)]
        perms.append(perm)
    for n in range(C.top_degree + 1):
        level = []
        d = C.dims[n]
        for j in range(q.m):
            e = [0] * (dims[n] * dims[n])
            for blk in range(d):
                for k, pk in enumerate(perms[j]):
                    e[(blk * n_g + pk) * dims[n] + blk * n_g + k] = 1
            level.append(IntMatrix(dims[n], dims[n], e))
        actions.append(level)
    return QuotientComplex(complex_, q, actions, C)


def homology_with_action(C: LaurentChainComplex, q: QuotientSpec,
                         n: int) -> ModuleWithAction:
    """H_n(C[i]) with the induced action of each generator of G/G_i."""
    qc = base_change(C, q)
    return quotient_homology_module(qc, n)


def quotient_homology_module(qc: QuotientComplex, n: int) -> ModuleWithAction:
    """Homology of a quotient complex at degree n as a module with action."""
    from .chain_complex import ChainAnalysis
    an = ChainAnalysis(qc.complex)
    K = an.kernel(n)
    X = an.relations(n)
    acts = []
    for A in qc.actions[n]:
        AK = A @ K
        Y = solve_in_lattice(K, AK) if K.cols else IntMatrix.zeros(0, 0)
        if Y is None:
            raise IncompatibleAction("deck action does not preserve cycles")
        acts.append(Y)
    return ModuleWithAction(X, acts, list(qc.quotient.moduli))


def operator_norm_bound(D: Sequence[Sequence[LaurentPoly]]) -> float:
    """Uniform l2-operator-norm bound for every base change of D.

    Each group element acts unitarily, so the sum over all entries of the
    l1-norms of their coefficients dominates the operator norm.  This is an
    upper bound, not the norm itself.
    """
    total = 0
    for row in D:
        for p in row:
            total += p.coeff_abs_sum()
    return float(total)


# ---------------------------------------------------------------------------
# example library
# ---------------------------------------------------------------------------

def circle_complex() -> LaurentChainComplex:
    """0 -> ZG --(t-1)--> ZG -> 0 over G = Z."""
    t = LaurentPoly.variable(1, 0)
    one = LaurentPoly.const(1, 1)
    return LaurentChainComplex(1, [1, 1], [[[t - one]]])


def torus_complex(m: int) -> LaurentChainComplex:
    """Koszul complex on (x_1 - 1, ..., x_m - 1); dims are binomials."""
    if m < 1:
        raise DimensionMismatch("torus_complex needs m >= 1")
    one = LaurentPoly.const(m, 1)
    x = [LaurentPoly.variable(m, j) - one for j in range(m)]
    subsets = [list(itertools.combinations(range(m), k)) for k in range(m + 1)]
    dims = [len(s) for s in subsets]
    diffs = []
    for k in range(1, m + 1):
        rows = [[LaurentPoly.zero(m) for _ in subsets[k]]
                for _ in subsets[k - 1]]
        for cj, S in enumerate(subsets[k]):
            for t_pos, elt in enumerate(S):
                T = tuple(v for v in S if v != elt)
                ri = subsets[k - 1].index(T)
                rows[ri][cj] = x[elt].scale((-1) ** t_pos)
        diffs.append(rows)
    return LaurentChainComplex(m, dims, diffs)


def product_with_circle(C: LaurentChainComplex) -> LaurentChainComplex:
    """Tensor with the circle over an enlarged variable set (new variable last)."""
    m_new = C.m + 1

    def lift(p: LaurentPoly) -> LaurentPoly:
        return LaurentPoly(m_new, {e + (0,): c for e, c in p.terms.items()})

    t = LaurentPoly.variable(m_new, m_new - 1)
    one = LaurentPoly.const(m_new, 1)
    tm1 = t - one
    top = C.top_degree + 1

    def blocks(n):
        return [(p, n - p) for p in range(max(0, n - 1), min(n, C.top_degree) + 1)]

    dims = [sum(C.dim(p) for p, qdeg in blocks(n)) for n in range(top + 1)]
    diffs = []
    for n in range(1, top + 1):
        src = blocks(n)
        dst = blocks(n - 1)
        dst_off = {}
        off = 0
        for p, qdeg in dst:
            dst_off[(p, qdeg)] = off
            off += C.dim(p)
        rows = [[LaurentPoly.zero(m_new) for _ in range(dims[n])]
                for _ in range(dims[n - 1])]
        coff = 0
        for p, qdeg in src:
            cp = C.dim(p)
            if p >= 1 and (p - 1, qdeg) in dst_off:
                roff = dst_off[(p - 1, qdeg)]
                mat = C.differential(p)
                for a in range(len(mat)):
                    for b in range(cp):
                        if not mat[a][b].is_zero():
                            rows[roff + a][coff + b] = lift(mat[a][b])
            if qdeg == 1 and (p, 0) in dst_off:
                roff = dst_off[(p, 0)]
                sgn = -1 if p % 2 else 1
                for a in range(cp):
                    rows[roff + a][coff + a] = tm1.scale(sgn)
            coff += cp
        diffs.append(rows)
    return LaurentChainComplex(m_new, dims, diffs)


def mapping_torus_complex(A: IntMatrix) -> LaurentChainComplex:
    """0 -> Z[t^+-]^k --(tA - I)--> Z[t^+-]^k -> 0 for square nonsingular A.

    Base change to Z/i gives |tors H_0| = |det(A^i - I)| whenever that
    determinant is nonzero.
    """
    if A.rows != A.cols:
        raise NonSquareMatrix("mapping torus needs a square matrix")
    from .exact_linalg import det_bareiss
    if det_bareiss(A.to_lists()) == 0:
        raise NonSquareMatrix("mapping torus needs det(A) != 0")
    k = A.rows
    mat = [[LaurentPoly(1, {(1,): A[i, j], (0,): -(1 if i == j else 0)})
            for j in range(k)] for i in range(k)]
    return LaurentChainComplex(1, [k, k], [mat])
