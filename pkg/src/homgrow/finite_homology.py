"""Group homology of finite abelian groups and the mu/nu estimate suite.

Resolutions are tensor products of the periodic rank-one resolutions
... -> Z[Z/d] --N--> Z[Z/d] --(t-1)--> Z[Z/d] -> Z, so the rank in degree n
is the number of weak compositions of n into m parts.  H_n(G; M) is computed
by expanding the resolution differentials through the action matrices of a
presented module and taking homology of the resulting complex of presented
abelian groups.

The estimate machinery evaluates the explicit constants C_0, C_1 (and the
derived D_0, D_1) of the minimal-generator bound and checks the kernel and
cokernel inequalities for the comparison maps

    mu : M -> Z tensor_{ZG} M        (coinvariants)
    nu_n : Z tensor_{ZG} H_n(C) -> H_n(Z tensor_{ZG} C)

on quotient complexes with their deck actions.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

from .chain_complex import ChainAnalysis, IntChainComplex, d_of_abelian_group
from .errors import (
    DimensionMismatch,
    HypothesisViolated,
    IdentityViolation,
    IncompatibleAction,
)
from .exact_linalg import (
    IntMatrix,
    column_hnf,
    kernel_lattice,
    smith_normal_form,
    solve_in_lattice,
)
from .group_ring import ModuleWithAction, QuotientComplex, QuotientSpec

__all__ = [
    "FinAbGroup",
    "Resolution",
    "standard_resolution",
    "group_homology",
    "augmentation_filtration",
    "coinvariants",
    "nu_kernel_cokernel",
    "estimate_constants",
    "verify_estimate_bounds",
]


@dataclass(frozen=True)
class FinAbGroup:
    """Finite abelian group as a chained product of cyclic groups.

    factors = (d_1, ..., d_m) with d_1 | d_2 | ... | d_m, each >= 2; the
    empty tuple is the trivial group.  d(G) = m and |G| is the product.
    """
    factors: tuple

    def __post_init__(self):
        f = tuple(int(d) for d in self.factors)
        if any(d < 2 for d in f):
            raise DimensionMismatch("factors must be >= 2")
        for a, b in zip(f, f[1:]):
            if b % a:
                raise DimensionMismatch("factors must form a divisibility chain")
        object.__setattr__(self, "factors", f)

    @classmethod
    def from_orders(cls, orders: Sequence[int]) -> "FinAbGroup":
        """Chained normalization of an arbitrary cyclic decomposition."""
        orders = [int(o) for o in orders if int(o) > 1]
        if not orders:
            return cls(())
        sf = smith_normal_form(IntMatrix.diagonal(orders))
        return cls(tuple(d for d in sf.invariant_factors if d != 1))

    @property
    def order(self) -> int:
        out = 1
        for d in self.factors:
            out *= d
        return out

    @property
    def d(self) -> int:
        return len(self.factors)


# ---------------------------------------------------------------------------
# resolutions
# ---------------------------------------------------------------------------

def _weak_compositions(n: int, m: int) -> list:
    """All m-tuples of nonnegative integers summing to n, lex sorted."""
    if m == 0:
        return [()] if n == 0 else []
    out = []
    for first in range(n + 1):
        for rest in _weak_compositions(n - first, m - 1):
            out.append((first,) + rest)
    out.sort()
    return out


def _expand_group_ring_matrix(entries: list, orders: Sequence[int]) -> IntMatrix:
    """Regular representation of a matrix over Z[prod Z/orders].

    `entries` is rows x cols of dicts {exponent tuple: coefficient} with
    exponents reduced mod the orders; the group elements are ordered
    lexicographically.
    """
    elems = list(itertools.product(*[range(o) for o in orders]))
    pos = {g: k for k, g in enumerate(elems)}
    ng = len(elems)
    rows = len(entries)
    cols = len(entries[0]) if rows else 0
    out = [0] * ((rows * ng) * (cols * ng))
    total_cols = cols * ng
    for i in range(rows):
        for j in range(cols):
            for e, c in entries[i][j].items():
                red = tuple(x % o for x, o in zip(e, orders))
                for v, vk in pos.items():
                    tgt = tuple((a + b) % o for a, b, o in zip(red, v, orders))
                    out[(i * ng + pos[tgt]) * total_cols + j * ng + vk] += c
    return IntMatrix(rows * ng, cols * ng, out)


def _periodic_entry(order: int, degree: int) -> dict:
    """Differential F_degree -> F_{degree-1} of the rank-one resolution of Z/order.

    Odd degrees use t - 1, even positive degrees the norm element."""
    if degree % 2 == 1:
        return {(1,): 1, (0,): -1}
    return {(t,): 1 for t in range(order)}


def _tensor_resolution_entries(orders: Sequence[int], up_to: int):
    """(ranks, basis lists, differential entry matrices) of the tensor resolution."""
    m = len(orders)
    comps = [_weak_compositions(n, m) for n in range(up_to + 1)]
    ranks = [len(c) for c in comps]
    zero_exp = (0,) * m
    diffs = []
    for n in range(1, up_to + 1):
        src = comps[n]
        dst = comps[n - 1]
        dst_pos = {c: i for i, c in enumerate(dst)}
        mat = [[dict() for _ in src] for _ in dst]
        for cj, comp in enumerate(src):
            sign_acc = 1
            for j in range(m):
                if comp[j] >= 1:
                    tgt = tuple(c - (1 if t == j else 0)
                                for t, c in enumerate(comp))
                    entry1d = _periodic_entry(orders[j], comp[j])
                    entry = {}
                    for (e,), c in entry1d.items():
                        exp = [0] * m
                        exp[j] = e
                        entry[tuple(exp)] = c * sign_acc
                    ri = dst_pos[tgt]
                    acc = mat[ri][cj]
                    for e, c in entry.items():
                        acc[e] = acc.get(e, 0) + c
                if comp[j] % 2 == 1:
                    sign_acc = -sign_acc
        diffs.append(mat)
    return ranks, comps, diffs


@dataclass
class Resolution:
    """Free ZG-resolution data expanded to integer matrices.

    `orders` is the cyclic decomposition that was used; `ranks[n]` is the
    ZG-rank of F_n; `differentials[n-1]` maps F_n -> F_{n-1} over ZG and
    `differentials_int[n-1]` is its regular representation.
    """
    group: FinAbGroup
    orders: tuple
    length: int
    ranks: List[int]
    differentials: list
    differentials_int: List[IntMatrix]

    def verify_exactness(self) -> None:
        """Certify H_n = 0 for 1 <= n < length and coker(d_1) = Z."""
        if self.length == 0:
            return
        dims = [r * max(1, _prod(self.orders)) for r in self.ranks]
        C = IntChainComplex(dims, self.differentials_int)
        an = ChainAnalysis(C)
        from .exact_linalg import cokernel_structure
        free, facs = cokernel_structure(self.differentials_int[0]) \
            if self.differentials_int else (dims[0], ())
        if (free, facs) != (1, ()):
            raise IdentityViolation("augmentation cokernel is not Z")
        for n in range(1, self.length):
            if an.betti(n) != 0 or an.torsion_factors(n):
                raise IdentityViolation(f"resolution not exact in degree {n}")


def _prod(xs) -> int:
    out = 1
    for x in xs:
        out *= x
    return out


def standard_resolution(G: FinAbGroup, up_to: int) -> Resolution:
    """Tensor resolution of Z over ZG, to the requested degree.

    dim_{ZG}(F_n) equals the number of weak compositions of n into d(G)
    parts, i.e. binom(n + d(G) - 1, d(G) - 1).
    """
    if up_to < 0:
        raise DimensionMismatch("up_to must be >= 0")
    return _resolution_over_orders(G, G.factors, up_to)


def _resolution_over_orders(G: FinAbGroup, orders: Sequence[int],
                            up_to: int) -> Resolution:
    orders = tuple(int(o) for o in orders if int(o) > 1)
    if not orders:
        # trivial group: Z in degree 0 only
        ranks = [1] + [0] * up_to
        diffs_int = [IntMatrix.zeros(1, 0)] if up_to >= 1 else []
        diffs_int += [IntMatrix.zeros(0, 0)] * max(0, up_to - 1)
        return Resolution(G, (), up_to, ranks, [], diffs_int)
    ranks, _, diffs = _tensor_resolution_entries(orders, up_to)
    diffs_int = [_expand_group_ring_matrix(mat, orders) for mat in diffs]
    res = Resolution(G, orders, up_to, ranks, diffs, diffs_int)
    res.verify_exactness()
    return res


# ---------------------------------------------------------------------------
# presented-module homology
# ---------------------------------------------------------------------------

def _action_power(acts: List[IntMatrix], exps: Sequence[int]) -> IntMatrix:
    g = acts[0].rows if acts else 0
    out = IntMatrix.identity(g)
    for A, e in zip(acts, exps):
        for _ in range(e):
            out = A @ out
    return out


def _apply_ring_element(entry: dict, acts: List[IntMatrix], g: int) -> IntMatrix:
    out = IntMatrix.zeros(g, g)
    for e, c in entry.items():
        out = out + _action_power(acts, e).scale(c)
    return out


def _block_matrix(blocks: list, g: int) -> IntMatrix:
    rows_b = len(blocks)
    cols_b = len(blocks[0]) if rows_b else 0
    rows = rows_b * g
    cols = cols_b * g
    out = [0] * (rows * cols)
    for bi in range(rows_b):
        for bj in range(cols_b):
            B = blocks[bi][bj]
            if B is None or B.is_zero():
                continue
            for i in range(g):
                base = (bi * g + i) * cols + bj * g
                row = B.row(i)
                for j in range(g):
                    if row[j]:
                        out[base + j] += row[j]
    return IntMatrix(rows, cols, out)


def _block_diag(P: IntMatrix, copies: int) -> IntMatrix:
    g, q = P.rows, P.cols
    rows, cols = g * copies, q * copies
    out = [0] * (rows * cols)
    for b in range(copies):
        for i in range(g):
            base = (b * g + i) * cols + b * q
            row = P.row(i)
            for j in range(q):
                if row[j]:
                    out[base + j] = row[j]
    return IntMatrix(rows, cols, out)


def _preimage_generators(N: IntMatrix, target_relations: IntMatrix) -> IntMatrix:
    """Column-Hermite generators of {v : N v in im(target_relations)}."""
    if N.rows == 0:
        return IntMatrix.identity(N.cols)
    joint = IntMatrix.hstack(N, target_relations) if target_relations.cols \
        else N
    K = kernel_lattice(joint)
    if K.cols == 0:
        return IntMatrix.zeros(N.cols, 0)
    proj = IntMatrix(N.cols, K.cols,
                     [K[i, j] for i in range(N.cols) for j in range(K.cols)])
    return column_hnf(proj)


def _quotient_structure(S: IntMatrix, R: IntMatrix) -> tuple:
    """Structure (free rank, factors) of (lattice S)/(sublattice R).

    Both arguments are generator matrices inside the same ambient Z^g; the
    columns of R must lie in the lattice of S.
    """
    Sh = column_hnf(S)
    if Sh.cols == 0:
        return 0, ()
    if R.cols == 0:
        return Sh.cols, ()
    W = solve_in_lattice(Sh, R)
    if W is None:
        raise IdentityViolation("relations escape the subgroup lattice")
    sf = smith_normal_form(W)
    facs = tuple(d for d in sf.invariant_factors if d != 1)
    return Sh.cols - sf.rank, facs


def _order_of(structure: tuple) -> Optional[int]:
    free, facs = structure
    if free:
        return None
    return _prod(facs)


def _homology_of_presented(out_map: IntMatrix, out_relations: IntMatrix,
                           mid_relations: IntMatrix,
                           in_map: IntMatrix) -> tuple:
    """Homology at the middle of presented abelian groups.

    Maps are given on generator level; homology is
    {y : out_map y in im(out_relations)} / (im(in_map) + im(mid_relations)).
    """
    Z = _preimage_generators(out_map, out_relations)
    bound_cols = []
    if in_map.cols:
        bound_cols.append(in_map)
    if mid_relations.cols:
        bound_cols.append(mid_relations)
    if not bound_cols:
        B = IntMatrix.zeros(Z.rows, 0)
    elif len(bound_cols) == 1:
        B = bound_cols[0]
    else:
        B = IntMatrix.hstack(bound_cols[0], bound_cols[1])
    return _quotient_structure(Z, B)


def group_homology(G: FinAbGroup, M: ModuleWithAction, n: int) -> tuple:
    """H_n(G; M) as (free_rank, invariant_factors).

    The actions of M must be indexed by the chained factors of G (after
    dropping trivial factors from M's generator orders).
    """
    orders = tuple(o for o in M.generator_orders if o > 1)
    if orders != G.factors:
        chained = FinAbGroup.from_orders(M.generator_orders)
        if chained.factors != G.factors:
            raise IncompatibleAction(
                f"module acted on by {M.generator_orders}, group is {G.factors}")
    return _group_homology_over_orders(M, n)


def _group_homology_over_orders(M: ModuleWithAction, n: int) -> tuple:
    """H_n of M over the product of cyclic groups given by its own orders."""
    orders = tuple(o for o in M.generator_orders if o > 1)
    acts = [A for A, o in zip(M.generators_action, M.generator_orders) if o > 1]
    g = M.num_generators
    if not orders:
        if n == 0:
            return _quotient_structure(IntMatrix.identity(g), M.presentation)
        return 0, ()
    ranks, _, diffs = _tensor_resolution_entries(orders, n + 1)

    def expanded(k: int) -> IntMatrix:
        """id_M tensor d_k on generator level."""
        if k < 1 or k > n + 1:
            return IntMatrix.zeros(g * (ranks[k - 1] if 1 <= k <= n + 1 else 0), 0)
        mat = diffs[k - 1]
        blocks = [[_apply_ring_element(mat[i][j], acts, g)
                   for j in range(ranks[k])] for i in range(ranks[k - 1])]
        return _block_matrix(blocks, g)

    out_map = expanded(n) if n >= 1 else IntMatrix.zeros(0, g * ranks[0])
    out_rel = _block_diag(M.presentation, ranks[n - 1]) if n >= 1 \
        else IntMatrix.zeros(0, 0)
    mid_rel = _block_diag(M.presentation, ranks[n])
    in_map = expanded(n + 1)
    return _homology_of_presented(out_map, out_rel, mid_rel, in_map)


# ---------------------------------------------------------------------------
# filtration, coinvariants, nu
# ---------------------------------------------------------------------------

def augmentation_filtration(M: ModuleWithAction,
                            max_steps: int = 64) -> tuple:
    """(is_nilpotent, filtration_length or None) via powers of the
    augmentation ideal: the least r with I^r M = 0, if the chain reaches 0.

    A filtration with trivial quotients of length r exists iff I^r M = 0, and
    the minimal such r is the filtration length.
    """
    g = M.num_generators
    rel = column_hnf(M.presentation) if M.presentation.cols \
        else IntMatrix.zeros(g, 0)
    acts = [A for A, o in zip(M.generators_action, M.generator_orders) if o > 1]
    L = IntMatrix.identity(g)
    prev_hnf = None
    for step in range(max_steps + 1):
        # does L + rel reduce to rel, i.e. I^step M = 0?
        combined = IntMatrix.hstack(L, rel) if rel.cols else L
        cur = column_hnf(combined)
        if rel.cols:
            inside = solve_in_lattice(rel, L) is not None if L.cols else True
        else:
            inside = L.cols == 0 or L.is_zero()
        if inside:
            return True, step
        if prev_hnf is not None and cur == prev_hnf:
            return False, None
        prev_hnf = cur
        # next power: spanned by (A_j - 1) L
        pieces = []
        for A in acts:
            pieces.append((A @ L) - L)
        if not pieces:
            return False, None
        nxt = pieces[0]
        for P in pieces[1:]:
            nxt = IntMatrix.hstack(nxt, P)
        L = column_hnf(nxt)
    return False, None


def coinvariants(M: ModuleWithAction) -> dict:
    """Z tensor_{ZG} M = M / I.M together with ker(mu) = I.M.

    When M is nilpotent of filtration length r, the bounds
    |ker mu| <= |G|^{(r-1) d(G) d(M)} and
    d(M) <= r (d(G)+1)^{r-1} d(Z tensor M) are asserted.
    """
    g = M.num_generators
    acts = [A for A, o in zip(M.generators_action, M.generator_orders) if o > 1]
    pieces = [M.presentation] if M.presentation.cols else []
    for A in acts:
        pieces.append(A - IntMatrix.identity(g))
    if pieces:
        R = pieces[0]
        for P in pieces[1:]:
            R = IntMatrix.hstack(R, P)
    else:
        R = IntMatrix.zeros(g, 0)
    quot_structure = _quotient_structure(IntMatrix.identity(g), R)
    # ker(mu) = I.M = (L_1 + rel)/rel
    aug_pieces = [(A - IntMatrix.identity(g)) for A in acts]
    if aug_pieces:
        L1 = aug_pieces[0]
        for P in aug_pieces[1:]:
            L1 = IntMatrix.hstack(L1, P)
    else:
        L1 = IntMatrix.zeros(g, 0)
    rel = M.presentation
    joint = IntMatrix.hstack(L1, rel) if rel.cols else L1
    ker_structure = _quotient_structure(joint, rel) if joint.cols else (0, ())
    ker_order = _order_of(ker_structure)

    nilpotent, length = augmentation_filtration(M)
    report = {
        "quotient": quot_structure,
        "ker_mu": ker_structure,
        "ker_mu_order": ker_order,
        "nilpotent": nilpotent,
        "filtration_length": length,
    }
    if nilpotent:
        r = max(1, length)
        group = FinAbGroup.from_orders(M.generator_orders)
        dG, orderG = group.d, group.order
        free_m, facs_m = M.structure()
        dM = d_of_abelian_group(facs_m, free_m)
        d_quot = d_of_abelian_group(quot_structure[1], quot_structure[0])
        if ker_order is None:
            raise IdentityViolation("nilpotent module with infinite ker(mu)")
        bound = orderG ** ((r - 1) * dG * dM)
        if ker_order > bound:
            raise IdentityViolation(
                f"|ker mu| = {ker_order} exceeds bound {bound}")
        if dM > r * (dG + 1) ** (r - 1) * d_quot:
            raise IdentityViolation("d(M) bound of the mu lemma fails")
        report["ker_mu_bound"] = bound
        report["d_bound"] = r * (dG + 1) ** (r - 1) * d_quot
    return report


def _augmented_complex(qc: QuotientComplex) -> IntChainComplex:
    """Z tensor_{Z[G/G_i]} C[i]: every Laurent entry evaluated at 1."""
    from .group_ring import base_change
    trivial = QuotientSpec((1,) * qc.quotient.m)
    return base_change(qc.source, trivial).complex


def _augmentation_map(qc: QuotientComplex, n: int) -> IntMatrix:
    """Sum over group coordinates on each free block of C[i]_n."""
    ng = qc.quotient.index
    dim_ring = qc.complex.dim(n) // ng if ng else 0
    rows = dim_ring
    cols = qc.complex.dim(n)
    out = [0] * (rows * cols)
    for b in range(rows):
        for gpos in range(ng):
            out[b * cols + b * ng + gpos] = 1
    return IntMatrix(rows, cols, out)


def _homology_map_data(qc: QuotientComplex, n: int):
    """Common data for nu / H_n(pr): cycle bases and the induced matrix."""
    from .group_ring import quotient_homology_module
    an = ChainAnalysis(qc.complex)
    M = quotient_homology_module(qc, n)
    K = an.kernel(n)
    X = an.relations(n)
    aug_cx = _augmented_complex(qc)
    an2 = ChainAnalysis(aug_cx)
    K2 = an2.kernel(n)
    X2 = an2.relations(n)
    A = _augmentation_map(qc, n)
    if K.cols:
        imgs = A @ K
        N = solve_in_lattice(K2, imgs) if K2.cols else IntMatrix.zeros(0, K.cols)
        if N is None:
            raise IdentityViolation("augmented cycle escapes the cycle lattice")
    else:
        N = IntMatrix.zeros(K2.cols, 0)
    return M, X, N, X2, an2


def nu_kernel_cokernel(qc: QuotientComplex, n: int) -> dict:
    """Kernel and cokernel of nu_n : Z tensor H_n(C) -> H_n(Z tensor C).

    Orders are checked against the universal-coefficient bounds
    |ker| <= prod_p |H_{p+1}(G; H_{n-p}(C))| and
    |coker| <= prod_p |H_p(G; H_{n-p}(C))| whenever those are finite.
    """
    from .group_ring import quotient_homology_module
    M, X, N, X2, _ = _homology_map_data(qc, n)
    g = M.num_generators
    acts = [A for A, o in zip(M.generators_action, M.generator_orders) if o > 1]
    co_pieces = [X] if X.cols else []
    for A in acts:
        co_pieces.append(A - IntMatrix.identity(g))
    if co_pieces:
        Rco = co_pieces[0]
        for P in co_pieces[1:]:
            Rco = IntMatrix.hstack(Rco, P)
    else:
        Rco = IntMatrix.zeros(g, 0)
    ker_struct, coker_struct = _map_kernel_cokernel(N, Rco, X2)
    report = {
        "ker": ker_struct,
        "coker": coker_struct,
        "ker_order": _order_of(ker_struct),
        "coker_order": _order_of(coker_struct),
    }
    # bounds
    ker_bound = 1
    coker_bound = 1
    finite = True
    for p in range(1, n + 1):
        Mq = quotient_homology_module(qc, n - p)
        h_p = _group_homology_over_orders(Mq, p)
        h_p1 = _group_homology_over_orders(Mq, p + 1)
        op, op1 = _order_of(h_p), _order_of(h_p1)
        if op is None or op1 is None:
            finite = False
            break
        ker_bound *= op1
        coker_bound *= op
    if finite:
        if report["ker_order"] is None or report["ker_order"] > ker_bound:
            raise IdentityViolation(
                f"|ker nu| = {report['ker_order']} above bound {ker_bound}")
        if report["coker_order"] is None or report["coker_order"] > coker_bound:
            raise IdentityViolation(
                f"|coker nu| = {report['coker_order']} above bound {coker_bound}")
        report["ker_bound"] = ker_bound
        report["coker_bound"] = coker_bound
    return report


def _map_kernel_cokernel(N: IntMatrix, src_relations: IntMatrix,
                         dst_relations: IntMatrix) -> tuple:
    """Kernel and cokernel structures of a map of presented abelian groups."""
    pre = _preimage_generators(N, dst_relations)
    ker = _quotient_structure(pre, src_relations) if pre.cols else (0, ())
    cc_cols = [N] if N.cols else []
    if dst_relations.cols:
        cc_cols.append(dst_relations)
    if cc_cols:
        R = cc_cols[0]
        for P in cc_cols[1:]:
            R = IntMatrix.hstack(R, P)
    else:
        R = IntMatrix.zeros(N.rows, 0)
    coker = _quotient_structure(IntMatrix.identity(N.rows), R)
    return ker, coker


# ---------------------------------------------------------------------------
# estimate constants and the bound verifier
# ---------------------------------------------------------------------------

def estimate_constants(r: int, n: int, p: int) -> tuple:
    """Exact (C0, C1, D0, D1) at (r, n, p) from the proof's recursions.

    Base case C_0(r,n,n) = r 2^{r-1}, C_1(r,n,n) = r-1; below the diagonal
    C_0(r,n,p) = sum_{i=p}^{n-1} r 2^r n^{n+1} C_0(r,i,p) and
    C_1(r,n,p) = n + r + max_i C_1(r,i,p).  D_0, D_1 dominate both displayed
    kernel/cokernel estimates:
    D_0 = (r-1) C_0(r,n,p) + sum_{i=1}^{n-p} n^{n+1} C_0(r,n-i,p),
    D_1 = max(1 + C_1(r,n,p), n + 1 + max_{i=1..n-p} C_1(r,n-i,p)).
    """
    if r < 1:
        raise DimensionMismatch("r must be >= 1")
    if not (0 <= p <= n):
        raise DimensionMismatch("need 0 <= p <= n")
    C0: Dict[tuple, int] = {}
    C1: Dict[tuple, int] = {}
    for nn in range(n + 1):
        for pp in range(nn, -1, -1):
            if pp == nn:
                C0[(nn, pp)] = r * 2 ** (r - 1)
                C1[(nn, pp)] = r - 1
            else:
                C0[(nn, pp)] = sum(r * 2 ** r * nn ** (nn + 1) * C0[(i, pp)]
                                   for i in range(pp, nn))
                C1[(nn, pp)] = nn + r + max(C1[(i, pp)]
                                            for i in range(pp, nn))
    c0, c1 = C0[(n, p)], C1[(n, p)]
    d0 = (r - 1) * c0 + sum(n ** (n + 1) * C0[(n - i, p)]
                            for i in range(1, n - p + 1))
    tail = [C1[(n - i, p)] for i in range(1, n - p + 1)]
    d1 = max([1 + c1] + ([n + 1 + max(tail)] if tail else []))
    return c0, c1, d0, d1


def verify_estimate_bounds(qc: QuotientComplex, r: int, d: int) -> dict:
    """Check the d(H_n) and ln|ker/coker H_n(pr)| estimates for n <= d.

    Requires every H_n(C[i]) for n <= d to be nilpotent of filtration length
    at most r over the deck action; raises HypothesisViolated otherwise.
    """
    from .group_ring import quotient_homology_module
    group = FinAbGroup.from_orders(qc.quotient.moduli)
    dG = group.d
    lnG = math.log(group.order) if group.order > 1 else 0.0
    aug_cx = _augmented_complex(qc)
    aug_an = ChainAnalysis(aug_cx)
    d_aug = []
    for p in range(d + 1):
        facs = aug_an.torsion_factors(p)
        d_aug.append(d_of_abelian_group(facs, aug_an.betti(p)))
    rows = []
    for n in range(d + 1):
        M = quotient_homology_module(qc, n)
        nil, length = augmentation_filtration(M)
        if not nil or (length or 0) > r:
            raise HypothesisViolated(
                f"H_{n} not nilpotent of length <= {r} (got {length})")
        free_m, facs_m = M.structure()
        d_hn = d_of_abelian_group(facs_m, free_m)
        bound_d = sum(
            estimate_constants(r, n, p)[0] * dG ** estimate_constants(r, n, p)[1]
            * d_aug[p]
            for p in range(n + 1))
        if d_hn > bound_d:
            raise IdentityViolation(
                f"d(H_{n}) = {d_hn} exceeds estimate {bound_d}")
        # kernel / cokernel of H_n(pr)
        _, X, N, X2, _ = _homology_map_data(qc, n)
        ker_s, coker_s = _map_kernel_cokernel(N, X, X2)
        ker_o, coker_o = _order_of(ker_s), _order_of(coker_s)
        if ker_o is None or coker_o is None:
            raise IdentityViolation("H_n(pr) has infinite kernel or cokernel")
        bound_ln = sum(
            estimate_constants(r, n, p)[2] * lnG
            * dG ** estimate_constants(r, n, p)[3] * d_aug[p]
            for p in range(n + 1))
        tol = 1e-9
        if math.log(ker_o) > bound_ln + tol or math.log(coker_o) > bound_ln + tol:
            raise IdentityViolation(
                f"ln|ker/coker H_{n}(pr)| exceeds estimate {bound_ln}")
        rows.append({
            "degree": n,
            "d_hn": d_hn,
            "d_bound": bound_d,
            "ker_order": ker_o,
            "coker_order": coker_o,
            "ln_bound": bound_ln,
            "filtration_length": length,
        })
    return {"degrees": rows, "group": group}
