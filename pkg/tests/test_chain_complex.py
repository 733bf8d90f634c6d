import math
import random
from fractions import Fraction

import pytest

from homgrow.chain_complex import (
    IntChainComplex,
    alpha_log_dets,
    d_of_abelian_group,
    d_primewise,
    direct_sum,
    homology,
    laplacian,
    rho_2,
    rho_Z,
    shift,
    tensor,
    verify_rho_identity,
)
from homgrow.corpus import random_complex, random_unimodular
from homgrow.errors import DegreeOutOfRange, InvalidComplex
from homgrow.exact_linalg import IntMatrix


def circle_level(i):
    e = [0] * (i * i)
    for j in range(i):
        e[j * i + j] -= 1
        e[((j + 1) % i) * i + j] += 1
    return IntChainComplex([i, i], [IntMatrix(i, i, e)])


def mult_complex(n):
    return IntChainComplex([1, 1], [IntMatrix.from_rows([[n]])])


class TestConstruction:
    def test_boundary_condition_enforced(self):
        with pytest.raises(InvalidComplex):
            IntChainComplex([1, 1, 1], [IntMatrix.from_rows([[1]]),
                                        IntMatrix.from_rows([[1]])])

    def test_shape_check(self):
        with pytest.raises(InvalidComplex):
            IntChainComplex([2, 1], [IntMatrix.from_rows([[1]])])


class TestHomology:
    def test_circle_quotient(self):
        h = homology(circle_level(3), primes=(2, 3, 5))
        assert h.betti_q == [1, 1]
        assert h.invariant_factors == [(), ()]
        assert h.d_hn == [1, 1]

    def test_multiplication_by_three(self):
        h = homology(mult_complex(3), primes=(3,))
        assert h.invariant_factors[0] == (3,)
        assert h.betti_q == [0, 0]
        assert abs(h.log_tors[0] - math.log(3)) < 1e-12
        # universal coefficients: s_3 contributes in degrees 0 and 1
        assert h.betti_mod_p[3] == [1, 1]

    def test_zero_complex(self):
        h = homology(IntChainComplex([0], []))
        assert h.betti_q == [0]

    def test_mod_p_against_fp_rank(self):
        # betti_mod_p from invariant factors equals an independent F_p rank
        rng = random.Random(201)
        for _ in range(40):
            C = random_complex(rng)
            h = homology(C, primes=(2, 3, 5))
            for p in (2, 3, 5):
                for n in range(C.top_degree + 1):
                    expected = _fp_betti(C, n, p)
                    assert h.betti_mod_p[p][n] == expected, (n, p)


def _fp_rank(M, p):
    rows = [[x % p for x in M.row(i)] for i in range(M.rows)]
    r = 0
    cols = M.cols
    row_used = [False] * M.rows
    for j in range(cols):
        piv = None
        for i in range(M.rows):
            if not row_used[i] and rows[i][j] % p:
                piv = i
                break
        if piv is None:
            continue
        row_used[piv] = True
        r += 1
        inv = pow(rows[piv][j], p - 2, p)
        rows[piv] = [(x * inv) % p for x in rows[piv]]
        for i in range(M.rows):
            if i != piv and rows[i][j]:
                f = rows[i][j]
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], rows[piv])]
    return r


def _fp_betti(C, n, p):
    rank_n = _fp_rank(C.differential(n), p) if n >= 1 else 0
    rank_n1 = _fp_rank(C.differential(n + 1), p) if n < C.top_degree else 0
    return C.dim(n) - rank_n - rank_n1


class TestMinimalGenerators:
    def test_coprime_merge(self):
        # Z/p + Z/q with p != q is cyclic
        assert d_primewise((2, 3), 0) == 1
        assert d_of_abelian_group((6,), 0) == 1

    def test_mixed(self):
        assert d_of_abelian_group((2, 4), 2) == 4

    def test_trivial(self):
        assert d_of_abelian_group((), 0) == 0

    def test_formulas_agree(self):
        rng = random.Random(202)
        for _ in range(200):
            k = rng.randint(0, 4)
            chain = []
            d = rng.choice([2, 2, 3, 4])
            for _ in range(k):
                chain.append(d)
                d *= rng.choice([1, 1, 2, 3])
            free = rng.randint(0, 3)
            assert d_of_abelian_group(chain, free) == d_primewise(chain, free)

    def test_sandwich(self):
        # dim_Q(Q @ H_n) <= dim_Fp(F_p @ H_n) <= d(H_n)
        #                <= dim_Q + ln|tors|/ln 2, on random homologies
        rng = random.Random(203)
        for _ in range(40):
            C = random_complex(rng)
            h = homology(C, primes=(2, 3, 5))
            for n in range(C.top_degree + 1):
                t = h.tors_order[n]
                for p in (2, 3, 5):
                    s_p = sum(1 for d in h.invariant_factors[n] if d % p == 0)
                    dim_fp = h.betti_q[n] + s_p
                    assert h.betti_q[n] <= dim_fp <= h.d_hn[n]
                assert h.d_hn[n] <= h.betti_q[n] + (
                    math.log(t) / math.log(2) if t > 1 else 0) + 1e-9

    def test_subadditivity_on_split_sequences(self):
        # d(M0 + M2) <= d(M0) + d(M2), and each summand's d at most the sum's
        rng = random.Random(204)
        for _ in range(100):
            f0 = sorted(rng.choice([2, 3, 4, 9]) for _ in range(rng.randint(0, 3)))
            f2 = sorted(rng.choice([2, 3, 4, 9]) for _ in range(rng.randint(0, 3)))
            r0, r2 = rng.randint(0, 2), rng.randint(0, 2)
            d0 = d_primewise(f0, r0)
            d2 = d_primewise(f2, r2)
            dsum = d_primewise(list(f0) + list(f2), r0 + r2)
            assert dsum <= d0 + d2
            assert d0 <= dsum and d2 <= dsum


class TestTorsionInvariants:
    def test_rho_z_multiplication(self):
        assert abs(rho_Z(mult_complex(3)) - math.log(3)) < 1e-12

    def test_rho_z_circle(self):
        for i in (1, 2, 5, 8):
            assert abs(rho_Z(circle_level(i))) < 1e-12

    def test_rho_z_empty(self):
        assert rho_Z(IntChainComplex([0], [])) == 0.0

    def test_rho_2_circle(self):
        for i in (1, 2, 3, 8):
            assert abs(rho_2(circle_level(i)) - math.log(i)) < 1e-12

    def test_rho_2_multiplication(self):
        for n in (1, 2, 5):
            assert abs(rho_2(mult_complex(n)) - math.log(n)) < 1e-12

    def test_laplacian_circle(self):
        L = laplacian(circle_level(4), 1)
        assert L.row(0) == (2, -1, 0, -1)

    def test_laplacian_edge_case(self):
        C = IntChainComplex([2, 1], [IntMatrix.from_rows([[1], [1]])])
        assert laplacian(C, 0).to_lists() == [[1, 1], [1, 1]]

    def test_laplacian_degree_range(self):
        with pytest.raises(DegreeOutOfRange):
            laplacian(circle_level(2), 5)


class TestAlpha:
    def test_circle_values(self):
        for i in (1, 2, 3, 5, 16):
            a = alpha_log_dets(circle_level(i))
            assert a.square_exact[1] == i
            assert a.square_exact[0] == Fraction(1, i)
            assert abs(a.log_det_alpha[1] - 0.5 * math.log(i)) < 1e-12

    def test_concentrated_complex(self):
        a = alpha_log_dets(IntChainComplex([1], []))
        assert a.square_exact == [Fraction(1)]

    def test_invariance_under_homology_rebasing(self):
        # the alpha square does not depend on the Z-basis chosen for H_n(C)_f
        from homgrow.chain_complex import ChainAnalysis
        from homgrow.exact_linalg import _gram_int
        from fractions import Fraction
        from homgrow.chain_complex import _fraction_inverse

        def alpha_square_with_lifts(an, n, Z):
            W = an.harmonic(n)
            WtW = _gram_int(W)
            WtZ = (W.transpose() @ Z).to_lists()
            inv = _fraction_inverse(WtW)
            k = len(WtW)
            b = Z.cols
            gram = [[sum(Fraction(WtZ[a][i]) * inv[a][c] * WtZ[c][j]
                         for a in range(k) for c in range(k))
                     for j in range(b)] for i in range(b)]
            from homgrow.exact_linalg import det_fraction
            return det_fraction(gram)

        rng = random.Random(205)
        for _ in range(20):
            C = random_complex(rng)
            an = ChainAnalysis(C)
            for n in range(C.top_degree + 1):
                b = an.betti(n)
                if b == 0:
                    continue
                Z = an.free_lifts(n)
                U = random_unimodular(b, rng)
                assert alpha_square_with_lifts(an, n, Z @ U) == \
                    an.alpha_square(n)

    def test_invariance_under_orthogonal_base_change(self):
        # signed permutations of the chain bases preserve the Hilbert
        # structure, hence every alpha square
        rng = random.Random(206)
        for _ in range(15):
            C = random_complex(rng)
            a1 = alpha_log_dets(C)
            perms = []
            for n in range(C.top_degree + 1):
                d = C.dim(n)
                order = list(range(d))
                rng.shuffle(order)
                signs = [rng.choice((1, -1)) for _ in range(d)]
                perms.append(IntMatrix.from_rows(
                    [[signs[i] if j == order[i] else 0 for j in range(d)]
                     for i in range(d)]))
            inv = [P.transpose() for P in perms]
            diffs = [perms[n - 1] @ C.differential(n) @ inv[n]
                     for n in range(1, C.top_degree + 1)]
            C2 = IntChainComplex(C.dims, diffs)
            a2 = alpha_log_dets(C2)
            assert a1.square_exact == a2.square_exact


class TestRhoIdentity:
    def test_circle(self):
        for i in (1, 2, 3, 8):
            rep = verify_rho_identity(circle_level(i))
            assert abs(rep["alpha_sum"] + math.log(i)) < 1e-12

    def test_multiplication(self):
        rep = verify_rho_identity(mult_complex(4))
        assert abs(rep["rho_Z"] - rep["rho_2"]) < 1e-12

    def test_zero(self):
        verify_rho_identity(IntChainComplex([0], []))

    def test_random_corpus(self):
        rng = random.Random(206)
        for _ in range(60):
            verify_rho_identity(random_complex(rng))


class TestConstructions:
    def test_tensor_with_point(self):
        t = tensor(circle_level(3), IntChainComplex([1], []))
        assert t.dims == [3, 3]
        assert t.differentials[0] == circle_level(3).differentials[0]

    def test_shift_moves_homology(self):
        s = shift(IntChainComplex([1], []), 1)
        assert homology(s).betti_q == [0, 1]

    def test_direct_sum_betti_additivity(self):
        ds = direct_sum(circle_level(2), circle_level(3))
        assert homology(ds).betti_q == [2, 2]

    def test_tensor_kunneth_toruslike(self):
        # circle x circle has the betti numbers of the torus
        t = tensor(circle_level(2), circle_level(2))
        assert homology(t).betti_q == [1, 2, 1]
