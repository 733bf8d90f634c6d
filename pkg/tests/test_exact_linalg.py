import itertools
import math
import random
from fractions import Fraction
from math import gcd

import numpy as np
import pytest

from homgrow.errors import DimensionMismatch
from homgrow.exact_linalg import (
    IntMatrix,
    cokernel_structure,
    det_bareiss,
    det_bareiss_psd,
    fk_determinant,
    fk_factorization_check,
    gram_determinant,
    kernel_lattice,
    rank,
    smith_normal_form,
    solve_in_lattice,
)
from homgrow.exact_linalg import (
    _fk_square_image_lattice,
    _fk_square_minor_sum,
    _fk_square_structure,
    _gram_int,
)


def _random_matrix(rng, max_dim=6, bound=5):
    n, m = rng.randint(0, max_dim), rng.randint(0, max_dim)
    return IntMatrix(n, m, [rng.randint(-bound, bound) for _ in range(n * m)])


def _minor_gcd(A, k):
    lists = A.to_lists()
    g = 0
    for I in itertools.combinations(range(A.rows), k):
        for J in itertools.combinations(range(A.cols), k):
            g = gcd(g, det_bareiss([[lists[i][j] for j in J] for i in I]))
    return g


class TestSmithNormalForm:
    def test_zero_matrix(self):
        sf = smith_normal_form(IntMatrix.from_rows([[0]]))
        assert sf.rank == 0 and sf.invariant_factors == ()

    def test_worked_example(self):
        sf = smith_normal_form(IntMatrix.from_rows([[2, 4], [6, 8]]))
        assert sf.invariant_factors == (2, 4)

    def test_diagonal_rechaining(self):
        sf = smith_normal_form(IntMatrix.diagonal([6, 4]))
        assert sf.invariant_factors == (2, 12)

    def test_empty(self):
        sf = smith_normal_form(IntMatrix.zeros(0, 3))
        assert sf.rank == 0 and sf.invariant_factors == ()

    def test_gcd_of_minors(self):
        rng = random.Random(101)
        for _ in range(60):
            A = _random_matrix(rng)
            sf = smith_normal_form(A)
            prod = 1
            for k, d in enumerate(sf.invariant_factors, start=1):
                prod *= d
                assert _minor_gcd(A, k) == prod

    def test_transforms(self):
        rng = random.Random(102)
        for _ in range(60):
            A = _random_matrix(rng)
            sf = smith_normal_form(A, with_transforms=True)
            D = sf.left_transform @ A @ sf.right_transform
            n, m = A.shape
            assert all(D[i, j] == 0
                       for i in range(n) for j in range(m) if i != j)
            diag = tuple(D[i, i] for i in range(min(n, m)) if D[i, i])
            assert diag == sf.invariant_factors
            assert abs(det_bareiss(sf.left_transform.to_lists())) == 1
            assert abs(det_bareiss(sf.right_transform.to_lists())) == 1


class TestKernelLattice:
    def test_sum_map(self):
        K = kernel_lattice(IntMatrix.from_rows([[1, 1]]))
        assert K.shape == (2, 1)
        assert sorted(K.column(0)) == [-1, 1]

    def test_identity(self):
        assert kernel_lattice(IntMatrix.identity(3)).shape == (3, 0)

    def test_zero(self):
        K = kernel_lattice(IntMatrix.zeros(2, 2))
        assert K.shape == (2, 2)
        assert cokernel_structure(K) == (0, ())

    def test_saturation(self):
        # quotient Z^cols / ker is torsion-free: all invariant factors 1
        rng = random.Random(103)
        for _ in range(80):
            A = _random_matrix(rng)
            K = kernel_lattice(A)
            assert (A @ K).is_zero()
            if K.cols:
                _, facs = cokernel_structure(K)
                assert facs == ()

    def test_solve_roundtrip(self):
        rng = random.Random(104)
        for _ in range(60):
            A = _random_matrix(rng, max_dim=5)
            K = kernel_lattice(A)
            if K.cols == 0:
                continue
            # random integer combinations lie in the lattice
            X = IntMatrix(K.cols, 2,
                          [rng.randint(-3, 3) for _ in range(K.cols * 2)])
            B = K @ X
            Y = solve_in_lattice(K, B)
            assert Y == X


class TestCokernelStructure:
    def test_crt_merge(self):
        assert cokernel_structure(IntMatrix.diagonal([2, 3])) == (0, (6,))

    def test_zero_map(self):
        assert cokernel_structure(IntMatrix.zeros(2, 1)) == (2, ())

    def test_multiplication(self):
        assert cokernel_structure(IntMatrix.from_rows([[5]])) == (0, (5,))


class TestFKDeterminant:
    def test_multiplication_by_n(self):
        for n in (1, 2, 3, 7):
            d = fk_determinant(IntMatrix.from_rows([[n]]))
            assert d.square_exact == n * n

    def test_column_vector(self):
        d = fk_determinant(IntMatrix.from_rows([[1], [1]]))
        assert d.square_exact == 2
        assert abs(d.log_value - 0.5 * math.log(2)) < 1e-12

    def test_zero_matrix(self):
        assert fk_determinant(IntMatrix.zeros(3, 2)).square_exact == 1

    def test_routes_agree(self):
        rng = random.Random(105)
        for _ in range(120):
            A = _random_matrix(rng)
            s1 = _fk_square_minor_sum(A)
            s2 = _fk_square_image_lattice(A)
            s3 = _fk_square_structure(A)
            assert s1 == s2 == s3

    def test_float_eigenvalue_crosscheck(self):
        # square_exact equals the product of nonzero eigenvalues of A^T A
        rng = random.Random(106)
        for _ in range(60):
            n, m = rng.randint(1, 8), rng.randint(1, 8)
            A = IntMatrix(n, m, [rng.randint(-5, 5) for _ in range(n * m)])
            r = rank(A)
            if r == 0:
                continue
            G = np.array(_gram_int(A), dtype=float)
            eig = sorted(np.linalg.eigvalsh(G))[::-1][:r]
            prod = float(np.prod(eig))
            sq = float(fk_determinant(A).square_exact)
            assert abs(prod - sq) <= 1e-6 * max(1.0, abs(sq))

    def test_orthogonal_invariance(self):
        # signed permutations on either side leave the determinant alone
        rng = random.Random(107)
        for _ in range(40):
            A = _random_matrix(rng, max_dim=5)
            if A.rows == 0 or A.cols == 0:
                continue
            perm = list(range(A.rows))
            rng.shuffle(perm)
            signs = [rng.choice((1, -1)) for _ in range(A.rows)]
            P = IntMatrix.from_rows([
                [signs[i] if j == perm[i] else 0 for j in range(A.rows)]
                for i in range(A.rows)])
            qperm = list(range(A.cols))
            rng.shuffle(qperm)
            qsigns = [rng.choice((1, -1)) for _ in range(A.cols)]
            Q = IntMatrix.from_rows([
                [qsigns[i] if j == qperm[i] else 0 for j in range(A.cols)]
                for i in range(A.cols)])
            assert fk_determinant(P @ A @ Q).square_exact == \
                fk_determinant(A).square_exact

    def test_square_at_least_one(self):
        rng = random.Random(108)
        for _ in range(60):
            A = _random_matrix(rng)
            assert fk_determinant(A).square_exact >= 1


class TestFKFactorization:
    def test_diag_2_3(self):
        rep = fk_factorization_check(IntMatrix.diagonal([2, 3]))
        assert rep["det_u"].square_exact == 36
        assert rep["det_jk"].square_exact == 1
        assert rep["tors_coker"] == 6
        assert rep["det_prc"].square_exact == 1

    def test_row_2_0(self):
        rep = fk_factorization_check(IntMatrix.from_rows([[2, 0]]))
        assert rep["det_u"].square_exact == 4
        assert rep["det_jk"].square_exact == 1
        assert rep["tors_coker"] == 2

    def test_zero(self):
        rep = fk_factorization_check(IntMatrix.zeros(2, 2))
        assert rep["det_u"].square_exact == 1
        assert rep["tors_coker"] == 1

    def test_random_exact(self):
        rng = random.Random(109)
        for _ in range(200):
            fk_factorization_check(_random_matrix(rng))


class TestGramDeterminant:
    def test_orthonormal(self):
        assert gram_determinant([(1, 0), (0, 1)]) == 1

    def test_single_vector(self):
        assert gram_determinant([(1, 1)]) == 2

    def test_rational(self):
        assert gram_determinant([(Fraction(1, 2), Fraction(-1, 2))]) == \
            Fraction(1, 2)

    def test_empty(self):
        assert gram_determinant([]) == 1

    def test_dependent_vectors_vanish(self):
        assert gram_determinant([(1, 2), (2, 4)]) == 0

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            gram_determinant([(1, 0), (1,)])


class TestBareiss:
    def test_psd_agrees_with_general(self):
        rng = random.Random(110)
        for _ in range(100):
            B = _random_matrix(rng, max_dim=5, bound=4)
            G = _gram_int(B)
            assert det_bareiss(G) == det_bareiss_psd(G)

    def test_known_determinant(self):
        assert det_bareiss([[1, 2], [3, 4]]) == -2
        assert det_bareiss([]) == 1
