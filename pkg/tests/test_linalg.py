"""Exact linear algebra: elimination, kernels, subspace lattice."""

import random
from fractions import Fraction

import pytest
import sympy

from antiassoc.linalg import Matrix, SingularMatrixError, Subspace
from antiassoc.scalars import CYCLO, ComplexField, QQ


def random_matrix(rng, rows, cols, span=2):
    return Matrix.from_rows(
        QQ, [[Fraction(rng.randint(-span, span)) for _ in range(cols)] for _ in range(rows)]
    )


class TestRref:
    def test_identity_fixed_point(self):
        I3 = Matrix.identity(QQ, 3)
        R, rank, _ = I3.rref()
        assert R == I3 and rank == 3

    def test_zero_matrix(self):
        Z = Matrix.zeros(QQ, 2, 5)
        R, rank, _ = Z.rref()
        assert rank == 0 and R.is_zero()

    def test_rank_against_sympy(self):
        rng = random.Random(11)
        for _ in range(25):
            m = random_matrix(rng, rng.randint(1, 8), rng.randint(1, 8))
            assert m.rank() == sympy.Matrix([list(r) for r in m.rows]).rank()

    def test_rank_plus_nullity(self):
        rng = random.Random(5)
        for _ in range(30):
            m = random_matrix(rng, rng.randint(1, 12), rng.randint(1, 12))
            assert m.rank() + m.kernel().dim == m.ncols

    def test_kernel_reconstruction(self):
        rng = random.Random(17)
        for _ in range(30):
            m = random_matrix(rng, rng.randint(1, 10), rng.randint(1, 10))
            for v in m.kernel().vectors():
                assert all(x == 0 for x in m.apply(v))


class TestCocycleSystemExample:
    """The 3-dim algebra with the single product e1 e1 = e2."""

    def build_system(self):
        # theta(e_i e_j, e_k) + theta(e_i, e_j e_k) = 0, unknowns theta(e_a, e_b)
        rows = []
        prod = {(0, 0): (0, 1, 0)}
        for i in range(3):
            for j in range(3):
                for k in range(3):
                    row = [Fraction(0)] * 9
                    hit = False
                    if (i, j) in prod:
                        for l, cl in enumerate(prod[(i, j)]):
                            if cl:
                                row[l * 3 + k] += cl
                                hit = True
                    if (j, k) in prod:
                        for l, cl in enumerate(prod[(j, k)]):
                            if cl:
                                row[i * 3 + l] += cl
                                hit = True
                    if hit and any(row):
                        rows.append(row)
        return Matrix(QQ, rows)

    def test_rank_four_over_nine_unknowns(self):
        m = self.build_system()
        assert m.ncols == 9
        assert m.rank() == 4  # sympy oracle agrees (frozen)

    def test_kernel_dimension_five(self):
        assert self.build_system().kernel().dim == 5


class TestSolve:
    def test_identity_solve(self):
        I3 = Matrix.identity(QQ, 3)
        b = (Fraction(1), Fraction(2), Fraction(3))
        assert I3.solve(b) == b

    def test_singular_consistent(self):
        m = Matrix.from_rows(QQ, [[1, 2], [2, 4]])
        sol = m.solve((Fraction(3), Fraction(6)))
        assert sol is not None and m.apply(sol) == (Fraction(3), Fraction(6))

    def test_inconsistent_returns_none(self):
        m = Matrix.from_rows(QQ, [[1, 2], [2, 4]])
        assert m.solve((Fraction(3), Fraction(7))) is None

    def test_basis_change_coordinates(self):
        # 5-dim algebra frame (e1, e2, e4, t e3, e5) at t = 1/4:
        # E1 E2 = e1 e2 = e4 = E3, so the solved coordinates are (0,0,1,0,0)
        t = Fraction(1, 4)
        rows = [
            [1, 0, 0, 0, 0],
            [0, 1, 0, 0, 0],
            [0, 0, 0, 1, 0],
            [0, 0, t, 0, 0],
            [0, 0, 0, 0, 1],
        ]
        B = Matrix.from_rows(QQ, rows)
        e4 = (Fraction(0), Fraction(0), Fraction(0), Fraction(1), Fraction(0))
        coords = B.transpose().solve(e4)
        assert coords == (0, 0, 1, 0, 0)

    def test_solve_many_mixed_consistency(self):
        m = Matrix.from_rows(QQ, [[1, 0], [0, 0]])
        good, bad = m.solve_many([(Fraction(2), Fraction(0)), (Fraction(0), Fraction(1))])
        assert good == (2, 0) and bad is None

    def test_numeric_solve_and_inverse(self):
        cf = ComplexField(128)
        m = Matrix.from_rows(cf, [[2, 1], [1, 3]])
        x = m.solve((cf.of(5), cf.of(10)))
        r = m.apply(x)
        assert abs(r[0] - cf.of(5)) < 1e-30
        inv = m.inverse()
        prod = m * inv
        assert abs(prod[0, 0] - cf.one) < 1e-30

    def test_numeric_singular_detection(self):
        cf = ComplexField(128)
        m = Matrix.from_rows(cf, [[1, 1], [1, 1]])
        with pytest.raises(SingularMatrixError):
            m._solve_numeric([(cf.one, cf.one)])


class TestSubspaces:
    def test_trivial_intersections(self):
        U = Subspace.from_vectors(QQ, 3, [(1, 0, 0), (0, 1, 0)])
        W = Subspace.from_vectors(QQ, 3, [(0, 0, 1)])
        assert U.intersect(U) == U
        assert U.intersect(W).dim == 0

    def test_annihilator_intersection_example(self):
        # forms D12 - D21 and D13 on a 3-dim space: the joint kernel is zero
        n1 = Matrix.from_rows(QQ, [[0, 1, 0], [-1, 0, 0], [0, 0, 0]])
        n2 = Matrix.from_rows(QQ, [[0, 0, 1], [0, 0, 0], [0, 0, 0]])
        a1 = n1.transpose().stack(n1).kernel()
        a2 = n2.transpose().stack(n2).kernel()
        assert a1.vectors() == ((0, 0, 1),)
        assert a2.vectors() == ((0, 1, 0),)
        assert a1.intersect(a2).dim == 0

    def test_dimension_formula_random(self):
        rng = random.Random(23)
        for _ in range(40):
            n = 6
            A = Subspace.from_vectors(
                QQ, n, [[Fraction(rng.randint(-2, 2)) for _ in range(n)] for _ in range(rng.randint(1, 4))]
            )
            B = Subspace.from_vectors(
                QQ, n, [[Fraction(rng.randint(-2, 2)) for _ in range(n)] for _ in range(rng.randint(1, 4))]
            )
            meet = A.intersect(B)
            join = A + B
            assert A.dim + B.dim == join.dim + meet.dim
            assert A.contains_subspace(meet) and B.contains_subspace(meet)
            assert join.contains_subspace(A) and join.contains_subspace(B)

    def test_canonical_representation(self):
        rng = random.Random(31)
        for _ in range(20):
            vecs = [[Fraction(rng.randint(-3, 3)) for _ in range(5)] for _ in range(3)]
            U = Subspace.from_vectors(QQ, 5, vecs)
            # rescaled and reordered generators give the identical basis matrix
            shuffled = [[2 * x for x in vecs[2]], vecs[0], vecs[1]]
            V = Subspace.from_vectors(QQ, 5, shuffled)
            assert U == V and U.basis == V.basis

    def test_cyclo_field_subspaces(self):
        from antiassoc.scalars import CYCLO_I

        U = Subspace.from_vectors(CYCLO, 2, [(CYCLO_I, CYCLO.one)])
        assert U.dim == 1
        assert U.contains((CYCLO.one, -CYCLO_I))  # i*(1, -i) = (i, 1)
