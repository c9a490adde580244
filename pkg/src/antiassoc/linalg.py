"""Dense exact linear algebra over the scalar fields.

Matrices are immutable row-major tuples over one field descriptor (see
scalars: QQ, CYCLO, RatFunField, ComplexField).  Subspaces are kept in
reduced row-echelon form, which makes the representation canonical: two
subspaces are equal iff their basis matrices are identical.
"""

from __future__ import annotations

import gmpy2

from .scalars import BigComplex, working_precision


class SingularMatrixError(ArithmeticError):
    pass


class Matrix:
    __slots__ = ("field", "rows")

    def __init__(self, field, rows):
        self.field = field
        self.rows = tuple(tuple(r) for r in rows)
        if self.rows:
            width = len(self.rows[0])
            if any(len(r) != width for r in self.rows):
                raise ValueError("ragged matrix")

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    @classmethod
    def from_rows(cls, field, rows) -> "Matrix":
        return cls(field, [[field.of(x) for x in row] for row in rows])

    @classmethod
    def zeros(cls, field, nrows: int, ncols: int) -> "Matrix":
        z = field.zero
        return cls(field, [[z] * ncols for _ in range(nrows)])

    @classmethod
    def identity(cls, field, n: int) -> "Matrix":
        z, o = field.zero, field.one
        return cls(field, [[o if i == j else z for j in range(n)] for i in range(n)])

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.nrows != other.nrows or self.ncols != other.ncols:
            return False
        return all(
            a == b for ra, rb in zip(self.rows, other.rows) for a, b in zip(ra, rb)
        )

    def __hash__(self):
        raise TypeError("matrices are not hashable")

    def transpose(self) -> "Matrix":
        return Matrix(self.field, list(zip(*self.rows))) if self.rows else self

    def __add__(self, other: "Matrix") -> "Matrix":
        return Matrix(
            self.field,
            [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)],
        )

    def __sub__(self, other: "Matrix") -> "Matrix":
        return Matrix(
            self.field,
            [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)],
        )

    def __mul__(self, other):
        if isinstance(other, Matrix):
            if self.ncols != other.nrows:
                raise ValueError("dimension mismatch")
            cols = other.transpose().rows
            return Matrix(
                self.field,
                [[_dot(row, col, self.field) for col in cols] for row in self.rows],
            )
        return Matrix(self.field, [[x * other for x in row] for row in self.rows])

    def __rmul__(self, scalar):
        return Matrix(self.field, [[scalar * x for x in row] for row in self.rows])

    def __neg__(self):
        return Matrix(self.field, [[-x for x in row] for row in self.rows])

    def apply(self, vec):
        """Matrix times column vector."""
        if len(vec) != self.ncols:
            raise ValueError("dimension mismatch")
        return tuple(_dot(row, vec, self.field) for row in self.rows)

    def stack(self, other: "Matrix") -> "Matrix":
        if other.nrows == 0:
            return self
        if self.nrows == 0:
            return other
        if self.ncols != other.ncols:
            raise ValueError("width mismatch")
        return Matrix(self.field, self.rows + other.rows)

    def augment(self, other: "Matrix") -> "Matrix":
        if self.nrows != other.nrows:
            raise ValueError("height mismatch")
        return Matrix(self.field, [ra + rb for ra, rb in zip(self.rows, other.rows)])

    def submatrix(self, row_slice, col_slice) -> "Matrix":
        return Matrix(self.field, [row[col_slice] for row in self.rows[row_slice]])

    def is_zero(self) -> bool:
        return all(self.field.is_zero(x) for row in self.rows for x in row)

    def rref(self, pivot_limit: int | None = None):
        """Reduced row-echelon form.  Returns (matrix, rank, pivot columns).

        With `pivot_limit` set, pivots are chosen only among the first
        `pivot_limit` columns (used for augmented solves).
        """
        rows = [list(r) for r in self.rows]
        nr, nc = len(rows), self.ncols
        limit = nc if pivot_limit is None else pivot_limit
        field = self.field
        pivots = []
        r = 0
        for c in range(limit):
            if r == nr:
                break
            pivot_row = None
            if field.exact:
                for k in range(r, nr):
                    if not field.is_zero(rows[k][c]):
                        pivot_row = k
                        break
            else:
                best = None
                for k in range(r, nr):
                    mag = abs(rows[k][c])
                    if best is None or mag > best:
                        best, pivot_row = mag, k
                if pivot_row is not None and _numeric_negligible(best, rows, field):
                    pivot_row = None
            if pivot_row is None:
                continue
            rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
            inv = field.one / rows[r][c]
            rows[r] = [x * inv for x in rows[r]]
            for k in range(nr):
                if k != r and not field.is_zero(rows[k][c]):
                    f = rows[k][c]
                    rows[k] = [a - f * b for a, b in zip(rows[k], rows[r])]
            pivots.append(c)
            r += 1
        return Matrix(field, rows), r, tuple(pivots)

    def rank(self) -> int:
        return self.rref()[1]

    def kernel(self) -> "Subspace":
        """Right kernel: all v with self . v = 0, canonical RREF basis."""
        R, rank, pivots = self.rref()
        nc = self.ncols
        field = self.field
        pivot_set = set(pivots)
        free_cols = [c for c in range(nc) if c not in pivot_set]
        basis = []
        for fc in free_cols:
            vec = [field.zero] * nc
            vec[fc] = field.one
            for r_idx, pc in enumerate(pivots):
                vec[pc] = -R.rows[r_idx][fc]
            basis.append(vec)
        return Subspace.from_vectors(field, nc, basis)

    def solve(self, b):
        """One solution of self . x = b, or None if inconsistent."""
        return self.solve_many([b])[0]

    def solve_many(self, columns):
        """Solve self . x = b for several right-hand sides at once.

        `columns` is a list of vectors; returns a list of solutions (None for
        inconsistent systems).  Free variables are set to zero.
        """
        if not self.field.exact:
            return self._solve_numeric(columns)
        field = self.field
        nc = self.ncols
        if not columns:
            return []
        rhs = Matrix(field, [list(col) for col in zip(*columns)])
        aug = self.augment(rhs)
        R, rank, pivots = aug.rref(pivot_limit=nc)
        out = []
        for j in range(len(columns)):
            col = nc + j
            if any(not field.is_zero(R.rows[r_idx][col]) for r_idx in range(rank, R.nrows)):
                out.append(None)
                continue
            x = [field.zero] * nc
            for r_idx, pc in enumerate(pivots):
                x[pc] = R.rows[r_idx][col]
            out.append(tuple(x))
        return out

    def _solve_numeric(self, columns):
        """Gaussian elimination with partial pivoting over BigComplex.

        A pivot counts as zero only when it drops to within 16 bits of the
        precision floor relative to its own column; rows of wildly different
        scales are expected (degenerating bases).
        """
        field = self.field
        n = self.nrows
        if n != self.ncols:
            raise ValueError("numeric solve expects a square system")
        prec = field.precision
        work = [list(row) + [col[i] for col in columns] for i, row in enumerate(self.rows)]
        with working_precision(prec):
            floor = gmpy2.mpfr(2) ** (-(prec - 16))
        for c in range(n):
            pivot_row, best = None, None
            col_scale = None
            for k in range(c, n):
                mag = abs(work[k][c])
                if col_scale is None or mag > col_scale:
                    col_scale = mag
                if best is None or mag > best:
                    best, pivot_row = mag, k
            if best is None or best == 0 or (col_scale > 0 and best < col_scale * floor):
                raise SingularMatrixError(f"numeric pivot below threshold at column {c}")
            work[c], work[pivot_row] = work[pivot_row], work[c]
            inv = field.one / work[c][c]
            work[c] = [x * inv for x in work[c]]
            for k in range(n):
                if k != c and not work[k][c].is_zero():
                    f = work[k][c]
                    work[k] = [a - f * b for a, b in zip(work[k], work[c])]
        return [tuple(work[i][n + j] for i in range(n)) for j in range(len(columns))]

    def inverse(self) -> "Matrix":
        n = self.nrows
        if n != self.ncols:
            raise ValueError("inverse of a non-square matrix")
        if not self.field.exact:
            cols = self._solve_numeric([tuple(Matrix.identity(self.field, n).rows[i]) for i in range(n)])
            return Matrix(self.field, list(zip(*cols)))
        aug = self.augment(Matrix.identity(self.field, n))
        R, rank, _ = aug.rref(pivot_limit=n)
        if rank < n:
            raise SingularMatrixError("matrix is singular")
        return R.submatrix(slice(0, n), slice(n, 2 * n))

    def is_invertible(self) -> bool:
        if self.nrows != self.ncols:
            return False
        try:
            self.inverse()
            return True
        except SingularMatrixError:
            return False

    def vectorize(self):
        """Row-major flattening."""
        return tuple(x for row in self.rows for x in row)

    def __repr__(self):
        body = "; ".join(" ".join(str(x) for x in row) for row in self.rows)
        return f"Matrix<{self.nrows}x{self.ncols}>[{body}]"


def _dot(u, v, field):
    total = field.zero
    for a, b in zip(u, v):
        if not field.is_zero(a) and not field.is_zero(b):
            total = total + a * b
    return total


def _numeric_negligible(best, rows, field):
    with working_precision(field.precision):
        threshold = gmpy2.mpfr(2) ** (-(field.precision // 2))
        scale = max((abs(x) for row in rows for x in row), default=gmpy2.mpfr(0))
        return scale == 0 or best < scale * threshold


class Subspace:
    """Subspace of F^n held as a canonical RREF basis matrix."""

    __slots__ = ("field", "ambient", "basis")

    def __init__(self, field, ambient: int, basis: Matrix):
        self.field = field
        self.ambient = ambient
        self.basis = basis

    @classmethod
    def from_vectors(cls, field, ambient: int, vectors) -> "Subspace":
        vecs = [v for v in vectors if any(not field.is_zero(x) for x in v)]
        if not vecs:
            return cls(field, ambient, Matrix(field, []))
        R, rank, _ = Matrix(field, vecs).rref()
        return cls(field, ambient, R.submatrix(slice(0, rank), slice(0, ambient)))

    @classmethod
    def zero(cls, field, ambient: int) -> "Subspace":
        return cls(field, ambient, Matrix(field, []))

    @classmethod
    def full(cls, field, ambient: int) -> "Subspace":
        return cls(field, ambient, Matrix.identity(field, ambient))

    @property
    def dim(self) -> int:
        return self.basis.nrows

    def vectors(self):
        return self.basis.rows

    def contains(self, vec) -> bool:
        residual = list(vec)
        field = self.field
        for row in self.basis.rows:
            pivot = next(j for j, x in enumerate(row) if not field.is_zero(x))
            coeff = residual[pivot]
            if not field.is_zero(coeff):
                residual = [a - coeff * b for a, b in zip(residual, row)]
        return all(field.is_zero(x) for x in residual)

    def contains_subspace(self, other: "Subspace") -> bool:
        return all(self.contains(v) for v in other.vectors())

    def __add__(self, other: "Subspace") -> "Subspace":
        if self.ambient != other.ambient:
            raise ValueError("ambient dimension mismatch")
        return Subspace.from_vectors(
            self.field, self.ambient, list(self.vectors()) + list(other.vectors())
        )

    def intersect(self, other: "Subspace") -> "Subspace":
        """Zassenhaus: row reduce [U U; W 0], rows (0, c) give a basis of U cap W."""
        if self.ambient != other.ambient:
            raise ValueError("ambient dimension mismatch")
        n = self.ambient
        field = self.field
        block = [list(row) + list(row) for row in self.basis.rows]
        block += [list(row) + [field.zero] * n for row in other.basis.rows]
        if not block:
            return Subspace.zero(field, n)
        R, rank, _ = Matrix(field, block).rref()
        out = []
        for row in R.rows[:rank]:
            if all(field.is_zero(x) for x in row[:n]):
                out.append(row[n:])
        return Subspace.from_vectors(field, n, out)

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.ambient == other.ambient and self.basis == other.basis

    def __repr__(self):
        return f"Subspace<dim {self.dim} of F^{self.ambient}>"


def rref(m: Matrix):
    """Convenience wrapper returning (reduced matrix, rank)."""
    R, rank, _ = m.rref()
    return R, rank


def kernel(m: Matrix) -> Subspace:
    return m.kernel()


def solve(m: Matrix, b):
    return m.solve(b)


def intersect(a: Subspace, b: Subspace) -> Subspace:
    return a.intersect(b)
