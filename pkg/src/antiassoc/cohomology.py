"""Second cohomology, automorphism action on cocycles, central extensions.

Scalar-valued bilinear forms on an n-dimensional algebra are n x n
matrices in the Delta basis: entry (i, j) is the value on (e_i, e_j).
A cocycle satisfies theta(xy, z) + theta(x, yz) = 0; a coboundary is
theta = delta f with delta f(x, y) = f(xy).  H^2 is the quotient.
"""

from __future__ import annotations

from dataclasses import dataclass

from .algebra import AlgebraSC, annihilator, check_antiassociative
from .linalg import Matrix, Subspace
from .scalars import RatFun, RatFunField


class CocycleError(ValueError):
    pass


class AutomorphismError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Z^2, B^2, H^2
# ---------------------------------------------------------------------------

def cocycle_constraint_matrix(A: AlgebraSC) -> Matrix:
    """Rows of the linear system cutting out Z^2 inside the n^2 bilinear forms.

    Unknown theta(e_i, e_j) sits at coordinate i*n + j.  For each triple
    (i, j, k): sum_l c[i][j][l] theta(e_l, e_k) + sum_l c[j][k][l] theta(e_i, e_l) = 0.
    """
    n = A.dim
    fld = A.field
    rows = []
    for i in range(n):
        for j in range(n):
            for k in range(n):
                row = [fld.zero] * (n * n)
                nonzero = False
                for l in range(n):
                    clk = A.c(i, j, l)
                    if not fld.is_zero(clk):
                        row[l * n + k] = row[l * n + k] + clk
                        nonzero = True
                    cil = A.c(j, k, l)
                    if not fld.is_zero(cil):
                        row[i * n + l] = row[i * n + l] + cil
                        nonzero = True
                if nonzero:
                    rows.append(row)
    if not rows:
        return Matrix.zeros(fld, 1, n * n)
    return Matrix(fld, rows)


def compute_Z2(A: AlgebraSC) -> Subspace:
    return cocycle_constraint_matrix(A).kernel()


def coboundary(A: AlgebraSC, functional) -> Matrix:
    """delta f as a matrix; `functional` gives f(e_k) for each k."""
    n = A.dim
    fld = A.field
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            total = fld.zero
            for k in range(n):
                if not fld.is_zero(A.c(i, j, k)):
                    total = total + A.c(i, j, k) * functional[k]
            row.append(total)
        rows.append(row)
    return Matrix(fld, rows)


def compute_B2(A: AlgebraSC) -> Subspace:
    n = A.dim
    fld = A.field
    vecs = []
    for k in range(n):
        f = [fld.one if m == k else fld.zero for m in range(n)]
        vecs.append(coboundary(A, f).vectorize())
    return Subspace.from_vectors(fld, n * n, vecs)


@dataclass
class CohomologySpaces:
    z2: Subspace
    b2: Subspace
    h2_reps: list  # cocycle matrices forming a transversal of B^2 in Z^2

    @property
    def dim_h2(self) -> int:
        return len(self.h2_reps)


def compute_H2(A: AlgebraSC) -> CohomologySpaces:
    """Canonical transversal: first rows of the Z^2 RREF basis that extend B^2."""
    z2 = compute_Z2(A)
    b2 = compute_B2(A)
    if not z2.contains_subspace(b2):
        raise CocycleError(f"B^2 not contained in Z^2 for {A.name}")
    n = A.dim
    fld = A.field
    reps = []
    span = b2
    for vec in z2.vectors():
        if span.dim == z2.dim:
            break
        extended = span + Subspace.from_vectors(fld, n * n, [vec])
        if extended.dim > span.dim:
            reps.append(matrix_from_vector(fld, n, vec))
            span = extended
    return CohomologySpaces(z2, b2, reps)


def matrix_from_vector(fld, n: int, vec) -> Matrix:
    return Matrix(fld, [vec[i * n : (i + 1) * n] for i in range(n)])


def is_cocycle(A: AlgebraSC, theta: Matrix) -> bool:
    return compute_Z2(A).contains(theta.vectorize())


def cocycle_annihilator(theta: Matrix) -> Subspace:
    """x with theta(x, -) = theta(-, x) = 0: common kernel of the matrix and its transpose."""
    stacked = theta.transpose().stack(theta)
    return stacked.kernel()


# ---------------------------------------------------------------------------
# Extensions
# ---------------------------------------------------------------------------

@dataclass
class ExtensionSpec:
    base: AlgebraSC
    cocycles: list  # list of Matrix
    name: str = ""

    @property
    def s(self) -> int:
        return len(self.cocycles)


def check_Ts(spec: ExtensionSpec) -> bool:
    """True iff the chosen classes admit an extension with no annihilator component:
    the joint cocycle annihilator meets Ann(A) trivially and the classes are
    linearly independent in H^2.
    """
    A = spec.base
    if not spec.cocycles:
        return False
    for theta in spec.cocycles:
        if not is_cocycle(A, theta):
            raise CocycleError("extension data contains a non-cocycle")
    meet = annihilator(A)
    for theta in spec.cocycles:
        meet = meet.intersect(cocycle_annihilator(theta))
        if meet.dim == 0:
            break
    if meet.dim != 0:
        return False
    b2 = compute_B2(A)
    n = A.dim
    span = b2
    for theta in spec.cocycles:
        extended = span + Subspace.from_vectors(A.field, n * n, [theta.vectorize()])
        if extended.dim == span.dim:
            return False
        span = extended
    return True


def central_extension(spec: ExtensionSpec, name: str | None = None) -> AlgebraSC:
    """(n+s)-dimensional algebra with product xy + sum_m theta_m(x, y) e_{n+m}."""
    A = spec.base
    n, s = A.dim, spec.s
    fld = A.field
    for theta in spec.cocycles:
        if not is_cocycle(A, theta):
            raise CocycleError("central extension requires cocycles")
    m = n + s
    constants = []
    for i in range(m):
        plane = []
        for j in range(m):
            vec = [fld.zero] * m
            if i < n and j < n:
                base = A.product_basis(i, j)
                for k in range(n):
                    vec[k] = base[k]
                for t_index, theta in enumerate(spec.cocycles):
                    vec[n + t_index] = theta[i, j]
            plane.append(tuple(vec))
        constants.append(tuple(plane))
    out = AlgebraSC(
        name=name or spec.name or f"{A.name}_ext",
        dim=m,
        field=fld,
        constants=tuple(constants),
        params=A.params,
        exclusions=A.exclusions,
    )
    report = check_antiassociative(out)
    if not report.ok:
        raise CocycleError(f"extension of {A.name} is not antiassociative")
    return out


# ---------------------------------------------------------------------------
# Automorphism action
# ---------------------------------------------------------------------------

def is_automorphism(A: AlgebraSC, phi: Matrix) -> bool:
    """phi(e_i) phi(e_j) = phi(e_i e_j) with phi(e_c) = column c of phi."""
    n = A.dim
    fld = A.field
    if not phi.is_invertible():
        return False
    cols = phi.transpose().rows
    for i in range(n):
        for j in range(n):
            lhs = A.multiply(cols[i], cols[j])
            rhs = phi.apply(A.product_basis(i, j))
            if any(not fld.is_zero(a - b) for a, b in zip(lhs, rhs)):
                return False
    return True


def aut_action(A: AlgebraSC, phi: Matrix, theta: Matrix, verify: bool = True) -> Matrix:
    """(phi theta)(x, y) = theta(phi x, phi y), i.e. phi^T theta phi."""
    if verify and not is_automorphism(A, phi):
        raise AutomorphismError("matrix is not an automorphism of the algebra")
    return phi.transpose() * theta * phi


# ---------------------------------------------------------------------------
# Classes modulo coboundaries
# ---------------------------------------------------------------------------

def class_coordinates(A: AlgebraSC, theta: Matrix, basis_mats) -> tuple:
    """Coordinates of [theta] on the given independent classes, mod B^2.

    Solves theta = sum_i beta_i basis_i + delta f; the beta_i are unique when
    the basis classes are independent in H^2.  Raises if theta is outside
    the span (i.e. not a cocycle, or not in the chosen subspace of H^2).
    """
    n = A.dim
    fld = A.field
    columns = [m.vectorize() for m in basis_mats]
    for k in range(n):
        f = [fld.one if m == k else fld.zero for m in range(n)]
        columns.append(coboundary(A, f).vectorize())
    system = Matrix(fld, [list(col) for col in zip(*columns)])
    sol = system.solve(theta.vectorize())
    if sol is None:
        raise CocycleError("cocycle is outside the spanned cohomology subspace")
    return tuple(sol[: len(basis_mats)])


def class_span_equal(A: AlgebraSC, thetas_a, thetas_b, basis_mats) -> bool:
    """Same subspace of H^2 spanned by the two class lists, coordinates mod B^2."""
    coords_a = [class_coordinates(A, t, basis_mats) for t in thetas_a]
    coords_b = [class_coordinates(A, t, basis_mats) for t in thetas_b]
    sa = Subspace.from_vectors(A.field, len(basis_mats), coords_a)
    sb = Subspace.from_vectors(A.field, len(basis_mats), coords_b)
    return sa == sb


# ---------------------------------------------------------------------------
# Symbolic alpha-star verification
# ---------------------------------------------------------------------------

@dataclass
class AlphaReport:
    family: str
    automorphism: str
    results: list  # (index, ok, residual RatFun or None)

    @property
    def ok(self) -> bool:
        return all(ok for _, ok, _ in self.results)


def verify_alpha_formulas(
    A_sym: AlgebraSC,
    nabla_mats,
    phi_sym: Matrix,
    expected,
    family: str,
    automorphism: str = "phi",
) -> AlphaReport:
    """Conjugate a generic class combination and compare with stated formulas.

    All inputs live over one rational-function field containing the
    automorphism entries, the coefficient symbols a1..as and any family
    parameter.  theta = sum_i a_i nabla_i; the conjugated matrix is reduced
    modulo coboundaries and its coordinates on the nabla classes must equal
    `expected` as rational-function identities.
    """
    fld = A_sym.field
    if not isinstance(fld, RatFunField):
        raise TypeError("alpha verification is symbolic; use a RatFunField")
    if not is_automorphism(A_sym, phi_sym):
        raise AutomorphismError(f"{family}/{automorphism}: shape is not an automorphism")
    s = len(nabla_mats)
    coeff_syms = [fld.sym(f"a{i+1}") for i in range(s)]
    theta = Matrix.zeros(fld, A_sym.dim, A_sym.dim)
    for a_i, nab in zip(coeff_syms, nabla_mats):
        theta = theta + a_i * nab
    conj = aut_action(A_sym, phi_sym, theta, verify=False)
    coords = class_coordinates(A_sym, conj, nabla_mats)
    results = []
    for idx, (got, want) in enumerate(zip(coords, expected), start=1):
        diff = got - want
        ok = diff.is_zero()
        results.append((idx, ok, None if ok else diff))
    return AlphaReport(family, automorphism, results)


def verify_reduction(
    A: AlgebraSC,
    phi: Matrix,
    thetas_in,
    thetas_expected,
    basis_mats,
) -> bool:
    """A stated substitution sends the input classes onto the expected span."""
    moved = [aut_action(A, phi, t) for t in thetas_in]
    return class_span_equal(A, moved, thetas_expected, basis_mats)


# ---------------------------------------------------------------------------
# Emptiness of the extension condition (single classes)
# ---------------------------------------------------------------------------

def ts_empty_symbolic(A: AlgebraSC) -> bool:
    """Proof that no cocycle has Ann(theta) meeting Ann(A) trivially.

    A generic element of Z^2 is formed with fresh symbols g1..gK; the rank of
    its action on Ann(A) is computed over the rational-function field.  Rank
    short of dim Ann(A) there implies rank short everywhere, hence every
    cocycle leaves part of Ann(A) annihilated.
    """
    z2 = compute_Z2(A)
    ann = annihilator(A)
    if ann.dim == 0:
        return False
    k = z2.dim
    base_syms = A.params if A.is_parametric() else ()
    sym_names = list(base_syms) + [f"g{i+1}" for i in range(k)]
    fld = RatFunField(sym_names)

    def lift(x):
        if isinstance(x, RatFun):
            return fld.of(x)
        return fld.of(x)

    gsyms = [fld.sym(f"g{i+1}") for i in range(k)]
    n = A.dim
    generic = [[fld.zero] * n for _ in range(n)]
    for g, vec in zip(gsyms, z2.vectors()):
        for i in range(n):
            for j in range(n):
                generic[i][j] = generic[i][j] + g * lift(vec[i * n + j])
    rows = []
    for v in ann.vectors():
        vl = [lift(x) for x in v]
        col_theta_v = []  # theta(v, e_j) and theta(e_j, v) stacked
        for j in range(n):
            col_theta_v.append(sum((vl[i] * generic[i][j] for i in range(n)), fld.zero))
        for j in range(n):
            col_theta_v.append(sum((generic[j][i] * vl[i] for i in range(n)), fld.zero))
        rows.append(col_theta_v)
    m = Matrix(fld, rows).transpose()
    return m.rank() < ann.dim


def ts_empty_probe(A: AlgebraSC, rng, count: int = 10_000) -> bool:
    """Random falsification probe: every sampled cocycle must keep a piece of Ann(A)."""
    z2 = compute_Z2(A)
    ann = annihilator(A)
    if ann.dim == 0:
        return False
    n = A.dim
    fld = A.field
    z2_vecs = z2.vectors()
    ann_vecs = ann.vectors()
    fast = _integerize(z2_vecs, fld) if fld is not None else None
    ann_fast = _integerize(ann_vecs, fld)
    if fast is not None and ann_fast is not None:
        sparse = [[(idx, val) for idx, val in enumerate(vec) if val] for vec in fast]
        a = len(ann_fast)
        for _ in range(count):
            theta = [0] * (n * n)
            for vec in sparse:
                c = rng.randint(-9, 9)
                if c:
                    for idx, val in vec:
                        theta[idx] += c * val
            rows = []
            for v in ann_fast:
                row = []
                for j in range(n):
                    row.append(sum(v[i] * theta[i * n + j] for i in range(n) if v[i]))
                for j in range(n):
                    row.append(sum(theta[j * n + i] * v[i] for i in range(n) if v[i]))
                rows.append(row)
            if _int_rank(rows) >= a:
                return False
        return True
    for _ in range(count):
        coeffs = [fld.of(rng.randint(-9, 9)) for _ in z2_vecs]
        theta = [
            [
                sum((c * vec[i * n + j] for c, vec in zip(coeffs, z2_vecs) if not fld.is_zero(c)), fld.zero)
                for j in range(n)
            ]
            for i in range(n)
        ]
        rows = []
        for v in ann_vecs:
            col = []
            for j in range(n):
                col.append(sum((v[i] * theta[i][j] for i in range(n)), fld.zero))
            for j in range(n):
                col.append(sum((theta[j][i] * v[i] for i in range(n)), fld.zero))
            rows.append(col)
        if Matrix(fld, rows).rank() >= ann.dim:
            return False
    return True


def _integerize(vectors, fld):
    """Scale rational vectors to integers; None when entries are not rational."""
    from fractions import Fraction
    from math import lcm

    from .scalars import Cyclo12

    out = []
    for vec in vectors:
        fracs = []
        for x in vec:
            if isinstance(x, Fraction):
                fracs.append(x)
            elif isinstance(x, Cyclo12) and x.is_rational():
                fracs.append(x.to_fraction())
            else:
                return None
        scale = lcm(*(f.denominator for f in fracs)) if fracs else 1
        out.append([int(f * scale) for f in fracs])
    return out


def _int_rank(rows) -> int:
    """Rank of a small integer matrix by fraction-free elimination."""
    m = [list(r) for r in rows if any(r)]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        pivot = None
        for k in range(rank, len(m)):
            if m[k][c]:
                pivot = k
                break
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        pr = m[rank]
        for k in range(rank + 1, len(m)):
            if m[k][c]:
                f1, f2 = pr[c], m[k][c]
                m[k] = [f1 * a - f2 * b for a, b in zip(m[k], pr)]
        rank += 1
        if rank == len(m):
            break
    return rank
