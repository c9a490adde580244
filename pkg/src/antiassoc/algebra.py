"""Structure-constant algebras and their basis-independent invariants.

An algebra lives in a fixed basis e_1..e_n with product
e_i e_j = sum_k c[i][j][k] e_k.  Everything here works over any exact
scalar field, including rational-function fields for parametric families
(identity checks then hold for all parameter values at once).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .linalg import Matrix, SingularMatrixError, Subspace
from .scalars import CYCLO, QQ, Cyclo12, RatFunField, unify_fields


@dataclass(frozen=True)
class AlgebraSC:
    name: str
    dim: int
    field: object
    constants: tuple  # c[i][j][k], 0-indexed
    params: tuple = ()
    exclusions: dict = dc_field(default_factory=dict, compare=False)

    def c(self, i: int, j: int, k: int):
        return self.constants[i][j][k]

    def product_basis(self, i: int, j: int):
        """Coordinate vector of e_i * e_j."""
        return self.constants[i][j]

    def multiply(self, x, y):
        """Bilinear product of coordinate vectors."""
        n = self.dim
        fld = self.field
        out = [fld.zero] * n
        for i in range(n):
            xi = x[i]
            if fld.is_zero(xi):
                continue
            row = self.constants[i]
            for j in range(n):
                yj = y[j]
                if fld.is_zero(yj):
                    continue
                cij = row[j]
                coeff = xi * yj
                for k in range(n):
                    if not fld.is_zero(cij[k]):
                        out[k] = out[k] + coeff * cij[k]
        return tuple(out)

    def basis_vector(self, i: int):
        fld = self.field
        return tuple(fld.one if k == i else fld.zero for k in range(self.dim))

    def is_parametric(self) -> bool:
        return bool(self.params)

    def evaluate(self, values: dict) -> "AlgebraSC":
        """Instantiate a parametric family at concrete parameter values."""
        if not self.params:
            return self
        missing = [p for p in self.params if p not in values]
        if missing:
            raise ValueError(f"missing parameter values for {missing}")
        for p, v in values.items():
            for bad in self.exclusions.get(p, ()):
                if Cyclo12.coerce(v) == Cyclo12.coerce(bad):
                    raise ValueError(f"excluded parameter value {p}={v}")
        coords = {p: Cyclo12.coerce(values[p]) for p in self.params}
        new_constants = []
        rational = True
        evaluated = []
        for i in range(self.dim):
            plane = []
            for j in range(self.dim):
                vec = []
                for k in range(self.dim):
                    val = self.constants[i][j][k].eval(coords)
                    rational = rational and val.is_rational()
                    vec.append(val)
                plane.append(vec)
            evaluated.append(plane)
        fld = QQ if rational else CYCLO
        for plane in evaluated:
            new_constants.append(
                tuple(tuple(fld.of(v) for v in vec) for vec in plane)
            )
        label = ",".join(f"{p}={values[p]}" for p in self.params)
        return AlgebraSC(
            name=f"{self.name}[{label}]",
            dim=self.dim,
            field=fld,
            constants=tuple(new_constants),
            params=(),
        )

    def __repr__(self):
        return f"AlgebraSC({self.name}, dim={self.dim}, field={self.field!r})"


def make_algebra(name, dim, field, entries, params=(), exclusions=None):
    """Build from a sparse product list [(i, j, k, coeff), ...], 1-indexed."""
    table = [[[field.zero] * dim for _ in range(dim)] for _ in range(dim)]
    for i, j, k, coeff in entries:
        table[i - 1][j - 1][k - 1] = table[i - 1][j - 1][k - 1] + field.of(coeff)
    constants = tuple(tuple(tuple(v) for v in plane) for plane in table)
    return AlgebraSC(name, dim, field, constants, tuple(params), exclusions or {})


@dataclass
class CheckReport:
    name: str
    ok: bool
    failures: list
    details: dict = dc_field(default_factory=dict)

    def __bool__(self):
        return self.ok


def check_antiassociative(A: AlgebraSC) -> CheckReport:
    """(e_i e_j) e_k + e_i (e_j e_k) = 0 for all basis triples."""
    n = A.dim
    fld = A.field
    failures = []
    for i in range(n):
        ei = A.basis_vector(i)
        for j in range(n):
            eij = A.product_basis(i, j)
            for k in range(n):
                left = A.multiply(eij, A.basis_vector(k))
                right = A.multiply(ei, A.product_basis(j, k))
                residual = tuple(a + b for a, b in zip(left, right))
                if any(not fld.is_zero(x) for x in residual):
                    failures.append((i + 1, j + 1, k + 1, residual))
    return CheckReport(f"antiassociativity:{A.name}", not failures, failures)


_BRACKETINGS_4 = (
    lambda m, a, b, c, d: m(m(m(a, b), c), d),
    lambda m, a, b, c, d: m(m(a, m(b, c)), d),
    lambda m, a, b, c, d: m(m(a, b), m(c, d)),
    lambda m, a, b, c, d: m(a, m(m(b, c), d)),
    lambda m, a, b, c, d: m(a, m(b, m(c, d))),
)


def check_nilpotency4(A: AlgebraSC) -> CheckReport:
    """Every product of four basis elements vanishes, under all bracketings.

    For concrete algebras the ideal chain A >= A^2 >= A^3 >= A^4 is also
    computed and its dimensions reported.
    """
    n = A.dim
    fld = A.field
    failures = []
    basis = [A.basis_vector(i) for i in range(n)]
    mul = A.multiply
    for i in range(n):
        for j in range(n):
            ij = A.product_basis(i, j)
            if all(fld.is_zero(x) for x in ij):
                continue
            for k in range(n):
                for l in range(n):
                    for br_index, br in enumerate(_BRACKETINGS_4):
                        val = br(mul, basis[i], basis[j], basis[k], basis[l])
                        if any(not fld.is_zero(x) for x in val):
                            failures.append((i + 1, j + 1, k + 1, l + 1, br_index))
    details = {}
    chain = power_chain(A)
    details["chain_dims"] = tuple(s.dim for s in chain)
    ok = not failures and chain[-1].dim == 0
    return CheckReport(f"nilpotency4:{A.name}", ok, failures, details)


def subspace_product(A: AlgebraSC, U: Subspace, V: Subspace) -> Subspace:
    vecs = []
    for u in U.vectors():
        for v in V.vectors():
            vecs.append(A.multiply(u, v))
    return Subspace.from_vectors(A.field, A.dim, vecs)


def power_chain(A: AlgebraSC):
    """[A, A^2, A^3, A^4] as subspaces; A^k = A A^{k-1} + A^{k-1} A."""
    full = Subspace.full(A.field, A.dim)
    chain = [full]
    for _ in range(3):
        prev = chain[-1]
        nxt = subspace_product(A, full, prev) + subspace_product(A, prev, full)
        chain.append(nxt)
    return chain


def annihilator(A: AlgebraSC) -> Subspace:
    """x with x e_j = e_j x = 0 for all j."""
    return _annihilator_rows(A, left=True, right=True)


def left_annihilator(A: AlgebraSC) -> Subspace:
    return _annihilator_rows(A, left=True, right=False)


def right_annihilator(A: AlgebraSC) -> Subspace:
    return _annihilator_rows(A, left=False, right=True)


def _annihilator_rows(A: AlgebraSC, left: bool, right: bool) -> Subspace:
    n = A.dim
    fld = A.field
    rows = []
    for j in range(n):
        for k in range(n):
            if left:
                rows.append([A.c(i, j, k) for i in range(n)])
            if right:
                rows.append([A.c(j, i, k) for i in range(n)])
    if not rows:
        return Subspace.full(fld, n)
    return Matrix(fld, rows).kernel()


def derivations(A: AlgebraSC) -> Subspace:
    """Kernel of d(e_i e_j) = d(e_i) e_j + e_i d(e_j); ambient dim n^2.

    Unknown D[a][b] (d(e_a) = sum_b D[a][b] e_b) sits at coordinate a*n + b.
    """
    n = A.dim
    fld = A.field
    rows = []
    for i in range(n):
        for j in range(n):
            for l in range(n):
                row = [fld.zero] * (n * n)
                for k in range(n):
                    if not fld.is_zero(A.c(i, j, k)):
                        row[k * n + l] = row[k * n + l] + A.c(i, j, k)
                for p in range(n):
                    if not fld.is_zero(A.c(p, j, l)):
                        row[i * n + p] = row[i * n + p] - A.c(p, j, l)
                for q in range(n):
                    if not fld.is_zero(A.c(i, q, l)):
                        row[j * n + q] = row[j * n + q] - A.c(i, q, l)
                if any(not fld.is_zero(x) for x in row):
                    rows.append(row)
    if not rows:
        return Subspace.full(fld, n * n)
    return Matrix(fld, rows).kernel()


def basis_change(A: AlgebraSC, g: Matrix) -> AlgebraSC:
    """Conjugated product (g mu)(x, y) = g mu(g^{-1} x, g^{-1} y)."""
    n = A.dim
    if g.nrows != n or g.ncols != n:
        raise ValueError("basis-change matrix has wrong shape")
    try:
        ginv = g.inverse()
    except SingularMatrixError:
        raise SingularMatrixError("basis change requires an invertible matrix") from None
    cols_inv = ginv.transpose().rows  # column c of g^{-1} = coordinates of g^{-1} e_c
    new_constants = []
    for i in range(n):
        plane = []
        for j in range(n):
            w = A.multiply(cols_inv[i], cols_inv[j])
            plane.append(tuple(g.apply(w)))
        new_constants.append(tuple(plane))
    return AlgebraSC(
        name=f"{A.name}^g",
        dim=n,
        field=A.field,
        constants=tuple(new_constants),
        params=A.params,
        exclusions=A.exclusions,
    )


@dataclass(frozen=True)
class Fingerprint:
    dim: int
    ann: int
    a2: int
    a3: int
    a4: int
    left_ann: int
    right_ann: int
    der: int
    z2: int
    h2: int
    ann_cap_a2: int

    def as_tuple(self):
        return (
            self.dim, self.ann, self.a2, self.a3, self.a4,
            self.left_ann, self.right_ann, self.der, self.z2, self.h2,
            self.ann_cap_a2,
        )


def fingerprint(A: AlgebraSC, param_values: dict | None = None) -> Fingerprint:
    """Basis-independent dimension profile used to separate orbits."""
    if A.is_parametric():
        if param_values is None:
            raise ValueError(f"{A.name} is parametric; supply parameter values")
        A = A.evaluate(param_values)
    from . import cohomology  # local import; cohomology depends on this module

    chain = power_chain(A)
    ann = annihilator(A)
    h2 = cohomology.compute_H2(A)
    return Fingerprint(
        dim=A.dim,
        ann=ann.dim,
        a2=chain[1].dim,
        a3=chain[2].dim,
        a4=chain[3].dim,
        left_ann=left_annihilator(A).dim,
        right_ann=right_annihilator(A).dim,
        der=derivations(A).dim,
        z2=h2.z2.dim,
        h2=len(h2.h2_reps),
        ann_cap_a2=ann.intersect(chain[1]).dim,
    )


def generic_fingerprint(A: AlgebraSC, rng, samples: int = 5):
    """Fingerprints of a family at random parameter values.

    Returns ("generic", fp) when all samples agree, otherwise
    ("per-value", [(values, fp), ...]).
    """
    if not A.is_parametric():
        return "generic", fingerprint(A)
    seen = []
    for _ in range(samples):
        values = {p: _sample_rational(rng, A.exclusions.get(p, ())) for p in A.params}
        seen.append((values, fingerprint(A, values)))
    first = seen[0][1]
    if all(fp == first for _, fp in seen):
        return "generic", first
    return "per-value", seen


def _sample_rational(rng, excluded) -> Fraction:
    banned = {Fraction(e) if not isinstance(e, Fraction) else e for e in excluded}
    while True:
        q = Fraction(rng.randint(-12, 12), rng.randint(1, 7))
        if q != 0 and q not in banned:
            return q


def lift_to_field(A: AlgebraSC, fld) -> AlgebraSC:
    """Re-embed constants into a larger field (e.g. Q into Q(z12)(lam))."""
    if isinstance(fld, RatFunField) and (
        not isinstance(A.field, RatFunField)
        or set(A.field.ring.symbols) <= set(fld.ring.symbols)
    ):
        target = fld
    else:
        target = unify_fields(A.field, fld)
    constants = tuple(
        tuple(tuple(target.of(x) for x in vec) for vec in plane)
        for plane in A.constants
    )
    return AlgebraSC(A.name, A.dim, target, constants, A.params, A.exclusions)
