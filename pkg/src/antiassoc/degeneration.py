"""Degeneration verification and orbit-dimension computations.

A degeneration claim carries a parametrized basis E_i(t); the source
structure constants rewritten in that basis must tend to the target
constants as t -> 0.  Two verification modes:

  exact    after the substitution t = s^N (N clears all fractional powers
           of t), the moved constants are rational functions of s regular
           at s = 0 whose value at 0 equals the target.
  numeric  a ladder t_m = t0 * ratio^m is evaluated with BigComplex;
           residuals must decrease and end below tolerance.

t -> 0 is taken along the positive real axis; when a numeric run fails
there the checker retries along the rays exp(+-i pi/4) R+ and reports
the ray used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import gmpy2

from .algebra import AlgebraSC, derivations
from .linalg import Matrix, SingularMatrixError
from .scalars import (
    DEFAULT_PRECISION,
    BigComplex,
    ComplexField,
    Cyclo12,
    DomainError,
    Num,
    RatFun,
    RatFunField,
    eval_expr,
    eval_expr_exact,
    expr_symbols,
    expr_to_ratfun,
    fractional_power_profile,
    working_precision,
)


@dataclass
class DegenConfig:
    precision: int = DEFAULT_PRECISION
    tolerance: Fraction = Fraction(1, 10**8)
    t0: Fraction = Fraction(1, 100)
    ratio: Fraction = Fraction(1, 4)
    rungs: int = 13          # minimum ladder depth
    max_rungs: int = 120     # slow radical rows descend further until tolerance
    monotone_from: int = 3
    cross_check_numeric: bool = True
    aux_samples: int = 3


RAYS = (
    ("positive real axis", lambda p: BigComplex.from_int(1, p)),
    ("ray exp(i pi/4)", lambda p: _unit_ray(p, +1)),
    ("ray exp(-i pi/4)", lambda p: _unit_ray(p, -1)),
)


def _unit_ray(precision: int, sign: int) -> BigComplex:
    with working_precision(precision):
        r = gmpy2.sqrt(gmpy2.mpfr(2)) / 2
        return BigComplex(r, sign * r, precision)


@dataclass
class Verdict:
    claim_id: str
    status: str  # verified-exact | verified-numeric | failed | inapplicable
    residual_trace: list = dc_field(default_factory=list)  # (t magnitude, residual) strings
    notes: list = dc_field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.status in ("verified-exact", "verified-numeric")


@dataclass(frozen=True)
class DegenerationClaim:
    claim_id: str
    source_id: str
    target_id: str
    basis_rows: tuple          # n rows, each a dict {basis index (0-based): Expr}
    source_index: object = None        # Expr in t (and aux symbols) or None
    target_params: dict = dc_field(default_factory=dict)   # param -> Expr in aux symbols
    aux_exact: dict = dc_field(default_factory=dict)       # symbol -> Expr (exact value)
    aux_sampled: dict = dc_field(default_factory=dict)     # symbol -> list of excluded Expr strings
    label: str = ""


def claim_expressions(claim: DegenerationClaim):
    exprs = [e for row in claim.basis_rows for e in row.values()]
    if claim.source_index is not None:
        exprs.append(claim.source_index)
    exprs.extend(claim.target_params.values())
    exprs.extend(claim.aux_exact.values())
    return exprs


def exactness_profile(claim: DegenerationClaim):
    """(eligible, N): eligible when all radicals are monomial in t."""
    denoms = set()
    eligible = True
    for e in claim_expressions(claim):
        d, ok = fractional_power_profile(e)
        denoms |= d
        eligible = eligible and ok
    n = 1
    for d in denoms:
        n = n * d // math.gcd(n, d)
    return eligible, n


# ---------------------------------------------------------------------------
# Moved structure constants
# ---------------------------------------------------------------------------

def moved_constants_exact(constants, basis: Matrix):
    """c' with E_i E_j = sum_k c'[i][j][k] E_k over an exact field.

    `constants` are the source constants over the same field as `basis`
    (rows of `basis` are the E_i coordinates).
    """
    n = basis.nrows
    fld = basis.field
    bt = basis.transpose()
    rhs = []
    for i in range(n):
        for j in range(n):
            vec = [fld.zero] * n
            for p in range(n):
                bip = basis[i, p]
                if fld.is_zero(bip):
                    continue
                for q in range(n):
                    bjq = basis[j, q]
                    if fld.is_zero(bjq):
                        continue
                    cpq = constants[p][q]
                    coeff = bip * bjq
                    for k in range(n):
                        if not fld.is_zero(cpq[k]):
                            vec[k] = vec[k] + coeff * cpq[k]
            rhs.append(tuple(vec))
    sols = bt.solve_many(rhs)
    if any(s is None for s in sols):
        raise SingularMatrixError("parametrized basis is singular")
    out = []
    it = iter(sols)
    for i in range(n):
        out.append(tuple(next(it) for _ in range(n)))
    return tuple(out)


def moved_constants(A: AlgebraSC, basis: Matrix):
    """Structure constants of A in the rows-of-`basis` frame."""
    return moved_constants_exact(A.constants, basis)


# ---------------------------------------------------------------------------
# Exact mode
# ---------------------------------------------------------------------------

def _ratfun_value_at_zero(rf: RatFun, sym: str):
    """Value at sym = 0 when regular there, else None (pole)."""
    ring = rf.ring
    k = ring.index(sym)
    if rf.num.is_zero():
        return Cyclo12(0)
    vnum = min(e[k] for e in rf.num.terms)
    vden = min(e[k] for e in rf.den.terms)
    if vnum < vden:
        return None
    num0 = sum(
        (c for e, c in rf.num.terms.items() if e[k] == vden and sum(e) == e[k]),
        Cyclo12(0),
    )
    # restrict to terms with zero exponent in every *other* symbol
    def const_at_zero(poly, shift):
        total = Cyclo12(0)
        for e, c in poly.terms.items():
            if e[k] != shift:
                continue
            if any(v for m, v in enumerate(e) if m != k):
                continue
            total = total + c
        return total

    num0 = const_at_zero(rf.num, vden)
    den0 = const_at_zero(rf.den, vden)
    if den0.is_zero():
        return None
    return num0 / den0


def check_exact(claim: DegenerationClaim, source: AlgebraSC, target: AlgebraSC, n_sub: int):
    """Exact verification after t = s^N; returns (ok, failures, notes)."""
    fld = RatFunField(("s",))
    s = fld.sym("s")
    t_val = s ** n_sub
    aux_assign = {"t": t_val}
    for name, expr in claim.aux_exact.items():
        aux_assign[name] = fld.of(eval_expr_exact(expr, {}))
    notes = [f"substitution t = s^{n_sub}" if n_sub > 1 else "rational in t"]

    basis_rows = []
    n = source.dim
    for row in claim.basis_rows:
        out = [fld.zero] * n
        for idx, e in row.items():
            out[idx] = expr_to_ratfun(e, fld, aux_assign, t_power=n_sub)
        basis_rows.append(out)
    basis = Matrix(fld, basis_rows)
    if basis.rank() < n:
        return False, [("basis", "singular as a matrix of rational functions")], notes

    constants = _instantiate_source(source, claim, fld, aux_assign, n_sub)
    moved = moved_constants_exact(constants, basis)

    failures = []
    for i in range(n):
        for j in range(n):
            for k in range(n):
                limit = _ratfun_value_at_zero(moved[i][j][k], "s")
                if limit is None:
                    failures.append(((i + 1, j + 1, k + 1), "pole at t -> 0"))
                    continue
                want = Cyclo12.coerce(_target_constant(target, i, j, k))
                if limit != want:
                    failures.append(((i + 1, j + 1, k + 1), f"limit {limit} != {want}"))
    return not failures, failures, notes


def _instantiate_source(source: AlgebraSC, claim: DegenerationClaim, fld, aux_assign, n_sub):
    """Source constants as rational functions of s (family index substituted)."""
    if source.is_parametric():
        if claim.source_index is None:
            raise DomainError(f"{claim.claim_id}: source family needs a parametrized index")
        index_val = expr_to_ratfun(claim.source_index, fld, aux_assign, t_power=n_sub)
        if len(source.params) != 1:
            raise DomainError("parametrized index supports single-parameter families")
        pname = source.params[0]
        table = []
        for plane in source.constants:
            rows = []
            for vec in plane:
                rows.append(tuple(x.subs({pname: index_val}, fld) for x in vec))
            table.append(tuple(rows))
        return tuple(table)
    return tuple(
        tuple(tuple(fld.of(x) for x in vec) for vec in plane)
        for plane in source.constants
    )


def _target_constant(target: AlgebraSC, i, j, k):
    x = target.constants[i][j][k]
    if isinstance(x, RatFun):
        raise DomainError("target constants must be instantiated before comparison")
    return x


# ---------------------------------------------------------------------------
# Numeric mode
# ---------------------------------------------------------------------------

def check_numeric(claim: DegenerationClaim, source: AlgebraSC, target, config: DegenConfig):
    """Residual ladder; returns (ok, trace, notes).

    `target` here is a concrete constants table of Cyclo12 values.
    """
    last_error = None
    for ray_name, ray_fn in RAYS:
        try:
            trace, ok, why = _ladder(claim, source, target, config, ray_fn)
        except (SingularMatrixError, DomainError) as exc:
            last_error = f"{ray_name}: {exc}"
            continue
        notes = [f"path {ray_name}"]
        if not ok and _precision_bound(config):
            notes.append("precision-bound: tolerance below achievable precision")
        if ok:
            return True, trace, notes
        last_error = f"{ray_name}: {why}"
        if ray_name == RAYS[0][0] and not _worth_retrying(why):
            return False, trace, notes + [why]
    return False, [], [last_error or "no ray succeeded"]


def _worth_retrying(why: str) -> bool:
    return "singular" in why or "domain" in why


def _rung_residual(claim, source, target, t_mag: Fraction, ray_fn, prec: int):
    """Residual at one ladder point, and the basis dynamic range in bits."""
    n = source.dim
    cf = ComplexField(prec)
    ray = ray_fn(prec)
    env = {name: eval_expr_exact(e, {}).to_bigcomplex(prec) for name, e in claim.aux_exact.items()}
    env["t"] = ray * BigComplex.from_fraction(t_mag, prec)
    basis_rows = []
    for row in claim.basis_rows:
        out = [cf.zero] * n
        for idx, e in row.items():
            out[idx] = eval_expr(e, env, prec).value
        basis_rows.append(out)
    basis = Matrix(cf, basis_rows)
    with working_precision(prec):
        mags = [abs(x) for row in basis_rows for x in row if not x.is_zero()]
        if not mags:
            raise SingularMatrixError("zero basis")
        spread = float(gmpy2.log2(max(mags))) - float(gmpy2.log2(min(mags)))
    constants = _numeric_source_constants(source, claim, env, prec)
    moved = moved_constants_exact(constants, basis)
    with working_precision(prec):
        residual = gmpy2.mpfr(0)
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    want = Cyclo12.coerce(target[i][j][k]).to_bigcomplex(prec)
                    d = abs(moved[i][j][k] - want)
                    if d > residual:
                        residual = d
    return residual, spread


def _ladder(claim, source, target, config, ray_fn):
    """Descend t; the working precision grows with the basis dynamic range."""
    base_prec = config.precision
    with working_precision(base_prec):
        tol = gmpy2.mpfr(Fraction(config.tolerance))
    residuals = []
    trace = []
    max_prec_used = base_prec
    t_mag = Fraction(config.t0)
    for rung in range(config.max_rungs):
        prec = base_prec
        residual, spread = _rung_residual(claim, source, target, t_mag, ray_fn, prec)
        while spread + 96 > prec:
            prec = max(2 * prec, int(spread) + 192)
            residual, spread = _rung_residual(claim, source, target, t_mag, ray_fn, prec)
        max_prec_used = max(max_prec_used, prec)
        residuals.append(residual)
        trace.append((_fmt(t_mag), _fmt(residual)))
        t_mag *= Fraction(config.ratio)
        if rung + 1 >= config.rungs and residual <= tol:
            break
    final_ok = residuals[-1] <= tol
    monotone_ok = True
    for m in range(config.monotone_from, len(residuals)):
        if residuals[m] <= tol or residuals[m - 1] <= tol:
            continue
        # the dominating entry can switch, producing an isolated exact blip;
        # demand progress against the previous two rungs instead
        if residuals[m] < residuals[m - 1]:
            continue
        if m >= 2 and residuals[m] < residuals[m - 2]:
            continue
        monotone_ok = False
        break
    if final_ok and monotone_ok:
        if max_prec_used > base_prec:
            trace.append(("precision", str(max_prec_used)))
        return trace, True, ""
    why = "final residual above tolerance" if not final_ok else "residuals not decreasing"
    return trace, False, why


def _numeric_source_constants(source, claim, env, prec):
    n = source.dim
    if source.is_parametric():
        index_val = eval_expr(claim.source_index, env, prec).value
        pname = source.params[0]
        values = {pname: index_val}
        return tuple(
            tuple(
                tuple(x.eval_numeric(values, prec) for x in vec)
                for vec in plane
            )
            for plane in source.constants
        )
    cf = ComplexField(prec)
    return tuple(
        tuple(tuple(cf.of(x) for x in vec) for vec in plane)
        for plane in source.constants
    )


def _precision_bound(config: DegenConfig) -> bool:
    return Fraction(config.tolerance) < Fraction(2) ** (16 - config.precision)


def _fmt(x) -> str:
    if isinstance(x, Fraction):
        if x == 0:
            return "0"
        num = float(x.numerator) / float(x.denominator) if x.denominator < 10**300 else 0.0
        return f"{num:.3e}"
    try:
        return f"{float(gmpy2.mpfr(x)):.3e}"
    except (OverflowError, ValueError):
        return str(x)


# ---------------------------------------------------------------------------
# Claim driver
# ---------------------------------------------------------------------------

def check_degeneration(claim: DegenerationClaim, resolve, config: DegenConfig, rng) -> Verdict:
    """Verify one claim.  `resolve(algebra_id)` returns the corpus AlgebraSC.

    Sampled auxiliary symbols (family targets, the L substitution) are drawn
    at `config.aux_samples` rational points; every sample must verify.
    """
    source = resolve(claim.source_id)
    target = resolve(claim.target_id)
    if source.dim != target.dim:
        return Verdict(claim.claim_id, "inapplicable", notes=["dimension mismatch"])

    assignments = _aux_assignments(claim, config, rng)
    eligible, n_sub = exactness_profile(claim)
    status = None
    all_trace = []
    notes = []
    for aux_values in assignments:
        bound = _bind_aux(claim, aux_values)
        target_inst = _instantiate_target(target, bound)
        if eligible:
            ok, failures, exact_notes = check_exact(bound, source, target_inst, n_sub)
            if not ok:
                return Verdict(
                    claim.claim_id, "failed",
                    notes=[f"sample {aux_values}"] + [f"{loc}: {msg}" for loc, msg in failures[:6]],
                )
            notes = exact_notes
            status = "verified-exact"
            if config.cross_check_numeric:
                okn, trace, nnotes = check_numeric(bound, source, target_inst.constants, config)
                all_trace.extend(trace)
                if not okn:
                    return Verdict(
                        claim.claim_id, "failed", trace,
                        notes=["exact passed but numeric cross-check failed"] + nnotes,
                    )
        else:
            okn, trace, nnotes = check_numeric(bound, source, target_inst.constants, config)
            all_trace.extend(trace)
            if not okn:
                return Verdict(claim.claim_id, "failed", trace, notes=nnotes + [f"sample {aux_values}"])
            status = "verified-numeric"
            notes = nnotes
        if aux_values:
            notes = notes + [f"sample {aux_values}"]
    return Verdict(claim.claim_id, status or "inapplicable", all_trace, notes)


def _aux_assignments(claim: DegenerationClaim, config: DegenConfig, rng):
    if not claim.aux_sampled:
        return [{}]
    out = []
    for _ in range(config.aux_samples):
        values = {}
        for name, excluded in claim.aux_sampled.items():
            banned = {Fraction(x) for x in excluded}
            while True:
                q = Fraction(rng.randint(2, 19), rng.randint(1, 7))
                if rng.random() < 0.5:
                    q = -q
                if q not in banned and q != 0:
                    break
            values[name] = q
        out.append(values)
    return out


def _bind_aux(claim: DegenerationClaim, aux_values) -> DegenerationClaim:
    if not aux_values:
        return claim
    extra = {name: Num(Fraction(v)) for name, v in aux_values.items()}
    return DegenerationClaim(
        claim_id=claim.claim_id,
        source_id=claim.source_id,
        target_id=claim.target_id,
        basis_rows=claim.basis_rows,
        source_index=claim.source_index,
        target_params=claim.target_params,
        aux_exact={**claim.aux_exact, **extra},
        aux_sampled={},
        label=claim.label,
    )


def _instantiate_target(target: AlgebraSC, claim: DegenerationClaim) -> AlgebraSC:
    if not target.is_parametric():
        return target
    values = {}
    for pname in target.params:
        expr = claim.target_params.get(pname)
        if expr is None:
            raise DomainError(f"target family {target.name} missing parameter {pname}")
        aux_env = {name: eval_expr_exact(e, {}) for name, e in claim.aux_exact.items()}
        values[pname] = eval_expr_exact(expr, aux_env)
    return target.evaluate(values)


# ---------------------------------------------------------------------------
# Orbit and family-closure dimensions
# ---------------------------------------------------------------------------

def orbit_dim(A: AlgebraSC, param_values: dict | None = None) -> int:
    """n^2 minus the derivation-algebra dimension."""
    if A.is_parametric():
        if param_values is None:
            raise ValueError(f"{A.name} is parametric; supply parameter values")
        A = A.evaluate(param_values)
    return A.dim * A.dim - derivations(A).dim


def action_tangent_rows(A: AlgebraSC):
    """Tangent vectors to the GL-orbit at the structure tensor.

    For g = E_{ab}: D[i][j][k] = delta_{ka} c[i][j][b] - delta_{ib} c[a][j][k]
    - delta_{jb} c[i][a][k].  Returns n^2 rows of length n^3.
    """
    n = A.dim
    fld = A.field
    rows = []
    for a in range(n):
        for b in range(n):
            row = [fld.zero] * (n ** 3)
            for i in range(n):
                for j in range(n):
                    cijb = A.c(i, j, b)
                    if not fld.is_zero(cijb):
                        row[(i * n + j) * n + a] = row[(i * n + j) * n + a] + cijb
                    if i == b:
                        for k in range(n):
                            cajk = A.c(a, j, k)
                            if not fld.is_zero(cajk):
                                row[(i * n + j) * n + k] = row[(i * n + j) * n + k] - cajk
                    if j == b:
                        for k in range(n):
                            ciak = A.c(i, a, k)
                            if not fld.is_zero(ciak):
                                row[(i * n + j) * n + k] = row[(i * n + j) * n + k] - ciak
            rows.append(row)
    return rows


def family_closure_dim(A: AlgebraSC, rng, samples: int = 3) -> int:
    """Dimension of the closure of the union of orbits over the parameters.

    Rank of the orbit tangent space augmented with the parameter-derivative
    directions, maximized over random rational parameter points.
    """
    if not A.is_parametric():
        return orbit_dim(A)
    n = A.dim
    best = 0
    for _ in range(samples):
        values = {}
        for p in A.params:
            banned = [Fraction(x) for x in A.exclusions.get(p, ())]
            while True:
                q = Fraction(rng.randint(-12, 12), rng.randint(1, 7))
                if q != 0 and q not in banned:
                    break
            values[p] = q
        concrete = A.evaluate(values)
        rows = action_tangent_rows(concrete)
        fld = concrete.field
        coords = {p: Cyclo12.coerce(v) for p, v in values.items()}
        for p in A.params:
            row = []
            for i in range(n):
                for j in range(n):
                    for k in range(n):
                        d = A.constants[i][j][k].derivative(p)
                        row.append(fld.of(d.eval(coords)))
            rows.append(row)
        rank = Matrix(fld, rows).rank()
        best = max(best, rank)
    return best


# ---------------------------------------------------------------------------
# Necessary condition: derivation dimensions increase
# ---------------------------------------------------------------------------

@dataclass
class DerReport:
    claim_id: str
    ok: bool
    pairs: list  # (source Der dim, target Der dim, context)
    advisory: bool
    notes: list = dc_field(default_factory=list)


def der_monotonicity(claim: DegenerationClaim, resolve, rng, config: DegenConfig) -> DerReport:
    """dim Der strictly increases along a proper degeneration of fixed algebras.

    When the source is a family with a parametrized index, the limit leaves the
    union of orbits rather than a single orbit, and the necessary condition
    weakens to non-strict (the closure gains a dimension from the parameter).
    Family endpoints are sampled at 3 random indices; advisory either way.
    """
    source = resolve(claim.source_id)
    target = resolve(claim.target_id)
    if claim.source_id == claim.target_id:
        return DerReport(claim.claim_id, True, [], advisory=False, notes=["non-proper claim, skipped"])
    advisory = source.is_parametric() or target.is_parametric()
    strict = not source.is_parametric()
    pairs = []
    ok = True
    samples = config.aux_samples if advisory else 1
    for _ in range(samples):
        src = source
        context = []
        if source.is_parametric():
            value = _sample_index_value(claim, source, rng)
            src = source.evaluate({source.params[0]: value})
            context.append(f"{source.params[0]}={value}")
        tgt = target
        if target.is_parametric():
            tvals = {}
            for p in target.params:
                expr = claim.target_params.get(p)
                if expr is not None and not (expr_symbols(expr) - {"i", "w"}):
                    tvals[p] = eval_expr_exact(expr, {})
                else:
                    banned = [Fraction(x) for x in target.exclusions.get(p, ())]
                    while True:
                        q = Fraction(rng.randint(-9, 9), rng.randint(1, 5))
                        if q != 0 and q not in banned:
                            break
                    tvals[p] = q
            tgt = target.evaluate(tvals)
            context.append(f"target {tvals}")
        ds = derivations(src).dim
        dt = derivations(tgt).dim
        pairs.append((ds, dt, "; ".join(context)))
        if strict and not ds < dt:
            ok = False
        if not strict and not ds <= dt:
            ok = False
    return DerReport(claim.claim_id, ok, pairs, advisory, notes=["strict" if strict else "non-strict (family source)"])


def _sample_index_value(claim: DegenerationClaim, source: AlgebraSC, rng):
    banned = [Cyclo12.coerce(Fraction(x)) for x in source.exclusions.get(source.params[0], ())]
    for _ in range(64):
        t_sample = Fraction(rng.randint(1, 9), rng.randint(10, 40))
        if claim.source_index is None:
            value = Cyclo12(t_sample)
        else:
            try:
                aux_env = {name: eval_expr_exact(e, {}) for name, e in claim.aux_exact.items()}
                for name in claim.aux_sampled:
                    aux_env[name] = Cyclo12(Fraction(rng.randint(2, 9), rng.randint(1, 4)))
                aux_env["t"] = Cyclo12(t_sample)
                value = eval_expr_exact(claim.source_index, aux_env)
            except (DomainError, KeyError):
                # index not exactly evaluable (radicals): sample the parameter itself
                value = Cyclo12(t_sample)
        if all(value != b for b in banned) and not value.is_zero():
            return value
    raise DomainError(f"{claim.claim_id}: could not sample an index value")
