"""Verification suites over the bundled corpus.

Each suite returns a list of SuiteResult records, one per table row, so a
report can be audited against the source tables line by line.  All random
sampling is derived deterministically from (seed, record id).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field

from . import algebra as alg
from . import cohomology as coh
from . import corpus as cp
from . import degeneration as dg
from .linalg import Matrix, Subspace
from .scalars import RatFunField, eval_expr_exact, expr_to_ratfun, parse_expr

SUITES = ("identities", "cohomology", "extensions", "alpha", "degenerations", "dimensions")


@dataclass
class SuiteResult:
    suite: str
    record: str
    ok: bool
    label: str = ""
    detail: str = ""
    trace: list = dc_field(default_factory=list)

    def line(self) -> str:
        mark = "PASS" if self.ok else "FAIL"
        extra = f"  [{self.detail}]" if self.detail else ""
        return f"[{mark}] {self.suite:13s} {self.record:28s} {self.label}{extra}"


def _rng(seed: int, record: str) -> random.Random:
    return random.Random(f"{seed}:{record}")


# ---------------------------------------------------------------------------
# identities
# ---------------------------------------------------------------------------

def suite_identities(corpus: cp.Corpus, seed: int = 0, **_) -> list:
    out = []
    for status in cp.validate_corpus(corpus):
        out.append(SuiteResult("identities", status.record, status.ok, detail=status.detail))
    return out


# ---------------------------------------------------------------------------
# cohomology tables
# ---------------------------------------------------------------------------

def suite_cohomology(corpus: cp.Corpus, seed: int = 0, **_) -> list:
    out = []
    for table in corpus.h2_tables:
        A = corpus.algebra(table.algebra_id)
        n = A.dim
        fld = A.field
        spaces = coh.compute_H2(A)
        expected = len(table.generators)
        dim_ok = spaces.dim_h2 == expected
        cocycle_ok = all(spaces.z2.contains(g.vectorize()) for g in table.generators)
        span = spaces.b2
        indep_ok = True
        for g in table.generators:
            grown = span + Subspace.from_vectors(fld, n * n, [g.vectorize()])
            if grown.dim == span.dim:
                indep_ok = False
                break
            span = grown
        ok = dim_ok and cocycle_ok and indep_ok
        detail = f"dim H2 = {spaces.dim_h2}"
        if not ok:
            detail += f"; expected {expected}, cocycles {cocycle_ok}, independent {indep_ok}"
        out.append(SuiteResult("cohomology", f"h2:{table.algebra_id}", ok, detail=detail))
    return out


# ---------------------------------------------------------------------------
# extensions
# ---------------------------------------------------------------------------

def _extension_base(corpus: cp.Corpus, spec: cp.ExtensionRecord):
    base = corpus.algebra(spec.base_id)
    if spec.base_params:
        symbolic = {p: v for p, v in spec.base_params.items() if v == p}
        if symbolic:
            if set(symbolic) != set(base.params):
                raise cp.CorpusError(f"{spec.spec_id}: partial symbolic base parameters")
        else:
            values = {p: eval_expr_exact(parse_expr(v, []), {}) for p, v in spec.base_params.items()}
            base = base.evaluate(values)
    if spec.params:
        fld = RatFunField(tuple(dict.fromkeys(tuple(base.params) + spec.params)))
        base = alg.lift_to_field(base, fld)
    return base


def _spec_cocycles(base, spec: cp.ExtensionRecord):
    extra = tuple(spec.params) + tuple(base.params)
    return [cp.parse_bilinear(text, base.dim, base.field, extra) for text in spec.cocycle_exprs]


def suite_extensions(corpus: cp.Corpus, seed: int = 0, probe_count: int = 10_000, **_) -> list:
    out = []
    for spec in corpus.extension_specs:
        try:
            base = _extension_base(corpus, spec)
            thetas = _spec_cocycles(base, spec)
            ext_spec = coh.ExtensionSpec(base, thetas)
            ts_ok = coh.check_Ts(ext_spec)
            built = coh.central_extension(ext_spec, name=spec.expected_id)
            expected = corpus.algebra(spec.expected_id)
            same = _constants_equal(built, expected)
            ann_ok = _extension_annihilator_ok(base, thetas, built)
            ok = ts_ok and same and ann_ok
            detail = []
            if not ts_ok:
                detail.append("extension condition fails")
            if not same:
                detail.append("structure constants differ from the table")
            if not ann_ok:
                detail.append("annihilator decomposition mismatch")
            out.append(SuiteResult("extensions", spec.spec_id, ok, detail="; ".join(detail)))
        except Exception as exc:  # surfaced per record, suite continues
            out.append(SuiteResult("extensions", spec.spec_id, False, detail=f"error: {exc}"))
    for aid in corpus.ts_empty:
        A = corpus.algebra(aid)
        sym_ok = coh.ts_empty_symbolic(A)
        probe_ok = True
        if probe_count:
            probe_A = A
            if A.is_parametric():
                rngp = _rng(seed, f"ts-param:{aid}")
                values = {p: alg._sample_rational(rngp, A.exclusions.get(p, ())) for p in A.params}
                probe_A = A.evaluate(values)
            probe_ok = coh.ts_empty_probe(probe_A, _rng(seed, f"ts:{aid}"), probe_count)
        ok = sym_ok and probe_ok
        out.append(
            SuiteResult(
                "extensions", f"ts-empty:{aid}", ok,
                detail="" if ok else f"symbolic {sym_ok}, probe {probe_ok}",
            )
        )
    return out


def _constants_equal(built: alg.AlgebraSC, expected: alg.AlgebraSC) -> bool:
    if built.dim != expected.dim:
        return False
    n = built.dim
    for i in range(n):
        for j in range(n):
            for k in range(n):
                a, b = built.c(i, j, k), expected.c(i, j, k)
                if hasattr(a, "ring") != hasattr(b, "ring"):
                    from .scalars import Cyclo12

                    if not Cyclo12.coerce(a) == Cyclo12.coerce(b):
                        return False
                elif a != b:
                    return False
    return True


def _extension_annihilator_ok(base, thetas, built) -> bool:
    meet = alg.annihilator(base)
    for theta in thetas:
        meet = meet.intersect(coh.cocycle_annihilator(theta))
    ann = alg.annihilator(built)
    n, s = base.dim, len(thetas)
    fld = built.field
    expect_vecs = []
    for v in meet.vectors():
        expect_vecs.append(tuple(v) + (fld.zero,) * s)
    for m in range(s):
        expect_vecs.append(tuple(fld.zero for _ in range(n)) + tuple(fld.one if k == m else fld.zero for k in range(s)))
    expected = Subspace.from_vectors(fld, n + s, expect_vecs)
    return ann == expected


# ---------------------------------------------------------------------------
# alpha formulas and stated reductions
# ---------------------------------------------------------------------------

def suite_alpha(corpus: cp.Corpus, seed: int = 0, **_) -> list:
    out = []
    for aset in corpus.alpha_sets:
        family = corpus.algebra(aset.family_id)
        s = len(aset.nabla_exprs)
        for auto in aset.automorphisms:
            record = f"alpha:{aset.family_id}/{auto.name}"
            try:
                symbols = tuple(dict.fromkeys(
                    tuple(auto.symbols)
                    + tuple(f"a{i+1}" for i in range(s))
                    + tuple(aset.family_params)
                ))
                fld = RatFunField(symbols)
                A_sym = alg.lift_to_field(family, fld)
                nablas = [cp.parse_bilinear(text, family.dim, fld, symbols) for text in aset.nabla_exprs]
                phi = Matrix(
                    fld,
                    [
                        [expr_to_ratfun(parse_expr(entry, symbols), fld) for entry in row]
                        for row in auto.matrix_exprs
                    ],
                )
                expected = [expr_to_ratfun(parse_expr(text, symbols), fld) for text in auto.alpha_star_exprs]
                report = coh.verify_alpha_formulas(A_sym, nablas, phi, expected, aset.family_id, auto.name)
                for idx, ok, residual in report.results:
                    detail = "" if ok else f"residual {residual!r}"
                    out.append(SuiteResult("alpha", f"{record}/a{idx}*", ok, detail=detail))
            except Exception as exc:
                out.append(SuiteResult("alpha", record, False, detail=f"error: {exc}"))
    for case in corpus.reduction_cases:
        out.append(_run_reduction(corpus, case))
    return out


def _run_reduction(corpus: cp.Corpus, case: cp.ReductionCase) -> SuiteResult:
    try:
        aset = next(a for a in corpus.alpha_sets if a.family_id == case.family_id)
        auto = next(a for a in aset.automorphisms if a.name == case.automorphism)
        family = corpus.algebra(case.family_id)
        values = {p: eval_expr_exact(parse_expr(v, []), {}) for p, v in case.family_values.items()}
        A = family.evaluate(values) if family.is_parametric() else family
        env = dict(values)
        fld = A.field
        nablas = [
            cp.parse_bilinear_with_values(text, A.dim, fld, env)
            for text in aset.nabla_exprs
        ]
        phi_env = {name: eval_expr_exact(parse_expr(v, []), {}) for name, v in case.phi.items()}
        phi_env.update(values)
        phi = Matrix(
            fld,
            [
                [fld.of(eval_expr_exact(parse_expr(entry, list(phi_env)), phi_env)) for entry in row]
                for row in auto.matrix_exprs
            ],
        )
        theta = Matrix.zeros(fld, A.dim, A.dim)
        for i, nab in enumerate(nablas, start=1):
            coeff = eval_expr_exact(parse_expr(case.alpha[f"a{i}"], []), {})
            theta = theta + nab * fld.of(coeff)
        expected = [
            cp.parse_bilinear_with_values(text, A.dim, fld, env)
            for text in case.expected_exprs
        ]
        ok = coh.verify_reduction(A, phi, [theta], expected, nablas)
        return SuiteResult("alpha", case.case_id, ok,
                           detail="" if ok else "moved class span differs")
    except Exception as exc:
        return SuiteResult("alpha", case.case_id, False, detail=f"error: {exc}")


# ---------------------------------------------------------------------------
# degenerations
# ---------------------------------------------------------------------------

def suite_degenerations(corpus: cp.Corpus, seed: int = 0, config: dg.DegenConfig | None = None, **_) -> list:
    config = config or dg.DegenConfig()
    out = []
    for claim in corpus.degeneration_claims:
        verdict = dg.check_degeneration(claim, corpus.algebra, config, _rng(seed, claim.claim_id))
        detail = "; ".join(verdict.notes[:3])
        if claim.label:
            detail = f"{claim.label}; {detail}" if detail else claim.label
        out.append(
            SuiteResult(
                "degenerations", claim.claim_id, verdict.ok,
                label=verdict.status,
                detail=detail,
                trace=verdict.residual_trace[-4:],
            )
        )
        der = dg.der_monotonicity(claim, corpus.algebra, _rng(seed, f"der:{claim.claim_id}"), config)
        label = "advisory" if der.advisory else "strict"
        detail = ", ".join(f"{s}<{t}" for s, t, _ in der.pairs[:3])
        out.append(SuiteResult("degenerations", f"der:{claim.claim_id}", der.ok, label=label, detail=detail))
    return out


# ---------------------------------------------------------------------------
# dimensions
# ---------------------------------------------------------------------------

def suite_dimensions(corpus: cp.Corpus, seed: int = 0, **_) -> list:
    out = []
    computed = {}
    for aid, want in sorted(corpus.orbit_dims.items()):
        A = corpus.algebra(aid)
        got = dg.orbit_dim(A)
        computed[aid] = got
        out.append(
            SuiteResult("dimensions", f"orbit:{aid}", got == want,
                        detail=f"computed {got}, table {want}")
        )
    for aid, want in sorted(corpus.family_closure_dims.items()):
        A = corpus.algebra(aid)
        got = dg.family_closure_dim(A, _rng(seed, f"closure:{aid}"))
        computed[aid] = got
        out.append(
            SuiteResult("dimensions", f"closure:{aid}", got == want,
                        detail=f"computed {got}, table {want}")
        )
    for comp_name, comp in sorted(corpus.components.items()):
        dims = []
        for aid in comp["members"]:
            if aid in computed:
                dims.append(computed[aid])
                continue
            A = corpus.algebra(aid)
            if A.is_parametric():
                dims.append(dg.family_closure_dim(A, _rng(seed, f"closure:{aid}")))
            else:
                dims.append(dg.orbit_dim(A))
        got = max(dims)
        want = comp["variety_dim"]
        ok = got == want
        out.append(
            SuiteResult(
                "dimensions", f"components:{comp_name}", ok,
                detail=f"{len(comp['members'])} components, max dim {got}, table {want}; rigid: {', '.join(comp['rigid'])}",
            )
        )
    out.extend(_fingerprint_separation(corpus, seed))
    return out


def _fingerprint_separation(corpus: cp.Corpus, seed: int) -> list:
    """Pairwise-distinctness support: fingerprint collisions are listed as
    inconclusive, never as failures (the invariants cannot always separate)."""
    out = []
    for klass, label in (("4dim", "dim4"), ("5dim", "dim5")):
        groups: dict = {}
        for rec in corpus.algebras.values():
            if rec.klass != klass:
                continue
            kind, fp = alg.generic_fingerprint(
                rec.algebra, _rng(seed, f"fp:{rec.rec_id}"), samples=3
            )
            key = fp.as_tuple() if kind == "generic" else fp[0][1].as_tuple()
            groups.setdefault(key, []).append(rec.rec_id)
        collisions = sorted(ids for ids in groups.values() if len(ids) > 1)
        if collisions:
            detail = "inconclusive pairs: " + "; ".join(",".join(ids) for ids in collisions)
        else:
            detail = "all entries separated"
        out.append(SuiteResult("dimensions", f"distinctness:{label}", True, detail=detail))
    return out


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------

_SUITE_FUNCS = {
    "identities": suite_identities,
    "cohomology": suite_cohomology,
    "extensions": suite_extensions,
    "alpha": suite_alpha,
    "degenerations": suite_degenerations,
    "dimensions": suite_dimensions,
}


def run_suites(corpus: cp.Corpus, names, seed: int = 0, config: dg.DegenConfig | None = None,
               probe_count: int = 10_000, jobs: int = 1) -> list:
    names = list(names)
    for name in names:
        if name not in _SUITE_FUNCS:
            raise ValueError(f"unknown suite {name!r}")
    results = []
    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = [
                pool.submit(_SUITE_FUNCS[name], corpus, seed=seed, config=config, probe_count=probe_count)
                for name in names
            ]
            for fut in futures:
                results.extend(fut.result())
    else:
        for name in names:
            results.extend(_SUITE_FUNCS[name](corpus, seed=seed, config=config, probe_count=probe_count))
    results.sort(key=lambda r: (SUITES.index(r.suite), r.record))
    return results
