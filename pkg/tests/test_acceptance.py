"""Acceptance suite: one check per criterion, printed as a pass/fail line.

Run with `pytest tests/test_acceptance.py -v -s` to see the lines.
"""

import random
import time
from fractions import Fraction

from antiassoc import algebra as alg
from antiassoc import cohomology as coh
from antiassoc import degeneration as dg
from antiassoc import suites
from antiassoc.linalg import Matrix, Subspace
from antiassoc.scalars import CYCLO_I, CYCLO_W, Cyclo12, QQ

SEED = 0


def _report(num, title, ok, extra=""):
    mark = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {num}: [{mark}] {title}" + (f" ({extra})" if extra else ""))
    assert ok, f"criterion {num} failed: {title} {extra}"


class TestAcceptance:
    def test_1_identities(self, corpus):
        t0 = time.time()
        classification = [
            rec for rec in corpus.algebras.values()
            if rec.klass in ("3dim-2step", "3dim", "4dim-2step", "4dim", "5dim")
        ]
        assert len(classification) == 53
        by_dim = {3: 0, 4: 0, 5: 0}
        ok = True
        for rec in classification:
            by_dim[rec.algebra.dim] += 1
            r1 = alg.check_antiassociative(rec.algebra)
            r2 = alg.check_nilpotency4(rec.algebra)
            ok = ok and r1.ok and r2.ok
        elapsed = time.time() - t0
        ok = ok and by_dim == {3: 5, 4: 18, 5: 30} and elapsed < 5.0
        _report(1, "53 algebras satisfy the defining identity and fourth powers vanish",
                ok, f"{by_dim}, {elapsed:.1f}s")

    def test_2_h2_tables(self, corpus):
        results = suites.suite_cohomology(corpus, seed=SEED)
        ok = all(r.ok for r in results) and len(results) == 19
        dims = {}
        for table in corpus.h2_tables:
            dims[table.algebra_id] = len(table.generators)
        spot = (dims["N3.1"], dims["N4.1"], dims["N4.8"], dims["N4.13"]) == (4, 9, 2, 2)
        _report(2, "every second-cohomology table matches (dimension, cocycles, independence)",
                ok and spot, f"{len(results)} tables")

    def test_3_alpha_formulas(self, corpus):
        results = [r for r in suites.suite_alpha(corpus, seed=SEED) if r.record.startswith("alpha:")]
        identity_count = sum(1 for r in results)
        ok = all(r.ok for r in results) and identity_count == 36
        _report(3, "every displayed coefficient-transformation identity holds exactly",
                ok, f"{identity_count} identities")

    def test_3b_stated_reductions(self, corpus):
        results = [r for r in suites.suite_alpha(corpus, seed=SEED) if r.record.startswith("red:")]
        ok = all(r.ok for r in results) and len(results) == len(corpus.reduction_cases)
        _report("3b", "stated case-analysis substitutions land on the claimed representatives",
                ok, f"{len(results)} substitutions")

    def test_4_extensions(self, corpus):
        results = suites.suite_extensions(corpus, seed=SEED, probe_count=10_000)
        spec_results = [r for r in results if r.record.startswith("ext:")]
        empt_results = [r for r in results if r.record.startswith("ts-empty:")]
        ok = (
            all(r.ok for r in results)
            and len(spec_results) == 29
            and len(empt_results) == 13
        )
        _report(4, "all extension specs reproduce their targets verbatim; emptiness claims survive 10^4 probes",
                ok, f"{len(spec_results)} specs, {len(empt_results)} emptiness claims")

    def test_5_degenerations(self, corpus):
        t0 = time.time()
        config = dg.DegenConfig(precision=256, tolerance=Fraction(1, 10**8))
        results = [
            r for r in suites.suite_degenerations(corpus, seed=SEED, config=config)
            if not r.record.startswith("der:")
        ]
        elapsed = time.time() - t0
        statuses = {r.label for r in results}
        ok = (
            all(r.ok for r in results)
            and len(results) == 27
            and statuses <= {"verified-exact", "verified-numeric"}
            and elapsed < 60.0
        )
        exact = sum(1 for r in results if r.label == "verified-exact")
        _report(5, "every degeneration row verifies (tolerance 1e-8 at 256 bits)",
                ok, f"{exact} exact, {len(results)-exact} numeric, {elapsed:.1f}s")

    def test_6_dimensions(self, corpus):
        results = suites.suite_dimensions(corpus, seed=SEED)
        ok = all(r.ok for r in results)
        want = {
            "orbit:A4.3": 12, "orbit:A5.10": 20, "orbit:A5.19": 20,
            "orbit:A5.21": 20, "orbit:A5.23": 20,
            "closure:V3+2": 24, "closure:V4+1": 20,
            "closure:A5.14": 20, "closure:A5.26": 20,
        }
        seen = {r.record: r for r in results}
        for record, value in want.items():
            ok = ok and record in seen and f"computed {value}" in seen[record].detail
        ok = ok and "max dim 12" in seen["components:dim4"].detail
        ok = ok and "max dim 24" in seen["components:dim5"].detail
        _report(6, "orbit and closure dimensions reproduce the recorded values",
                ok, "12 for dim 4, 24 for dim 5")

    def test_7_der_necessary_condition(self, corpus):
        config = dg.DegenConfig()
        strict, sampled, ok = 0, 0, True
        for claim in corpus.degeneration_claims:
            report = dg.der_monotonicity(
                claim, corpus.algebra, random.Random(f"{SEED}:der:{claim.claim_id}"), config
            )
            ok = ok and report.ok
            if report.advisory:
                sampled += 1
                ok = ok and len(report.pairs) == config.aux_samples
            else:
                strict += 1
                ok = ok and all(ds < dt for ds, dt, _ in report.pairs)
        _report(7, "derivation dimensions increase along every proper claim",
                ok, f"{strict} strict, {sampled} sampled")

    def test_8_property_suites(self, corpus):
        rng = random.Random(SEED)
        ok = True

        # field axioms
        for _ in range(2000):
            a = Cyclo12(*[Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(4)])
            b = Cyclo12(*[Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(4)])
            c = Cyclo12(*[Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(4)])
            ok = ok and (a + b) + c == a + (b + c) and a * (b + c) == a * b + a * c
            if not b.is_zero():
                ok = ok and (a / b) * b == a
        ok = ok and CYCLO_I ** 2 == Cyclo12(-1) and Cyclo12(1) + CYCLO_W + CYCLO_W ** 2 == Cyclo12(0)

        # subspace algebra
        for _ in range(25):
            U = Subspace.from_vectors(QQ, 5, [[Fraction(rng.randint(-2, 2)) for _ in range(5)] for _ in range(3)])
            W = Subspace.from_vectors(QQ, 5, [[Fraction(rng.randint(-2, 2)) for _ in range(5)] for _ in range(3)])
            ok = ok and U.dim + W.dim == (U + W).dim + U.intersect(W).dim

        # fingerprint invariance under basis change
        A = corpus.algebra("A5.10")
        fp = alg.fingerprint(A)
        for _ in range(4):
            while True:
                g = Matrix.from_rows(QQ, [[Fraction(rng.randint(-2, 2)) for _ in range(5)] for _ in range(5)])
                if g.is_invertible():
                    break
            moved = alg.basis_change(A, g)
            ok = ok and alg.check_antiassociative(moved).ok and alg.fingerprint(moved) == fp

        # derivations close under commutator; annihilator is an ideal
        for rec_id in ("N4.7", "A5.23"):
            B = corpus.algebra(rec_id)
            der = alg.derivations(B)
            n = B.dim
            mats = [Matrix(QQ, [v[i * n:(i + 1) * n] for i in range(n)]) for v in der.vectors()]
            for d1 in mats[:4]:
                for d2 in mats[:4]:
                    ok = ok and der.contains((d1 * d2 - d2 * d1).vectorize())
            ann = alg.annihilator(B)
            for v in ann.vectors():
                for j in range(n):
                    ok = ok and all(B.field.is_zero(x) for x in B.multiply(v, B.basis_vector(j)))
                    ok = ok and all(B.field.is_zero(x) for x in B.multiply(B.basis_vector(j), v))

        # automorphism action preserves cocycles and coboundaries
        N31 = corpus.algebra("N3.1")
        z2, b2 = coh.compute_Z2(N31), coh.compute_B2(N31)
        count = 0
        while count < 20:
            x, y = Fraction(rng.randint(1, 5)), Fraction(rng.randint(1, 5))
            z, r, t = (Fraction(rng.randint(-4, 4)) for _ in range(3))
            phi = Matrix.from_rows(QQ, [[x, 0, 0], [z, x * x, r], [t, 0, y]])
            if not coh.is_automorphism(N31, phi):
                continue
            count += 1
            for vec in z2.vectors():
                moved = coh.aut_action(N31, phi, coh.matrix_from_vector(QQ, 3, vec), verify=False)
                ok = ok and z2.contains(moved.vectorize())
            for vec in b2.vectors():
                moved = coh.aut_action(N31, phi, coh.matrix_from_vector(QQ, 3, vec), verify=False)
                ok = ok and b2.contains(moved.vectorize())

        _report(8, "property suites green with fixed seed", ok)
