"""Degeneration verification, orbit dimensions, necessary conditions."""

import random
from fractions import Fraction

import pytest

from antiassoc import algebra as alg
from antiassoc import degeneration as dg
from antiassoc.linalg import Matrix
from antiassoc.scalars import QQ, RatFunField, parse_expr


def make_claim(cid, src, tgt, rows, symbols=("t",), **kw):
    basis = tuple(
        {j: parse_expr(text, symbols) for j, text in row.items()} for row in rows
    )
    return dg.DegenerationClaim(cid, src, tgt, basis, **kw)


@pytest.fixture(scope="module")
def cfg():
    return dg.DegenConfig()


class TestMovedConstants:
    def test_identity_basis(self, corpus):
        A = corpus.algebra("A5.10")
        moved = dg.moved_constants(A, Matrix.identity(QQ, 5))
        assert moved == A.constants

    def test_uniform_scaling(self, corpus):
        # E_i = c e_i gives bilinear scaling by c
        A = corpus.algebra("A4.3")
        c = Fraction(3)
        B = Matrix.identity(QQ, 4) * c
        moved = dg.moved_constants(A, B)
        for i in range(4):
            for j in range(4):
                for k in range(4):
                    assert moved[i][j][k] == c * A.c(i, j, k)

    def test_five_dim_frame(self, corpus):
        # frame (e1, e2, e4, t e3, e5) over the rational functions of t
        F = RatFunField(("t",))
        t = F.sym("t")
        A = alg.lift_to_field(corpus.algebra("A5.2"), F)
        rows = [
            [F.one, F.zero, F.zero, F.zero, F.zero],
            [F.zero, F.one, F.zero, F.zero, F.zero],
            [F.zero, F.zero, F.zero, F.one, F.zero],
            [F.zero, F.zero, t, F.zero, F.zero],
            [F.zero, F.zero, F.zero, F.zero, F.one],
        ]
        moved = dg.moved_constants(A, Matrix(F, rows))
        # E1 E2 = e4 = E3 exactly; E1 E4 = t e4 = t E3
        assert moved[0][1][2] == F.one
        assert moved[0][3][2] == t
        target = corpus.algebra("A5.1")
        for i in range(5):
            for j in range(5):
                for k in range(5):
                    got = dg._ratfun_value_at_zero(moved[i][j][k], "t")
                    assert got is not None
                    assert got == target.c(i, j, k) or QQ.of(got.to_fraction()) == target.c(i, j, k)

    def test_round_trip_through_inverse(self, corpus):
        rng = random.Random(9)
        A = corpus.algebra("A4.2")
        while True:
            B = Matrix.from_rows(QQ, [[Fraction(rng.randint(-2, 2)) for _ in range(4)] for _ in range(4)])
            if B.is_invertible():
                break
        moved = dg.moved_constants(A, B)
        back_basis = B.inverse()
        moved_alg = alg.AlgebraSC("moved", 4, QQ, moved)
        back = dg.moved_constants(moved_alg, back_basis)
        assert back == A.constants


class TestCheckDegeneration:
    def test_self_degeneration_identity_basis(self, corpus, cfg):
        claim = make_claim("self", "A5.10", "A5.10", [
            {0: "1"}, {1: "1"}, {2: "1"}, {3: "1"}, {4: "1"},
        ])
        v = dg.check_degeneration(claim, corpus.algebra, cfg, random.Random(0))
        assert v.status == "verified-exact"

    def test_quoted_4dim_row(self, corpus, cfg):
        claim = next(c for c in corpus.degeneration_claims if c.claim_id == "degen:A4.2->A4.1")
        v = dg.check_degeneration(claim, corpus.algebra, cfg, random.Random(0))
        assert v.status == "verified-exact"

    def test_family_index_row(self, corpus, cfg):
        claim = next(c for c in corpus.degeneration_claims if c.claim_id == "degen:A5.14->A5.15")
        v = dg.check_degeneration(claim, corpus.algebra, cfg, random.Random(0))
        assert v.status == "verified-exact"

    def test_radical_row_goes_numeric(self, corpus, cfg):
        claim = next(c for c in corpus.degeneration_claims if c.claim_id == "degen:A5.26->A5.28")
        eligible, _ = dg.exactness_profile(claim)
        assert not eligible
        v = dg.check_degeneration(claim, corpus.algebra, cfg, random.Random(0))
        assert v.status == "verified-numeric"
        assert v.residual_trace  # ladder recorded

    def test_monomial_radical_row_is_exact(self, corpus, cfg):
        claim = next(c for c in corpus.degeneration_claims if c.claim_id == "degen:A5.19->A5.17")
        eligible, n_sub = dg.exactness_profile(claim)
        assert eligible and n_sub == 12
        v = dg.check_degeneration(claim, corpus.algebra, cfg, random.Random(0))
        assert v.status == "verified-exact"

    def test_wrong_target_fails(self, corpus, cfg):
        claim = make_claim("wrong", "A5.2", "A5.3", [
            {0: "1"}, {1: "1"}, {3: "1"}, {2: "t"}, {4: "1"},
        ])
        v = dg.check_degeneration(claim, corpus.algebra, cfg, random.Random(0))
        assert v.status == "failed"

    def test_diverging_witness_reports_pole(self, corpus, cfg):
        claim = make_claim("pole", "A4.3", "A4.2", [
            {0: "1", 1: "1/(2*t)"},
            {2: "1", 3: "1/(4*t^2)"},
            {1: "t", 2: "1/2"},
            {3: "1"},
        ])
        v = dg.check_degeneration(claim, corpus.algebra, cfg, random.Random(0))
        assert v.status == "failed"
        assert any("pole" in note for note in v.notes)

    def test_exact_mode_cross_checked_numerically(self, corpus):
        config = dg.DegenConfig(cross_check_numeric=True)
        claim = next(c for c in corpus.degeneration_claims if c.claim_id == "degen:A5.19->A5.18")
        v = dg.check_degeneration(claim, corpus.algebra, config, random.Random(0))
        assert v.status == "verified-exact"
        assert v.residual_trace  # the numeric ladder ran too


class TestOrbitDims:
    def test_values(self, corpus):
        assert dg.orbit_dim(corpus.algebra("A5.10")) == 20
        assert dg.orbit_dim(corpus.algebra("A4.3")) == 12

    def test_zero_algebra(self):
        Z = alg.make_algebra("zero3", 3, QQ, [])
        assert dg.orbit_dim(Z) == 0

    def test_invariance_under_basis_change(self, corpus):
        rng = random.Random(101)
        A = corpus.algebra("A5.19")
        want = dg.orbit_dim(A)
        for _ in range(5):
            while True:
                g = Matrix.from_rows(QQ, [[Fraction(rng.randint(-2, 2)) for _ in range(5)] for _ in range(5)])
                if g.is_invertible():
                    break
            assert dg.orbit_dim(alg.basis_change(A, g)) == want

    def test_family_closures(self, corpus):
        rng = random.Random(0)
        assert dg.family_closure_dim(corpus.algebra("V3+2"), rng) == 24
        assert dg.family_closure_dim(corpus.algebra("V4+1"), rng) == 20
        assert dg.family_closure_dim(corpus.algebra("A5.14"), rng) == 20


class TestDerMonotonicity:
    def test_strict_increase_on_fixed_claims(self, corpus, cfg):
        claim = next(c for c in corpus.degeneration_claims if c.claim_id == "degen:A5.2->A5.1")
        report = dg.der_monotonicity(claim, corpus.algebra, random.Random(0), cfg)
        assert report.ok and not report.advisory
        ds, dt, _ = report.pairs[0]
        assert ds < dt

    def test_self_claim_skipped(self, corpus, cfg):
        claim = make_claim("self", "A5.10", "A5.10", [
            {0: "1"}, {1: "1"}, {2: "1"}, {3: "1"}, {4: "1"},
        ])
        report = dg.der_monotonicity(claim, corpus.algebra, random.Random(0), cfg)
        assert report.ok and report.pairs == []

    def test_A519_rows(self, corpus, cfg):
        for cid in ("degen:A5.19->A5.17", "degen:A5.19->A5.18"):
            claim = next(c for c in corpus.degeneration_claims if c.claim_id == cid)
            report = dg.der_monotonicity(claim, corpus.algebra, random.Random(0), cfg)
            assert report.ok
            for ds, dt, _ in report.pairs:
                assert ds < dt

    def test_family_sampling(self, corpus, cfg):
        claim = next(c for c in corpus.degeneration_claims if c.claim_id == "degen:A5.14->A5.15")
        report = dg.der_monotonicity(claim, corpus.algebra, random.Random(0), cfg)
        assert report.advisory and len(report.pairs) == cfg.aux_samples
