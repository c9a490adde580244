"""CLI behavior: exit codes, determinism, report shape."""

import json

import pytest
from click.testing import CliRunner

from antiassoc.cli import main


@pytest.fixture()
def runner():
    return CliRunner()


class TestVerify:
    def test_fast_suites_exit_zero(self, runner):
        result = runner.invoke(main, [
            "verify", "--suite", "cohomology", "--suite", "dimensions", "--seed", "7",
        ])
        assert result.exit_code == 0, result.output
        assert "checks passed" in result.output

    def test_json_determinism(self, runner):
        args = ["verify", "--suite", "cohomology", "--format", "json", "--seed", "11"]
        out1 = runner.invoke(main, args).output
        out2 = runner.invoke(main, args).output
        assert out1 == out2
        doc = json.loads(out1)
        assert doc["report_schema"] == 1 and doc["failures"] == 0

    def test_perturbed_corpus_exits_one(self, runner, tmp_path, corpus):
        doc = json.loads(json.dumps(corpus.raw))
        for rec in doc["algebras"]:
            if rec["id"] == "A5.4":
                # flip the sign of e2 e1; the defining identity now fails
                rec["products"] = [
                    [i, j, "e4"] if (i, j) == (2, 1) else [i, j, rhs]
                    for i, j, rhs in rec["products"]
                ]
        p = tmp_path / "perturbed.json"
        p.write_text(json.dumps(doc))
        result = runner.invoke(main, [
            "verify", "--corpus", str(p), "--suite", "identities", "--suite", "cohomology",
        ])
        assert result.exit_code == 1
        assert "FAIL" in result.output
        assert "A5.4" in result.output

    def test_corpus_load_failure_exits_two(self, runner, tmp_path):
        p = tmp_path / "broken.json"
        p.write_text("{not json")
        result = runner.invoke(main, ["verify", "--corpus", str(p)])
        assert result.exit_code == 2

    def test_unreachable_tolerance_flagged(self, runner):
        result = runner.invoke(main, [
            "verify", "--suite", "degenerations", "--tol", "1e-30", "--precision", "64",
        ])
        assert result.exit_code == 1
        assert "precision-bound" in result.output

    def test_one_line_per_record(self, runner, corpus):
        result = runner.invoke(main, ["verify", "--suite", "degenerations"])
        assert result.exit_code == 0
        for claim in corpus.degeneration_claims:
            assert claim.claim_id in result.output

    def test_parallel_matches_serial(self, runner):
        serial = runner.invoke(main, [
            "verify", "--suite", "cohomology", "--suite", "dimensions",
            "--format", "json", "--seed", "3",
        ]).output
        parallel = runner.invoke(main, [
            "verify", "--suite", "cohomology", "--suite", "dimensions",
            "--format", "json", "--seed", "3", "--jobs", "2",
        ]).output
        assert serial == parallel


class TestSubcommands:
    def test_show(self, runner):
        result = runner.invoke(main, ["show", "A5.10"])
        assert result.exit_code == 0
        assert "e3 e3 = e5" in result.output
        assert "fingerprint" in result.output

    def test_show_unknown(self, runner):
        assert runner.invoke(main, ["show", "A9.1"]).exit_code == 2

    def test_h2(self, runner):
        result = runner.invoke(main, ["h2", "N4.13"])
        assert result.exit_code == 0
        assert "dim H2 = 2" in result.output

    def test_extend(self, runner):
        result = runner.invoke(main, [
            "extend", "N3.1", "--cocycle", "D12 - D21 + D13", "--name", "demo",
        ])
        assert result.exit_code == 0
        assert "no annihilator component: True" in result.output
        assert "e1 e3 = e4" in result.output

    def test_degen_single_claim(self, runner):
        result = runner.invoke(main, ["degen", "degen:A4.3->A4.2"])
        assert result.exit_code == 0
        assert "verified-exact" in result.output

    def test_degen_unknown_claim(self, runner):
        assert runner.invoke(main, ["degen", "degen:nope"]).exit_code == 2

    def test_dims(self, runner):
        result = runner.invoke(main, ["dims"])
        assert result.exit_code == 0
        assert "components:dim5" in result.output
