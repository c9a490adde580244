"""Corpus loading, validation, round trip, corruption detection."""

import json

import pytest

from antiassoc import corpus as cp


class TestLoad:
    def test_record_counts(self, corpus):
        counts = corpus.counts_by_class()
        assert counts["3dim-2step"] == 4
        assert counts["3dim"] == 1
        assert counts["4dim-2step"] == 15
        assert counts["4dim"] == 3
        assert counts["5dim"] == 30
        assert counts["5dim-2step-family"] == 3
        # 53 classification entries plus the three 2-step component families
        assert sum(counts.values()) == 56

    def test_missing_file(self, tmp_path):
        with pytest.raises(cp.CorpusError, match="not found"):
            cp.load_corpus(str(tmp_path / "nope.json"))

    def test_empty_document_schema_error(self, tmp_path):
        p = tmp_path / "empty.json"
        p.write_text("{}")
        with pytest.raises(cp.CorpusError, match="schema violation"):
            cp.load_corpus(str(p))

    def test_dangling_target_id(self, tmp_path, corpus):
        doc = json.loads(json.dumps(corpus.raw))
        doc["degeneration_claims"][0]["target"] = "A9.99"
        p = tmp_path / "dangling.json"
        p.write_text(json.dumps(doc))
        with pytest.raises(cp.CorpusError, match="dangling"):
            cp.load_corpus(str(p))

    def test_unparseable_expression(self, tmp_path, corpus):
        doc = json.loads(json.dumps(corpus.raw))
        doc["algebras"][0]["products"][0][2] = "e1 +* e2"
        p = tmp_path / "badexpr.json"
        p.write_text(json.dumps(doc))
        with pytest.raises(cp.CorpusError, match="cannot parse"):
            cp.load_corpus(str(p))

    def test_duplicate_claim_rejected(self, tmp_path, corpus):
        doc = json.loads(json.dumps(corpus.raw))
        doc["degeneration_claims"].append(doc["degeneration_claims"][0])
        p = tmp_path / "dup.json"
        p.write_text(json.dumps(doc))
        with pytest.raises(cp.CorpusError, match="duplicate"):
            cp.load_corpus(str(p))


class TestValidate:
    def test_bundled_corpus_clean(self, corpus):
        statuses = cp.validate_corpus(corpus)
        assert statuses and all(s.ok for s in statuses)

    def test_injected_idempotent_fails(self, tmp_path, corpus):
        doc = json.loads(json.dumps(corpus.raw))
        for rec in doc["algebras"]:
            if rec["id"] == "N3.1":
                rec["products"] = [[1, 1, "e1"]]
        p = tmp_path / "idem.json"
        p.write_text(json.dumps(doc))
        bad = cp.load_corpus(str(p))
        statuses = cp.validate_corpus(bad)
        failing = [s for s in statuses if not s.ok]
        assert any(s.record == "algebra:N3.1" for s in failing)

    def test_injected_non_cocycle_fails(self, tmp_path, corpus):
        doc = json.loads(json.dumps(corpus.raw))
        for rec in doc["h2_tables"]:
            if rec["algebra"] == "N3.1":
                rec["generators"] = rec["generators"] + ["D22"]
        p = tmp_path / "noncocycle.json"
        p.write_text(json.dumps(doc))
        bad = cp.load_corpus(str(p))
        statuses = cp.validate_corpus(bad)
        failing = [s for s in statuses if not s.ok]
        assert any(s.record == "h2-cocycles:N3.1" for s in failing)


class TestRoundTrip:
    def test_serialize_load_semantics(self, tmp_path, corpus):
        doc = cp.serialize(corpus)
        p = tmp_path / "roundtrip.json"
        p.write_text(json.dumps(doc))
        again = cp.load_corpus(str(p))
        assert cp.semantically_equal(corpus, again)

    def test_expression_round_trip(self, corpus):
        from antiassoc.scalars import parse_expr, print_expr

        for rec in corpus.raw["algebras"]:
            markers = [f"e{k}" for k in range(1, rec["dim"] + 1)]
            syms = markers + list(rec.get("params", []))
            for _, _, rhs in rec["products"]:
                e = parse_expr(rhs, syms)
                assert parse_expr(print_expr(e), syms) == e
        for claim in corpus.raw["degeneration_claims"]:
            src_dim = corpus.algebra(claim["source"]).dim
            markers = [f"e{k}" for k in range(1, src_dim + 1)]
            aux = sorted(set(claim.get("aux", {})) | set(claim.get("aux_sampled", {})))
            syms = markers + ["t"] + aux
            for text in claim["basis"]:
                e = parse_expr(text, syms)
                assert parse_expr(print_expr(e), syms) == e
            if claim.get("index"):
                e = parse_expr(claim["index"], ["t"] + aux)
                assert parse_expr(print_expr(e), syms) == e


class TestCrossReferences:
    def test_every_5dim_entry_built_or_tagged(self, corpus):
        produced = {spec.expected_id for spec in corpus.extension_specs}
        for rec in corpus.algebras.values():
            if rec.klass in ("5dim", "4dim"):
                built = rec.rec_id in produced
                tagged = rec.split or rec.provenance["kind"] == "reconstructed"
                assert built or tagged, rec.rec_id
                if built:
                    assert sum(1 for s in corpus.extension_specs if s.expected_id == rec.rec_id) == 1

    def test_degeneration_rows_unique_and_complete(self, corpus):
        ids = [c.claim_id for c in corpus.degeneration_claims]
        assert len(ids) == len(set(ids))
        by_table = {}
        for claim in corpus.raw["degeneration_claims"]:
            table = claim["provenance"]["table"]
            by_table[table] = by_table.get(table, 0) + 1
        assert by_table["degenerations-4dim"] == 2
        assert by_table["degenerations-long"] == 13  # one row splits into two h-values
        assert by_table["degenerations-short"] == 12

    def test_provenance_tags_present(self, corpus):
        for rec in corpus.algebras.values():
            assert rec.provenance["kind"] in ("quoted", "reconstructed")
        reconstructed = [r.rec_id for r in corpus.algebras.values() if r.provenance["kind"] == "reconstructed"]
        assert reconstructed == ["A4.1"]
