"""Bundled corpus: loader, cross-reference validation, serialization.

The corpus is one human-diffable JSON document.  Product lines are triples
[i, j, "rhs"] with the right-hand side written exactly as in the source
tables ("e3 + lam*e5"); bilinear forms are combinations of the symbols Dij
("D12 - D21"); parametrized bases are expression strings in t and the
declared auxiliary symbols.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from importlib import resources

import jsonschema

from . import algebra as alg
from . import cohomology as coh
from .degeneration import DegenerationClaim
from .linalg import Matrix
from .scalars import (
    CYCLO,
    Cyclo12,
    Div,
    Expr,
    Mul,
    Neg,
    Num,
    QQ,
    RatFunField,
    Sym,
    eval_expr_exact,
    expr_symbols,
    expr_to_ratfun,
    parse_expr,
    print_expr,
)

SUPPORTED_SCHEMA = 1


class CorpusError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Linear-combination extraction ("e1 + (1/2)*e3", "D12 - D21", ...)
# ---------------------------------------------------------------------------

def split_linear(expr: Expr, markers: set) -> dict:
    """Decompose a sum of terms, each containing exactly one marker symbol.

    Returns {marker name: coefficient Expr}.  Raises CorpusError when a term
    mentions no marker or more than one.
    """
    out: dict = {}

    def add(name: str, coeff: Expr, negate: bool):
        coeff = Neg(coeff) if negate else coeff
        out[name] = coeff if name not in out else _expr_add(out[name], coeff)

    def walk(node: Expr, negate: bool):
        from .scalars import Add, Sub

        if isinstance(node, Add):
            walk(node.left, negate)
            walk(node.right, negate)
            return
        if isinstance(node, Sub):
            walk(node.left, negate)
            walk(node.right, not negate)
            return
        if isinstance(node, Neg):
            walk(node.arg, not negate)
            return
        name, coeff = _extract_marker(node, markers)
        add(name, coeff, negate)

    if isinstance(expr, Num) and expr.value == 0:
        return out
    walk(expr, False)
    return out


def _expr_add(a: Expr, b: Expr) -> Expr:
    from .scalars import Add

    return Add(a, b)


def _extract_marker(node: Expr, markers: set):
    """One multiplicative term: locate its single marker factor."""
    from .scalars import Pow, Sqrt

    if isinstance(node, Sym):
        if node.name in markers:
            return node.name, Num(Fraction(1))
        raise CorpusError(f"term {print_expr(node)!r} lacks a basis symbol")
    if isinstance(node, Mul):
        left_has = _mentions(node.left, markers)
        right_has = _mentions(node.right, markers)
        if left_has and right_has:
            raise CorpusError(f"nonlinear term {print_expr(node)!r}")
        if left_has:
            name, coeff = _extract_marker(node.left, markers)
            if isinstance(coeff, Num) and coeff.value == 1:
                return name, node.right
            return name, Mul(coeff, node.right)
        if right_has:
            name, coeff = _extract_marker(node.right, markers)
            if isinstance(coeff, Num) and coeff.value == 1:
                return name, node.left
            return name, Mul(node.left, coeff)
        raise CorpusError(f"term {print_expr(node)!r} lacks a basis symbol")
    if isinstance(node, Div):
        if _mentions(node.right, markers):
            raise CorpusError(f"basis symbol in a denominator: {print_expr(node)!r}")
        if not _mentions(node.left, markers):
            raise CorpusError(f"term {print_expr(node)!r} lacks a basis symbol")
        name, coeff = _extract_marker(node.left, markers)
        return name, Div(coeff, node.right)
    if isinstance(node, Neg):
        name, coeff = _extract_marker(node.arg, markers)
        return name, Neg(coeff)
    if isinstance(node, (Num, Pow, Sqrt)):
        raise CorpusError(f"term {print_expr(node)!r} lacks a basis symbol")
    raise CorpusError(f"unsupported term shape: {print_expr(node)!r}")


def _mentions(node: Expr, markers: set) -> bool:
    return bool(expr_symbols(node) & markers)


# ---------------------------------------------------------------------------
# Record types
# ---------------------------------------------------------------------------

@dataclass
class AlgebraRecord:
    rec_id: str
    klass: str
    algebra: alg.AlgebraSC
    provenance: dict
    split: bool = False
    raw: dict = dc_field(default_factory=dict)


@dataclass
class H2Table:
    algebra_id: str
    generator_exprs: list  # strings
    generators: list       # Matrix over the algebra's field


@dataclass
class ExtensionRecord:
    spec_id: str
    base_id: str
    base_params: dict
    params: tuple
    cocycle_exprs: list
    expected_id: str


@dataclass
class AlphaAutomorphism:
    name: str
    symbols: tuple
    matrix_exprs: list
    alpha_star_exprs: list


@dataclass
class AlphaSet:
    family_id: str
    family_params: tuple
    nabla_exprs: list
    automorphisms: list


@dataclass
class ReductionCase:
    case_id: str
    family_id: str
    automorphism: str
    family_values: dict
    alpha: dict
    phi: dict
    expected_exprs: list


@dataclass
class Corpus:
    path: str
    raw: dict
    algebras: dict            # id -> AlgebraRecord
    h2_tables: list
    extension_specs: list
    ts_empty: list
    alpha_sets: list
    reduction_cases: list
    degeneration_claims: list
    orbit_dims: dict
    family_closure_dims: dict
    components: dict

    def algebra(self, rec_id: str) -> alg.AlgebraSC:
        try:
            return self.algebras[rec_id].algebra
        except KeyError:
            raise CorpusError(f"unknown algebra id {rec_id!r}") from None

    def counts_by_class(self) -> dict:
        out: dict = {}
        for rec in self.algebras.values():
            out[rec.klass] = out.get(rec.klass, 0) + 1
        return out


def bundled_corpus_path() -> str:
    return str(resources.files("antiassoc.data").joinpath("corpus.json"))


def _schema() -> dict:
    text = resources.files("antiassoc.data").joinpath("corpus.schema.json").read_text()
    return json.loads(text)


# ---------------------------------------------------------------------------
# Parsing helpers
# ---------------------------------------------------------------------------

def _product_entries(dim: int, products, params, where: str):
    markers = {f"e{k}" for k in range(1, dim + 1)}
    symbols = sorted(markers) + list(params)
    entries = []
    for item in products:
        i, j, rhs = item
        if not (1 <= i <= dim and 1 <= j <= dim):
            raise CorpusError(f"{where}: product indices ({i},{j}) out of range")
        try:
            tree = parse_expr(rhs, symbols)
            combo = split_linear(tree, markers)
        except (CorpusError, ValueError) as exc:
            raise CorpusError(f"{where}: cannot parse product {rhs!r}: {exc}") from exc
        for marker, coeff in combo.items():
            k = int(marker[1:])
            entries.append((i, j, k, coeff))
    return entries


def _load_algebra(rec: dict) -> AlgebraRecord:
    rec_id = rec["id"]
    dim = rec["dim"]
    params = tuple(rec.get("params", ()))
    entries = _product_entries(dim, rec["products"], params, rec_id)
    exclusions = {
        p: tuple(Fraction(v) for v in vals)
        for p, vals in rec.get("exclusions", {}).items()
    }
    if params:
        fld = RatFunField(params)
        coeffs = [(i, j, k, expr_to_ratfun(c, fld)) for i, j, k, c in entries]
    else:
        values = [(i, j, k, eval_expr_exact(c, {})) for i, j, k, c in entries]
        rational = all(v.is_rational() for _, _, _, v in values)
        fld = QQ if rational else CYCLO
        coeffs = [(i, j, k, fld.of(v)) for i, j, k, v in values]
    algebra = alg.make_algebra(rec_id, dim, fld, coeffs, params, exclusions)
    return AlgebraRecord(
        rec_id=rec_id,
        klass=rec["class"],
        algebra=algebra,
        provenance=rec["provenance"],
        split=rec.get("split", False),
        raw=rec,
    )


def parse_bilinear(text: str, dim: int, fld, extra_symbols=()) -> Matrix:
    """A combination of Dij symbols into an n x n matrix over fld."""
    markers = {f"D{i}{j}" for i in range(1, dim + 1) for j in range(1, dim + 1)}
    symbols = sorted(markers) + list(extra_symbols)
    combo = split_linear(parse_expr(text, symbols), markers)
    rows = [[fld.zero] * dim for _ in range(dim)]
    for marker, coeff in combo.items():
        i, j = int(marker[1]), int(marker[2])
        if isinstance(fld, RatFunField):
            value = expr_to_ratfun(coeff, fld)
        else:
            value = fld.of(eval_expr_exact(coeff, {}))
        rows[i - 1][j - 1] = rows[i - 1][j - 1] + value
    return Matrix(fld, rows)


def parse_bilinear_with_values(text: str, dim: int, fld, values: dict) -> Matrix:
    """Like parse_bilinear, with coefficient symbols evaluated exactly."""
    markers = {f"D{i}{j}" for i in range(1, dim + 1) for j in range(1, dim + 1)}
    symbols = sorted(markers) + sorted(values)
    combo = split_linear(parse_expr(text, symbols), markers)
    rows = [[fld.zero] * dim for _ in range(dim)]
    for marker, coeff in combo.items():
        i, j = int(marker[1]), int(marker[2])
        rows[i - 1][j - 1] = rows[i - 1][j - 1] + fld.of(eval_expr_exact(coeff, values))
    return Matrix(fld, rows)


def _load_claim(rec: dict, algebras: dict) -> DegenerationClaim:
    cid = rec["id"]
    for side in ("source", "target"):
        if rec[side] not in algebras:
            raise CorpusError(f"{cid}: dangling algebra id {rec[side]!r}")
    source = algebras[rec["source"]].algebra
    dim = source.dim
    markers = {f"e{k}" for k in range(1, dim + 1)}
    aux_syms = set(rec.get("aux", {})) | set(rec.get("aux_sampled", {}))
    symbols = sorted(markers) + ["t"] + sorted(aux_syms)
    basis_rows = []
    if len(rec["basis"]) != dim:
        raise CorpusError(f"{cid}: basis must have {dim} rows")
    for text in rec["basis"]:
        combo = split_linear(parse_expr(text, symbols), markers)
        basis_rows.append({int(m[1:]) - 1: coeff for m, coeff in combo.items()})
    index = None
    if rec.get("index") is not None:
        index = parse_expr(rec["index"], ["t"] + sorted(aux_syms))
    target_params = {
        p: parse_expr(text, sorted(aux_syms))
        for p, text in rec.get("target_params", {}).items()
    }
    aux_exact = {name: parse_expr(text, []) for name, text in rec.get("aux", {}).items()}
    aux_sampled = dict(rec.get("aux_sampled", {}))
    target = algebras[rec["target"]].algebra
    for p in target.params:
        if p not in target_params:
            raise CorpusError(f"{cid}: target family parameter {p!r} unassigned")
    return DegenerationClaim(
        claim_id=cid,
        source_id=rec["source"],
        target_id=rec["target"],
        basis_rows=tuple(basis_rows),
        source_index=index,
        target_params=target_params,
        aux_exact=aux_exact,
        aux_sampled=aux_sampled,
        label=rec.get("provenance", {}).get("table", ""),
    )


# ---------------------------------------------------------------------------
# Loading and validation
# ---------------------------------------------------------------------------

def load_corpus(path: str | None = None) -> Corpus:
    path = path or bundled_corpus_path()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise CorpusError(f"corpus file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise CorpusError(f"corpus is not valid JSON: {exc}") from exc
    try:
        jsonschema.validate(raw, _schema())
    except jsonschema.ValidationError as exc:
        raise CorpusError(f"schema violation at {list(exc.absolute_path)}: {exc.message}") from exc
    if raw["schema_version"] != SUPPORTED_SCHEMA:
        raise CorpusError(f"unsupported schema version {raw['schema_version']}")

    algebras: dict = {}
    for rec in raw["algebras"]:
        if rec["id"] in algebras:
            raise CorpusError(f"duplicate algebra id {rec['id']!r}")
        algebras[rec["id"]] = _load_algebra(rec)

    h2_tables = []
    for rec in raw["h2_tables"]:
        aid = rec["algebra"]
        if aid not in algebras:
            raise CorpusError(f"h2 table references unknown algebra {aid!r}")
        A = algebras[aid].algebra
        gens = [
            parse_bilinear(text, A.dim, A.field, A.params)
            for text in rec["generators"]
        ]
        h2_tables.append(H2Table(aid, list(rec["generators"]), gens))

    extension_specs = []
    for rec in raw["extension_specs"]:
        if rec["base"] not in algebras:
            raise CorpusError(f"{rec['id']}: unknown base {rec['base']!r}")
        if rec["expected"] not in algebras:
            raise CorpusError(f"{rec['id']}: dangling expected id {rec['expected']!r}")
        extension_specs.append(
            ExtensionRecord(
                spec_id=rec["id"],
                base_id=rec["base"],
                base_params=dict(rec.get("base_params", {})),
                params=tuple(rec.get("params", ())),
                cocycle_exprs=list(rec["cocycles"]),
                expected_id=rec["expected"],
            )
        )

    for aid in raw["ts_empty"]:
        if aid not in algebras:
            raise CorpusError(f"ts_empty references unknown algebra {aid!r}")

    alpha_sets = []
    for rec in raw["alpha_formula_sets"]:
        if rec["family"] not in algebras:
            raise CorpusError(f"alpha set references unknown algebra {rec['family']!r}")
        alpha_sets.append(
            AlphaSet(
                family_id=rec["family"],
                family_params=tuple(rec.get("family_params", ())),
                nabla_exprs=list(rec["nablas"]),
                automorphisms=[
                    AlphaAutomorphism(
                        name=a["name"],
                        symbols=tuple(a["symbols"]),
                        matrix_exprs=[list(row) for row in a["matrix"]],
                        alpha_star_exprs=list(a["alpha_star"]),
                    )
                    for a in rec["automorphisms"]
                ],
            )
        )

    reduction_cases = []
    for rec in raw.get("reduction_cases", []):
        if rec["family"] not in algebras:
            raise CorpusError(f"reduction case references unknown algebra {rec['family']!r}")
        reduction_cases.append(
            ReductionCase(
                case_id=rec["id"],
                family_id=rec["family"],
                automorphism=rec["automorphism"],
                family_values=dict(rec.get("family_values", {})),
                alpha=dict(rec["alpha"]),
                phi=dict(rec["phi"]),
                expected_exprs=list(rec["expected"]),
            )
        )

    claims = [_load_claim(rec, algebras) for rec in raw["degeneration_claims"]]
    seen = set()
    for c in claims:
        if c.claim_id in seen:
            raise CorpusError(f"duplicate degeneration claim {c.claim_id!r}")
        seen.add(c.claim_id)

    for section in ("orbit_dims", "family_closure_dims"):
        for aid in raw[section]:
            if aid not in algebras:
                raise CorpusError(f"{section} references unknown algebra {aid!r}")
    for comp in raw["components"].values():
        for aid in comp["members"] + comp["rigid"]:
            if aid not in algebras:
                raise CorpusError(f"components reference unknown algebra {aid!r}")

    return Corpus(
        path=path,
        raw=raw,
        algebras=algebras,
        h2_tables=h2_tables,
        extension_specs=extension_specs,
        ts_empty=list(raw["ts_empty"]),
        alpha_sets=alpha_sets,
        reduction_cases=reduction_cases,
        degeneration_claims=claims,
        orbit_dims=dict(raw["orbit_dims"]),
        family_closure_dims=dict(raw["family_closure_dims"]),
        components=raw["components"],
    )


@dataclass
class RecordStatus:
    record: str
    ok: bool
    detail: str = ""


def validate_corpus(corpus: Corpus) -> list:
    """Identity checks on every algebra plus cocycle checks on every table entry."""
    out = []
    for rec in corpus.algebras.values():
        A = rec.algebra
        r1 = alg.check_antiassociative(A)
        r2 = alg.check_nilpotency4(A)
        ok = r1.ok and r2.ok
        detail = "" if ok else f"antiassoc={r1.ok} nilpotency4={r2.ok}"
        if r2.ok:
            detail = detail or f"chain {r2.details['chain_dims']}"
        out.append(RecordStatus(f"algebra:{rec.rec_id}", ok, detail))
    for table in corpus.h2_tables:
        A = corpus.algebra(table.algebra_id)
        z2 = coh.compute_Z2(A)
        bad = [
            text
            for text, mat in zip(table.generator_exprs, table.generators)
            if not z2.contains(mat.vectorize())
        ]
        out.append(
            RecordStatus(
                f"h2-cocycles:{table.algebra_id}",
                not bad,
                "" if not bad else f"not cocycles: {bad}",
            )
        )
    return out


# ---------------------------------------------------------------------------
# Serialization round trip
# ---------------------------------------------------------------------------

def serialize(corpus: Corpus) -> dict:
    """Re-emit the loaded document; expression fields are round-tripped
    through the parser and printer, everything else verbatim."""
    raw = json.loads(json.dumps(corpus.raw))  # deep copy
    for rec in raw["algebras"]:
        params = rec.get("params", [])
        markers = [f"e{k}" for k in range(1, rec["dim"] + 1)]
        rec["products"] = [
            [i, j, print_expr(parse_expr(rhs, markers + list(params)))]
            for i, j, rhs in rec["products"]
        ]
    for rec in raw["degeneration_claims"]:
        src = corpus.algebras[rec["source"]].algebra
        markers = [f"e{k}" for k in range(1, src.dim + 1)]
        aux = sorted(set(rec.get("aux", {})) | set(rec.get("aux_sampled", {})))
        syms = markers + ["t"] + aux
        rec["basis"] = [print_expr(parse_expr(text, syms)) for text in rec["basis"]]
        if rec.get("index") is not None:
            rec["index"] = print_expr(parse_expr(rec["index"], ["t"] + aux))
    return raw


def semantically_equal(corpus_a: Corpus, corpus_b: Corpus) -> bool:
    """Equality of parsed content (expression ASTs compared, not strings)."""
    if set(corpus_a.algebras) != set(corpus_b.algebras):
        return False
    for rec_id, rec in corpus_a.algebras.items():
        other = corpus_b.algebras[rec_id]
        A, B = rec.algebra, other.algebra
        if A.dim != B.dim or A.params != B.params:
            return False
        for i in range(A.dim):
            for j in range(A.dim):
                for k in range(A.dim):
                    if not _scalar_equal(A.c(i, j, k), B.c(i, j, k)):
                        return False
    ids_a = {c.claim_id: c for c in corpus_a.degeneration_claims}
    ids_b = {c.claim_id: c for c in corpus_b.degeneration_claims}
    if set(ids_a) != set(ids_b):
        return False
    for cid, ca in ids_a.items():
        cb = ids_b[cid]
        if ca.basis_rows != cb.basis_rows or ca.source_index != cb.source_index:
            return False
    return True


def _scalar_equal(a, b) -> bool:
    if type(a) is type(b):
        return a == b
    return Cyclo12.coerce(a) == Cyclo12.coerce(b) if not hasattr(a, "ring") else a == b
