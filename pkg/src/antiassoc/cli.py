"""Batch verification CLI.

Exit codes: 0 all selected checks pass, 1 at least one failure,
2 corpus load failure.  With a fixed seed the JSON report is
byte-identical across runs.
"""

from __future__ import annotations

import json
import sys
from fractions import Fraction

import click

from . import __version__
from . import algebra as alg
from . import cohomology as coh
from . import corpus as cp
from . import degeneration as dg
from . import suites as suites_mod
from .scalars import DEFAULT_PRECISION

REPORT_SCHEMA = 1


def _load(path):
    try:
        return cp.load_corpus(path)
    except cp.CorpusError as exc:
        click.echo(f"corpus error: {exc}", err=True)
        sys.exit(2)


def _coeff_str(x) -> str:
    if isinstance(x, Fraction):
        return str(x)
    return str(x)


def _term(coeff, symbol: str) -> str:
    text = _coeff_str(coeff)
    if text == "1":
        return symbol
    if text == "-1":
        return f"-{symbol}"
    if any(op in text[1:] for op in "+-") or " " in text or "/" in text:
        return f"({text})*{symbol}"
    return f"{text}*{symbol}"


def _join_terms(terms) -> str:
    out = ""
    for t in terms:
        if not out:
            out = t
        elif t.startswith("-"):
            out += " - " + t[1:]
        else:
            out += " + " + t
    return out


def _product_lines(A):
    lines = []
    for i in range(A.dim):
        for j in range(A.dim):
            vec = A.product_basis(i, j)
            terms = [
                _term(vec[k], f"e{k+1}")
                for k in range(A.dim)
                if not A.field.is_zero(vec[k])
            ]
            if terms:
                lines.append(f"  e{i+1} e{j+1} = " + _join_terms(terms))
    return lines


def _config(precision, tol):
    if precision < 64:
        raise click.BadParameter("precision must be at least 64 bits")
    tol_frac = Fraction(tol).limit_denominator(10**30) if tol < 1 else None
    if tol_frac is None or not (0 < tol_frac < 1):
        raise click.BadParameter("tolerance must lie in (0, 1)")
    return dg.DegenConfig(precision=precision, tolerance=tol_frac)


@click.group(context_settings={"auto_envvar_prefix": "ANTIASSOC"})
@click.version_option(__version__)
def main():
    """Exact verification toolkit for antiassociative algebra classification data."""


@main.command()
@click.option("--corpus", "corpus_path", type=click.Path(), default=None, envvar="ANTIASSOC_CORPUS",
              help="Corpus JSON (defaults to the bundled document).")
@click.option("--suite", "suite_names", multiple=True,
              type=click.Choice(list(suites_mod.SUITES) + ["all"]),
              default=("all",), help="Suite selection; repeatable.")
@click.option("--precision", type=int, default=DEFAULT_PRECISION, show_default=True,
              help="Working precision in bits for numeric checks.")
@click.option("--tol", type=float, default=1e-8, show_default=True,
              help="Numeric tolerance for degeneration residuals.")
@click.option("--jobs", type=int, default=1, show_default=True, help="Suite-level parallelism.")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True, help="Random seed for sampled checks.")
@click.option("--probes", type=int, default=10_000, show_default=True,
              help="Random-cocycle count per emptiness claim.")
def verify(corpus_path, suite_names, precision, tol, jobs, fmt, seed, probes):
    """Run verification suites and report one line per table row."""
    corpus = _load(corpus_path)
    config = _config(precision, tol)
    names = list(suites_mod.SUITES) if "all" in suite_names else list(dict.fromkeys(suite_names))
    results = suites_mod.run_suites(corpus, names, seed=seed, config=config,
                                    probe_count=probes, jobs=jobs)
    failures = [r for r in results if not r.ok]
    if fmt == "json":
        doc = {
            "report_schema": REPORT_SCHEMA,
            "tool_version": __version__,
            "config": {
                "corpus": corpus.path,
                "suites": names,
                "precision": precision,
                "tolerance": repr(config.tolerance),
                "seed": seed,
                "probes": probes,
            },
            "results": [
                {
                    "suite": r.suite,
                    "record": r.record,
                    "ok": r.ok,
                    "status": r.label,
                    "detail": r.detail,
                    "residuals": r.trace,
                }
                for r in results
            ],
            "failures": len(failures),
        }
        click.echo(json.dumps(doc, sort_keys=True, indent=2))
    else:
        for r in results:
            click.echo(r.line())
        click.echo(f"\n{len(results) - len(failures)}/{len(results)} checks passed")
        if failures:
            click.echo(f"{len(failures)} FAILURES", err=True)
    sys.exit(1 if failures else 0)


@main.command()
@click.argument("algebra_id")
@click.option("--corpus", "corpus_path", type=click.Path(), default=None, envvar="ANTIASSOC_CORPUS")
@click.option("--seed", type=int, default=0, show_default=True)
def show(algebra_id, corpus_path, seed):
    """Pretty-print an algebra's multiplication table and fingerprint."""
    corpus = _load(corpus_path)
    try:
        rec = corpus.algebras[algebra_id]
    except KeyError:
        click.echo(f"unknown algebra {algebra_id!r}", err=True)
        sys.exit(2)
    A = rec.algebra
    click.echo(f"{algebra_id}  (dim {A.dim}, class {rec.klass}, field {A.field!r})")
    if A.params:
        click.echo(f"parameters: {', '.join(A.params)}")
    for line in _product_lines(A):
        click.echo(line)
    import random

    kind, fp = alg.generic_fingerprint(A, random.Random(f"{seed}:show:{algebra_id}"))
    if kind == "generic":
        click.echo(f"fingerprint: {fp.as_tuple()}")
        click.echo("  (dim, ann, a2, a3, a4, left-ann, right-ann, der, z2, h2, ann^a2)")
    else:
        click.echo("fingerprint varies with parameters:")
        for values, f in fp:
            click.echo(f"  {values}: {f.as_tuple()}")


@main.command()
@click.argument("algebra_id")
@click.option("--corpus", "corpus_path", type=click.Path(), default=None, envvar="ANTIASSOC_CORPUS")
def h2(algebra_id, corpus_path):
    """Second cohomology of a corpus algebra."""
    corpus = _load(corpus_path)
    try:
        A = corpus.algebra(algebra_id)
    except cp.CorpusError as exc:
        click.echo(str(exc), err=True)
        sys.exit(2)
    spaces = coh.compute_H2(A)
    click.echo(f"dim Z2 = {spaces.z2.dim}, dim B2 = {spaces.b2.dim}, dim H2 = {spaces.dim_h2}")
    for idx, rep in enumerate(spaces.h2_reps, start=1):
        entries = []
        for i in range(A.dim):
            for j in range(A.dim):
                x = rep[i, j]
                if not A.field.is_zero(x):
                    entries.append(_term(x, f"D{i+1}{j+1}"))
        click.echo(f"  [{idx}] " + _join_terms(entries))


@main.command()
@click.argument("base_id")
@click.option("--cocycle", "cocycles", multiple=True, required=True,
              help="Cocycle as a combination of Dij symbols; repeatable.")
@click.option("--name", default=None, help="Name for the produced algebra.")
@click.option("--corpus", "corpus_path", type=click.Path(), default=None, envvar="ANTIASSOC_CORPUS")
def extend(base_id, cocycles, name, corpus_path):
    """Build the central extension of a corpus algebra by given cocycles."""
    corpus = _load(corpus_path)
    try:
        base = corpus.algebra(base_id)
    except cp.CorpusError as exc:
        click.echo(str(exc), err=True)
        sys.exit(2)
    thetas = [cp.parse_bilinear(text, base.dim, base.field, base.params) for text in cocycles]
    spec = coh.ExtensionSpec(base, thetas)
    ts = coh.check_Ts(spec)
    built = coh.central_extension(spec, name=name or f"{base_id}+{len(thetas)}")
    click.echo(f"extension dimension {built.dim}; no annihilator component: {ts}")
    for line in _product_lines(built):
        click.echo(line)


@main.command()
@click.argument("claim_id")
@click.option("--corpus", "corpus_path", type=click.Path(), default=None, envvar="ANTIASSOC_CORPUS")
@click.option("--precision", type=int, default=DEFAULT_PRECISION, show_default=True)
@click.option("--tol", type=float, default=1e-8, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def degen(claim_id, corpus_path, precision, tol, seed):
    """Verify one degeneration claim and print its residual trace."""
    corpus = _load(corpus_path)
    import random

    config = _config(precision, tol)
    matches = [c for c in corpus.degeneration_claims if c.claim_id == claim_id]
    if not matches:
        click.echo(f"unknown claim {claim_id!r}", err=True)
        sys.exit(2)
    verdict = dg.check_degeneration(matches[0], corpus.algebra, config,
                                    random.Random(f"{seed}:{claim_id}"))
    click.echo(f"{claim_id}: {verdict.status}")
    for note in verdict.notes:
        click.echo(f"  note: {note}")
    for t_val, residual in verdict.residual_trace:
        click.echo(f"  t = {t_val:>12s}   residual = {residual}")
    sys.exit(0 if verdict.ok else 1)


@main.command()
@click.option("--corpus", "corpus_path", type=click.Path(), default=None, envvar="ANTIASSOC_CORPUS")
@click.option("--seed", type=int, default=0, show_default=True)
def dims(corpus_path, seed):
    """Orbit and family-closure dimensions against the recorded values."""
    corpus = _load(corpus_path)
    results = suites_mod.suite_dimensions(corpus, seed=seed)
    for r in results:
        click.echo(r.line())
    sys.exit(1 if any(not r.ok for r in results) else 0)


if __name__ == "__main__":
    main()
