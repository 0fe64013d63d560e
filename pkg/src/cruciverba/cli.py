"""Command-line surface for batch pipeline use.

Every subcommand honors ``--config`` and can emit machine-readable JSON with
``--json``; failures exit nonzero after printing the error's reason code.
"""
from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import grid as grid_mod
from .config import PipelineConfig
from .curation import curate_pool, rank_articles
from .errors import CruciverbaError
from .gateway import generate_clues
from .records import ClueRecord
from .rouge import compare_cluesets, score_corpus
from .store import ClueStore, compute_stats, export_training_manifest
from .styles import ClueStyle
from .validation import DEFAULT_LEXICON, load_lexicon, validate
from .wiki import ArticleRecord


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="YAML pipeline configuration.")
@click.option("--json", "as_json", is_flag=True, help="Emit JSON instead of tables.")
@click.pass_context
def main(ctx, config_path, as_json):
    """Italian educational crossword pipeline."""
    ctx.ensure_object(dict)
    ctx.obj["config"] = PipelineConfig.load(config_path)
    ctx.obj["json"] = as_json


def _fail(exc: Exception) -> None:
    code = exc.code if isinstance(exc, CruciverbaError) else type(exc).__name__
    click.echo(f"error: {code}: {exc}", err=True)
    sys.exit(1)


def _emit(ctx, payload: dict, text_lines: list[str]) -> None:
    if ctx.obj["json"]:
        click.echo(json.dumps(payload, ensure_ascii=False, indent=2))
    else:
        for line in text_lines:
            click.echo(line)


def _read_jsonl(path: str) -> list[dict]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                rows.append(json.loads(line))
    return rows


@main.command()
@click.argument("titles", nargs=-1, required=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Append article records to this JSONL file.")
@click.pass_context
def ingest(ctx, titles, out):
    """Fetch articles and extract intro, keywords, and metadata."""
    config: PipelineConfig = ctx.obj["config"]
    client = config.build_wiki_client()
    records = []
    try:
        for title in titles:
            records.append(client.article_record(title))
    except CruciverbaError as exc:
        _fail(exc)
    if out:
        with open(out, "a", encoding="utf-8") as fh:
            for record in records:
                fh.write(json.dumps(record.as_dict(), ensure_ascii=False) + "\n")
    _emit(ctx, {"articles": [r.as_dict() for r in records]},
          [f"{r.title}: {len(r.intro_text.split())} words, "
           f"keywords {r.bold_keywords}" for r in records])


@main.command()
@click.option("--in", "in_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Write surviving articles here (ranked by views).")
@click.pass_context
def curate(ctx, in_path, out):
    """Filter an article pool and rank the survivors by popularity."""
    config: PipelineConfig = ctx.obj["config"]
    pool = [ArticleRecord.from_dict(row) for row in _read_jsonl(in_path)]
    accepted, rejected = curate_pool(pool, config.curation)
    ranked = rank_articles(accepted)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            for record in ranked:
                fh.write(json.dumps(record.as_dict(), ensure_ascii=False) + "\n")
    _emit(ctx, {"accepted": len(ranked),
                "rejected": [{"title": t, "reasons": r} for t, r in rejected]},
          [f"accepted {len(ranked)} / {len(pool)}"] +
          [f"rejected {title}: {', '.join(reasons)}" for title, reasons in rejected])


@main.command()
@click.option("--article", "article_path", type=click.Path(exists=True, dir_okay=False),
              required=True, help="JSON or JSONL file with one article record.")
@click.option("--keyword", required=True)
@click.option("--styles", default="unrestricted",
              help="Comma-separated clue styles.")
@click.option("--n", default=3, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Append draft clue records to this JSONL file.")
@click.pass_context
def gen(ctx, article_path, keyword, styles, n, out):
    """Generate clue drafts for one article keyword."""
    config: PipelineConfig = ctx.obj["config"]
    rows = _read_jsonl(article_path)
    if not rows:
        _fail(CruciverbaError("article file is empty"))
    article = ArticleRecord.from_dict(rows[0])
    gateway = config.build_gateway()
    drafts: list[ClueRecord] = []
    try:
        for style_name in styles.split(","):
            style = ClueStyle.parse(style_name)
            drafts.extend(generate_clues(article, keyword, style, n,
                                         config.generation, gateway,
                                         template_dir=config.templates_dir))
    except (CruciverbaError, ValueError) as exc:
        _fail(exc)
    if out:
        with open(out, "a", encoding="utf-8") as fh:
            for draft in drafts:
                fh.write(json.dumps(draft.as_dict(), ensure_ascii=False) + "\n")
    _emit(ctx, {"clues": [d.as_dict() for d in drafts]},
          [f"[{d.style.value}] {d.clue}" for d in drafts])


@main.command("validate")
@click.option("--in", "in_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.pass_context
def validate_cmd(ctx, in_path, out):
    """Run mechanical validation over clue records."""
    config: PipelineConfig = ctx.obj["config"]
    lexicon = load_lexicon(config.lexicon_path) if config.lexicon_path else DEFAULT_LEXICON
    rows = _read_jsonl(in_path)
    results = []
    for row in rows:
        record = ClueRecord.from_dict(row)
        record.validation = validate(record.clue, record.keyword, record.style,
                                     lex=lexicon)
        results.append(record)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            for record in results:
                fh.write(json.dumps(record.as_dict(), ensure_ascii=False) + "\n")
    _emit(ctx, {"clues": [r.as_dict() for r in results]},
          [f"{r.keyword}: {'pass' if r.validation.passed else 'FAIL'} "
           f"({', '.join(r.validation.issues) or 'no issues'})" for r in results])


@main.command()
@click.option("--pairs", type=click.Path(exists=True, dir_okay=False), required=True,
              help="JSONL of {clue, context} pairs.")
@click.pass_context
def rouge(ctx, pairs):
    """Corpus-level ROUGE-1/2/L over clue/context pairs."""
    rows = _read_jsonl(pairs)
    try:
        report = score_corpus((row["clue"], row["context"]) for row in rows)
    except CruciverbaError as exc:
        _fail(exc)
    _emit(ctx, report.as_dict(),
          [f"pairs   {report.pair_count}",
           f"rouge1  {report.mean_rouge1:.4f}",
           f"rouge2  {report.mean_rouge2:.4f}",
           f"rougeL  {report.mean_rougeL:.4f}"])


@main.command()
@click.option("--a", "a_path", type=click.Path(exists=True, dir_okay=False), required=True,
              help="JSONL of {id, clue}: candidate set.")
@click.option("--b", "b_path", type=click.Path(exists=True, dir_okay=False), required=True,
              help="JSONL of {id, clue}: reference set.")
@click.pass_context
def compare(ctx, a_path, b_path):
    """Compare two clue sets keyed by context id."""
    set_a = {row["id"]: row["clue"] for row in _read_jsonl(a_path)}
    set_b = {row["id"]: row["clue"] for row in _read_jsonl(b_path)}
    try:
        report = compare_cluesets(set_a, set_b)
    except CruciverbaError as exc:
        _fail(exc)
    _emit(ctx, report.as_dict(),
          [f"pairs   {report.pair_count}",
           f"rouge1  {report.mean_rouge1:.4f}",
           f"rouge2  {report.mean_rouge2:.4f}",
           f"rougeL  {report.mean_rougeL:.4f}"])


@main.command()
@click.option("--in", "in_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="JSONL of clue records (default: the data dir store).")
@click.pass_context
def stats(ctx, in_path):
    """Descriptive statistics over clue records."""
    config: PipelineConfig = ctx.obj["config"]
    if in_path:
        records = [ClueRecord.from_dict(row) for row in _read_jsonl(in_path)]
    else:
        records = ClueStore(config.data_dir).records()
    try:
        report = compute_stats(records)
    except CruciverbaError as exc:
        _fail(exc)
    doc = report.as_dict()
    _emit(ctx, doc,
          [f"records {doc['record_count']}",
           f"context tokens {doc['context_tokens']['min']}..{doc['context_tokens']['max']}",
           f"clue tokens    {doc['clue_tokens']['min']}..{doc['clue_tokens']['max']}",
           "categories: " + ", ".join(f"{k}={v}" for k, v in doc["categories"].items())])


@main.command()
@click.option("--in", "in_path", type=click.Path(exists=True, dir_okay=False), required=True,
              help="JSONL with keyword/answer and clue fields.")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.option("--format", "fmt", default="text", show_default=True,
              type=click.Choice(["text", "json", "html"]))
@click.pass_context
def grid(ctx, in_path, out, fmt):
    """Build and render a criss-cross puzzle from accepted clues."""
    config: PipelineConfig = ctx.obj["config"]
    entries = []
    try:
        for i, row in enumerate(_read_jsonl(in_path), start=1):
            answer = row.get("keyword") or row.get("answer")
            entries.append(grid_mod.Entry.from_answer(
                row.get("id", f"e{i:03d}"), answer, row["clue"]))
        result = grid_mod.build(entries, config.grid)
        rendered = grid_mod.render(result.layout, entries, fmt)
    except (CruciverbaError, ValueError, KeyError) as exc:
        _fail(exc)
    if out:
        Path(out).write_bytes(rendered)
    else:
        click.echo(rendered.decode("utf-8"))
    if result.unplaced:
        click.echo(f"unplaced: {', '.join(result.unplaced)}", err=True)


@main.command()
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@click.option("--include-tombstoned", is_flag=True)
@click.pass_context
def export(ctx, out, include_tombstoned):
    """Export the dataset store to JSONL."""
    config: PipelineConfig = ctx.obj["config"]
    store = ClueStore(config.data_dir)
    count = store.export_jsonl(out, include_tombstoned=include_tombstoned)
    _emit(ctx, {"exported": count}, [f"exported {count} records to {out}"])


@main.command("import")
@click.option("--in", "in_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--skip-duplicates", is_flag=True)
@click.pass_context
def import_cmd(ctx, in_path, skip_duplicates):
    """Import clue records from JSONL, reporting failed lines."""
    config: PipelineConfig = ctx.obj["config"]
    store = ClueStore(config.data_dir)
    result = store.import_jsonl(in_path, skip_duplicates=skip_duplicates)
    _emit(ctx, {"imported": result.imported,
                "errors": [{"line": e.line_no, "message": str(e)} for e in result.errors]},
          [f"imported {result.imported} records"] +
          [f"error {e}" for e in result.errors])
    if result.errors:
        sys.exit(1)


@main.command()
@click.option("--out-dir", type=click.Path(file_okay=False), required=True)
@click.pass_context
def manifest(ctx, out_dir):
    """Export train/val/test splits plus the fine-tuning hyperparameter manifest."""
    config: PipelineConfig = ctx.obj["config"]
    store = ClueStore(config.data_dir)
    try:
        doc = export_training_manifest(store.records(), out_dir)
    except CruciverbaError as exc:
        _fail(exc)
    _emit(ctx, doc, [f"manifest written to {out_dir}/manifest.json"])


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
@click.pass_context
def serve(ctx, host, port):
    """Run the HTTP API for the review client."""
    import uvicorn

    from .server import create_app
    uvicorn.run(create_app(ctx.obj["config"]), host=host, port=port)


if __name__ == "__main__":
    main()
