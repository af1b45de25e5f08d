"""Command-line interface: generation, spec tools, evaluation, benchmarking,
and the HTTP service."""

from __future__ import annotations

import json
import os
import sys

import click

from . import docspec as ds
from .bench import (
    BenchError,
    RunConfig,
    aggregate,
    export_report,
    load_results,
    load_topics,
    render_figures,
    render_text,
    run_matrix,
)
from .evalkit.report import evaluate
from .gateway import Gateway, GatewayError, HttpChatProvider, MockProvider
from .pipeline import Pipeline, PipelineError, StyleSelection


def _gateway(mock_script: str | None, transcript: str | None = None) -> Gateway:
    mock_script = mock_script or os.environ.get("DOCWEAVE_MOCK_SCRIPT")
    if mock_script:
        return Gateway(MockProvider.from_file(mock_script), backoff_base=0.0,
                       transcript_path=transcript)
    return Gateway(HttpChatProvider(), transcript_path=transcript)


def _fail(code: str, message: str) -> None:
    click.echo(json.dumps({"error": code, "message": message}), err=True)
    sys.exit(1)


@click.group()
def main():
    """Authoring and evaluation toolkit for interactive educational documents."""


@main.command()
@click.option("--topic", required=True, help="Topic to generate a document for.")
@click.option("--style", default="auto",
              help="'auto' or a path to a style selection JSON file.")
@click.option("--seed", type=int, default=None)
@click.option("--out", required=True, type=click.Path(), help="Output HTML path.")
@click.option("--mock-script", type=click.Path(exists=True), default=None,
              help="JSONL mock provider script (for offline runs).")
@click.option("--transcript", type=click.Path(), default=None)
def generate(topic, style, seed, out, mock_script, transcript):
    """Generate a complete interactive document for a topic."""
    gateway = _gateway(mock_script, transcript)
    pipe = Pipeline(gateway, seed=seed)
    selection = None
    if style != "auto":
        with open(style, encoding="utf-8") as fh:
            selection = StyleSelection.model_validate_json(fh.read())
    try:
        doc = pipe.run(topic, selection)
    except (PipelineError, GatewayError) as exc:
        _fail(type(exc).__name__, str(exc))
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(doc.html)
    click.echo(f"wrote {out} ({doc.total_chars} chars, "
               f"{len(doc.sections)} sections)")


@main.group()
def spec():
    """Inspect and edit document specs."""


@spec.command("validate")
@click.argument("file", type=click.Path(exists=True))
def spec_validate(file):
    """Validate a spec file; exit 0 when clean."""
    try:
        parsed = ds.load(file)
    except ds.SpecError as exc:
        _fail(type(exc).__name__, str(exc))
    report = ds.validate(parsed)
    click.echo(report.render_text())
    if not report.ok:
        sys.exit(1)


@spec.command("edit")
@click.argument("file", type=click.Path(exists=True))
@click.option("--op", "ops", multiple=True, required=True,
              help="Edit operation as JSON; repeatable.")
@click.option("--out", type=click.Path(), default=None,
              help="Output path (defaults to editing in place).")
def spec_edit(file, ops, out):
    """Apply edit operations to a spec file."""
    try:
        parsed = ds.load(file)
        for op_json in ops:
            op = ds.parse_edit_op(json.loads(op_json))
            parsed = ds.apply_edit(parsed, op)
    except (ds.SpecError, json.JSONDecodeError) as exc:
        _fail(type(exc).__name__, str(exc))
    target = out or file
    with open(target, "w", encoding="utf-8") as fh:
        fh.write(ds.serialize(parsed))
    click.echo(f"wrote {target}")


@main.command("eval")
@click.argument("document", type=click.Path(exists=True))
@click.option("--topic", default="", help="Topic for the richness rubric.")
@click.option("--seconds", type=float, default=None,
              help="Generation wall-clock seconds (for the efficiency metric).")
@click.option("--settle-ms", type=int, default=500)
@click.option("--mock-script", type=click.Path(exists=True), default=None)
@click.option("--out", type=click.Path(), default=None,
              help="Write the report JSON here as well.")
def eval_cmd(document, topic, seconds, settle_ms, mock_script, out):
    """Evaluate a generated document and print the metric report."""
    with open(document, encoding="utf-8") as fh:
        html = fh.read()
    if seconds is None:
        seconds = max(len(html) / 500.0, 1e-6)  # neutral default throughput
    try:
        report = evaluate(html, seconds, topic, gateway=_gateway(mock_script),
                          settle_ms=settle_ms)
    except Exception as exc:
        _fail(type(exc).__name__, str(exc))
    click.echo(report.model_dump_json(indent=2))
    if out:
        report.save(out)


@main.group()
def bench():
    """Batch generation runs and aggregate reports."""


@bench.command("run")
@click.option("--topics", required=True, type=click.Path(exists=True))
@click.option("--configs", required=True, type=click.Path(exists=True),
              help="JSON list of run configs.")
@click.option("--out", required=True, type=click.Path())
@click.option("--concurrency", type=int, default=1)
@click.option("--settle-ms", type=int, default=200)
@click.option("--mock-script", type=click.Path(exists=True), default=None)
def bench_run(topics, configs, out, concurrency, settle_ms, mock_script):
    """Run the (topic x config) matrix; resumable over an existing directory."""
    try:
        topic_records = load_topics(topics)
    except BenchError as exc:
        _fail(type(exc).__name__, str(exc))
    with open(configs, encoding="utf-8") as fh:
        config_list = [RunConfig.model_validate(c) for c in json.load(fh)]

    def runner(topic, config, cell_dir):
        gateway = _gateway(mock_script,
                           transcript=os.path.join(cell_dir, "transcript.jsonl"))
        pipe = Pipeline(gateway, seed=config.seed)
        doc = pipe.run(topic.topic)
        report = evaluate(doc.html, max(doc.total_seconds, 1e-6), topic.topic,
                          gateway=gateway, settle_ms=settle_ms)
        return doc.html, doc.total_seconds, report

    results = run_matrix(topic_records, config_list, out, runner,
                         concurrency=concurrency)
    ok = sum(1 for r in results if r.status == "ok")
    click.echo(f"{ok}/{len(results)} cells ok")


@bench.command("report")
@click.option("--runs", required=True, type=click.Path(exists=True),
              help="Output directory of a previous bench run.")
@click.option("--format", "fmt", default="text",
              type=click.Choice(["csv", "json", "text"]))
@click.option("--out", type=click.Path(), default=None,
              help="Report file path (defaults to report.<fmt> in the runs dir).")
@click.option("--figures/--no-figures", default=True,
              help="Also render metric bar charts next to the report.")
def bench_report(runs, fmt, out, figures):
    """Aggregate run results into a table, with figures alongside."""
    results = load_results(runs)
    try:
        table = aggregate(results)
    except BenchError as exc:
        _fail(type(exc).__name__, str(exc))
    out = out or os.path.join(runs, f"report.{fmt if fmt != 'text' else 'txt'}")
    export_report(table, fmt, out)
    click.echo(render_text(table))
    if figures:
        for path in render_figures(table, os.path.dirname(out) or "."):
            click.echo(f"figure: {path}")
    click.echo(f"report: {out}")


@main.command()
@click.option("--port", type=int, default=8787)
@click.option("--host", default="127.0.0.1")
@click.option("--storage", required=True, type=click.Path())
@click.option("--mock-script", type=click.Path(exists=True), default=None)
@click.option("--settle-ms", type=int, default=200)
def serve(port, host, storage, mock_script, settle_ms):
    """Run the HTTP service for the four-stage workflow."""
    import uvicorn

    from .service import create_app

    factory = None
    if mock_script:
        factory = lambda: Gateway(MockProvider.from_file(mock_script),
                                  backoff_base=0.0)
    app = create_app(storage, gateway_factory=factory, settle_ms=settle_ms)
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
