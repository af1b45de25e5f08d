"""Batch experiment harness: topic dataset ingestion, a resumable run matrix
over (topic, method, backbone, seed) cells, metric aggregation, and report
export with rendered figures.

Each cell owns a subdirectory under the output root holding the generated
document, its evaluation report, a transcript, and a result record; a re-run
over a half-complete directory executes only the missing cells.
"""

from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Literal

from pydantic import BaseModel, ConfigDict, ValidationError

from .evalkit.report import EvalReport, MetricError
from .pipeline import PipelineError


class BenchError(Exception):
    pass


class MalformedRecord(BenchError):
    def __init__(self, line: int, reason: str):
        self.line = line
        super().__init__(f"malformed record at line {line}: {reason}")


class DuplicateId(BenchError):
    pass


class EmptyDataset(BenchError):
    pass


class NoSuccessfulResults(BenchError):
    pass


class UnsupportedFormat(BenchError):
    pass


class TopicRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")
    id: str
    topic: str
    subject: str
    source_url: str | None = None


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")
    method_label: str
    backbone_label: str
    style_mode: Literal["auto", "selection"] = "auto"
    seed: int = 0

    @property
    def label(self) -> str:
        return f"{self.method_label}__{self.backbone_label}__seed{self.seed}"


class RunResult(BaseModel):
    topic_id: str
    method_label: str
    backbone_label: str
    seed: int
    status: Literal["ok", "failed"]
    failed_stage: str | None = None
    document_path: str | None = None
    transcript_path: str | None = None
    report: EvalReport | None = None


def load_topics(path: str) -> list[TopicRecord]:
    """Read a line-delimited dataset of {id, topic, subject, source_url?}."""
    records: list[TopicRecord] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                data = json.loads(line)
                record = TopicRecord.model_validate(data)
            except (json.JSONDecodeError, ValidationError) as exc:
                raise MalformedRecord(lineno, str(exc).splitlines()[0]) from exc
            if not record.topic.strip():
                raise MalformedRecord(lineno, "topic is empty")
            if record.id in seen:
                raise DuplicateId(f"topic id {record.id!r} repeated at line {lineno}")
            seen.add(record.id)
            records.append(record)
    if not records:
        raise EmptyDataset(f"no records in {path}")
    return records


# A runner generates and evaluates one document; it returns the document HTML,
# the wall-clock seconds spent, and the evaluation report.
Runner = Callable[[TopicRecord, RunConfig, str], tuple[str, float, EvalReport]]


def _cell_dir(out_dir: str, topic: TopicRecord, config: RunConfig) -> str:
    return os.path.join(out_dir, config.label, topic.id)


def _run_cell(topic: TopicRecord, config: RunConfig, out_dir: str,
              runner: Runner) -> RunResult:
    cell = _cell_dir(out_dir, topic, config)
    result_path = os.path.join(cell, "result.json")
    if os.path.exists(result_path):
        with open(result_path, encoding="utf-8") as fh:
            prior = RunResult.model_validate_json(fh.read())
        if prior.status == "ok":
            return prior
    os.makedirs(cell, exist_ok=True)
    try:
        html, seconds, report = runner(topic, config, cell)
        doc_path = os.path.join(cell, "document.html")
        with open(doc_path, "w", encoding="utf-8") as fh:
            fh.write(html)
        report.save(os.path.join(cell, "eval.json"))
        result = RunResult(topic_id=topic.id, method_label=config.method_label,
                           backbone_label=config.backbone_label, seed=config.seed,
                           status="ok", document_path=doc_path,
                           transcript_path=os.path.join(cell, "transcript.jsonl"),
                           report=report)
    except Exception as exc:
        stage = "unknown"
        if isinstance(exc, PipelineError):
            stage = exc.stage
        elif isinstance(exc, MetricError):
            stage = f"eval:{exc.metric}"
        result = RunResult(topic_id=topic.id, method_label=config.method_label,
                           backbone_label=config.backbone_label, seed=config.seed,
                           status="failed", failed_stage=stage)
    with open(result_path, "w", encoding="utf-8") as fh:
        fh.write(result.model_dump_json(indent=2) + "\n")
    return result


def run_matrix(topics: list[TopicRecord], configs: list[RunConfig],
               out_dir: str, runner: Runner, concurrency: int = 1) -> list[RunResult]:
    """One result per (topic, config); failures are recorded, never fatal."""
    if concurrency < 1:
        raise BenchError("concurrency cap must be at least 1")
    cells = [(t, c) for t in topics for c in configs]
    if concurrency == 1:
        return [_run_cell(t, c, out_dir, runner) for t, c in cells]
    with ThreadPoolExecutor(max_workers=concurrency) as pool:
        futures = [pool.submit(_run_cell, t, c, out_dir, runner) for t, c in cells]
        return [f.result() for f in futures]


def load_results(out_dir: str) -> list[RunResult]:
    results = []
    for root, _dirs, files in sorted(os.walk(out_dir)):
        if "result.json" in files:
            with open(os.path.join(root, "result.json"), encoding="utf-8") as fh:
                results.append(RunResult.model_validate_json(fh.read()))
    return results


# ---------------------------------------------------------------------------
# Aggregation


class AggregateRow(BaseModel):
    method: str
    backbone: str
    mean_cr: float
    mean_iq: float
    mean_if: float
    mean_eff: float
    norm_cr: float
    norm_iq: float
    n_ok: int
    n_failed: int


class AggregateTable(BaseModel):
    rows: list[AggregateRow]


def _clamp01(x: float) -> float:
    return min(1.0, max(0.0, x))


def aggregate(results: list[RunResult]) -> AggregateTable:
    """Arithmetic means over ok results per (method, backbone); richness and
    quality additionally normalized by /5 into [0, 1]."""
    groups: dict[tuple[str, str], list[RunResult]] = {}
    for r in results:
        groups.setdefault((r.method_label, r.backbone_label), []).append(r)
    if not any(r.status == "ok" for r in results):
        raise NoSuccessfulResults("no cell completed successfully")
    rows = []
    for (method, backbone) in sorted(groups):
        cell = groups[(method, backbone)]
        ok = [r for r in cell if r.status == "ok" and r.report is not None]
        failed = len(cell) - len(ok)
        if not ok:
            rows.append(AggregateRow(method=method, backbone=backbone,
                                     mean_cr=0.0, mean_iq=0.0, mean_if=0.0,
                                     mean_eff=0.0, norm_cr=0.0, norm_iq=0.0,
                                     n_ok=0, n_failed=failed))
            continue
        mean_cr = sum(r.report.cr for r in ok) / len(ok)
        mean_iq = sum(r.report.iq for r in ok) / len(ok)
        mean_if = sum(r.report.if_score for r in ok) / len(ok)
        mean_eff = sum(r.report.eff for r in ok) / len(ok)
        rows.append(AggregateRow(
            method=method, backbone=backbone,
            mean_cr=mean_cr, mean_iq=mean_iq, mean_if=mean_if, mean_eff=mean_eff,
            norm_cr=_clamp01(mean_cr / 5), norm_iq=_clamp01(mean_iq / 5),
            n_ok=len(ok), n_failed=failed))
    return AggregateTable(rows=rows)


# ---------------------------------------------------------------------------
# Export

_CSV_COLUMNS = ("method", "backbone", "mean_cr", "mean_iq", "mean_if",
                "mean_eff", "norm_cr", "norm_iq", "n_ok", "n_failed")


def render_csv(table: AggregateTable) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_CSV_COLUMNS)
    for row in table.rows:
        writer.writerow([getattr(row, c) for c in _CSV_COLUMNS])
    return buf.getvalue()


def render_text(table: AggregateTable) -> str:
    header = (f"{'Method':<14} {'Backbone':<14} {'CR':>6} {'IQ':>6} {'IF':>6} "
              f"{'Eff':>8} {'CR/5':>6} {'IQ/5':>6} {'ok':>4} {'fail':>5}")
    lines = [header, "-" * len(header)]
    for r in table.rows:
        lines.append(
            f"{r.method:<14} {r.backbone:<14} {r.mean_cr:>6.2f} {r.mean_iq:>6.2f} "
            f"{r.mean_if:>6.2f} {r.mean_eff:>8.1f} {r.norm_cr:>6.2f} "
            f"{r.norm_iq:>6.2f} {r.n_ok:>4d} {r.n_failed:>5d}")
    return "\n".join(lines) + "\n"


def export_report(table: AggregateTable, fmt: str, path: str) -> str:
    if fmt == "csv":
        payload = render_csv(table)
    elif fmt == "json":
        payload = table.model_dump_json(indent=2) + "\n"
    elif fmt == "text":
        payload = render_text(table)
    else:
        raise UnsupportedFormat(f"unsupported report format {fmt!r}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(payload)
    return path


def render_figures(table: AggregateTable, out_dir: str) -> list[str]:
    """Grouped bar charts, one file per metric, next to the delimited export."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    os.makedirs(out_dir, exist_ok=True)
    backbones = sorted({r.backbone for r in table.rows})
    methods = sorted({r.method for r in table.rows})
    by_cell = {(r.method, r.backbone): r for r in table.rows}

    metrics = [
        ("norm_cr", "Content richness (normalized)", "content_richness.png", (0, 1.05)),
        ("norm_iq", "Interaction quality (normalized)", "interaction_quality.png", (0, 1.05)),
        ("mean_if", "Interaction functionality", "interaction_functionality.png", (0, 1.05)),
        ("mean_eff", "Efficiency (chars/s)", "efficiency.png", None),
    ]
    paths = []
    width = 0.8 / max(1, len(methods))
    for attr, title, filename, ylim in metrics:
        fig, ax = plt.subplots(figsize=(6, 3.5))
        for mi, method in enumerate(methods):
            xs = [bi + mi * width for bi in range(len(backbones))]
            ys = [getattr(by_cell[(method, b)], attr)
                  if (method, b) in by_cell else 0.0 for b in backbones]
            ax.bar(xs, ys, width=width, label=method)
        ax.set_xticks([bi + width * (len(methods) - 1) / 2 for bi in range(len(backbones))])
        ax.set_xticklabels(backbones, fontsize=8)
        ax.set_title(title, fontsize=10)
        if ylim:
            ax.set_ylim(*ylim)
        ax.legend(fontsize=7)
        fig.tight_layout()
        path = os.path.join(out_dir, filename)
        fig.savefig(path, dpi=120)
        plt.close(fig)
        paths.append(path)
    return paths
