import json
import os

import pytest

from docweave import bench
from docweave.evalkit.report import EvalReport, MetricError
from docweave.pipeline import GenerationFailed


def topic(i):
    return bench.TopicRecord(id=f"t{i}", topic=f"Topic {i}", subject="Physics")


def config(method="full", backbone="model-a", seed=0):
    return bench.RunConfig(method_label=method, backbone_label=backbone, seed=seed)


def report(cr=4, iq=3.0, if_score=0.75, eff=400.0):
    return EvalReport(if_score=if_score, num_elements=4, num_responsive=3,
                      eff=eff, cr=cr, id_score=4, iq=iq)


def ok_runner(topic_record, run_config, cell_dir):
    html = f"<html><body><p>{topic_record.topic}</p></body></html>"
    return html, 2.0, report()


# -- topic loading -----------------------------------------------------------


def test_load_bundled_topics():
    from importlib import resources
    path = resources.files("docweave").joinpath("data/topics.jsonl")
    topics = bench.load_topics(str(path))
    assert len(topics) == 101
    subjects = {}
    for t in topics:
        subjects[t.subject] = subjects.get(t.subject, 0) + 1
    assert subjects["Algorithms"] == 25
    assert subjects["Mathematics"] == 24
    assert subjects["Tools & Resources"] == 13
    assert subjects["Physics"] == 10
    assert len({t.id for t in topics}) == 101


def test_load_topics_reports_offending_line(tmp_path):
    path = tmp_path / "topics.jsonl"
    lines = [json.dumps({"id": f"t{i}", "topic": f"T {i}", "subject": "Math"})
             for i in range(10)]
    lines[6] = '{"id": "t6", "topic":'  # truncated JSON at line 7
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(bench.MalformedRecord) as exc:
        bench.load_topics(str(path))
    assert exc.value.line == 7


def test_load_topics_duplicate_id(tmp_path):
    path = tmp_path / "topics.jsonl"
    rec = json.dumps({"id": "dup", "topic": "T", "subject": "Math"})
    path.write_text(rec + "\n" + rec + "\n")
    with pytest.raises(bench.DuplicateId):
        bench.load_topics(str(path))


def test_load_topics_empty(tmp_path):
    path = tmp_path / "topics.jsonl"
    path.write_text("\n\n")
    with pytest.raises(bench.EmptyDataset):
        bench.load_topics(str(path))


def test_run_config_label():
    assert config("full", "model-a", 3).label == "full__model-a__seed3"


# -- run matrix --------------------------------------------------------------


def test_run_matrix_covers_every_cell(tmp_path):
    topics = [topic(i) for i in range(3)]
    configs = [config("full", "model-a"), config("ablation", "model-a")]
    results = bench.run_matrix(topics, configs, str(tmp_path), ok_runner)
    assert len(results) == 6
    assert all(r.status == "ok" for r in results)
    for cfg in configs:
        for t in topics:
            cell = tmp_path / cfg.label / t.id
            assert (cell / "document.html").exists()
            assert (cell / "eval.json").exists()
            assert (cell / "result.json").exists()


def test_run_matrix_isolates_failures(tmp_path):
    def flaky(topic_record, run_config, cell_dir):
        if topic_record.id == "t1":
            raise GenerationFailed("viz step broke")
        return ok_runner(topic_record, run_config, cell_dir)

    results = bench.run_matrix([topic(0), topic(1), topic(2)],
                               [config()], str(tmp_path), flaky)
    by_id = {r.topic_id: r for r in results}
    assert by_id["t0"].status == "ok"
    assert by_id["t1"].status == "failed"
    assert by_id["t1"].failed_stage == "execute"
    assert by_id["t2"].status == "ok"


def test_run_matrix_labels_metric_failures(tmp_path):
    def broken_eval(topic_record, run_config, cell_dir):
        raise MetricError("if", RuntimeError("probe died"))

    results = bench.run_matrix([topic(0)], [config()], str(tmp_path), broken_eval)
    assert results[0].failed_stage == "eval:if"


def test_run_matrix_resumes_only_missing_cells(tmp_path):
    calls = []

    def counting(topic_record, run_config, cell_dir):
        calls.append(topic_record.id)
        if topic_record.id == "t1" and len(calls) <= 2:
            raise GenerationFailed("first pass breaks")
        return ok_runner(topic_record, run_config, cell_dir)

    topics = [topic(0), topic(1)]
    first = bench.run_matrix(topics, [config()], str(tmp_path), counting)
    assert [r.status for r in first] == ["ok", "failed"]
    second = bench.run_matrix(topics, [config()], str(tmp_path), counting)
    assert [r.status for r in second] == ["ok", "ok"]
    # t0 completed on the first pass and is never re-run
    assert calls == ["t0", "t1", "t1"]


def test_run_matrix_concurrent_matches_serial(tmp_path):
    topics = [topic(i) for i in range(4)]
    serial = bench.run_matrix(topics, [config()], str(tmp_path / "a"), ok_runner)
    parallel = bench.run_matrix(topics, [config()], str(tmp_path / "b"),
                                ok_runner, concurrency=4)
    def essence(rs):
        return sorted((r.topic_id, r.status, r.report) for r in rs)
    assert essence(serial) == essence(parallel)


def test_load_results_round_trip(tmp_path):
    results = bench.run_matrix([topic(0), topic(1)], [config()],
                               str(tmp_path), ok_runner)
    loaded = bench.load_results(str(tmp_path))
    assert sorted(loaded, key=lambda r: r.topic_id) == \
        sorted(results, key=lambda r: r.topic_id)


# -- aggregation -------------------------------------------------------------


def result(method="full", backbone="model-a", status="ok", rep=None, tid="t0"):
    return bench.RunResult(topic_id=tid, method_label=method,
                           backbone_label=backbone, seed=0, status=status,
                           report=rep)


def test_aggregate_means_and_normalization():
    rows = bench.aggregate([
        result(rep=report(cr=5, iq=4.58, if_score=0.92, eff=505.0), tid="t0"),
        result(rep=report(cr=5, iq=4.58, if_score=0.92, eff=505.0), tid="t1"),
        result(method="ablation", rep=report(cr=3, iq=2.0, if_score=0.5, eff=300.0)),
    ]).rows
    by_method = {r.method: r for r in rows}
    full = by_method["full"]
    assert full.mean_cr == 5.0 and full.norm_cr == pytest.approx(1.0, abs=1e-12)
    assert full.mean_iq == pytest.approx(4.58, abs=1e-12)
    assert full.norm_iq == pytest.approx(0.916, abs=1e-12)
    assert full.mean_eff == 505.0 and full.n_ok == 2
    abl = by_method["ablation"]
    assert abl.norm_cr == pytest.approx(0.6, abs=1e-12)


def test_aggregate_single_report_normalization():
    row = bench.aggregate([result(rep=report(cr=4.58, iq=4.58))]).rows[0]
    assert row.norm_cr == pytest.approx(0.916, abs=1e-12)
    assert round(row.norm_cr, 2) == 0.92


def test_aggregate_skips_failed_cells_in_means():
    rows = bench.aggregate([
        result(rep=report(cr=5)),
        result(status="failed", tid="t1"),
    ]).rows
    assert rows[0].mean_cr == 5.0
    assert rows[0].n_ok == 1 and rows[0].n_failed == 1


def test_aggregate_no_successes():
    with pytest.raises(bench.NoSuccessfulResults):
        bench.aggregate([result(status="failed")])


# -- export ------------------------------------------------------------------


def sample_table():
    return bench.aggregate([
        result(rep=report()),
        result(method="ablation", rep=report(cr=2, iq=1.0)),
    ])


def test_render_csv_deterministic():
    table = sample_table()
    text = bench.render_csv(table)
    assert text == bench.render_csv(table)
    lines = text.splitlines()
    assert lines[0].startswith("method,backbone,mean_cr")
    assert len(lines) == 3
    assert lines[1].startswith("ablation,model-a,")


def test_export_report_formats(tmp_path):
    table = sample_table()
    for fmt, name in (("csv", "r.csv"), ("json", "r.json"), ("text", "r.txt")):
        path = str(tmp_path / name)
        assert bench.export_report(table, fmt, path) == path
        assert os.path.getsize(path) > 0
    data = json.loads((tmp_path / "r.json").read_text())
    assert {r["method"] for r in data["rows"]} == {"full", "ablation"}


def test_export_report_unsupported_format(tmp_path):
    with pytest.raises(bench.UnsupportedFormat):
        bench.export_report(sample_table(), "xlsx", str(tmp_path / "r.xlsx"))


def test_render_figures(tmp_path):
    paths = bench.render_figures(sample_table(), str(tmp_path))
    names = {os.path.basename(p) for p in paths}
    assert names == {"content_richness.png", "interaction_quality.png",
                     "interaction_functionality.png", "efficiency.png"}
    for p in paths:
        with open(p, "rb") as fh:
            assert fh.read(8).startswith(b"\x89PNG")
