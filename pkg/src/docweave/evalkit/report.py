"""Composite document evaluation: functionality and efficiency from rules,
richness and design from the judge, and the quality composite."""

from __future__ import annotations

import json

from pydantic import BaseModel

from ..gateway import Gateway
from .browser import BrowserDriver, JsdomDriver
from .judge import judge_content_richness, judge_interaction_design
from .metrics import (
    efficiency,
    extract_main_text,
    if_score,
    interaction_quality,
)


class MetricError(Exception):
    def __init__(self, metric: str, cause: Exception):
        self.metric = metric
        self.cause = cause
        super().__init__(f"metric {metric}: {cause}")


class EvalReport(BaseModel):
    if_score: float
    num_elements: int
    num_responsive: int
    eff: float
    cr: float
    id_score: float
    iq: float
    flags: list[str] = []

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.model_dump_json(indent=2) + "\n")

    @classmethod
    def load(cls, path: str) -> "EvalReport":
        with open(path, encoding="utf-8") as fh:
            return cls.model_validate_json(fh.read())


def evaluate(document_html: str, total_seconds: float, topic: str, *,
             gateway: Gateway, driver: BrowserDriver | None = None,
             settle_ms: int = 500) -> EvalReport:
    owns_driver = driver is None
    if owns_driver:
        driver = JsdomDriver(settle_ms=settle_ms)
    try:
        try:
            functional = if_score(document_html, driver)
        except Exception as exc:
            raise MetricError("if", exc) from exc

        try:
            eff = efficiency(len(document_html), total_seconds)
        except Exception as exc:
            raise MetricError("eff", exc) from exc

        try:
            text = extract_main_text(document_html)
            cr = judge_content_richness(gateway, text, topic)
        except MetricError:
            raise
        except Exception as exc:
            raise MetricError("cr", exc) from exc

        try:
            elements = [p.element for p in functional.probes]
            id_val = judge_interaction_design(gateway, elements)
        except Exception as exc:
            raise MetricError("id", exc) from exc

        iq = interaction_quality(id_val, functional.score)
        return EvalReport(if_score=functional.score,
                          num_elements=functional.num_elements,
                          num_responsive=functional.num_responsive,
                          eff=eff, cr=cr, id_score=id_val, iq=iq,
                          flags=list(functional.flags))
    finally:
        if owns_driver:
            driver.close()


def save_report(report: EvalReport, path: str) -> None:
    report.save(path)


def load_report(path: str) -> EvalReport:
    return EvalReport.load(path)
