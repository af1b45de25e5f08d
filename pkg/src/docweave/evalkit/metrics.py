"""Rule-based metrics: interaction functionality, efficiency, main-text
extraction, the design-times-functionality composite, and correlation
utilities."""

from __future__ import annotations

import math

from pydantic import BaseModel

from ..htmlcheck import extract_main_text  # noqa: F401  (re-exported)
from .browser import BrowserDriver, ProbeResult


class NonPositiveDuration(Exception):
    pass


class OutOfRangeInput(Exception):
    pass


class LengthMismatch(Exception):
    pass


class DegenerateInput(Exception):
    pass


class IFResult(BaseModel):
    score: float
    num_elements: int
    num_responsive: int
    flags: list[str]
    probes: list[ProbeResult]


def if_score(html: str, driver: BrowserDriver) -> IFResult:
    """Probe every enumerated element once, in document order, against a page
    reloaded between probes. Zero-element pages score 0 with flag NoElements."""
    driver.load(html)
    elements = driver.enumerate_elements()
    if not elements:
        return IFResult(score=0.0, num_elements=0, num_responsive=0,
                        flags=["NoElements"], probes=[])
    probes = [driver.probe(el) for el in elements]
    responsive = sum(1 for p in probes if p.changed)
    return IFResult(score=responsive / len(elements),
                    num_elements=len(elements), num_responsive=responsive,
                    flags=[], probes=probes)


def efficiency(output_chars: int, seconds: float) -> float:
    if seconds <= 0:
        raise NonPositiveDuration(f"generation time must be positive, got {seconds}")
    return output_chars / seconds


def interaction_quality(id_score: float, if_value: float) -> float:
    if not 1 <= id_score <= 5:
        raise OutOfRangeInput(f"design score {id_score} outside [1, 5]")
    if not 0 <= if_value <= 1:
        raise OutOfRangeInput(f"functionality score {if_value} outside [0, 1]")
    return id_score * if_value


def _check_pair(xs, ys):
    if len(xs) != len(ys):
        raise LengthMismatch(f"{len(xs)} vs {len(ys)} points")
    if len(xs) < 3:
        raise DegenerateInput("need at least 3 points")


def pearson(xs: list[float], ys: list[float]) -> float:
    _check_pair(xs, ys)
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    sxx = sum((x - mx) ** 2 for x in xs)
    syy = sum((y - my) ** 2 for y in ys)
    if sxx == 0 or syy == 0:
        raise DegenerateInput("constant input has no linear correlation")
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    return sxy / math.sqrt(sxx * syy)


def _average_ranks(values: list[float]) -> list[float]:
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        rank = (i + j) / 2 + 1  # ties share the average rank
        for k in range(i, j + 1):
            ranks[order[k]] = rank
        i = j + 1
    return ranks


def spearman(xs: list[float], ys: list[float]) -> float:
    _check_pair(xs, ys)
    return pearson(_average_ranks(xs), _average_ranks(ys))
