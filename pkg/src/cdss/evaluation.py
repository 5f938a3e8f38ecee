"""Probe experiments and classification metrics for the retrieval component.

A probe is a case whose diagnosis we pretend not to know. It counts as
"found" when the majority vote of its k nearest training cases matches the
class it was supposed to have. That definition is printed in every report
header so the rates stay interpretable.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Optional, Union

from . import casebase as cb_mod
from . import similarity
from .casebase import CaseBase
from .errors import ArgumentError, CaseBaseIOError, EmptyInputError
from .similarity import VdmModel

FOUND_DEFINITION = (
    "found = majority vote of the k nearest training cases matches the supposed class"
)

#: Historical benchmark rates for the 10 positive + 10 negative probe
#: configuration, shown alongside fresh results for comparison.
BENCHMARK_FOUND_RATES = {1: 60.0, 0: 50.0}


@dataclass(frozen=True)
class ProbeResult:
    probe_id: str
    supposed_class: int
    majority_class: int
    vote_fraction: float
    found: bool


@dataclass(frozen=True)
class ExperimentReport:
    seed: Optional[int]
    k: int
    n_probes_pos: int
    n_probes_neg: int
    found_pos_rate: Optional[float]   # percent, None when no positive probes
    found_neg_rate: Optional[float]
    details: tuple[ProbeResult, ...]
    train_class_counts: dict[int, int]
    found_definition: str = FOUND_DEFINITION

    @property
    def overall_rate(self) -> Optional[float]:
        if not self.details:
            return None
        return 100.0 * sum(r.found for r in self.details) / len(self.details)


@dataclass(frozen=True)
class EvalMetrics:
    accuracy: float
    recall: dict[int, Optional[float]]
    confusion: dict[tuple[int, int], int]   # (actual, predicted) -> count
    n_test: int
    k: int


def _rate(results: list[ProbeResult]) -> Optional[float]:
    if not results:
        return None
    return 100.0 * sum(r.found for r in results) / len(results)


def run_probe_experiment(
    train: CaseBase,
    probe_source: CaseBase,
    n_pos: int,
    n_neg: int,
    k: int,
    seed: Optional[int] = None,
    model: Optional[VdmModel] = None,
    enforce_disjoint: bool = True,
) -> ExperimentReport:
    """Sample probes per class, retrieve against the training base, report rates.

    Positives are sampled first, then negatives, both with one seeded
    generator, so a seed fixes the whole report.
    """
    if n_pos < 0 or n_neg < 0 or n_pos + n_neg == 0:
        raise ArgumentError("need a non-negative probe count and at least one probe")
    if enforce_disjoint:
        overlap = {c.id for c in train.cases} & {c.id for c in probe_source.cases}
        if overlap:
            raise ArgumentError(
                f"{len(overlap)} probe ids also present in the training base",
                details={"overlap": sorted(overlap)[:10]},
            )
    pos_pool = [c for c in probe_source.cases if c.diagnosis == 1]
    neg_pool = [c for c in probe_source.cases if c.diagnosis == 0]
    if len(pos_pool) < n_pos:
        raise ArgumentError(
            f"probe source has {len(pos_pool)} positive cases, need {n_pos}")
    if len(neg_pool) < n_neg:
        raise ArgumentError(
            f"probe source has {len(neg_pool)} negative cases, need {n_neg}")
    rng = random.Random(seed)
    probes = rng.sample(pos_pool, n_pos) + rng.sample(neg_pool, n_neg)
    if model is None:
        model = similarity.fit_vdm(train)
    details = []
    for probe in probes:
        encoded = cb_mod.encode_case(train, probe)
        neighbors = similarity.retrieve_k_nearest(model, train, encoded, k)
        majority, fraction = similarity.majority_diagnosis(neighbors, train)
        details.append(ProbeResult(
            probe_id=probe.id,
            supposed_class=probe.diagnosis,
            majority_class=majority,
            vote_fraction=fraction,
            found=majority == probe.diagnosis,
        ))
    pos_results = [r for r in details if r.supposed_class == 1]
    neg_results = [r for r in details if r.supposed_class == 0]
    return ExperimentReport(
        seed=seed,
        k=k,
        n_probes_pos=n_pos,
        n_probes_neg=n_neg,
        found_pos_rate=_rate(pos_results),
        found_neg_rate=_rate(neg_results),
        details=tuple(details),
        train_class_counts=cb_mod.class_counts(train),
    )


def run_split_experiment(
    cb: CaseBase,
    train_size: int,
    n_pos: int,
    n_neg: int,
    k: int,
    seed: Optional[int] = None,
    split_seed: Optional[int] = None,
) -> ExperimentReport:
    """Split a raw base, discretize the training part, and run the probes.

    Probes are drawn from the held-out part and encoded with the training
    base's bin edges, so the experiment never peeks at its own probes.
    """
    train_raw, test_raw = cb_mod.split_train_test(cb, train_size, seed=split_seed)
    train = cb_mod.discretize(train_raw)
    return run_probe_experiment(train, test_raw, n_pos, n_neg, k, seed=seed)


def classification_eval(
    train: CaseBase,
    test: CaseBase,
    k: int,
    model: Optional[VdmModel] = None,
    enforce_disjoint: bool = True,
) -> EvalMetrics:
    """Classify every test case by neighbor majority and tally exact counts."""
    if len(test) == 0:
        raise ArgumentError("test set is empty")
    if enforce_disjoint:
        overlap = {c.id for c in train.cases} & {c.id for c in test.cases}
        if overlap:
            raise ArgumentError(f"{len(overlap)} test ids also present in train")
    if model is None:
        model = similarity.fit_vdm(train)
    classes = sorted(train.class_labels)
    confusion = {(a, p): 0 for a in classes for p in classes}
    correct = 0
    for case in test.cases:
        if case.diagnosis is None:
            raise ArgumentError(f"test case {case.id!r} has no diagnosis")
        encoded = cb_mod.encode_case(train, case)
        neighbors = similarity.retrieve_k_nearest(model, train, encoded, k)
        predicted, _ = similarity.majority_diagnosis(neighbors, train)
        confusion[(case.diagnosis, predicted)] += 1
        correct += predicted == case.diagnosis
    recall: dict[int, Optional[float]] = {}
    for cls in classes:
        actual = sum(confusion[(cls, p)] for p in classes)
        recall[cls] = confusion[(cls, cls)] / actual if actual else None
    return EvalMetrics(
        accuracy=correct / len(test),
        recall=recall,
        confusion=confusion,
        n_test=len(test),
        k=k,
    )


# report rendering -------------------------------------------------------------

def _fmt(value: Optional[float]) -> str:
    return "-" if value is None else f"{value:.1f}"


def report_to_dict(report: ExperimentReport) -> dict:
    return {
        "found_definition": report.found_definition,
        "seed": report.seed,
        "k": report.k,
        "n_probes_pos": report.n_probes_pos,
        "n_probes_neg": report.n_probes_neg,
        "found_pos_rate": report.found_pos_rate,
        "found_neg_rate": report.found_neg_rate,
        "overall_rate": report.overall_rate,
        "benchmark_found_rates": {str(c): r for c, r in BENCHMARK_FOUND_RATES.items()},
        "train_class_counts": {str(c): n for c, n in report.train_class_counts.items()},
        "details": [
            {
                "probe_id": r.probe_id,
                "supposed_class": r.supposed_class,
                "majority_class": r.majority_class,
                "vote_fraction": r.vote_fraction,
                "found": r.found,
            }
            for r in report.details
        ],
    }


def render_report(report: ExperimentReport, fmt: str = "table") -> str:
    """Render as an aligned text table or as canonical JSON ("structured")."""
    if not report.details:
        raise EmptyInputError("report has no probe details")
    if fmt == "structured":
        return json.dumps(report_to_dict(report), sort_keys=True, indent=2)
    if fmt != "table":
        raise ArgumentError(f"unknown report format {fmt!r}")
    header = (
        f"Probe experiment (k={report.k}, seed={report.seed})\n"
        f"{report.found_definition}\n"
    )
    columns = (
        "Diagnosis | Class | Cases | Probes supposed + | Probes supposed - "
        "| (%) Result + | (%) Result - | (%) Benchmark + | (%) Benchmark -"
    )
    rows = []
    for cls, name in ((0, "Negative"), (1, "Positive")):
        n_probes = report.n_probes_neg if cls == 0 else report.n_probes_pos
        rate = report.found_neg_rate if cls == 0 else report.found_pos_rate
        rows.append(" | ".join([
            f"{name:9}",
            f"{cls:5}",
            f"{report.train_class_counts.get(cls, 0):5}",
            f"{n_probes if cls == 1 else '-':>17}",
            f"{n_probes if cls == 0 else '-':>17}",
            f"{_fmt(rate) if cls == 1 else '-':>12}",
            f"{_fmt(rate) if cls == 0 else '-':>12}",
            f"{_fmt(BENCHMARK_FOUND_RATES[1]) if cls == 1 else '-':>15}",
            f"{_fmt(BENCHMARK_FOUND_RATES[0]) if cls == 0 else '-':>15}",
        ]))
    overall = f"Overall found rate: {_fmt(report.overall_rate)}%"
    return "\n".join([header, columns, *rows, "", overall, ""])


def emit_report(
    report: ExperimentReport,
    fmt: str,
    dest: Union[str, Path, IO[str]],
) -> str:
    """Write the rendered report to a path or text stream; returns the text."""
    text = render_report(report, fmt)
    if isinstance(dest, (str, Path)):
        try:
            with open(dest, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise CaseBaseIOError(f"cannot write report: {exc}") from None
    else:
        dest.write(text)
    return text
