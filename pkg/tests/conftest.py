"""Shared fixtures: the bundled corpus and synthetic case-base builders."""

from __future__ import annotations

import os
import random
from pathlib import Path

import pytest

from cdss.casebase import Case, CaseBase, default_schema, discretize

REPO_ROOT = Path(__file__).resolve().parents[1]

FIGURE_ROWS = [
    "6,148,72,35,0,33.6,0.627,50,1",
    "1,85,66,29,0,26.6,0.351,31,0",
    "8,183,64,0,0,23.3,0.672,32,1",
]


def pima_csv_path() -> Path:
    override = os.environ.get("CDSS_PIMA_CSV")
    return Path(override) if override else REPO_ROOT / "data" / "pima.csv"


@pytest.fixture(scope="session")
def pima_path() -> Path:
    path = pima_csv_path()
    if not path.exists():
        pytest.fail(f"canonical corpus not found at {path}; see data/README.md")
    return path


@pytest.fixture(scope="session")
def pima_base(pima_path):
    from cdss.casebase import load_case_base

    return load_case_base(pima_path)


def make_case(case_id: str, descriptors, diagnosis=None, actions=()):
    return Case(id=case_id, descriptors=tuple(float(v) for v in descriptors),
                actions=tuple(actions), diagnosis=diagnosis)


def random_descriptors(rng: random.Random) -> tuple[float, ...]:
    """Plausible raw values; attributes 2-6 are sometimes zero-coded missing."""
    def maybe_missing(value: float) -> float:
        return 0.0 if rng.random() < 0.15 else value

    return (
        float(rng.randint(0, 12)),
        maybe_missing(rng.uniform(50, 200)),
        maybe_missing(rng.uniform(40, 110)),
        maybe_missing(rng.uniform(10, 60)),
        maybe_missing(rng.uniform(20, 600)),
        maybe_missing(rng.uniform(18, 50)),
        rng.uniform(0.05, 2.4),
        float(rng.randint(21, 75)),
    )


def random_base(rng: random.Random, n_cases: int, bin_count: int = 4) -> CaseBase:
    """A small synthetic discretized base with random diagnoses."""
    cases = tuple(
        make_case(
            f"c{i:04d}",
            random_descriptors(rng),
            diagnosis=rng.randint(0, 1),
            actions=(f"therapy-{rng.randint(0, 2)}",),
        )
        for i in range(1, n_cases + 1)
    )
    cb = CaseBase(schema=default_schema(bin_count=bin_count), cases=cases)
    return discretize(cb)
