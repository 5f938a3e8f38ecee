"""Nearest-case retrieval with a value difference metric.

The distance between two bin values of one attribute is the difference
between their conditional class-probability distributions:

    delta(v1, v2) = sum over classes c of |P(c|v1) - P(c|v2)| ** q

Probabilities are Laplace-smoothed so every bin, including ones unseen in
training, has a well-defined distribution. Case distance is the unweighted
sum of the per-attribute value distances, and retrieval is an exhaustive
scan, deterministic with ties broken by ascending case id.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Optional, Sequence

from .casebase import Case, CaseBase, bin_universe, encode_case
from .errors import (
    ArgumentError,
    FitError,
    NotDiscretizedError,
    StaleModelError,
    UnknownBinError,
)


@dataclass(frozen=True)
class VdmModel:
    """Smoothed conditional class-probability tables, one row per (attribute, bin)."""

    tables: dict[int, dict[int, tuple[float, ...]]]  # attr index -> bin -> P(c|bin)
    classes: tuple[int, ...]
    alpha: float
    q: float
    bin_edges: tuple[tuple[float, ...], ...]
    train_version: int

    def probabilities(self, attr_index: int, value: int) -> tuple[float, ...]:
        try:
            return self.tables[attr_index][value]
        except KeyError:
            raise UnknownBinError(
                f"bin {value!r} unknown for attribute {attr_index}",
                details={"attribute": attr_index, "bin": value},
            ) from None


@dataclass(frozen=True)
class Neighbor:
    case_id: str
    distance: float
    rank: int


def fit_vdm(train: CaseBase, alpha: float = 1.0, q: float = 1.0) -> VdmModel:
    """Fit the conditional probability tables on a discretized training base.

    P(c | a=v) = (count(a=v, class=c) + alpha) / (count(a=v) + alpha * n_classes).
    Every bin in the attribute's universe gets a row, so bins absent from
    training fall back to the uniform distribution.
    """
    if len(train) == 0:
        raise FitError("cannot fit on an empty training base")
    if alpha <= 0 or q <= 0:
        raise ArgumentError(f"alpha and q must be positive, got alpha={alpha}, q={q}")
    if train.bin_edges is None:
        raise NotDiscretizedError("training base must be discretized before fitting")
    classes = tuple(sorted(train.class_labels))
    n_classes = len(classes)
    tables: dict[int, dict[int, tuple[float, ...]]] = {}
    for attr in train.schema:
        joint: Counter = Counter()
        marginal: Counter = Counter()
        for case in train.cases:
            if case.discretized is None:
                raise NotDiscretizedError(f"case {case.id!r} is not discretized")
            if case.diagnosis is None:
                raise FitError(f"training case {case.id!r} has no diagnosis")
            v = case.discretized[attr.index - 1]
            joint[(v, case.diagnosis)] += 1
            marginal[v] += 1
        rows = {}
        for v in bin_universe(train, attr.index):
            denom = marginal[v] + alpha * n_classes
            rows[v] = tuple((joint[(v, c)] + alpha) / denom for c in classes)
        tables[attr.index] = rows
    return VdmModel(
        tables=tables,
        classes=classes,
        alpha=alpha,
        q=q,
        bin_edges=train.bin_edges,
        train_version=train.version,
    )


def value_distance(model: VdmModel, attr_index: int, v1: int, v2: int) -> float:
    """delta(v1, v2) for one attribute; zero iff the probability rows match."""
    p1 = model.probabilities(attr_index, v1)
    p2 = model.probabilities(attr_index, v2)
    return sum(abs(a - b) ** model.q for a, b in zip(p1, p2))


def case_distance(
    model: VdmModel,
    c1: Case,
    c2: Case,
    weights: Optional[Sequence[float]] = None,
) -> float:
    """Sum of per-attribute value distances (weights default to 1)."""
    if c1.discretized is None or c2.discretized is None:
        raise NotDiscretizedError("both cases must be discretized for distance")
    if weights is not None and len(weights) != len(c1.discretized):
        raise ArgumentError(f"expected {len(c1.discretized)} weights, got {len(weights)}")
    total = 0.0
    for i, (v1, v2) in enumerate(zip(c1.discretized, c2.discretized)):
        d = value_distance(model, i + 1, v1, v2)
        total += d if weights is None else weights[i] * d
    return total


def retrieve_k_nearest(
    model: VdmModel,
    cb: CaseBase,
    query: Case,
    k: int,
    weights: Optional[Sequence[float]] = None,
) -> list[Neighbor]:
    """The k cases nearest to the query, ascending distance, ties by case id.

    The query is encoded against the base's bin edges if not already
    discretized. The model must have been fitted on this exact snapshot.
    """
    if model.train_version != cb.version:
        raise StaleModelError(
            f"model fitted on version {model.train_version}, case-base is {cb.version}; refit required",
            details={"model_version": model.train_version, "casebase_version": cb.version},
        )
    if not 1 <= k <= len(cb):
        raise ArgumentError(f"k must be in 1..{len(cb)}, got {k}")
    if query.discretized is None:
        query = encode_case(cb, query)
    scored = sorted(
        ((case_distance(model, query, c, weights), c.id) for c in cb.cases),
    )
    return [
        Neighbor(case_id=cid, distance=dist, rank=i + 1)
        for i, (dist, cid) in enumerate(scored[:k])
    ]


def majority_diagnosis(
    neighbors: Sequence[Neighbor], cb: CaseBase
) -> tuple[int, float]:
    """Modal diagnosis among the neighbors; a tie resolves to class 0.

    Returns (class, vote fraction), the fraction being modal count over the
    number of neighbors.
    """
    if not neighbors:
        raise ArgumentError("neighbor list is empty")
    index = cb.id_index()
    votes = Counter()
    for nb in neighbors:
        case = index.get(nb.case_id)
        if case is None:
            raise ArgumentError(f"neighbor {nb.case_id!r} not in case-base")
        if case.diagnosis is None:
            raise ArgumentError(f"neighbor {nb.case_id!r} has no diagnosis")
        votes[case.diagnosis] += 1
    top = max(votes.values())
    winner = min(c for c, n in votes.items() if n == top)
    return winner, top / len(neighbors)
