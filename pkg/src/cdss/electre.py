"""ELECTRE I outranking: performance tables, indices, graph, and kernel.

Concordance C(a,b) is the weight fraction of criteria on which a is at
least as good as b (ties count for both directions). Discordance D(a,b) is
the largest normalized margin by which any criterion favors b over a,
normalized by that criterion's observed score range in the table. Action a
outranks b when C(a,b) >= c_hat and D(a,b) <= d_hat.

The recommended subset is the kernel of the outranking digraph: internally
stable (no edges between members) and externally stable (every non-member
receives an edge from a member). Cycles are contracted to super-nodes
first, so every instance has a defined, deterministic kernel; contracted
groups landing in the kernel are reported as ties.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional, Sequence, Union

from .errors import ArgumentError, CaseBaseIOError, UnknownActionError, UnknownLabelError

DIRECTIONS = ("maximize", "minimize")
RANGE_MODES = ("observed", "scale")

DEFAULT_CONCORDANCE_THRESHOLD = 0.7
DEFAULT_DISCORDANCE_THRESHOLD = 0.3


@dataclass(frozen=True)
class Criterion:
    """An assessment axis with an ordered label scale encoded 1..L."""

    name: str
    direction: str
    weight: float
    scale: tuple[str, ...]

    def __post_init__(self):
        if self.direction not in DIRECTIONS:
            raise ArgumentError(f"direction must be one of {DIRECTIONS}, got {self.direction!r}")
        if not self.weight > 0:
            raise ArgumentError(f"criterion {self.name!r}: weight must be positive")
        if len(self.scale) < 2:
            raise ArgumentError(f"criterion {self.name!r}: scale needs at least 2 levels")
        if len(set(self.scale)) != len(self.scale):
            raise ArgumentError(f"criterion {self.name!r}: scale labels must be unique")

    def encode(self, label: str) -> int:
        try:
            return self.scale.index(label) + 1
        except ValueError:
            raise UnknownLabelError(
                f"label {label!r} not on the scale of criterion {self.name!r}",
                details={"criterion": self.name, "label": label, "scale": list(self.scale)},
            ) from None


@dataclass(frozen=True)
class CriteriaConfig:
    """Criteria plus the outranking thresholds, sharable via a JSON file."""

    criteria: tuple[Criterion, ...]
    concordance_threshold: float = DEFAULT_CONCORDANCE_THRESHOLD
    discordance_threshold: float = DEFAULT_DISCORDANCE_THRESHOLD


@dataclass(frozen=True)
class PerformanceTable:
    actions: tuple[str, ...]
    criteria: tuple[Criterion, ...]
    scores: tuple[tuple[float, ...], ...]  # actions x criteria, encoded levels

    def action_index(self, action: str) -> int:
        try:
            return self.actions.index(action)
        except ValueError:
            raise UnknownActionError(f"action {action!r} not in table") from None


@dataclass(frozen=True)
class OutrankingGraph:
    actions: tuple[str, ...]
    concordance: tuple[tuple[float, ...], ...]
    discordance: tuple[tuple[float, ...], ...]
    c_hat: float
    d_hat: float
    edges: tuple[tuple[int, int], ...]  # (i, j) means actions[i] outranks actions[j]

    def edge_labels(self) -> list[tuple[str, str]]:
        return [(self.actions[i], self.actions[j]) for i, j in self.edges]


@dataclass(frozen=True)
class Kernel:
    members: tuple[str, ...]
    collapsed_cycles: tuple[tuple[str, ...], ...]


def encode_performance(
    actions: Sequence[str],
    criteria: Sequence[Criterion],
    assignments: Mapping[tuple[str, str], str],
) -> PerformanceTable:
    """Map level labels onto their 1-based scale positions.

    ``assignments`` is keyed by (action, criterion name). Scores are stored
    as encoded; minimize-direction criteria are flipped at comparison time,
    never in the table.
    """
    actions = tuple(actions)
    if len(set(actions)) != len(actions):
        raise ArgumentError("duplicate action labels")
    if not actions:
        raise ArgumentError("at least one action required")
    missing = [
        (a, c.name) for a in actions for c in criteria if (a, c.name) not in assignments
    ]
    if missing:
        raise ArgumentError(
            f"missing assignments for {len(missing)} (action, criterion) pairs",
            details={"missing": missing},
        )
    scores = tuple(
        tuple(float(c.encode(assignments[(a, c.name)])) for c in criteria)
        for a in actions
    )
    return PerformanceTable(actions=actions, criteria=tuple(criteria), scores=scores)


def _adjusted(criterion: Criterion, value: float) -> float:
    return value if criterion.direction == "maximize" else -value


def concordance_index(table: PerformanceTable, a: str, b: str) -> float:
    """Weight share of criteria where a is at least as good as b (ties inclusive)."""
    ia, ib = table.action_index(a), table.action_index(b)
    total = sum(c.weight for c in table.criteria)
    agreeing = sum(
        c.weight
        for j, c in enumerate(table.criteria)
        if _adjusted(c, table.scores[ia][j]) >= _adjusted(c, table.scores[ib][j])
    )
    return agreeing / total


def _criterion_range(table: PerformanceTable, j: int, range_mode: str) -> float:
    if range_mode == "scale":
        return float(len(table.criteria[j].scale) - 1)
    column = [row[j] for row in table.scores]
    return max(column) - min(column)


def discordance_index(
    table: PerformanceTable, a: str, b: str, range_mode: str = "observed"
) -> float:
    """Largest normalized opposing gap; zero when no criterion favors b.

    Gaps are normalized by the criterion's score range over the table's
    actions ("observed", the default) or by its full scale span ("scale").
    Zero-range criteria contribute nothing.
    """
    if range_mode not in RANGE_MODES:
        raise ArgumentError(f"range_mode must be one of {RANGE_MODES}, got {range_mode!r}")
    ia, ib = table.action_index(a), table.action_index(b)
    worst = 0.0
    for j, c in enumerate(table.criteria):
        gap = _adjusted(c, table.scores[ib][j]) - _adjusted(c, table.scores[ia][j])
        if gap <= 0:
            continue
        rng = _criterion_range(table, j, range_mode)
        if rng > 0:
            worst = max(worst, gap / rng)
    return worst


def build_outranking(
    table: PerformanceTable,
    c_hat: float = DEFAULT_CONCORDANCE_THRESHOLD,
    d_hat: float = DEFAULT_DISCORDANCE_THRESHOLD,
    range_mode: str = "observed",
) -> OutrankingGraph:
    """Both index matrices plus the thresholded outranking digraph."""
    if not 0 < c_hat <= 1:
        raise ArgumentError(f"c_hat must be in (0, 1], got {c_hat}")
    if not 0 <= d_hat < 1:
        raise ArgumentError(f"d_hat must be in [0, 1), got {d_hat}")
    n = len(table.actions)
    conc = [[1.0] * n for _ in range(n)]
    disc = [[0.0] * n for _ in range(n)]
    for i, a in enumerate(table.actions):
        for j, b in enumerate(table.actions):
            if i == j:
                continue
            conc[i][j] = concordance_index(table, a, b)
            disc[i][j] = discordance_index(table, a, b, range_mode)
    edges = tuple(
        (i, j)
        for i in range(n)
        for j in range(n)
        if i != j and conc[i][j] >= c_hat and disc[i][j] <= d_hat
    )
    return OutrankingGraph(
        actions=table.actions,
        concordance=tuple(tuple(row) for row in conc),
        discordance=tuple(tuple(row) for row in disc),
        c_hat=c_hat,
        d_hat=d_hat,
        edges=edges,
    )


# kernel extraction -------------------------------------------------------------

def strongly_connected_components(
    n: int, edges: Sequence[tuple[int, int]]
) -> list[list[int]]:
    """Tarjan's algorithm, iterative; components listed in discovery order."""
    succ = [[] for _ in range(n)]
    for i, j in edges:
        succ[i].append(j)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    components: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            advanced = False
            for k in range(pi, len(succ[v])):
                w = succ[v][k]
                if index[w] == -1:
                    work[-1] = (v, k + 1)
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                component = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    component.append(w)
                    if w == v:
                        break
                components.append(sorted(component))
    return components


def _dag_kernel(n: int, edges: set[tuple[int, int]]) -> set[int]:
    """Unique kernel of an acyclic digraph.

    Repeatedly admit every node with no incoming edge from an undecided
    node, then exclude the out-neighbors of the admitted nodes.
    """
    preds = [set() for _ in range(n)]
    succs = [set() for _ in range(n)]
    for i, j in edges:
        preds[j].add(i)
        succs[i].add(j)
    undecided = set(range(n))
    kernel: set[int] = set()
    while undecided:
        frontier = {v for v in undecided if not (preds[v] & undecided)}
        if not frontier:
            raise ArgumentError("graph contains a cycle; contract components first")
        kernel |= frontier
        undecided -= frontier
        for v in frontier:
            undecided -= succs[v]
    return kernel


def extract_kernel(graph: OutrankingGraph) -> Kernel:
    """Kernel of the outranking digraph after contracting cycles.

    Strongly connected groups become single super-nodes; groups whose
    super-node enters the kernel expand back to all their members and are
    reported in ``collapsed_cycles``.
    """
    n = len(graph.actions)
    components = strongly_connected_components(n, graph.edges)
    comp_of = {}
    for ci, members in enumerate(components):
        for v in members:
            comp_of[v] = ci
    contracted = {
        (comp_of[i], comp_of[j])
        for i, j in graph.edges
        if comp_of[i] != comp_of[j]
    }
    kernel_comps = _dag_kernel(len(components), contracted)
    member_ids = sorted(
        v for ci in kernel_comps for v in components[ci]
    )
    cycles = tuple(
        tuple(graph.actions[v] for v in components[ci])
        for ci in sorted(kernel_comps)
        if len(components[ci]) > 1
    )
    return Kernel(
        members=tuple(graph.actions[v] for v in member_ids),
        collapsed_cycles=cycles,
    )


def analyze_choice(
    actions: Sequence[str],
    criteria: Sequence[Criterion],
    assignments: Mapping[tuple[str, str], str],
    c_hat: float = DEFAULT_CONCORDANCE_THRESHOLD,
    d_hat: float = DEFAULT_DISCORDANCE_THRESHOLD,
    range_mode: str = "observed",
) -> tuple[PerformanceTable, OutrankingGraph, Kernel]:
    """encode -> build -> extract, returning all intermediate artifacts."""
    table = encode_performance(actions, criteria, assignments)
    graph = build_outranking(table, c_hat, d_hat, range_mode)
    return table, graph, extract_kernel(graph)


def solve_choice(
    actions: Sequence[str],
    criteria: Sequence[Criterion],
    assignments: Mapping[tuple[str, str], str],
    c_hat: float = DEFAULT_CONCORDANCE_THRESHOLD,
    d_hat: float = DEFAULT_DISCORDANCE_THRESHOLD,
    range_mode: str = "observed",
) -> Kernel:
    """The best-compromise action subset for a fully assessed action set."""
    return analyze_choice(actions, criteria, assignments, c_hat, d_hat, range_mode)[2]


# criteria configuration file ----------------------------------------------------

def criteria_config_to_dict(config: CriteriaConfig) -> dict:
    return {
        "criteria": [
            {
                "name": c.name,
                "direction": c.direction,
                "weight": c.weight,
                "scale": list(c.scale),
            }
            for c in config.criteria
        ],
        "concordance_threshold": config.concordance_threshold,
        "discordance_threshold": config.discordance_threshold,
    }


def criteria_config_from_dict(payload: Mapping) -> CriteriaConfig:
    try:
        criteria = tuple(
            Criterion(
                name=c["name"],
                direction=c["direction"],
                weight=float(c["weight"]),
                scale=tuple(c["scale"]),
            )
            for c in payload["criteria"]
        )
        return CriteriaConfig(
            criteria=criteria,
            concordance_threshold=float(
                payload.get("concordance_threshold", DEFAULT_CONCORDANCE_THRESHOLD)
            ),
            discordance_threshold=float(
                payload.get("discordance_threshold", DEFAULT_DISCORDANCE_THRESHOLD)
            ),
        )
    except (KeyError, TypeError) as exc:
        raise ArgumentError(f"malformed criteria configuration: {exc}") from None


def load_criteria_config(path: Union[str, Path]) -> CriteriaConfig:
    """Read the declarative criteria + thresholds JSON file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    except OSError as exc:
        raise CaseBaseIOError(f"cannot read criteria config: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ArgumentError(f"criteria config is not valid JSON: {exc}") from None
    return criteria_config_from_dict(payload)
