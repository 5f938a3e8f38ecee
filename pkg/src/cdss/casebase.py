"""Case-base construction for the diabetes diagnosis corpus.

Parses the eight-descriptor diabetes records into cases, splits them into
training and test memories, discretizes continuous descriptors into
equal-width bins (a dedicated MISSING bin absorbs zero-coded values where
zero is physiologically impossible), and appends retained cases from live
decision sessions.

All operations are pure: they return new ``CaseBase`` snapshots and never
mutate their inputs. The ``version`` counter identifies each snapshot.
"""

from __future__ import annotations

import logging
import math
import random
import re
from bisect import bisect_right
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import IO, Iterable, Optional, Sequence, Union

from .errors import (
    ArgumentError,
    DiagnosisDomainError,
    DuplicateIdError,
    EmptyInputError,
    FieldParseError,
    MalformedRecordError,
    NotDiscretizedError,
    ValidationFailure,
)

log = logging.getLogger(__name__)

N_ATTRIBUTES = 8

#: Bin label reserved for zero-coded missing values.
MISSING_BIN = 0

CLASS_LABELS = {
    0: "tested negative for diabetes",
    1: "tested positive for diabetes",
}

ATTRIBUTE_NAMES = (
    "Number of times pregnant",
    "Plasma glucose concentration",
    "Diastolic blood pressure",
    "Triceps skin fold thickness",
    "2-Hour serum insulin",
    "Body mass index",
    "Diabetes pedigree function",
    "Age",
)

#: Attributes (1-based) where a raw 0 encodes a missing measurement.
ZERO_MEANS_MISSING = frozenset({2, 3, 4, 5, 6})

DEFAULT_BIN_COUNT = 10

_ID_PATTERN = re.compile(r"^r(\d+)$")


@dataclass(frozen=True)
class AttributeSchema:
    """One descriptive attribute: position, name, kind, and binning policy."""

    index: int                    # 1-based ordinal position
    name: str
    kind: str                     # "count" or "continuous"
    missing_code_is_zero: bool
    bin_count: int = DEFAULT_BIN_COUNT

    def __post_init__(self):
        if self.kind not in ("count", "continuous"):
            raise ArgumentError(f"unknown attribute kind {self.kind!r}")
        if self.bin_count < 2:
            raise ArgumentError(f"bin_count must be >= 2, got {self.bin_count}")


def default_schema(bin_count: int = DEFAULT_BIN_COUNT) -> tuple[AttributeSchema, ...]:
    """The eight-attribute schema of the diabetes corpus, in file order."""
    return tuple(
        AttributeSchema(
            index=i,
            name=ATTRIBUTE_NAMES[i - 1],
            kind="count" if i == 1 else "continuous",
            missing_code_is_zero=i in ZERO_MEANS_MISSING,
            bin_count=bin_count,
        )
        for i in range(1, N_ATTRIBUTES + 1)
    )


@dataclass(frozen=True)
class Case:
    """A solved or open clinical case.

    ``descriptors`` are the eight raw numeric values. ``discretized`` holds
    the bin label per attribute once the owning case-base has bin edges
    (``MISSING_BIN`` for zero-coded missing values). ``actions`` are the
    labels of actions recorded for the case.
    """

    id: str
    descriptors: tuple[float, ...]
    actions: tuple[str, ...] = ()
    diagnosis: Optional[int] = None
    discretized: Optional[tuple[int, ...]] = None


@dataclass(frozen=True)
class CaseBase:
    """An immutable snapshot of the case memory."""

    schema: tuple[AttributeSchema, ...]
    cases: tuple[Case, ...]
    class_labels: dict[int, str] = field(default_factory=lambda: dict(CLASS_LABELS))
    version: int = 1
    #: Per attribute: the ascending bin edge vector, or None before discretize.
    bin_edges: Optional[tuple[tuple[float, ...], ...]] = None

    def __len__(self) -> int:
        return len(self.cases)

    def case_by_id(self, case_id: str) -> Case:
        for case in self.cases:
            if case.id == case_id:
                return case
        raise ArgumentError(f"no case with id {case_id!r}")

    def id_index(self) -> dict[str, Case]:
        return {c.id: c for c in self.cases}


def class_counts(cb: CaseBase) -> dict[int, int]:
    """Number of cases per diagnosis class (classes with zero cases included)."""
    counts = {c: 0 for c in sorted(cb.class_labels)}
    for case in cb.cases:
        if case.diagnosis is not None:
            counts[case.diagnosis] = counts.get(case.diagnosis, 0) + 1
    return counts


# parsing --------------------------------------------------------------------

def parse_pima_line(line: str, id: str, line_no: Optional[int] = None) -> Case:
    """Parse one comma-separated record into a Case.

    Fields 1-8 become the descriptors, field 9 the diagnosis. The action
    label is derived from the diagnosis class label, since the corpus records
    carry no therapy field.
    """
    fields = line.rstrip("\r\n").split(",")
    if len(fields) != N_ATTRIBUTES + 1:
        where = f" at line {line_no}" if line_no is not None else ""
        raise MalformedRecordError(
            f"expected 9 comma-separated fields, got {len(fields)}{where}",
            details={"line": line_no, "field_count": len(fields)},
        )
    descriptors = []
    for i, raw in enumerate(fields[:N_ATTRIBUTES]):
        try:
            value = float(raw)
        except ValueError:
            raise FieldParseError(
                f"attribute {ATTRIBUTE_NAMES[i]!r} is not numeric: {raw!r}",
                details={"attribute": ATTRIBUTE_NAMES[i], "value": raw, "line": line_no},
            ) from None
        descriptors.append(value)
    try:
        diag_value = float(fields[N_ATTRIBUTES])
    except ValueError:
        raise FieldParseError(
            f"diagnosis field is not numeric: {fields[N_ATTRIBUTES]!r}",
            details={"attribute": "diagnosis", "value": fields[N_ATTRIBUTES], "line": line_no},
        ) from None
    if diag_value not in (0.0, 1.0):
        raise DiagnosisDomainError(
            f"diagnosis must be 0 or 1, got {fields[N_ATTRIBUTES]!r}",
            details={"value": diag_value, "line": line_no},
        )
    diagnosis = int(diag_value)
    return Case(
        id=id,
        descriptors=tuple(descriptors),
        actions=(CLASS_LABELS[diagnosis],),
        diagnosis=diagnosis,
    )


def load_case_base(
    source: Union[str, Path, IO[bytes], IO[str]],
    schema: Optional[Sequence[AttributeSchema]] = None,
) -> CaseBase:
    """Load a whole corpus file (one record per line, no header) into a CaseBase.

    File order is preserved; case ids are assigned ``r0001``, ``r0002``, ...
    The first offending line aborts the load.
    """
    if isinstance(source, (str, Path)):
        with open(source, "rb") as fh:
            data = fh.read()
    else:
        data = source.read()
    if isinstance(data, bytes):
        text = data.decode("utf-8")
    else:
        text = data
    lines = [ln for ln in text.splitlines()]
    # Ignore a trailing blank line but treat interior blanks as malformed.
    while lines and lines[-1].strip() == "":
        lines.pop()
    if not lines:
        raise EmptyInputError("no records in input")
    cases = []
    for i, line in enumerate(lines, start=1):
        cases.append(parse_pima_line(line, id=f"r{i:04d}", line_no=i))
    cb = CaseBase(schema=tuple(schema or default_schema()), cases=tuple(cases))
    counts = class_counts(cb)
    log.info("loaded %d cases (%s)", len(cb), ", ".join(f"class {c}: {n}" for c, n in counts.items()))
    return cb


# splitting -------------------------------------------------------------------

def split_train_test(
    cb: CaseBase, n_train: int, seed: Optional[int] = None
) -> tuple[CaseBase, CaseBase]:
    """Partition into (train, test). Without a seed, the cut follows file order."""
    if not 0 < n_train < len(cb):
        raise ArgumentError(
            f"n_train must be in 1..{len(cb) - 1}, got {n_train}",
            details={"n_train": n_train, "size": len(cb)},
        )
    order = list(range(len(cb)))
    if seed is not None:
        random.Random(seed).shuffle(order)
    def part(indices) -> CaseBase:
        return CaseBase(
            schema=cb.schema,
            cases=tuple(cb.cases[i] for i in indices),
            class_labels=dict(cb.class_labels),
            version=1,
            bin_edges=cb.bin_edges,
        )

    return part(order[:n_train]), part(order[n_train:])


# discretization ---------------------------------------------------------------

def _is_missing(schema: AttributeSchema, value: float) -> bool:
    return schema.missing_code_is_zero and value == 0.0


def compute_bin_edges(
    cb: CaseBase, schema: Optional[Sequence[AttributeSchema]] = None
) -> tuple[tuple[float, ...], ...]:
    """Equal-width bin edges per attribute from the base's non-missing values.

    A constant attribute (or one with no non-missing values) collapses to a
    single bin.
    """
    if len(cb) == 0:
        raise EmptyInputError("cannot discretize an empty case-base")
    schema = tuple(schema or cb.schema)
    all_edges = []
    for attr in schema:
        values = [
            c.descriptors[attr.index - 1]
            for c in cb.cases
            if not _is_missing(attr, c.descriptors[attr.index - 1])
        ]
        if not values:
            all_edges.append((0.0, 0.0))
            continue
        lo, hi = min(values), max(values)
        if lo == hi:
            all_edges.append((lo, hi))
            continue
        width = (hi - lo) / attr.bin_count
        edges = [lo + i * width for i in range(attr.bin_count + 1)]
        edges[0], edges[-1] = lo, hi
        all_edges.append(tuple(edges))
    return tuple(all_edges)


def assign_bin(schema: AttributeSchema, edges: Sequence[float], value: float) -> int:
    """Bin label for one raw value.

    Intervals are half-open with the last bin closed, so a value sitting on
    an interior edge lands in the higher bin. Out-of-range values clamp to
    the boundary bins so unseen queries always encode.
    """
    if _is_missing(schema, value):
        return MISSING_BIN
    n_bins = len(edges) - 1
    if n_bins <= 0:
        return 1
    return min(max(bisect_right(edges, value), 1), n_bins)


def encode_descriptors(cb: CaseBase, descriptors: Sequence[float]) -> tuple[int, ...]:
    """Encode raw descriptors into bin labels using the base's recorded edges."""
    if cb.bin_edges is None:
        raise NotDiscretizedError("case-base has no bin edges; run discretize first")
    return tuple(
        assign_bin(attr, cb.bin_edges[attr.index - 1], descriptors[attr.index - 1])
        for attr in cb.schema
    )


def encode_case(cb: CaseBase, case: Case) -> Case:
    """Return the case with its ``discretized`` vector filled in."""
    return replace(case, discretized=encode_descriptors(cb, case.descriptors))


def discretize(
    cb: CaseBase, schema: Optional[Sequence[AttributeSchema]] = None
) -> CaseBase:
    """Bin every case and record the edges for later query encoding."""
    schema = tuple(schema or cb.schema)
    edges = compute_bin_edges(cb, schema)
    binned = CaseBase(
        schema=schema,
        cases=cb.cases,
        class_labels=dict(cb.class_labels),
        version=cb.version,
        bin_edges=edges,
    )
    cases = tuple(encode_case(binned, c) for c in cb.cases)
    return replace(binned, cases=cases)


def bin_universe(cb: CaseBase, attr_index: int) -> tuple[int, ...]:
    """All bin labels an attribute can take under the recorded edges."""
    if cb.bin_edges is None:
        raise NotDiscretizedError("case-base has no bin edges; run discretize first")
    attr = cb.schema[attr_index - 1]
    n_bins = max(len(cb.bin_edges[attr_index - 1]) - 1, 1)
    bins = tuple(range(1, n_bins + 1))
    if attr.missing_code_is_zero:
        return (MISSING_BIN,) + bins
    return bins


# validation and retention ------------------------------------------------------

def validate_new_case(
    schema: Sequence[AttributeSchema],
    raw: Sequence[float],
    actions: Sequence[str] = (),
    diagnosis: Optional[int] = None,
    id: str = "",
) -> Case:
    """Validate raw descriptor values and assemble a Case.

    Unlike line parsing, this reports the complete list of violations,
    not just the first.
    """
    violations = []
    if len(raw) != len(schema):
        violations.append(f"expected {len(schema)} descriptors, got {len(raw)}")
        raise ValidationFailure("invalid case", details=violations)
    for attr, value in zip(schema, raw):
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            violations.append(f"{attr.name}: not numeric ({value!r})")
            continue
        if not math.isfinite(value):
            violations.append(f"{attr.name}: not finite ({value!r})")
        elif value < 0:
            violations.append(f"{attr.name}: negative ({value!r})")
    if diagnosis is not None and diagnosis not in (0, 1):
        violations.append(f"diagnosis: must be 0 or 1 ({diagnosis!r})")
    if any(not str(a).strip() for a in actions):
        violations.append("actions: blank action label")
    if violations:
        raise ValidationFailure("invalid case", details=violations)
    return Case(
        id=id,
        descriptors=tuple(float(v) for v in raw),
        actions=tuple(str(a) for a in actions),
        diagnosis=diagnosis,
    )


def _fresh_id(cb: CaseBase) -> str:
    highest = len(cb.cases)
    for case in cb.cases:
        m = _ID_PATTERN.match(case.id)
        if m:
            highest = max(highest, int(m.group(1)))
    return f"r{highest + 1:04d}"


def retain_case(cb: CaseBase, case: Case) -> CaseBase:
    """Append a completed case; returns a new snapshot with version + 1."""
    if case.diagnosis is None:
        raise ValidationFailure("retained case must carry a diagnosis",
                                details=["diagnosis: missing"])
    if not case.actions:
        raise ValidationFailure("retained case must carry at least one action",
                                details=["actions: empty"])
    case_id = case.id or _fresh_id(cb)
    if any(c.id == case_id for c in cb.cases):
        raise DuplicateIdError(f"case id {case_id!r} already present")
    stored = replace(case, id=case_id)
    if cb.bin_edges is not None and stored.discretized is None:
        stored = encode_case(cb, stored)
    return replace(cb, cases=cb.cases + (stored,), version=cb.version + 1)
