"""Decision session workflow: information, retrieval, design, choice, review, retention.

A session is the unit of one physician-facing decision. It moves strictly
forward through six states; each operation validates its entry state, so a
replayed command sequence against the same case-base version reproduces the
session field for field.

Action pooling follows the engine's branch rule: only neighbors within the
similarity acceptance radius contribute their recorded actions; if none
qualify, candidates come solely from the physician.
"""

from __future__ import annotations

import uuid
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Optional, Sequence

from . import casebase as cb_mod
from . import electre, similarity
from .casebase import Case, CaseBase
from .electre import CriteriaConfig, Kernel, OutrankingGraph
from .errors import (
    ArgumentError,
    ChoiceError,
    IncompleteAssessmentError,
    NoCandidateActionsError,
    RetentionRefusedError,
    SequencingError,
    ValidationFailure,
)
from .similarity import Neighbor, VdmModel

#: Per-attribute distance tops out at 2 with q=1, so radius 2 means
#: "within one maximally different attribute".
DEFAULT_ACCEPTANCE_RADIUS = 2.0


class SessionState(str, Enum):
    INFORMATION = "information"
    RETRIEVED = "retrieved"
    DESIGNED = "designed"
    CHOSEN = "chosen"
    REVIEWED = "reviewed"
    RETAINED = "retained"


_STATE_ORDER = list(SessionState)


class ReviewVerdict(str, Enum):
    ACCEPTED = "accepted"
    REVISED = "revised"
    REJECTED = "rejected"


@dataclass
class DecisionSession:
    """One decision episode and everything recorded along the way."""

    id: str
    case: Case
    physician_actions: tuple[str, ...]
    criteria_config: CriteriaConfig
    acceptance_radius: float = DEFAULT_ACCEPTANCE_RADIUS
    state: SessionState = SessionState.INFORMATION
    neighbors: tuple[Neighbor, ...] = ()
    pooled_actions: tuple[str, ...] = ()
    performance_input: dict[tuple[str, str], str] = field(default_factory=dict)
    outranking: Optional[OutrankingGraph] = None
    proposal: Optional[Kernel] = None
    chosen_action: Optional[str] = None
    override_flag: bool = False
    review: Optional[ReviewVerdict] = None
    retained_case_id: Optional[str] = None
    outcome_note: Optional[str] = None


def _require_state(session: DecisionSession, *allowed: SessionState):
    if session.state not in allowed:
        raise SequencingError(
            f"operation requires state {' or '.join(s.value for s in allowed)}, "
            f"session {session.id} is {session.state.value}",
            details={"state": session.state.value,
                     "allowed": [s.value for s in allowed]},
        )


def _advance(session: DecisionSession, target: SessionState):
    # Forward by exactly one stage; staying in place is allowed for re-runs.
    current = _STATE_ORDER.index(session.state)
    goal = _STATE_ORDER.index(target)
    if goal not in (current, current + 1):
        raise SequencingError(
            f"cannot move from {session.state.value} to {target.value}")
    session.state = target


def open_session(
    descriptors: Sequence[float],
    physician_actions: Sequence[str],
    criteria_config: CriteriaConfig,
    schema: Optional[Sequence[cb_mod.AttributeSchema]] = None,
    acceptance_radius: float = DEFAULT_ACCEPTANCE_RADIUS,
    session_id: Optional[str] = None,
) -> DecisionSession:
    """Validate the descriptors and start a session in the Information state."""
    case = cb_mod.validate_new_case(
        schema or cb_mod.default_schema(), descriptors,
        actions=(), diagnosis=None,
    )
    return DecisionSession(
        id=session_id or uuid.uuid4().hex,
        case=case,
        physician_actions=tuple(dict.fromkeys(physician_actions)),
        criteria_config=criteria_config,
        acceptance_radius=acceptance_radius,
    )


def rapprochement(
    session: DecisionSession,
    model: VdmModel,
    cb: CaseBase,
    k: int,
) -> DecisionSession:
    """Retrieve the k nearest stored cases for the session's query case."""
    _require_state(session, SessionState.INFORMATION)
    query = cb_mod.encode_case(cb, session.case)
    session.case = query
    session.neighbors = tuple(similarity.retrieve_k_nearest(model, cb, query, k))
    _advance(session, SessionState.RETRIEVED)
    return session


def neighbors_within_radius(session: DecisionSession) -> tuple[Neighbor, ...]:
    return tuple(n for n in session.neighbors
                 if n.distance <= session.acceptance_radius)


def pool_candidate_actions(session: DecisionSession, cb: CaseBase) -> DecisionSession:
    """Union the in-radius neighbors' recorded actions with the physician's.

    Neighbor actions come first, ordered by first appearance in rank order,
    then physician actions not already present.
    """
    _require_state(session, SessionState.RETRIEVED)
    index = cb.id_index()
    pooled: dict[str, None] = {}
    for nb in neighbors_within_radius(session):
        for action in index[nb.case_id].actions:
            pooled.setdefault(action, None)
    for action in session.physician_actions:
        pooled.setdefault(action, None)
    if not pooled:
        raise NoCandidateActionsError(
            "no candidate actions: no neighbor within the acceptance radius "
            "and no physician-proposed actions")
    session.pooled_actions = tuple(pooled)
    return session


def assess(
    session: DecisionSession,
    assignments: Mapping[tuple[str, str], str],
) -> DecisionSession:
    """Merge performance-input cells (action, criterion) -> level label."""
    _require_state(session, SessionState.RETRIEVED, SessionState.DESIGNED)
    criteria_names = {c.name for c in session.criteria_config.criteria}
    for (action, criterion), label in assignments.items():
        if action not in session.pooled_actions:
            raise ArgumentError(f"assessment names unknown action {action!r}")
        if criterion not in criteria_names:
            raise ArgumentError(f"assessment names unknown criterion {criterion!r}")
        crit = next(c for c in session.criteria_config.criteria if c.name == criterion)
        crit.encode(label)  # reject labels off the scale immediately
        session.performance_input[(action, criterion)] = label
    return session


def design(
    session: DecisionSession,
    c_hat: Optional[float] = None,
    d_hat: Optional[float] = None,
) -> DecisionSession:
    """Run the outranking analysis over the pooled actions.

    Allowed from Retrieved, and again from Designed so threshold changes can
    re-run the analysis before a choice is recorded.
    """
    _require_state(session, SessionState.RETRIEVED, SessionState.DESIGNED)
    if not session.pooled_actions:
        raise SequencingError("pool candidate actions before design")
    config = session.criteria_config
    gaps = [
        {"action": a, "criterion": c.name}
        for a in session.pooled_actions
        for c in config.criteria
        if (a, c.name) not in session.performance_input
    ]
    if gaps:
        raise IncompleteAssessmentError(
            f"{len(gaps)} unassessed (action, criterion) cells", details=gaps)
    if c_hat is not None or d_hat is not None:
        config = CriteriaConfig(
            criteria=config.criteria,
            concordance_threshold=c_hat if c_hat is not None else config.concordance_threshold,
            discordance_threshold=d_hat if d_hat is not None else config.discordance_threshold,
        )
        session.criteria_config = config
    _, graph, kernel = electre.analyze_choice(
        session.pooled_actions,
        config.criteria,
        session.performance_input,
        config.concordance_threshold,
        config.discordance_threshold,
    )
    session.outranking = graph
    session.proposal = kernel
    _advance(session, SessionState.DESIGNED)
    return session


def record_choice(session: DecisionSession, action: str) -> DecisionSession:
    """Record the physician's pick; picks outside the proposal are flagged."""
    _require_state(session, SessionState.DESIGNED)
    assert session.proposal is not None
    allowed = set(session.proposal.members) | set(session.physician_actions)
    if action not in allowed:
        raise ChoiceError(
            f"action {action!r} is neither proposed nor physician-defined",
            details={"allowed": sorted(allowed)},
        )
    session.chosen_action = action
    session.override_flag = action not in session.proposal.members
    _advance(session, SessionState.CHOSEN)
    return session


def review(
    session: DecisionSession,
    verdict: ReviewVerdict,
    revised_action: Optional[str] = None,
) -> DecisionSession:
    """Record the review verdict; a revision replaces the chosen action."""
    _require_state(session, SessionState.CHOSEN)
    verdict = ReviewVerdict(verdict)
    if verdict is ReviewVerdict.REVISED:
        if not revised_action or not revised_action.strip():
            raise ArgumentError("revised verdict requires a revised_action")
        session.chosen_action = revised_action
    elif revised_action is not None:
        raise ArgumentError(f"revised_action only valid with a revised verdict, got {verdict.value}")
    session.review = verdict
    _advance(session, SessionState.REVIEWED)
    return session


def adapt_and_retain(
    session: DecisionSession,
    cb: CaseBase,
    diagnosis: Optional[int],
) -> tuple[CaseBase, Case]:
    """Assemble the new case from the session and append it to the case-base.

    The chosen action is copied into the new case unchanged. The returned
    base is a new snapshot; any fitted model is stale until refitted.
    """
    _require_state(session, SessionState.REVIEWED)
    if session.review is ReviewVerdict.REJECTED:
        raise RetentionRefusedError("rejected sessions are not retained")
    if diagnosis is None:
        raise ValidationFailure("retention requires a diagnosis",
                                details=["diagnosis: missing"])
    new_case = cb_mod.validate_new_case(
        cb.schema,
        session.case.descriptors,
        actions=(session.chosen_action,),
        diagnosis=diagnosis,
    )
    new_cb = cb_mod.retain_case(cb, new_case)
    stored = new_cb.cases[-1]
    session.retained_case_id = stored.id
    _advance(session, SessionState.RETAINED)
    return new_cb, stored


def record_outcome(session: DecisionSession, note: str) -> DecisionSession:
    """Post-hoc annotation on the applied therapy; does not change state."""
    _require_state(session, SessionState.RETAINED)
    session.outcome_note = note
    return session


# choice rules (advisory) ----------------------------------------------------

@dataclass(frozen=True)
class ChoiceRules:
    """Per-class action frequencies mined from the training base.

    Advisory display only: the frequencies never alter the outranking
    inputs.
    """

    min_support: float
    rules: dict[int, tuple[tuple[str, float], ...]]


def mine_choice_rules(train: CaseBase, min_support: float = 0.0) -> ChoiceRules:
    """Rank each class's recorded actions by relative frequency."""
    if len(train) == 0:
        raise ArgumentError("cannot mine rules from an empty base")
    totals: Counter = Counter()
    pairs: Counter = Counter()
    for case in train.cases:
        if case.diagnosis is None:
            continue
        totals[case.diagnosis] += 1
        for action in case.actions:
            pairs[(case.diagnosis, action)] += 1
    rules: dict[int, tuple[tuple[str, float], ...]] = {}
    for cls in sorted(train.class_labels):
        total = totals.get(cls, 0)
        if total == 0:
            rules[cls] = ()
            continue
        scored = [
            (action, count / total)
            for (c, action), count in pairs.items()
            if c == cls and count / total >= min_support
        ]
        scored.sort(key=lambda item: (-item[1], item[0]))
        rules[cls] = tuple(scored)
    return ChoiceRules(min_support=min_support, rules=rules)


# serialization (audit log and service snapshots) ------------------------------

def session_to_dict(session: DecisionSession) -> dict:
    return {
        "id": session.id,
        "state": session.state.value,
        "case": {
            "id": session.case.id,
            "descriptors": list(session.case.descriptors),
            "discretized": list(session.case.discretized) if session.case.discretized else None,
        },
        "physician_actions": list(session.physician_actions),
        "acceptance_radius": session.acceptance_radius,
        "neighbors": [
            {"case_id": n.case_id, "distance": n.distance, "rank": n.rank}
            for n in session.neighbors
        ],
        "pooled_actions": list(session.pooled_actions),
        "performance_input": [
            {"action": a, "criterion": c, "label": label}
            for (a, c), label in sorted(session.performance_input.items())
        ],
        "criteria_config": electre.criteria_config_to_dict(session.criteria_config),
        "outranking": None if session.outranking is None else {
            "actions": list(session.outranking.actions),
            "concordance": [list(r) for r in session.outranking.concordance],
            "discordance": [list(r) for r in session.outranking.discordance],
            "c_hat": session.outranking.c_hat,
            "d_hat": session.outranking.d_hat,
            "edges": [list(e) for e in session.outranking.edges],
        },
        "proposal": None if session.proposal is None else {
            "members": list(session.proposal.members),
            "collapsed_cycles": [list(c) for c in session.proposal.collapsed_cycles],
        },
        "chosen_action": session.chosen_action,
        "override_flag": session.override_flag,
        "review": session.review.value if session.review else None,
        "retained_case_id": session.retained_case_id,
        "outcome_note": session.outcome_note,
    }


def session_from_dict(payload: Mapping) -> DecisionSession:
    case = Case(
        id=payload["case"].get("id", ""),
        descriptors=tuple(payload["case"]["descriptors"]),
        discretized=tuple(payload["case"]["discretized"]) if payload["case"].get("discretized") else None,
    )
    outranking = None
    if payload.get("outranking"):
        o = payload["outranking"]
        outranking = OutrankingGraph(
            actions=tuple(o["actions"]),
            concordance=tuple(tuple(r) for r in o["concordance"]),
            discordance=tuple(tuple(r) for r in o["discordance"]),
            c_hat=o["c_hat"],
            d_hat=o["d_hat"],
            edges=tuple((int(i), int(j)) for i, j in o["edges"]),
        )
    proposal = None
    if payload.get("proposal"):
        proposal = Kernel(
            members=tuple(payload["proposal"]["members"]),
            collapsed_cycles=tuple(tuple(c) for c in payload["proposal"]["collapsed_cycles"]),
        )
    session = DecisionSession(
        id=payload["id"],
        case=case,
        physician_actions=tuple(payload["physician_actions"]),
        criteria_config=electre.criteria_config_from_dict(payload["criteria_config"]),
        acceptance_radius=payload.get("acceptance_radius", DEFAULT_ACCEPTANCE_RADIUS),
        state=SessionState(payload["state"]),
        neighbors=tuple(
            Neighbor(case_id=n["case_id"], distance=n["distance"], rank=n["rank"])
            for n in payload.get("neighbors", ())
        ),
        pooled_actions=tuple(payload.get("pooled_actions", ())),
        outranking=outranking,
        proposal=proposal,
        chosen_action=payload.get("chosen_action"),
        override_flag=payload.get("override_flag", False),
        review=ReviewVerdict(payload["review"]) if payload.get("review") else None,
        retained_case_id=payload.get("retained_case_id"),
        outcome_note=payload.get("outcome_note"),
    )
    for cell in payload.get("performance_input", ()):
        session.performance_input[(cell["action"], cell["criterion"])] = cell["label"]
    return session
