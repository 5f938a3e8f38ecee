"""Engine defaults, tunable per deployment.

The default criteria cover the insulin-therapy assessment used throughout
the docs: side effects, treatment efficacy, and therapy duration, each on a
short ordinal scale with unit weight. The appropriateness outcome scale
(3 = most appropriate, 2 = least appropriate, 1 = totally unsuitable) is a
scoring vocabulary for decisions, not a set of criterion weights.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .electre import (
    DEFAULT_CONCORDANCE_THRESHOLD,
    DEFAULT_DISCORDANCE_THRESHOLD,
    CriteriaConfig,
    Criterion,
)
from .pipeline import DEFAULT_ACCEPTANCE_RADIUS

DEFAULT_K = 5
DEFAULT_ALPHA = 1.0
DEFAULT_Q = 1.0

APPROPRIATENESS_SCALE = {
    3: "most appropriate treatment",
    2: "least appropriate treatment",
    1: "treatment totally unsuitable",
}


def default_criteria() -> tuple[Criterion, ...]:
    """Three therapy-assessment criteria with ordinal scales.

    Scale labels are listed in their stated order and encoded 1..L;
    direction says whether a higher position is better, so "side effects"
    improves along its scale while "treatment efficacy" declines.
    """
    return (
        Criterion(
            name="side effects",
            direction="maximize",
            weight=1.0,
            scale=("Many", "No", "Not at all"),
        ),
        Criterion(
            name="treatment efficacy",
            direction="minimize",
            weight=1.0,
            scale=("Very good", "Good", "Fair"),
        ),
        Criterion(
            name="duration of therapy",
            direction="maximize",
            weight=1.0,
            scale=("long", "reduced"),
        ),
    )


def default_criteria_config() -> CriteriaConfig:
    return CriteriaConfig(
        criteria=default_criteria(),
        concordance_threshold=DEFAULT_CONCORDANCE_THRESHOLD,
        discordance_threshold=DEFAULT_DISCORDANCE_THRESHOLD,
    )


@dataclass(frozen=True)
class EngineConfig:
    """Knobs shared by the CLI and the service."""

    k: int = DEFAULT_K
    alpha: float = DEFAULT_ALPHA
    q: float = DEFAULT_Q
    acceptance_radius: float = DEFAULT_ACCEPTANCE_RADIUS
    concordance_threshold: float = DEFAULT_CONCORDANCE_THRESHOLD
    discordance_threshold: float = DEFAULT_DISCORDANCE_THRESHOLD
    attribute_weights: Optional[tuple[float, ...]] = None
    criteria_config: CriteriaConfig = field(default_factory=default_criteria_config)
