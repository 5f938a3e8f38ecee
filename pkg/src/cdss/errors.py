"""Exception taxonomy shared by every module.

Each exception class carries a stable ``code`` string. The HTTP service maps
codes 1:1 onto its error envelope, so new error cases must add a class here.
"""

from __future__ import annotations

from typing import Any


class CdssError(Exception):
    """Base class for all engine errors."""

    code = "internal"

    def __init__(self, message: str, *, details: Any = None):
        super().__init__(message)
        self.message = message
        self.details = details


# case-base ----------------------------------------------------------------

class MalformedRecordError(CdssError):
    """Record does not have exactly nine comma-separated fields."""

    code = "malformed_record"


class FieldParseError(CdssError):
    """A field is not numeric; names the offending attribute."""

    code = "field_parse"


class DiagnosisDomainError(CdssError):
    """Diagnosis value outside {0, 1}."""

    code = "diagnosis_domain"


class EmptyInputError(CdssError):
    code = "empty_input"


class ArgumentError(CdssError):
    """Precondition violation on an operation argument."""

    code = "invalid_argument"


class DuplicateIdError(CdssError):
    code = "duplicate_id"


class ValidationFailure(CdssError):
    """Carries the complete list of violations in ``details``."""

    code = "validation"


class CaseBaseIOError(CdssError):
    code = "casebase_io"


# similarity ---------------------------------------------------------------

class FitError(CdssError):
    code = "fit_error"


class UnknownBinError(CdssError):
    code = "unknown_bin"


class NotDiscretizedError(CdssError):
    """Operation needs discretized cases or recorded bin edges."""

    code = "not_discretized"


class StaleModelError(CdssError):
    """Model was fitted on a different case-base version."""

    code = "stale_model"


# electre ------------------------------------------------------------------

class UnknownLabelError(CdssError):
    """Performance label not on the criterion's scale."""

    code = "unknown_label"


class UnknownActionError(CdssError):
    code = "unknown_action"


# session pipeline ---------------------------------------------------------

class SequencingError(CdssError):
    """Session command issued outside the allowed state."""

    code = "sequencing"


class NoCandidateActionsError(CdssError):
    code = "no_candidates"


class IncompleteAssessmentError(CdssError):
    """Performance input missing cells; ``details`` lists the gaps."""

    code = "incomplete_assessment"


class ChoiceError(CdssError):
    code = "invalid_choice"


class RetentionRefusedError(CdssError):
    code = "retention_refused"


class SessionNotFoundError(CdssError):
    code = "session_not_found"


# service ------------------------------------------------------------------

class StartupError(CdssError):
    code = "startup"
