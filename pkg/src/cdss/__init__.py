"""Case-based clinical decision support.

Retrieves the most similar stored cases with a value difference metric,
pools their recorded actions with physician-proposed ones, and selects the
best-compromise subset by the ELECTRE I outranking method. Sessions walk
the information, design, choice, review cycle and retain accepted outcomes
back into the case memory.
"""

from .casebase import (
    ATTRIBUTE_NAMES,
    CLASS_LABELS,
    MISSING_BIN,
    AttributeSchema,
    Case,
    CaseBase,
    class_counts,
    default_schema,
    discretize,
    encode_case,
    load_case_base,
    parse_pima_line,
    retain_case,
    split_train_test,
    validate_new_case,
)
from .config import EngineConfig, default_criteria, default_criteria_config
from .electre import (
    CriteriaConfig,
    Criterion,
    Kernel,
    OutrankingGraph,
    PerformanceTable,
    build_outranking,
    concordance_index,
    discordance_index,
    encode_performance,
    extract_kernel,
    load_criteria_config,
    solve_choice,
)
from .errors import CdssError
from .evaluation import (
    ExperimentReport,
    classification_eval,
    emit_report,
    run_probe_experiment,
    run_split_experiment,
)
from .pipeline import (
    DecisionSession,
    ReviewVerdict,
    SessionState,
    adapt_and_retain,
    assess,
    design,
    mine_choice_rules,
    open_session,
    pool_candidate_actions,
    rapprochement,
    record_choice,
    review,
)
from .similarity import (
    Neighbor,
    VdmModel,
    case_distance,
    fit_vdm,
    majority_diagnosis,
    retrieve_k_nearest,
    value_distance,
)

__version__ = "0.1.0"

__all__ = [
    "ATTRIBUTE_NAMES",
    "CLASS_LABELS",
    "MISSING_BIN",
    "AttributeSchema",
    "Case",
    "CaseBase",
    "CdssError",
    "CriteriaConfig",
    "Criterion",
    "DecisionSession",
    "EngineConfig",
    "ExperimentReport",
    "Kernel",
    "Neighbor",
    "OutrankingGraph",
    "PerformanceTable",
    "ReviewVerdict",
    "SessionState",
    "VdmModel",
    "adapt_and_retain",
    "assess",
    "build_outranking",
    "case_distance",
    "class_counts",
    "classification_eval",
    "concordance_index",
    "default_criteria",
    "default_criteria_config",
    "default_schema",
    "design",
    "discordance_index",
    "discretize",
    "emit_report",
    "encode_case",
    "encode_performance",
    "extract_kernel",
    "fit_vdm",
    "load_case_base",
    "load_criteria_config",
    "majority_diagnosis",
    "mine_choice_rules",
    "open_session",
    "parse_pima_line",
    "pool_candidate_actions",
    "rapprochement",
    "record_choice",
    "retain_case",
    "retrieve_k_nearest",
    "review",
    "run_probe_experiment",
    "run_split_experiment",
    "solve_choice",
    "split_train_test",
    "validate_new_case",
    "value_distance",
]
