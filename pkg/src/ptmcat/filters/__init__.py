"""Hit refinement: exclusion rules, near-duplicate clustering, relevance judging."""

from .dedup import (
    DEFAULT_THRESHOLD,
    DocVectors,
    DuplicateCluster,
    EmptyCorpus,
    cluster_duplicates,
    cosine,
    vectorize_corpus,
)
from .exclusion import (
    ExclusionOutcome,
    ExclusionRule,
    Removal,
    RuleKind,
    apply_exclusion_rules,
    load_rules,
    record_source_texts,
)
from .judge import (
    BudgetExceeded,
    HttpJudgeProvider,
    Judgment,
    JudgmentCache,
    MalformedResponse,
    MockJudgeProvider,
    PromptLibrary,
    ProviderError,
    judge_relevance,
    parse_judgment_text,
)

__all__ = [
    "DEFAULT_THRESHOLD",
    "BudgetExceeded",
    "DocVectors",
    "DuplicateCluster",
    "EmptyCorpus",
    "ExclusionOutcome",
    "ExclusionRule",
    "HttpJudgeProvider",
    "Judgment",
    "JudgmentCache",
    "MalformedResponse",
    "MockJudgeProvider",
    "PromptLibrary",
    "ProviderError",
    "Removal",
    "RuleKind",
    "apply_exclusion_rules",
    "cluster_duplicates",
    "cosine",
    "judge_relevance",
    "load_rules",
    "parse_judgment_text",
    "record_source_texts",
    "vectorize_corpus",
]
