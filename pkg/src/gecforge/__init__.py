"""Synthetic grammatical-error-correction corpus generation and auditing."""

from __future__ import annotations

from .core import (
    ALL_CATEGORIES,
    ALL_SUBJECT_TYPES,
    GENERABLE_CATEGORIES,
    Edit,
    ErrorCategory,
    GecForgeError,
    GenerationRecord,
    PromptSpec,
    SentencePair,
    SubjectType,
    TokenUsage,
    Verdict,
    parse_category,
    validate_pair,
)

__version__ = "0.1.0"

__all__ = [
    "ALL_CATEGORIES",
    "ALL_SUBJECT_TYPES",
    "GENERABLE_CATEGORIES",
    "Edit",
    "ErrorCategory",
    "GecForgeError",
    "GenerationRecord",
    "PromptSpec",
    "SentencePair",
    "SubjectType",
    "TokenUsage",
    "Verdict",
    "parse_category",
    "validate_pair",
]
