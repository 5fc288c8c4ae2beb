"""Entailment-based semantic accuracy for schema-guided dialogue generation."""

from ._core import (
    ConflictError,
    Error,
    InputError,
    ParseError,
    ProtocolError,
    ResolutionError,
    TransportError,
    ValueDomainError,
    __version__,
    augment_premise,
    build_candidates,
    build_negatives,
    evaluate,
    mock_classify,
    normalize_slot_name,
    rerank,
    run_cli,
    validate,
)

__all__ = [
    "ConflictError",
    "Error",
    "InputError",
    "ParseError",
    "ProtocolError",
    "ResolutionError",
    "TransportError",
    "ValueDomainError",
    "__version__",
    "augment_premise",
    "build_candidates",
    "build_negatives",
    "evaluate",
    "mock_classify",
    "normalize_slot_name",
    "rerank",
    "run_cli",
    "validate",
]
