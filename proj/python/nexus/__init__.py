"""Characterizations and expansion graphs over selective knowledge bases."""

from ._core import (
    ParseError,
    ResourceError,
    SelectiveKB,
    SemanticError,
    core_of,
    equivalent,
    evaluate,
    is_isomorphic,
    maps_to,
    prime_cycles,
    random_fixture,
    themepark,
)

__all__ = [
    "ParseError",
    "ResourceError",
    "SelectiveKB",
    "SemanticError",
    "core_of",
    "equivalent",
    "evaluate",
    "is_isomorphic",
    "maps_to",
    "prime_cycles",
    "random_fixture",
    "themepark",
]
