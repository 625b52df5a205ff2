from .parser import (
    ParseDiagnostic,
    ParseResult,
    Severity,
    parse_description,
    parse_level,
    parse_level_grid,
)
from .serializer import serialize_description, serialize_level

__all__ = [
    "ParseDiagnostic",
    "ParseResult",
    "Severity",
    "parse_description",
    "parse_level",
    "parse_level_grid",
    "serialize_description",
    "serialize_level",
]
