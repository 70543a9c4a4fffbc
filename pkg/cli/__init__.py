# CLI package

from .commands import main, build_parser, format_location, format_validation_error

__all__ = [
    "main",
    "build_parser",
    "format_location",
    "format_validation_error"
]
