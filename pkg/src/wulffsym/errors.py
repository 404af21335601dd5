"""Exception hierarchy.

Every error carries a machine-readable ``code`` of the form
``<category>:<slug>``; the CLI prints it as ``error:<code>``.
"""

from __future__ import annotations


class WulffError(Exception):
    """Base class for all library errors."""

    category = "error"

    def __init__(self, message: str, slug: str = "invalid") -> None:
        super().__init__(message)
        self.slug = slug

    @property
    def code(self) -> str:
        return f"{self.category}:{self.slug}"


class InvalidArgumentError(WulffError, ValueError):
    category = "argument"


class DomainError(WulffError, ValueError):
    category = "domain"


class UnsupportedNormError(WulffError, NotImplementedError):
    category = "unsupported"


class UnsupportedDimensionError(WulffError, NotImplementedError):
    category = "unsupported"


class ParseError(WulffError, ValueError):
    category = "parse"

    def __init__(self, message: str, slug: str = "malformed", line: int | None = None) -> None:
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message, slug)
        self.line = line


class ConfigError(WulffError, ValueError):
    category = "config"
