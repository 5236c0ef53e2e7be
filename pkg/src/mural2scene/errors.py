from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable


class Severity(str, enum.Enum):
    ERROR = "ERROR"
    WARNING = "WARNING"


@dataclass(frozen=True)
class Diagnostic:
    """A single compiler finding.

    ``path`` is the dotted manifest path (``slices[2].mask``); ``line`` and
    ``column`` are 1-based and only set when the manifest came from text.
    """

    severity: Severity
    code: str
    message: str
    path: str = ""
    line: int | None = None
    column: int | None = None
    file: str | None = None

    @property
    def is_error(self) -> bool:
        return self.severity is Severity.ERROR

    def located(self, file: str | None) -> Diagnostic:
        return Diagnostic(self.severity, self.code, self.message, self.path,
                          self.line, self.column, file)

    def __str__(self) -> str:
        where = self.file or "<manifest>"
        if self.line is not None:
            where += f":{self.line}:{self.column or 1}"
        if self.path:
            return f"{self.severity.value} {self.code} {where} {self.path}: {self.message}"
        return f"{self.severity.value} {self.code} {where}: {self.message}"


def error(code: str, message: str, path: str = "", **kw) -> Diagnostic:
    return Diagnostic(Severity.ERROR, code, message, path, **kw)


def warning(code: str, message: str, path: str = "", **kw) -> Diagnostic:
    return Diagnostic(Severity.WARNING, code, message, path, **kw)


def has_errors(diagnostics: Iterable[Diagnostic]) -> bool:
    return any(d.is_error for d in diagnostics)


class CompileError(Exception):
    """Raised by pipeline stages; ``code`` matches the diagnostic codes."""

    def __init__(self, code: str, message: str,
                 diagnostics: Iterable[Diagnostic] = ()):
        self.code = code
        self.message = message
        self.diagnostics = list(diagnostics)
        super().__init__(f"{code}: {message}")
