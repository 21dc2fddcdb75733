from __future__ import annotations

# ====================================================================
# Exceptions
# --------------------------------------------------------------------


class QctlError(Exception):
    """Base class of every error raised by the checker."""


class FormulaSyntaxError(QctlError):
    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f'{message} (line {line}, column {column})')
        self.line = line
        self.column = column


class ModelFormatError(QctlError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f'line {line}: {message}')
        self.line = line


class FragmentError(QctlError):
    """The formula lies outside the fragment an operation accepts."""


class HierarchyError(FragmentError):
    def __init__(self, outer, inner):
        super().__init__(
            f'formula is not hierarchical: observation {outer} of an outer quantifier '
            f'is not included in observation {inner} of a quantifier nested below it'
        )
        self.outer = outer
        self.inner = inner


class AutomatonShapeError(QctlError):
    pass


class LabelConflictError(QctlError):
    pass


class ResourceLimitExceeded(QctlError):
    def __init__(self, resource: str, limit: int):
        super().__init__(f'resource guard tripped: {resource} exceeds {limit}')
        self.resource = resource
        self.limit = limit
