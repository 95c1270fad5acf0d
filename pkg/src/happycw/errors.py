"""Exception hierarchy shared by the solvers, parsers and the CLI."""

from __future__ import annotations


class HappyError(Exception):
    """Base class for every error raised by :mod:`happycw`."""


class FormatError(HappyError, ValueError):
    """Malformed instance, expression, CNF or sidecar text."""

    def __init__(self, message: str, lineno: int | None = None, column: int | None = None):
        self.lineno = lineno
        self.column = column
        where = ""
        if lineno is not None:
            where = f"line {lineno}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)
        self.message = message


class GraphMismatch(HappyError, ValueError):
    """An expression does not describe the graph it was paired with."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class NotNice(HappyError, ValueError):
    def __init__(self, offenders):
        super().__init__(f"expression is not nice; redundant edge-introduction nodes: {list(offenders)}")
        self.offenders = tuple(offenders)


class NotThreshold(HappyError, ValueError):
    pass


class ColoringMismatch(HappyError, ValueError):
    pass


class PartiallyRedundant(HappyError):
    """An edge-introduction node creates some, but not all, of its edges fresh."""

    def __init__(self, node: int):
        super().__init__(f"edge-introduction node {node} is partially redundant")
        self.node = node


class StateBudgetExceeded(HappyError):
    pass


class BudgetExceeded(HappyError):
    pass
