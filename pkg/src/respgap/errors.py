"""Exception types raised by respgap."""

from __future__ import annotations

from dataclasses import dataclass


class RespgapError(Exception):
    """Base class for all library errors."""


class UnknownNode(RespgapError, KeyError):
    pass


class UnknownAgent(RespgapError, KeyError):
    pass


class UnknownAction(RespgapError, KeyError):
    pass


class NotDecisionNode(RespgapError, ValueError):
    pass


class NotLeaf(RespgapError, ValueError):
    pass


class UnknownExample(RespgapError, KeyError):
    pass


class BudgetExceeded(RespgapError, RuntimeError):
    """An exhaustive computation would exceed its configured cap."""

    def __init__(self, message: str, count: int | None = None):
        super().__init__(message)
        self.count = count


@dataclass(frozen=True)
class Issue:
    """One structural violation found while validating a mechanism."""

    kind: str
    message: str
    node: str | None = None
    agent: str | None = None

    def __str__(self) -> str:
        where = []
        if self.node is not None:
            where.append(f"node {self.node}")
        if self.agent is not None:
            where.append(f"agent {self.agent}")
        loc = f" ({', '.join(where)})" if where else ""
        return f"{self.kind}{loc}: {self.message}"


class MechanismError(RespgapError, ValueError):
    """Validation failed; ``issues`` lists every violation found."""

    def __init__(self, issues: list[Issue]):
        self.issues = list(issues)
        super().__init__("; ".join(str(i) for i in self.issues))

    @property
    def kinds(self) -> set[str]:
        return {i.kind for i in self.issues}


@dataclass(frozen=True)
class SyntaxIssue:
    line: int
    message: str

    def __str__(self) -> str:
        return f"line {self.line}: {self.message}"


class ParseError(RespgapError, ValueError):
    """The mechanism text is not well formed."""

    def __init__(self, issues: list[SyntaxIssue]):
        self.issues = list(issues)
        super().__init__("; ".join(str(i) for i in self.issues))
