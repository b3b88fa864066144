"""Responsibility gaps and elected dictatorships in binary decision mechanisms."""

from .dictatorship import Classification, DictatorKind, classify, dictator_at, elected
from .errors import (
    BudgetExceeded,
    Issue,
    MechanismError,
    NotDecisionNode,
    NotLeaf,
    ParseError,
    RespgapError,
    UnknownAction,
    UnknownAgent,
    UnknownExample,
    UnknownNode,
)
from .examples import example
from .kernel import BACKEND
from .mechanism import IDLE, DecisionNode, LeafNode, Mechanism, Outcome, validate
from .oracle import naive_fixpoint, oracle_uwin, oracle_win
from .responsibility import (
    Responsibility,
    ResponsibilityReport,
    ResponsibilityVerdict,
    is_gap_free,
    report,
    responsible,
)
from .solver import Semantics, StrategySet, Witness, solve
from .text import MechanismDocument, export_dot, parse, serialize, to_document

__all__ = [
    "BACKEND",
    "BudgetExceeded",
    "Classification",
    "DecisionNode",
    "DictatorKind",
    "IDLE",
    "Issue",
    "LeafNode",
    "Mechanism",
    "MechanismDocument",
    "MechanismError",
    "NotDecisionNode",
    "NotLeaf",
    "Outcome",
    "ParseError",
    "RespgapError",
    "Responsibility",
    "ResponsibilityReport",
    "ResponsibilityVerdict",
    "Semantics",
    "StrategySet",
    "UnknownAction",
    "UnknownAgent",
    "UnknownExample",
    "UnknownNode",
    "Witness",
    "classify",
    "dictator_at",
    "elected",
    "example",
    "export_dot",
    "is_gap_free",
    "naive_fixpoint",
    "oracle_uwin",
    "oracle_win",
    "parse",
    "report",
    "responsible",
    "serialize",
    "solve",
    "to_document",
    "validate",
]
