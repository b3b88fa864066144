"""Counterfactual and epistemic responsibility at leaves, and gap sets.

An agent is responsible at a leaf when some decision node on the
root-to-leaf path lies in their strategy set for the opposite outcome
(``win`` for counterfactual responsibility, ``ewin`` for epistemic).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Mapping

from .errors import NotLeaf
from .mechanism import Mechanism, Outcome
from .solver import Semantics, all_masks, mask_slot


class Responsibility(str, enum.Enum):
    COUNTERFACTUAL = "counterfactual"
    EPISTEMIC = "epistemic"

    @property
    def semantics(self) -> Semantics:
        return Semantics.WIN if self is Responsibility.COUNTERFACTUAL else Semantics.EWIN

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class ResponsibilityVerdict:
    leaf: str
    agent: str
    responsible: bool
    witness: str | None = None


@dataclass(frozen=True)
class ResponsibilityReport:
    semantics: Responsibility
    verdicts: Mapping[tuple[str, str], ResponsibilityVerdict]
    gap: frozenset[str]

    @property
    def gap_free(self) -> bool:
        return not self.gap

    def responsible_agents(self, leaf: str) -> list[str]:
        return [a for (v, a), r in self.verdicts.items() if v == leaf and r.responsible]


@dataclass(frozen=True)
class LeafPath:
    leaf: int
    label: Outcome
    decisions: tuple[int, ...]  # decision-node indices, root first
    mask: int  # the same nodes as a bitmask


def leaf_paths(m: Mechanism) -> list[LeafPath]:
    paths = m.cache.get("leaf_paths")
    if paths is None:
        idx = m.index
        paths = []
        for leaf in m.leaves:
            ds = tuple(idx[u] for u in m.decision_path(leaf)[:-1])
            bits = 0
            for i in ds:
                bits |= 1 << i
            paths.append(LeafPath(idx[leaf], m.label(leaf), ds, bits))
        m.cache["leaf_paths"] = paths
    return paths


def _opposite_masks(m: Mechanism, sem: Semantics, outcome: Outcome) -> list[int]:
    masks = all_masks(m)
    return [masks[mask_slot(i, outcome.complement, sem)] for i in range(len(m.agents))]


def gap_mask(m: Mechanism, semantics: "Responsibility | str") -> int:
    """Bitmask of leaves where nobody is responsible."""
    sem = Responsibility(semantics).semantics
    by_label = {o: 0 for o in Outcome}
    for o in Outcome:
        for bits in _opposite_masks(m, sem, o):
            by_label[o] |= bits
    gap = 0
    for p in leaf_paths(m):
        if not p.mask & by_label[p.label]:
            gap |= 1 << p.leaf
    return gap


def is_gap_free(m: Mechanism, semantics: "Responsibility | str") -> bool:
    return gap_mask(m, semantics) == 0


def responsible(m: Mechanism, a: str, leaf: str, semantics: "Responsibility | str") -> ResponsibilityVerdict:
    """Verdict for one agent at one leaf; the witness is the first qualifying path node."""
    semantics = Responsibility(semantics)
    m.check_agent(a)
    if not m.is_leaf(leaf):
        raise NotLeaf(f"{leaf} is a decision node")
    ids = list(m.nodes)
    target = _opposite_masks(m, semantics.semantics, m.label(leaf))[m.agents.index(a)]
    for u in m.decision_path(leaf)[:-1]:
        if target >> m.index[u] & 1:
            return ResponsibilityVerdict(leaf, a, True, ids[m.index[u]])
    return ResponsibilityVerdict(leaf, a, False)


def report(m: Mechanism, semantics: "Responsibility | str") -> ResponsibilityReport:
    semantics = Responsibility(semantics)
    verdicts = {}
    gap = []
    for leaf in m.leaves:
        anyone = False
        for a in m.agents:
            v = responsible(m, a, leaf, semantics)
            verdicts[(leaf, a)] = v
            anyone |= v.responsible
        if not anyone:
            gap.append(leaf)
    return ResponsibilityReport(semantics, verdicts, frozenset(gap))
