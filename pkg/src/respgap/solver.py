"""Strategic-ability sets as least fixed points.

For an agent ``a`` and outcome ``o`` each family starts from the leaves
labelled ``o`` and closes under its rules:

* ``win``:  add a decision node if some action of ``a`` leads only into
  the set.
* ``uwin``: add a decision node if some action leads only into the set
  from *every* node ``a`` cannot tell apart from it.
* ``ewin``: the ``uwin`` rule, plus: add a decision node all of whose
  children are already in the set.

The fixed point is computed by a worklist over node indices (see
:mod:`respgap.kernel`); results are bitmasks over preorder indices, and
:func:`solve` converts them to node-id sets.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Mapping

from . import kernel
from .mechanism import Mechanism, Outcome


class Semantics(str, enum.Enum):
    WIN = "win"
    UWIN = "uwin"
    EWIN = "ewin"

    def __str__(self) -> str:
        return self.value


_SEM_INDEX = {Semantics.WIN: 0, Semantics.UWIN: 1, Semantics.EWIN: 2}
_OUT_INDEX = {Outcome.NO: 0, Outcome.YES: 1}


@dataclass(frozen=True)
class Witness:
    """Why a decision node is in a strategy set.

    ``rule`` is 2 for the forcing-action rule (``action`` is the lowest such
    action in declared order) and 3 for the all-actions rule of ``ewin``.
    """

    rule: int
    action: str | None


@dataclass(frozen=True)
class StrategySet:
    agent: str
    outcome: Outcome
    semantics: Semantics
    nodes: frozenset[str]
    witnesses: Mapping[str, Witness] | None = field(default=None, compare=False)

    def __contains__(self, v: object) -> bool:
        return v in self.nodes

    def __iter__(self):
        return iter(self.nodes)

    def __len__(self) -> int:
        return len(self.nodes)


def all_masks(m: Mechanism) -> list[int]:
    """Every strategy-set bitmask of ``m``, indexed by :func:`mask_slot`."""
    masks = m.cache.get("masks")
    if masks is None:
        masks = m.cache["masks"] = kernel.solve_all(m.compiled)
    return masks


def mask_slot(agent_index: int, outcome: Outcome, sem: Semantics) -> int:
    return (agent_index * 2 + _OUT_INDEX[outcome]) * 3 + _SEM_INDEX[sem]


def mask(m: Mechanism, a: str, o: "Outcome | str", s: "Semantics | str" = Semantics.WIN) -> int:
    m.check_agent(a)
    return all_masks(m)[mask_slot(m.agents.index(a), Outcome.parse(o), Semantics(s))]


def nodes_of(m: Mechanism, bits: int) -> frozenset[str]:
    ids = list(m.nodes)
    out = []
    i = 0
    while bits:
        if bits & 1:
            out.append(ids[i])
        bits >>= 1
        i += 1
    return frozenset(out)


def solve(
    m: Mechanism,
    a: str,
    o: "Outcome | str",
    s: "Semantics | str" = Semantics.WIN,
    *,
    witnesses: bool = False,
) -> StrategySet:
    """Nodes from which ``a`` can force ``o`` under semantics ``s``."""
    o = Outcome.parse(o)
    s = Semantics(s)
    members = nodes_of(m, mask(m, a, o, s))
    wit = _witnesses(m, a, s, members) if witnesses else None
    return StrategySet(a, o, s, members, wit)


def _witnesses(m: Mechanism, a: str, s: Semantics, members: frozenset[str]) -> dict[str, Witness]:
    out = {}
    for v in m.decision_nodes:
        if v not in members:
            continue
        scope = [v] if s is Semantics.WIN else sorted(m.equivalence_class(a, v), key=m.index.__getitem__)
        for d in m.actions(a, v):
            if m.next_of_class(a, d, scope) <= members:
                out[v] = Witness(2, d)
                break
        else:
            out[v] = Witness(3, None)
    return out
