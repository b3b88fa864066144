"""Dictators at nodes and elected-dictatorship classification."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Mapping

from .mechanism import Mechanism, Outcome
from .responsibility import leaf_paths
from .solver import Semantics, all_masks, mask_slot


class DictatorKind(str, enum.Enum):
    PLAIN = "plain"
    EPISTEMIC = "epistemic"
    SEMI_EPISTEMIC = "semi-epistemic"

    def __str__(self) -> str:
        return self.value


KINDS = (DictatorKind.PLAIN, DictatorKind.EPISTEMIC, DictatorKind.SEMI_EPISTEMIC)


def dictator_masks(m: Mechanism) -> dict[DictatorKind, list[int]]:
    """Per kind, one bitmask per agent (declaration order) of nodes where that agent is a dictator."""
    cached = m.cache.get("dictators")
    if cached is not None:
        return cached
    masks = all_masks(m)
    out: dict[DictatorKind, list[int]] = {k: [] for k in KINDS}
    for i in range(len(m.agents)):
        win_y = masks[mask_slot(i, Outcome.YES, Semantics.WIN)]
        win_n = masks[mask_slot(i, Outcome.NO, Semantics.WIN)]
        ewin_y = masks[mask_slot(i, Outcome.YES, Semantics.EWIN)]
        ewin_n = masks[mask_slot(i, Outcome.NO, Semantics.EWIN)]
        out[DictatorKind.PLAIN].append(win_y & win_n)
        out[DictatorKind.EPISTEMIC].append(ewin_y & ewin_n)
        out[DictatorKind.SEMI_EPISTEMIC].append((ewin_y & win_n) | (ewin_n & win_y))
    m.cache["dictators"] = out
    return out


def dictator_at(m: Mechanism, a: str, v: str, kind: "DictatorKind | str" = DictatorKind.PLAIN) -> bool:
    m.check_agent(a)
    i = m.index[m.node(v).id]
    return bool(dictator_masks(m)[DictatorKind(kind)][m.agents.index(a)] >> i & 1)


def elected(m: Mechanism, kind: "DictatorKind | str") -> bool:
    """Does every root-to-leaf path pass through a decision node with a dictator of ``kind``?"""
    covered = 0
    for bits in dictator_masks(m)[DictatorKind(kind)]:
        covered |= bits
    return all(p.mask & covered for p in leaf_paths(m))


@dataclass(frozen=True)
class Classification:
    per_node: Mapping[str, frozenset[tuple[str, DictatorKind]]]
    elected: Mapping[DictatorKind, bool]
    # for each kind that holds: leaf -> (node, agent) certifying that leaf's path
    witnesses: Mapping[DictatorKind, Mapping[str, tuple[str, str]]]

    @property
    def elected_dictatorship(self) -> bool:
        return self.elected[DictatorKind.PLAIN]

    @property
    def elected_epistemic_dictatorship(self) -> bool:
        return self.elected[DictatorKind.EPISTEMIC]

    @property
    def elected_semi_epistemic_dictatorship(self) -> bool:
        return self.elected[DictatorKind.SEMI_EPISTEMIC]

    def dictators(self, kind: "DictatorKind | str") -> list[tuple[str, str]]:
        """Distinct (agent, node) witnesses for ``kind``, in path order."""
        seen: dict[tuple[str, str], None] = {}
        for node, agent in self.witnesses.get(DictatorKind(kind), {}).values():
            seen[(agent, node)] = None
        return list(seen)


def classify(m: Mechanism) -> Classification:
    ids = list(m.nodes)
    dm = dictator_masks(m)
    per_node = {}
    for v in m.nodes:
        i = m.index[v]
        per_node[v] = frozenset(
            (a, k) for k in KINDS for ai, a in enumerate(m.agents) if dm[k][ai] >> i & 1
        )
    flags = {}
    witnesses = {}
    for k in KINDS:
        w = {}
        for p in leaf_paths(m):
            found = None
            for i in p.decisions:  # shallowest first
                for ai, a in enumerate(m.agents):
                    if dm[k][ai] >> i & 1:
                        found = (ids[i], a)
                        break
                if found:
                    break
            if found is None:
                break
            w[ids[p.leaf]] = found
        else:
            flags[k] = True
            witnesses[k] = w
            continue
        flags[k] = False
    return Classification(per_node, flags, witnesses)
