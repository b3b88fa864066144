"""Independent reference implementations used to cross-check the solver.

Nothing here touches the compiled encoding: everything is computed from
node ids through the :class:`Mechanism` accessors.

* :func:`naive_fixpoint` re-derives a strategy set by plain Kleene
  iteration of the closure rules over the whole node set.
* :func:`oracle_win` / :func:`oracle_uwin` decide membership by explicit
  enumeration of the agent's (uniform) strategies.  Exponential; guarded by
  a node-count cap.
"""

from __future__ import annotations

import itertools

from .errors import BudgetExceeded
from .mechanism import IDLE, DecisionNode, Mechanism, Outcome

DEFAULT_NODE_CAP = 40


def naive_fixpoint(m: Mechanism, a: str, o: "Outcome | str", semantics: str = "win") -> frozenset[str]:
    o = Outcome.parse(o)
    semantics = str(semantics)
    m.check_agent(a)
    current = {v for v in m.leaves if m.label(v) is o}
    while True:
        grown = set(current)
        for v in m.decision_nodes:
            if v in current:
                continue
            scope = [v] if semantics == "win" else m.equivalence_class(a, v)
            if any(m.next_of_class(a, d, scope) <= current for d in m.actions(a, v)):
                grown.add(v)
            elif semantics == "ewin" and m.children(v) <= current:
                grown.add(v)
        if grown == current:
            return frozenset(current)
        current = grown


def _subtree(m: Mechanism, v: str) -> list[str]:
    out, stack = [], [v]
    while stack:
        u = stack.pop()
        out.append(u)
        stack.extend(m.children(u))
    return out


def _forces(m: Mechanism, a: str, o: Outcome, v: str, choose) -> bool:
    """Every play from ``v`` where ``a`` follows ``choose`` ends in ``o``."""
    node = m.node(v)
    if not isinstance(node, DecisionNode):
        return node.label is o
    if a in node.actions:
        targets = m.next(a, choose(v), v)
    else:
        targets = m.next(a, IDLE, v)
    return all(_forces(m, a, o, t, choose) for t in targets)


def _guard(m: Mechanism, cap: int) -> None:
    if len(m.nodes) > cap:
        raise BudgetExceeded(f"oracle limited to {cap} nodes, mechanism has {len(m.nodes)}", len(m.nodes))


def oracle_win(m: Mechanism, a: str, o: "Outcome | str", v: str, *, cap: int = DEFAULT_NODE_CAP) -> bool:
    """Does ``a`` have some strategy on the subtree of ``v`` forcing ``o``?"""
    o = Outcome.parse(o)
    m.check_agent(a)
    m.node(v)
    _guard(m, cap)
    mine = [u for u in _subtree(m, v) if not m.is_leaf(u) and a in m.decision(u).actions]
    choices = [m.decision(u).actions[a] for u in mine]
    for assignment in itertools.product(*choices):
        plan = dict(zip(mine, assignment))
        if _forces(m, a, o, v, plan.__getitem__):
            return True
    return False


def oracle_uwin(m: Mechanism, a: str, o: "Outcome | str", v: str, *, cap: int = DEFAULT_NODE_CAP) -> bool:
    """Does ``a`` have a uniform strategy forcing ``o`` from every node of ``[v]``?

    A uniform strategy assigns one action to each of ``a``'s
    indistinguishability classes.  The agent cannot tell ``v`` from its
    classmates, so the strategy must win from each of them.  For a leaf
    the answer is whether it is labelled ``o``.
    """
    o = Outcome.parse(o)
    m.check_agent(a)
    m.node(v)
    _guard(m, cap)
    if m.is_leaf(v):
        return m.label(v) is o
    starts = sorted(m.equivalence_class(a, v), key=m.index.__getitem__)
    reach: set[str] = set()
    for s in starts:
        reach.update(_subtree(m, s))
    classes = []
    for cls in m.classes(a):
        if any(u in reach for u in cls) and a in m.decision(cls[0]).actions:
            classes.append(cls)
    choices = [m.decision(cls[0]).actions[a] for cls in classes]
    for assignment in itertools.product(*choices):
        plan = {u: d for cls, d in zip(classes, assignment) for u in cls}
        if all(_forces(m, a, o, s, plan.__getitem__) for s in starts):
            return True
    return False
