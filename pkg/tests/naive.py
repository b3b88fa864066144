"""Deliberately simple reference enumerator, independent of respgap.enumeration.

It generates every *labelled* mechanism (all choice maps, all child orders,
all partitions) and collapses them with a brute-force isomorphism key that
tries every consistent action renaming.  Only usable for tiny bounds.
"""

from __future__ import annotations

import itertools
import string

from respgap.mechanism import IDLE, DecisionNode, Mechanism, validate
from respgap.text import IndistDecl, to_document


def _trees(depth, agents, max_actions, max_children):
    yield ("leaf", "Yes")
    yield ("leaf", "No")
    if depth == 0:
        return
    subtrees = list(_trees(depth - 1, agents, max_actions, max_children))
    for r in range(1, agents + 1):
        for deciders in itertools.combinations(range(agents), r):
            for nacts in itertools.product(range(1, max_actions + 1), repeat=r):
                n_prof = 1
                for x in nacts:
                    n_prof *= x
                for k in range(1, max_children + 1):
                    maps = [f for f in itertools.product(range(k), repeat=n_prof) if len(set(f)) == k]
                    for kids in itertools.product(subtrees, repeat=k):
                        for f in maps:
                            yield ("node", deciders, nacts, f, kids)


def _to_text(tree, agents, partition=None):
    names = string.ascii_uppercase[:agents]
    lines = [f"agents: {', '.join(names)}", "root: n0"]
    counter = itertools.count()

    def emit(t):
        me = f"n{next(counter)}"
        if t[0] == "leaf":
            lines.append(f"leaf {me} = {t[1]}")
            return me
        _, deciders, nacts, f, kids = t
        block = len(lines)
        lines.append(None)
        child_ids = [emit(c) for c in kids]
        ds = [names[d] for d in deciders]
        acts = {a: [f"a{j}" for j in range(n)] for a, n in zip(ds, nacts)}
        profiles = itertools.product(*(acts[a] for a in ds))
        entries = " ; ".join(f"[{','.join(p)}] -> {child_ids[c]}" for p, c in zip(profiles, f))
        actions = " ; ".join(f"{a} = [{', '.join(acts[a])}]" for a in ds)
        lines[block] = f"decision {me}\n  deciders: {', '.join(ds)}\n  actions: {actions}\n  map: {entries}"
        return me

    emit(tree)
    return "\n".join(lines) + "\n"


def _set_partitions(xs):
    if not xs:
        yield []
        return
    first, rest = xs[0], xs[1:]
    for p in _set_partitions(rest):
        yield [[first]] + p
        for i in range(len(p)):
            yield p[:i] + [[first] + p[i]] + p[i + 1:]


def _partitions(m: Mechanism):
    """Every per-agent partition whose classes share action lists."""
    per_agent = []
    for a in m.agents:
        groups = {}
        for v in m.decision_nodes:
            groups.setdefault(m.actions(a, v), []).append(v)
        options = [[]]
        for nodes in groups.values():
            options = [o + [c for c in p if len(c) > 1] for o in options for p in _set_partitions(nodes)]
        per_agent.append(options)
    for combo in itertools.product(*per_agent):
        yield dict(zip(m.agents, combo))


def labelled(depth, agents, max_actions, max_children, partitions=False):
    from respgap.text import parse

    for t in _trees(depth, agents, max_actions, max_children):
        m = validate(parse(_to_text(t, agents)))
        if not partitions:
            yield m
            continue
        for part in _partitions(m):
            doc = to_document(m)
            doc.indist = [IndistDecl(a, list(c)) for a, cells in part.items() for c in cells]
            yield validate(doc)


def iso_key(m: Mechanism) -> str:
    """Minimum serialisation over every action renaming that is constant on classes."""
    slots = []  # (agent, nodes of one class or singleton, action count)
    for a in m.agents:
        for cls in m.classes(a):
            acts = m.actions(a, cls[0])
            if acts != (IDLE,) and len(acts) > 1:
                slots.append((a, cls, len(acts)))
    best = None
    for perms in itertools.product(*(itertools.permutations(range(n)) for _, _, n in slots)):
        ren = {}
        for (a, cls, _), p in zip(slots, perms):
            for v in cls:
                ren[a, v] = p
        s = _render(m, ren)
        if best is None or s < best:
            best = s
    return best


def _render(m: Mechanism, ren) -> str:
    # rebuild choice tables under the renaming, then serialise in first-use preorder
    table = {}
    for v in m.decision_nodes:
        node: DecisionNode = m.decision(v)
        new = {}
        for p in node.profiles():
            q = []
            for a, x in zip(node.deciders, p):
                i = node.actions[a].index(x)
                q.append(ren[a, v][i] if (a, v) in ren else i)
            new[tuple(q)] = node.choice[p]
        table[v] = new
    order, stack = [], [m.root]
    while stack:
        v = stack.pop()
        order.append(v)
        if v in table:
            firsts = list(dict.fromkeys(table[v][p] for p in sorted(table[v])))
            stack.extend(reversed(firsts))
    pos = {v: i for i, v in enumerate(order)}
    parts = []
    for v in order:
        if v in table:
            node = m.decision(v)
            counts = [len(node.actions[a]) for a in node.deciders]
            row = ",".join(str(pos[table[v][p]]) for p in sorted(table[v]))
            parts.append(f"D{''.join(node.deciders)}{counts}[{row}]")
        else:
            parts.append(f"L{m.label(v).value}")
    for a in m.agents:
        cells = sorted(sorted(pos[v] for v in c) for c in m.indist.get(a, ()))
        parts.append(f"{a}:{cells}")
    return "|".join(parts)
