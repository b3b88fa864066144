"""Flat integer encoding of a mechanism, shared by both kernel backends.

Nodes are numbered in preorder, so every child has a larger index than its
parent.  Per-(agent, node) data lives at offset ``a * n + v``.
"""

from __future__ import annotations

from array import array
from dataclasses import dataclass

from .mechanism import DecisionNode, Mechanism, Outcome

NO, YES = 0, 1


@dataclass(frozen=True)
class CompiledMechanism:
    n: int
    n_agents: int
    parent: array
    label: array  # -1 on decision nodes
    ch_ptr: array
    ch: array
    nact: array  # a*n+v -> number of actions (0 on leaves)
    nx_base: array  # a*n+v -> first slot in nx_ptr
    nx_ptr: array
    nx: array
    cls_of: array  # a*n+v -> class id (-1 on leaves)
    cls_ptr: array
    cls: array

    def children(self, v: int) -> range:
        return self.ch[self.ch_ptr[v] : self.ch_ptr[v + 1]]

    def next(self, a: int, d: int, v: int):
        s = self.nx_base[a * self.n + v] + d
        return self.nx[self.nx_ptr[s] : self.nx_ptr[s + 1]]

    def class_members(self, a: int, v: int):
        c = self.cls_of[a * self.n + v]
        return self.cls[self.cls_ptr[c] : self.cls_ptr[c + 1]]

    def arrays(self) -> tuple:
        return (
            self.parent,
            self.label,
            self.ch_ptr,
            self.ch,
            self.nact,
            self.nx_base,
            self.nx_ptr,
            self.nx,
            self.cls_of,
            self.cls_ptr,
            self.cls,
        )


def compile_mechanism(m: Mechanism) -> CompiledMechanism:
    idx = m.index
    n = len(idx)
    k = len(m.agents)
    parent = array("i", [-1] * n)
    label = array("i", [-1] * n)
    ch_ptr = array("i", [0])
    ch = array("i")
    for v, node in m.nodes.items():
        i = idx[v]
        if isinstance(node, DecisionNode):
            kids = sorted(idx[c] for c in node.children)
            ch.extend(kids)
            for c in kids:
                parent[c] = i
        else:
            label[i] = YES if node.label is Outcome.YES else NO
        ch_ptr.append(len(ch))

    nact = array("i", [0] * (n * k))
    nx_base = array("i", [0] * (n * k))
    nx_ptr = array("i", [0])
    nx = array("i")
    cls_of = array("i", [-1] * (n * k))
    cls_ptr = array("i", [0])
    cls = array("i")
    for a_i, a in enumerate(m.agents):
        for v, node in m.nodes.items():
            if not isinstance(node, DecisionNode):
                continue
            i = idx[v]
            slot = a_i * n + i
            nx_base[slot] = len(nx_ptr) - 1
            if a in node.actions:
                pos = node.deciders.index(a)
                acts = node.actions[a]
                buckets: dict[str, set[int]] = {d: set() for d in acts}
                for p, t in node.choice.items():
                    buckets[p[pos]].add(idx[t])
                for d in acts:
                    nx.extend(sorted(buckets[d]))
                    nx_ptr.append(len(nx))
                nact[slot] = len(acts)
            else:
                nx.extend(sorted(idx[c] for c in node.children))
                nx_ptr.append(len(nx))
                nact[slot] = 1
        for c_members in m.classes(a):
            cid = len(cls_ptr) - 1
            members = sorted(idx[v] for v in c_members)
            cls.extend(members)
            cls_ptr.append(len(cls))
            for i in members:
                cls_of[a_i * n + i] = cid
    return CompiledMechanism(n, k, parent, label, ch_ptr, ch, nact, nx_base, nx_ptr, nx, cls_of, cls_ptr, cls)


__all__ = ["CompiledMechanism", "compile_mechanism", "NO", "YES"]
