"""Decision-making mechanisms: the tree model, validation and accessors.

A mechanism is a finite rooted tree.  Decision nodes route on the
simultaneous actions of a subset of agents (the node's *deciders*); every
other agent has the single implicit action ``idle`` there.  Leaves carry a
Yes/No outcome.  Each agent additionally has a partition of the decision
nodes into indistinguishability classes; singleton classes everywhere is
the perfect-information case.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import TYPE_CHECKING, Iterable, Mapping, Union

from .errors import (
    Issue,
    MechanismError,
    NotDecisionNode,
    UnknownAction,
    UnknownAgent,
    UnknownNode,
)

if TYPE_CHECKING:
    from ._compiled import CompiledMechanism
    from .text import MechanismDocument

IDLE = "idle"


class Outcome(str, enum.Enum):
    YES = "Yes"
    NO = "No"

    @property
    def complement(self) -> "Outcome":
        return Outcome.NO if self is Outcome.YES else Outcome.YES

    @classmethod
    def parse(cls, value: "str | Outcome") -> "Outcome":
        if isinstance(value, Outcome):
            return value
        for o in cls:
            if o.value.lower() == str(value).lower():
                return o
        raise ValueError(f"not an outcome: {value!r}")

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class DecisionNode:
    id: str
    deciders: tuple[str, ...]
    actions: Mapping[str, tuple[str, ...]]
    choice: Mapping[tuple[str, ...], str]

    @cached_property
    def children(self) -> tuple[str, ...]:
        # distinct targets, ordered by first use in profile order
        return tuple(dict.fromkeys(self.choice[p] for p in self.profiles()))

    def profiles(self) -> Iterable[tuple[str, ...]]:
        return itertools.product(*(self.actions[a] for a in self.deciders))


@dataclass(frozen=True)
class LeafNode:
    id: str
    label: Outcome


Node = Union[DecisionNode, LeafNode]


@dataclass(frozen=True)
class Mechanism:
    """A validated mechanism.  Treat as immutable.

    ``nodes`` is ordered in preorder from the root.  ``indist`` holds only
    the non-singleton classes of each agent, every class listed in preorder
    and the classes ordered by their first member.
    """

    agents: tuple[str, ...]
    root: str
    nodes: Mapping[str, Node]
    indist: Mapping[str, tuple[tuple[str, ...], ...]] = field(default_factory=dict)
    name: str = ""

    # -- basic lookups -----------------------------------------------------

    def node(self, v: str) -> Node:
        try:
            return self.nodes[v]
        except KeyError:
            raise UnknownNode(f"unknown node {v!r}") from None

    def decision(self, v: str) -> DecisionNode:
        n = self.node(v)
        if not isinstance(n, DecisionNode):
            raise NotDecisionNode(f"{v} is a leaf")
        return n

    def is_leaf(self, v: str) -> bool:
        return isinstance(self.node(v), LeafNode)

    def label(self, v: str) -> Outcome:
        n = self.node(v)
        if not isinstance(n, LeafNode):
            raise NotDecisionNode(f"{v} is not a leaf")
        return n.label

    def check_agent(self, a: str) -> None:
        if a not in self._agent_index:
            raise UnknownAgent(f"unknown agent {a!r}; agents are {', '.join(self.agents)}")

    @cached_property
    def _agent_index(self) -> dict[str, int]:
        return {a: i for i, a in enumerate(self.agents)}

    @cached_property
    def index(self) -> dict[str, int]:
        """Preorder index of every node."""
        return {v: i for i, v in enumerate(self.nodes)}

    @cached_property
    def leaves(self) -> tuple[str, ...]:
        return tuple(v for v, n in self.nodes.items() if isinstance(n, LeafNode))

    @cached_property
    def decision_nodes(self) -> tuple[str, ...]:
        return tuple(v for v, n in self.nodes.items() if isinstance(n, DecisionNode))

    @cached_property
    def parents(self) -> dict[str, str]:
        out = {}
        for v, n in self.nodes.items():
            if isinstance(n, DecisionNode):
                for c in n.children:
                    out[c] = v
        return out

    # -- tree and epistemic accessors ------------------------------------

    def children(self, v: str) -> frozenset[str]:
        n = self.node(v)
        if isinstance(n, LeafNode):
            return frozenset()
        return frozenset(n.children)

    def actions(self, a: str, v: str) -> tuple[str, ...]:
        """The action list of agent ``a`` at decision node ``v``."""
        self.check_agent(a)
        n = self.decision(v)
        return n.actions.get(a, (IDLE,))

    def next(self, a: str, d: str, v: str) -> frozenset[str]:
        """Children reachable from ``v`` when ``a`` plays ``d``."""
        self.check_agent(a)
        n = self.decision(v)
        if a not in n.actions:
            if d != IDLE:
                raise UnknownAction(f"{a} has only {IDLE!r} at {v}, got {d!r}")
            return frozenset(n.children)
        if d not in n.actions[a]:
            raise UnknownAction(f"{d!r} is not an action of {a} at {v}")
        pos = n.deciders.index(a)
        return frozenset(t for p, t in n.choice.items() if p[pos] == d)

    def next_of_class(self, a: str, d: str, nodes: Iterable[str]) -> frozenset[str]:
        nodes = list(nodes)
        if not nodes:
            return frozenset()
        first = self.actions(a, nodes[0])
        out: set[str] = set()
        for u in nodes:
            if self.actions(a, u) != first:
                raise UnknownAction(f"action lists of {a} differ between {nodes[0]} and {u}")
            out |= self.next(a, d, u)
        return frozenset(out)

    def decision_path(self, v: str) -> list[str]:
        self.node(v)
        path = [v]
        parents = self.parents
        while path[-1] in parents:
            path.append(parents[path[-1]])
        path.reverse()
        return path

    @cached_property
    def _class_lookup(self) -> dict[str, dict[str, tuple[str, ...]]]:
        out: dict[str, dict[str, tuple[str, ...]]] = {a: {} for a in self.agents}
        for a, classes in self.indist.items():
            for cls in classes:
                for v in cls:
                    out[a][v] = cls
        return out

    def equivalence_class(self, a: str, v: str) -> frozenset[str]:
        self.check_agent(a)
        self.decision(v)
        return frozenset(self._class_lookup[a].get(v, (v,)))

    def classes(self, a: str) -> list[tuple[str, ...]]:
        """Full partition of decision nodes for ``a`` (singletons included)."""
        self.check_agent(a)
        seen: set[str] = set()
        out = []
        lookup = self._class_lookup[a]
        for v in self.decision_nodes:
            if v in seen:
                continue
            cls = lookup.get(v, (v,))
            seen.update(cls)
            out.append(cls)
        return out

    @property
    def is_perfect_information(self) -> bool:
        return not any(self.indist.values())

    # -- derived forms -------------------------------------------------

    @cached_property
    def compiled(self) -> "CompiledMechanism":
        from ._compiled import compile_mechanism

        return compile_mechanism(self)

    @cached_property
    def cache(self) -> dict:
        """Memo for derived analyses (strategy sets etc.)."""
        return {}

    def without_partitions(self) -> "Mechanism":
        return Mechanism(self.agents, self.root, self.nodes, {}, self.name)

    @classmethod
    def from_text(cls, text: str) -> "Mechanism":
        from .text import parse

        return validate(parse(text))

    def to_text(self) -> str:
        from .text import serialize, to_document

        return serialize(to_document(self))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Mechanism):
            return NotImplemented
        return (
            self.agents == other.agents
            and self.root == other.root
            and self.name == other.name
            and list(self.nodes.items()) == list(other.nodes.items())
            and {a: c for a, c in self.indist.items() if c}
            == {a: c for a, c in other.indist.items() if c}
        )

    __hash__ = None  # type: ignore[assignment]


# ---------------------------------------------------------------------------
# validation


def _preorder(root: str, decisions: Mapping[str, DecisionNode]) -> list[str]:
    order = []
    stack = [root]
    while stack:
        v = stack.pop()
        order.append(v)
        if v in decisions:
            stack.extend(reversed(decisions[v].children))
    return order


def canonical_indist(
    indist: Mapping[str, Iterable[Iterable[str]]], order: Mapping[str, int]
) -> dict[str, tuple[tuple[str, ...], ...]]:
    out = {}
    for a, classes in indist.items():
        cells = [tuple(sorted(set(c), key=order.__getitem__)) for c in classes]
        cells = sorted((c for c in cells if len(c) > 1), key=lambda c: order[c[0]])
        if cells:
            out[a] = tuple(cells)
    return out


def validate(doc: "MechanismDocument") -> Mechanism:
    """Check every structural invariant of ``doc`` and build a Mechanism.

    Raises :class:`MechanismError` carrying the complete list of violations.
    """
    issues: list[Issue] = []
    agents = list(doc.agents)
    if not agents:
        issues.append(Issue("NoAgents", "at least one agent must be declared"))
    for a, k in _duplicates(agents):
        issues.append(Issue("DuplicateId", f"agent declared {k} times", agent=a))
    agent_set = set(agents)

    ids = [d.id for d in doc.decisions] + [leaf.id for leaf in doc.leaves]
    for v, k in _duplicates(ids):
        issues.append(Issue("DuplicateId", f"node declared {k} times", node=v))
    declared = set(ids)
    leaf_ids = {leaf.id for leaf in doc.leaves}

    decisions: dict[str, DecisionNode] = {}
    for d in doc.decisions:
        node_issues = _check_decision(d, agent_set, declared)
        issues.extend(node_issues)
        if d.id not in decisions:
            decisions[d.id] = DecisionNode(
                d.id,
                tuple(d.deciders),
                {a: tuple(d.actions.get(a, ())) for a in d.deciders},
                {tuple(p): t for p, t in d.choice},
            )

    if doc.root is None or doc.root not in declared:
        issues.append(Issue("UnknownReference", "root is not a declared node", node=doc.root))

    # tree shape: edges are the distinct choice targets
    parent_count: dict[str, int] = {v: 0 for v in declared}
    for d in doc.decisions:
        for t in dict.fromkeys(t for _, t in d.choice):
            if t in parent_count:
                parent_count[t] += 1
    for v in sorted(declared):
        k = parent_count[v]
        if v == doc.root and k:
            issues.append(Issue("NonTree", "root has a parent", node=v))
        elif v != doc.root and k > 1:
            issues.append(Issue("NonTree", f"node has {k} parents", node=v))
    reachable: set[str] = set()
    choice_of = {d.id: d.choice for d in doc.decisions}
    if doc.root in declared:
        stack = [doc.root]
        while stack:
            v = stack.pop()
            if v in reachable:
                continue
            reachable.add(v)
            if v in decisions:
                stack.extend(t for _, t in choice_of[v] if t in declared)
    for v in sorted(declared - reachable):
        if doc.root in declared:
            issues.append(Issue("NonTree", "node is unreachable from the root", node=v))

    # indistinguishability partitions
    seen_in: dict[tuple[str, str], int] = {}
    for cls_decl in doc.indist:
        a = cls_decl.agent
        if a not in agent_set:
            issues.append(Issue("UnknownReference", "indist names an unknown agent", agent=a))
            continue
        members = list(cls_decl.nodes)
        for v in members:
            if v not in declared:
                issues.append(Issue("UnknownReference", "indist names an unknown node", node=v, agent=a))
            elif v in leaf_ids:
                issues.append(Issue("MixedClass", "leaf in an indistinguishability class", node=v, agent=a))
            if (a, v) in seen_in:
                issues.append(Issue("OverlappingClasses", "node appears in two classes", node=v, agent=a))
            seen_in[(a, v)] = 1
        ref = None
        for v in members:
            if v not in decisions:
                continue
            acts = decisions[v].actions.get(a, (IDLE,))
            if ref is None:
                ref = (v, acts)
            elif acts != ref[1]:
                issues.append(
                    Issue(
                        "ActionMismatch",
                        f"actions {list(acts)} differ from {list(ref[1])} at {ref[0]}",
                        node=v,
                        agent=a,
                    )
                )

    if issues:
        raise MechanismError(issues)

    order = _preorder(doc.root, decisions)
    nodes: dict[str, Node] = {}
    labels = {leaf.id: leaf.label for leaf in doc.leaves}
    for v in order:
        nodes[v] = decisions[v] if v in decisions else LeafNode(v, Outcome.parse(labels[v]))
    idx = {v: i for i, v in enumerate(order)}
    grouped: dict[str, list[tuple[str, ...]]] = {}
    for c in doc.indist:
        grouped.setdefault(c.agent, []).append(tuple(c.nodes))
    return Mechanism(tuple(agents), doc.root, nodes, canonical_indist(grouped, idx), doc.name or "")


def _duplicates(items):
    counts: dict = {}
    for x in items:
        counts[x] = counts.get(x, 0) + 1
    return [(x, k) for x, k in counts.items() if k > 1]


def _check_decision(d, agents: set[str], declared: set[str]) -> list[Issue]:
    issues = []
    if not d.deciders:
        issues.append(Issue("EmptyActionSet", "decision node has no deciders", node=d.id))
    for a, k in _duplicates(d.deciders):
        issues.append(Issue("DuplicateId", f"decider listed {k} times", node=d.id, agent=a))
    for a in d.deciders:
        if a not in agents:
            issues.append(Issue("UnknownReference", "decider is not a declared agent", node=d.id, agent=a))
        acts = d.actions.get(a)
        if not acts:
            issues.append(Issue("EmptyActionSet", "decider has no actions", node=d.id, agent=a))
        else:
            for x, k in _duplicates(acts):
                issues.append(Issue("DuplicateId", f"action {x!r} listed {k} times", node=d.id, agent=a))
    for a in d.actions:
        if a not in d.deciders:
            issues.append(Issue("UnknownReference", "actions given for a non-decider", node=d.id, agent=a))

    table: dict[tuple[str, ...], str] = {}
    for profile, target in d.choice:
        profile = tuple(profile)
        if len(profile) != len(d.deciders):
            issues.append(
                Issue("InvalidMapEntry", f"tuple {list(profile)} does not match deciders {list(d.deciders)}", node=d.id)
            )
            continue
        bad = [x for a, x in zip(d.deciders, profile) if x not in d.actions.get(a, ())]
        if bad:
            issues.append(Issue("InvalidMapEntry", f"unknown action(s) {bad} in {list(profile)}", node=d.id))
            continue
        if profile in table and table[profile] != target:
            issues.append(Issue("InvalidMapEntry", f"tuple {list(profile)} mapped twice", node=d.id))
        table[profile] = target
        if target not in declared:
            issues.append(Issue("UnlabeledLeaf", f"target {target} is never declared", node=target))
    if all(d.actions.get(a) for a in d.deciders) and d.deciders:
        missing = [p for p in itertools.product(*(d.actions[a] for a in d.deciders)) if p not in table]
        if missing:
            shown = ", ".join("[" + ",".join(p) + "]" for p in missing[:4])
            more = "" if len(missing) <= 4 else f" and {len(missing) - 4} more"
            issues.append(Issue("PartialChoiceFunction", f"no target for {shown}{more}", node=d.id))
    return issues
