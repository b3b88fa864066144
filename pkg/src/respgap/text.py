"""The line-oriented mechanism text format, and DOT export.

Example::

    mechanism "two-person-rule"
    agents: P, A, B
    root: u1
    decision u1
      deciders: P
      actions: P = [Left, Right]
      map: [Left] -> v1 ; [Right] -> u2
    leaf v1 = No
    indist B: {u2, u3}

``#`` starts a comment.  Lines inside a decision block may be indented
freely; a block ends at the next top-level declaration.  Semantic checks
(totality, tree shape, partitions) belong to :func:`respgap.validate`.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field

from .errors import ParseError, SyntaxIssue
from .mechanism import DecisionNode, Mechanism

TOKEN = r"[A-Za-z0-9_][A-Za-z0-9_-]*"
_TOKEN_RE = re.compile(rf"^{TOKEN}$")
_NAME_RE = re.compile(r'^mechanism\s+"((?:[^"\\]|\\.)*)"$')
_DECISION_RE = re.compile(rf"^decision\s+({TOKEN})$")
_LEAF_RE = re.compile(rf"^leaf\s+({TOKEN})\s*=\s*(\S+)$")
_INDIST_RE = re.compile(rf"^indist\s+({TOKEN})\s*:\s*\{{(.*)\}}$")
_KEY_RE = re.compile(r"^(agents|root|deciders|actions|map)\s*:(.*)$")
_ACTIONS_ITEM_RE = re.compile(rf"^({TOKEN})\s*=\s*\[(.*)\]$")
_MAP_ITEM_RE = re.compile(rf"^\[(.*)\]\s*->\s*({TOKEN})$")


@dataclass
class DecisionDecl:
    id: str
    deciders: list[str] = field(default_factory=list)
    actions: dict[str, list[str]] = field(default_factory=dict)
    choice: list[tuple[tuple[str, ...], str]] = field(default_factory=list)
    line: int = field(default=0, compare=False)


@dataclass
class LeafDecl:
    id: str
    label: str
    line: int = field(default=0, compare=False)


@dataclass
class IndistDecl:
    agent: str
    nodes: list[str]
    line: int = field(default=0, compare=False)


@dataclass
class MechanismDocument:
    name: str = ""
    agents: list[str] = field(default_factory=list)
    root: str | None = None
    decisions: list[DecisionDecl] = field(default_factory=list)
    leaves: list[LeafDecl] = field(default_factory=list)
    indist: list[IndistDecl] = field(default_factory=list)


def _token_list(body: str, lineno: int, what: str, errors: list[SyntaxIssue]) -> list[str]:
    body = body.strip()
    if not body:
        return []
    items = [x.strip() for x in body.split(",")]
    for x in items:
        if not _TOKEN_RE.match(x):
            errors.append(SyntaxIssue(lineno, f"expected {what} identifier, got {x!r}"))
    return [x for x in items if _TOKEN_RE.match(x)]


def _strip_comment(raw: str) -> str:
    out, quoted = [], False
    for ch in raw:
        if ch == '"':
            quoted = not quoted
        if ch == "#" and not quoted:
            break
        out.append(ch)
    return "".join(out).strip()


def parse(text: str) -> MechanismDocument:
    """Parse mechanism text; raises :class:`ParseError` listing every syntax error."""
    doc = MechanismDocument()
    errors: list[SyntaxIssue] = []
    current: DecisionDecl | None = None
    block_keys: set[str] = set()
    seen_nodes: dict[str, int] = {}
    seen_top: dict[str, int] = {}

    def close_block(lineno: int) -> None:
        nonlocal current
        if current is not None:
            for key in ("deciders", "actions", "map"):
                if key not in block_keys:
                    errors.append(SyntaxIssue(current.line, f"decision {current.id}: expected '{key}:' line"))
        current = None
        block_keys.clear()

    def declare_node(v: str, lineno: int) -> None:
        if v in seen_nodes:
            errors.append(SyntaxIssue(lineno, f"duplicate declaration of node {v} (first on line {seen_nodes[v]})"))
        else:
            seen_nodes[v] = lineno

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line:
            continue
        if m := _NAME_RE.match(line):
            close_block(lineno)
            if "mechanism" in seen_top:
                errors.append(SyntaxIssue(lineno, "duplicate mechanism declaration"))
            seen_top["mechanism"] = lineno
            doc.name = re.sub(r"\\(.)", r"\1", m.group(1))
            continue
        if m := _DECISION_RE.match(line):
            close_block(lineno)
            declare_node(m.group(1), lineno)
            current = DecisionDecl(m.group(1), line=lineno)
            doc.decisions.append(current)
            continue
        if m := _LEAF_RE.match(line):
            close_block(lineno)
            declare_node(m.group(1), lineno)
            if m.group(2) not in ("Yes", "No"):
                errors.append(SyntaxIssue(lineno, f"expected Yes or No, got {m.group(2)!r}"))
            else:
                doc.leaves.append(LeafDecl(m.group(1), m.group(2), line=lineno))
            continue
        if m := _INDIST_RE.match(line):
            close_block(lineno)
            nodes = _token_list(m.group(2), lineno, "node", errors)
            if not nodes:
                errors.append(SyntaxIssue(lineno, "empty indistinguishability class"))
            doc.indist.append(IndistDecl(m.group(1), nodes, line=lineno))
            continue
        m = _KEY_RE.match(line)
        if m is None:
            errors.append(SyntaxIssue(lineno, f"unrecognised line {line!r}"))
            continue
        key, body = m.group(1), m.group(2).strip()
        if key in ("agents", "root"):
            close_block(lineno)
            if key in seen_top:
                errors.append(SyntaxIssue(lineno, f"duplicate '{key}:' declaration"))
            seen_top[key] = lineno
            if key == "agents":
                doc.agents = _token_list(body, lineno, "agent", errors)
                if not doc.agents:
                    errors.append(SyntaxIssue(lineno, "expected at least one agent"))
            elif _TOKEN_RE.match(body):
                doc.root = body
            else:
                errors.append(SyntaxIssue(lineno, f"expected node identifier, got {body!r}"))
            continue
        if current is None:
            errors.append(SyntaxIssue(lineno, f"'{key}:' outside a decision block"))
            continue
        if key == "deciders":
            if key in block_keys:
                errors.append(SyntaxIssue(lineno, "duplicate 'deciders:' line"))
            current.deciders = _token_list(body, lineno, "agent", errors)
            if not current.deciders:
                errors.append(SyntaxIssue(lineno, "expected at least one decider"))
        elif key == "actions":
            for item in filter(None, (x.strip() for x in body.split(";"))):
                im = _ACTIONS_ITEM_RE.match(item)
                if im is None:
                    errors.append(SyntaxIssue(lineno, f"expected '<agent> = [<act>, ...]', got {item!r}"))
                    continue
                if im.group(1) in current.actions:
                    errors.append(SyntaxIssue(lineno, f"duplicate action list for {im.group(1)}"))
                current.actions[im.group(1)] = _token_list(im.group(2), lineno, "action", errors)
        else:
            items = [x.strip() for x in body.split(";")]
            if not any(items):
                errors.append(SyntaxIssue(lineno, "expected at least one map entry"))
            for item in filter(None, items):
                im = _MAP_ITEM_RE.match(item)
                if im is None:
                    errors.append(SyntaxIssue(lineno, f"expected '[<act>, ...] -> <node>', got {item!r}"))
                    continue
                profile = tuple(_token_list(im.group(1), lineno, "action", errors))
                current.choice.append((profile, im.group(2)))
        block_keys.add(key)
    close_block(0)
    if "agents" not in seen_top:
        errors.append(SyntaxIssue(0, "missing 'agents:' declaration"))
    if "root" not in seen_top:
        errors.append(SyntaxIssue(0, "missing 'root:' declaration"))
    if errors:
        raise ParseError(sorted(errors, key=lambda e: e.line))
    return doc


def _preorder_ids(doc: MechanismDocument) -> list[str]:
    decisions = {d.id: d for d in doc.decisions}
    all_ids = [d.id for d in doc.decisions] + [leaf.id for leaf in doc.leaves]
    order: list[str] = []
    seen: set[str] = set()
    stack = [doc.root] if doc.root is not None else []
    while stack:
        v = stack.pop()
        if v in seen:
            continue
        seen.add(v)
        order.append(v)
        if v in decisions:
            d = decisions[v]
            table = dict(d.choice)
            kids = []
            for p in _profiles(d):
                if p in table and table[p] not in kids:
                    kids.append(table[p])
            for _, t in d.choice:
                if t not in kids:
                    kids.append(t)
            stack.extend(reversed(kids))
    order.extend(v for v in all_ids if v not in seen)
    return order


def _profiles(d: DecisionDecl):
    return itertools.product(*(d.actions.get(a, []) for a in d.deciders))


def serialize(doc: MechanismDocument) -> str:
    """Canonical text: nodes in preorder, map entries in action order."""
    lines = []
    if doc.name:
        escaped = doc.name.replace("\\", "\\\\").replace('"', '\\"')
        lines.append(f'mechanism "{escaped}"')
    lines.append("agents: " + ", ".join(doc.agents))
    lines.append(f"root: {doc.root}")
    decisions = {d.id: d for d in doc.decisions}
    leaves = {leaf.id: leaf for leaf in doc.leaves}
    for v in _preorder_ids(doc):
        if v in decisions:
            d = decisions[v]
            lines.append(f"decision {v}")
            lines.append("  deciders: " + ", ".join(d.deciders))
            lines.append(
                "  actions: " + " ; ".join(f"{a} = [{', '.join(d.actions.get(a, []))}]" for a in d.deciders)
            )
            table = dict(d.choice)
            ordered = [(p, table[p]) for p in _profiles(d) if p in table]
            ordered += [(p, t) for p, t in d.choice if (p, t) not in ordered]
            lines.append("  map: " + " ; ".join(f"[{','.join(p)}] -> {t}" for p, t in ordered))
        elif v in leaves:
            lines.append(f"leaf {v} = {leaves[v].label}")
    for c in doc.indist:
        lines.append(f"indist {c.agent}: {{{', '.join(c.nodes)}}}")
    return "\n".join(lines) + "\n"


def to_document(m: Mechanism) -> MechanismDocument:
    doc = MechanismDocument(name=m.name, agents=list(m.agents), root=m.root)
    for v, node in m.nodes.items():
        if isinstance(node, DecisionNode):
            doc.decisions.append(
                DecisionDecl(
                    v,
                    list(node.deciders),
                    {a: list(node.actions[a]) for a in node.deciders},
                    [(p, node.choice[p]) for p in node.profiles()],
                )
            )
        else:
            doc.leaves.append(LeafDecl(v, node.label.value))
    for a in m.agents:
        for cls in m.indist.get(a, ()):
            doc.indist.append(IndistDecl(a, list(cls)))
    return doc


def export_dot(m: Mechanism) -> str:
    """Graphviz source: circles for decision nodes, boxes for leaves.

    Tree edges carry the decider-action tuples that select them; each
    indistinguishability class is drawn as a chain of dashed undirected
    edges labelled with the agent.
    """
    name = (m.name or "mechanism").replace('"', '\\"')
    out = [f'digraph "{name}" {{']
    for v, node in m.nodes.items():
        if isinstance(node, DecisionNode):
            out.append(f'  "{v}" [shape=circle, label="{v}"];')
        else:
            out.append(f'  "{v}" [shape=box, label="{v}\\n{node.label.value}"];')
    for v, node in m.nodes.items():
        if not isinstance(node, DecisionNode):
            continue
        by_child: dict[str, list[str]] = {}
        for p in node.profiles():
            t = node.choice[p]
            by_child.setdefault(t, []).append(p[0] if len(p) == 1 else "(" + ",".join(p) + ")")
        for c in node.children:
            out.append(f'  "{v}" -> "{c}" [label="{" ".join(by_child[c])}"];')
    for a in m.agents:
        for cls in m.indist.get(a, ()):
            for x, y in zip(cls, cls[1:]):
                out.append(f'  "{x}" -> "{y}" [dir=none, style=dashed, constraint=false, label="{a}"];')
    out.append("}")
    return "\n".join(out) + "\n"
