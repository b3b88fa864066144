"""Exhaustive and seeded enumeration of small mechanisms.

Exhaustive mode works in two layers.  First, canonical tree *shapes*: a
shape is a nested tuple fixing deciders, action counts, the choice pattern
and leaf labels, reduced to a canonical form under action renaming and
child reordering, so isomorphic trees appear once.  Second, each shape is
expanded into partition variants (see :class:`EnumerationConfig`).

Leaf shape: ``(0, label)``.  Decision shape:
``(1, deciders, nacts, pattern, children)`` where ``pattern[p]`` is the
child index hit by the ``p``-th profile in product order and children are
numbered by first occurrence.

Nodes of a built mechanism are named by preorder index (``u3`` for a
decision node, ``v4`` for a leaf), agents ``A``, ``B``, ... and actions
``a0``, ``a1``, ...
"""

from __future__ import annotations

import itertools
import math
import random
import string
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

from .errors import BudgetExceeded
from .mechanism import DecisionNode, LeafNode, Mechanism, Outcome

PARTITION_MODES = ("perfect-only", "exhaustive-partitions", "sampled-partitions")
MODES = ("exhaustive", "sampled")
DEFAULT_CAP = 10**7
_MAX_REDRAWS = 1000


@dataclass(frozen=True)
class EnumerationConfig:
    max_depth: int = 2
    max_children: int = 2
    agent_count: int = 2
    max_actions: int = 2
    partition_mode: str = "perfect-only"
    mode: str = "exhaustive"
    sample_count: int = 0
    seed: int = 0
    max_decision_nodes: int | None = None
    cap: int = DEFAULT_CAP

    def __post_init__(self) -> None:
        if self.max_depth < 0:
            raise ValueError("max_depth must be >= 0")
        if self.max_children < 1:
            raise ValueError("max_children must be >= 1")
        if not 1 <= self.agent_count <= 26:
            raise ValueError("agent_count must be between 1 and 26")
        if self.max_actions < 1:
            raise ValueError("max_actions must be >= 1")
        if self.partition_mode not in PARTITION_MODES:
            raise ValueError(f"partition_mode must be one of {PARTITION_MODES}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.mode == "sampled" and self.sample_count < 1:
            raise ValueError("sampled mode needs sample_count >= 1")
        if self.max_decision_nodes is not None and self.max_decision_nodes < 0:
            raise ValueError("max_decision_nodes must be >= 0")
        if not -(2**63) <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")

    @property
    def agents(self) -> tuple[str, ...]:
        return tuple(string.ascii_uppercase[: self.agent_count])


# -- canonical shapes ------------------------------------------------------


def _rgs(n: int, k: int) -> Iterator[tuple[int, ...]]:
    """Restricted growth strings of length n using exactly k symbols."""

    def rec(prefix: list[int], top: int) -> Iterator[tuple[int, ...]]:
        if len(prefix) == n:
            if top == k:
                yield tuple(prefix)
            return
        if k - top > n - len(prefix):
            return
        for s in range(min(top + 1, k)):
            prefix.append(s)
            yield from rec(prefix, max(top, s + 1))
            prefix.pop()

    yield from rec([], 0)


@lru_cache(maxsize=None)
def _profile_perms(nacts: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
    """Each per-decider action renaming, as a permutation of profile indices."""
    profiles = list(itertools.product(*(range(n) for n in nacts)))
    pos = {p: i for i, p in enumerate(profiles)}
    out = []
    for perms in itertools.product(*(itertools.permutations(range(n)) for n in nacts)):
        out.append(tuple(pos[tuple(pi[x] for pi, x in zip(perms, p))] for p in profiles))
    return tuple(out)


def _normalise(pattern: Sequence[int], children: Sequence[tuple]) -> tuple[tuple[int, ...], tuple]:
    relabel: dict[int, int] = {}
    for c in pattern:
        if c not in relabel:
            relabel[c] = len(relabel)
    order = sorted(relabel, key=relabel.__getitem__)
    return tuple(relabel[c] for c in pattern), tuple(children[c] for c in order)


def _canonical_node(deciders: tuple[int, ...], nacts: tuple[int, ...], pattern, children) -> tuple:
    best = None
    for perm in _profile_perms(nacts):
        permuted = [0] * len(pattern)
        for p, q in enumerate(perm):
            permuted[q] = pattern[p]
        cand = _normalise(permuted, children)
        if best is None or cand < best:
            best = cand
    return (1, deciders, nacts, best[0], best[1])


@lru_cache(maxsize=None)
def decision_count(shape: tuple) -> int:
    if shape[0] == 0:
        return 0
    return 1 + sum(decision_count(c) for c in shape[4])


def _node_kinds(config: EnumerationConfig):
    """(deciders, nacts, patterns grouped by child count) for every node template."""
    kinds = []
    for r in range(1, config.agent_count + 1):
        for deciders in itertools.combinations(range(config.agent_count), r):
            for nacts in itertools.product(range(1, config.max_actions + 1), repeat=r):
                n_prof = math.prod(nacts)
                by_k = {k: list(_rgs(n_prof, k)) for k in range(1, min(config.max_children, n_prof) + 1)}
                kinds.append((deciders, nacts, by_k))
    return kinds


def shapes(config: EnumerationConfig) -> list[tuple]:
    """All canonical shapes within the bounds, in a fixed sorted order."""
    return list(_shapes(config.max_depth, config.max_children, config.agent_count,
                        config.max_actions, config.max_decision_nodes, config.cap))


@lru_cache(maxsize=8)
def _shapes(depth, max_children, agent_count, max_actions, max_dec, cap) -> tuple[tuple, ...]:
    config = EnumerationConfig(max_depth=depth, max_children=max_children, agent_count=agent_count,
                               max_actions=max_actions, max_decision_nodes=max_dec, cap=cap)
    leaves = [(0, 0), (0, 1)]
    level: list[tuple] = list(leaves)
    kinds = _node_kinds(config)
    budget = max_dec if max_dec is not None else math.inf
    for _ in range(depth):
        found: set[tuple] = set(leaves)
        by_count: dict[int, list[tuple]] = {}
        for s in level:
            by_count.setdefault(decision_count(s), []).append(s)
        if budget >= 1:
            for deciders, nacts, by_k in kinds:
                for k, patterns in by_k.items():
                    for counts in itertools.product(sorted(by_count), repeat=k):
                        if 1 + sum(counts) > budget:
                            continue
                        for kids in itertools.product(*(by_count[c] for c in counts)):
                            for pattern in patterns:
                                found.add(_canonical_node(deciders, nacts, pattern, kids))
                        if len(found) > cap:
                            raise BudgetExceeded(f"more than {cap} tree shapes", len(found))
        level = sorted(found)
    return tuple(level)


# -- flat trees and partition variants --------------------------------------


@dataclass(frozen=True)
class _Flat:
    """A shape unrolled in its own preorder."""

    kind: tuple[int, ...]  # 0 leaf, 1 decision
    label: tuple[int, ...]  # leaves only
    deciders: tuple[tuple[int, ...], ...]
    nacts: tuple[tuple[int, ...], ...]
    pattern: tuple[tuple[int, ...], ...]
    kids: tuple[tuple[int, ...], ...]  # flat indices


@lru_cache(maxsize=65536)
def flatten(shape: tuple) -> _Flat:
    kind, label, deciders, nacts, pattern, kids = [], [], [], [], [], []

    def visit(s) -> int:
        i = len(kind)
        kind.append(s[0])
        label.append(s[1] if s[0] == 0 else -1)
        deciders.append(s[1] if s[0] else ())
        nacts.append(s[2] if s[0] else ())
        pattern.append(s[3] if s[0] else ())
        kids.append(())
        if s[0]:
            kids[i] = tuple(visit(c) for c in s[4])
        return i

    visit(shape)
    return _Flat(tuple(kind), tuple(label), tuple(deciders), tuple(nacts), tuple(pattern), tuple(kids))


def _action_count(flat: _Flat, v: int, agent: int) -> int:
    """Actions of ``agent`` at node ``v``; 0 stands for idle."""
    ds = flat.deciders[v]
    return flat.nacts[v][ds.index(agent)] if agent in ds else 0


def _groups(flat: _Flat, agent: int) -> list[tuple[int, list[int]]]:
    """Decision nodes grouped by the agent's action list, as (count, nodes)."""
    groups: dict[int, list[int]] = {}
    for v, k in enumerate(flat.kind):
        if k:
            groups.setdefault(_action_count(flat, v, agent), []).append(v)
    return sorted(groups.items())


def _set_partitions(items: list[int]) -> Iterator[list[list[int]]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


# A variant: per agent, a tuple of non-singleton classes (flat indices), and
# a tuple of (node, agent, permutation) action renamings.
Variant = tuple[tuple[tuple[tuple[int, ...], ...], ...], tuple[tuple[int, int, tuple[int, ...]], ...]]
_PLAIN: Variant = ((), ())


def _agent_options(flat: _Flat, agent: int) -> list[tuple[tuple[tuple[int, ...], ...], list[tuple[int, int, tuple[int, ...]]]]]:
    """Every partition of ``agent`` with every alignment of classmates' actions.

    Within a class the first member keeps its action names; each later
    member may rename the agent's actions by any permutation.  Without
    this, mechanisms whose classmates disagree on which action leads where
    would be lost to canonicalisation.
    """
    per_group = []
    for n, nodes in _groups(flat, agent):
        opts = []
        for part in _set_partitions(nodes):
            cells = [tuple(sorted(c)) for c in part if len(c) > 1]
            movable = [v for c in cells for v in c[1:]] if n > 1 else []
            perms = list(itertools.permutations(range(n)))
            for choice in itertools.product(perms, repeat=len(movable)):
                renames = [(v, agent, p) for v, p in zip(movable, choice) if p != tuple(range(n))]
                opts.append((cells, renames))
        per_group.append(opts)
    out = []
    for combo in itertools.product(*per_group):
        cells = tuple(sorted(c for cs, _ in combo for c in cs))
        renames = [r for _, rs in combo for r in rs]
        out.append((cells, renames))
    return out


def _variants(flat: _Flat, config: EnumerationConfig) -> Iterator[Variant]:
    per_agent = [_agent_options(flat, a) for a in range(config.agent_count)]
    seen: set = set()
    for combo in itertools.product(*per_agent):
        partition = tuple(cells for cells, _ in combo)
        renames = tuple(sorted(r for _, rs in combo for r in rs))
        key = _canonical_key(flat, (partition, renames))
        if key in seen:
            continue
        seen.add(key)
        yield partition, renames


@lru_cache(maxsize=None)
def _perm_group(n: int) -> tuple[tuple[tuple[int, ...], ...], dict, tuple[tuple[int, ...], ...], tuple[int, ...]]:
    """Permutations of range(n), their ids, a product table and inverses."""
    perms = tuple(itertools.permutations(range(n)))
    ids = {p: i for i, p in enumerate(perms)}
    # mul[i][j] = id of "apply perms[j], then perms[i]"
    mul = tuple(tuple(ids[tuple(perms[i][x] for x in perms[j])] for j in range(len(perms))) for i in range(len(perms)))
    inv = tuple(ids[tuple(sorted(range(n), key=p.__getitem__))] for p in perms)
    return perms, ids, mul, inv


@dataclass(frozen=True)
class _Relabelings:
    """Every per-(node, decider) action renaming of a flat tree, with its layout.

    ``table`` is sorted by record sequence, so the first entry consistent
    with a variant's classes gives the canonical records.
    """

    slots: tuple[tuple[int, int, int], ...]  # (node, agent, action count)
    table: tuple[tuple[tuple, tuple[int, ...], dict], ...]  # (records, perm ids, positions)


@lru_cache(maxsize=4096)
def _relabelings(flat: _Flat) -> _Relabelings:
    slots = tuple((v, a, n) for v, k in enumerate(flat.kind) if k
                  for a, n in zip(flat.deciders[v], flat.nacts[v]) if n > 1)
    choices = [range(len(_perm_group(n)[0])) for _, _, n in slots]
    table = []
    for h in itertools.product(*choices):
        renames = [(v, a, _perm_group(n)[0][i]) for (v, a, n), i in zip(slots, h)]
        records, pos = _layout(flat, _patterns(flat, renames))
        table.append((records, h, pos))
    table.sort(key=lambda row: (row[0], row[1]))
    return _Relabelings(slots, tuple(table))


def _layout(flat: _Flat, patterns) -> tuple[tuple, dict[int, int]]:
    """Preorder records and positions of what :func:`build` would produce."""
    order: list[int] = []
    stack = [0]
    while stack:
        v = stack.pop()
        order.append(v)
        if flat.kind[v]:
            first = tuple(dict.fromkeys(patterns[v]))
            stack.extend(flat.kids[v][c] for c in reversed(first))
    records = tuple(
        (1, flat.deciders[v], flat.nacts[v], _normalise(patterns[v], patterns[v])[0]) if flat.kind[v]
        else (0, flat.label[v])
        for v in order
    )
    return records, {v: i for i, v in enumerate(order)}


def _canonical_key(flat: _Flat, variant: Variant) -> tuple:
    """Equal for two variants exactly when the built mechanisms are isomorphic.

    An isomorphism may rename an agent's actions, but must rename them the
    same way at every member of one of its classes.  The variant's own
    renamings ``r`` are folded in: a table entry ``h`` is reachable when
    ``h * r^-1`` is constant on each class.
    """
    partition, renames = variant
    rel = _relabelings(flat)
    slot_of = {(v, a): i for i, (v, a, _) in enumerate(rel.slots)}
    r = [0] * len(rel.slots)
    for v, a, p in renames:
        r[slot_of[v, a]] = _perm_group(len(p))[1][p]
    tied = []  # groups of slot indices that must share h * r^-1
    for a, cells in enumerate(partition):
        for c in cells:
            group = [slot_of[v, a] for v in c if (v, a) in slot_of]
            if len(group) > 1:
                tied.append((rel.slots[group[0]][2], group))
    best = None
    for records, h, pos in rel.table:
        if best is not None and records > best[0]:
            break
        ok = True
        for n, group in tied:
            _, _, mul, inv = _perm_group(n)
            want = mul[h[group[0]]][inv[r[group[0]]]]
            if any(mul[h[s]][inv[r[s]]] != want for s in group[1:]):
                ok = False
                break
        if not ok:
            continue
        cells = tuple(tuple(sorted(tuple(sorted(pos[x] for x in c)) for c in agent)) for agent in partition)
        if best is None or cells < best[1]:
            best = (records, cells)
    return best


def _patterns(flat: _Flat, renames) -> tuple[tuple[int, ...], ...]:
    """Choice patterns after applying action renamings."""
    if not renames:
        return flat.pattern
    by_node: dict[int, dict[int, tuple[int, ...]]] = {}
    for v, a, p in renames:
        by_node.setdefault(v, {})[a] = p
    out = list(flat.pattern)
    for v, perms in by_node.items():
        ds, nacts = flat.deciders[v], flat.nacts[v]
        profiles = list(itertools.product(*(range(n) for n in nacts)))
        pos = {p: i for i, p in enumerate(profiles)}
        new = [0] * len(profiles)
        for i, prof in enumerate(profiles):
            moved = tuple(perms[d][x] if d in perms else x for d, x in zip(ds, prof))
            new[pos[moved]] = flat.pattern[v][i]
        out[v] = tuple(new)
    return tuple(out)


def _variant_count(flat: _Flat, config: EnumerationConfig) -> int:
    """Upper bound on the number of variants (before duplicate removal)."""
    total = 1
    for a in range(config.agent_count):
        per_agent = 1
        for n, nodes in _groups(flat, a):
            w = math.factorial(n) if n > 1 else 1
            per_agent *= _weighted_bell(len(nodes), w)
        total *= per_agent
    return total


@lru_cache(maxsize=None)
def _weighted_bell(g: int, w: int) -> int:
    # sum over set partitions of g items of prod over blocks of w^(|block|-1)
    if g == 0:
        return 1
    return sum(math.comb(g - 1, j) * w**j * _weighted_bell(g - 1 - j, w) for j in range(g))


def _random_partition(flat: _Flat, config: EnumerationConfig, rng: random.Random) -> Variant:
    partition = []
    renames = []
    for a in range(config.agent_count):
        cells = []
        for n, nodes in _groups(flat, a):
            blocks: list[list[int]] = []
            for v in nodes:
                j = rng.randrange(len(blocks) + 1)
                if j == len(blocks):
                    blocks.append([v])
                else:
                    blocks[j].append(v)
            for b in blocks:
                if len(b) > 1:
                    cells.append(tuple(b))
                    if n > 1:
                        for v in b[1:]:
                            p = list(range(n))
                            rng.shuffle(p)
                            if p != sorted(p):
                                renames.append((v, a, tuple(p)))
        partition.append(tuple(sorted(cells)))
    return tuple(partition), tuple(sorted(renames))


# -- building mechanisms -----------------------------------------------------


def build(flat: _Flat, variant: Variant, config: EnumerationConfig, name: str = "") -> Mechanism:
    """Materialise a flat tree plus a partition variant as a Mechanism."""
    agents = config.agents
    partition, renames = variant
    patterns = _patterns(flat, renames)
    # true preorder: children in order of first use by the (renamed) pattern
    order: list[int] = []
    stack = [0]
    while stack:
        v = stack.pop()
        order.append(v)
        if flat.kind[v]:
            first = tuple(dict.fromkeys(patterns[v]))
            stack.extend(flat.kids[v][c] for c in reversed(first))
    ids = {}
    for i, v in enumerate(order):
        ids[v] = f"u{i}" if flat.kind[v] else f"v{i}"
    nodes = {}
    for v in order:
        vid = ids[v]
        if not flat.kind[v]:
            nodes[vid] = LeafNode(vid, Outcome.YES if flat.label[v] else Outcome.NO)
            continue
        ds = tuple(agents[d] for d in flat.deciders[v])
        acts = {a: tuple(f"a{j}" for j in range(n)) for a, n in zip(ds, flat.nacts[v])}
        profiles = itertools.product(*(acts[a] for a in ds))
        choice = {p: ids[flat.kids[v][c]] for p, c in zip(profiles, patterns[v])}
        nodes[vid] = DecisionNode(vid, ds, acts, choice)
    index = {ids[v]: i for i, v in enumerate(order)}
    indist = {}
    for a, cells in zip(agents, partition):
        if cells:
            canon = [tuple(sorted((ids[v] for v in c), key=index.__getitem__)) for c in cells]
            indist[a] = tuple(sorted(canon, key=lambda c: index[c[0]]))
    return Mechanism(agents, ids[0], nodes, indist, name)


# -- streams ---------------------------------------------------------------


def items(config: EnumerationConfig) -> Iterator[tuple[_Flat, Variant]]:
    """The raw enumeration stream: (flat tree, variant) pairs in a fixed order."""
    if config.mode == "sampled":
        for i in range(config.sample_count):
            rng = random.Random(f"{config.seed}:{i}")
            if config.partition_mode == "perfect-only":
                yield flatten(_random_shape(config, rng)), _PLAIN
                continue
            # redraw until some agent has a non-trivial class
            for _ in range(_MAX_REDRAWS):
                flat = flatten(_random_shape(config, rng))
                variant = _random_partition(flat, config, rng)
                if any(variant[0]):
                    break
            yield flat, variant
        return
    all_shapes = shapes(config)
    if config.partition_mode == "exhaustive-partitions":
        total = count_upper_bound(config)
        if total > config.cap:
            raise BudgetExceeded(f"enumeration would produce up to {total} mechanisms (cap {config.cap})", total)
    for i, s in enumerate(all_shapes):
        flat = flatten(s)
        if config.partition_mode == "perfect-only":
            yield flat, _PLAIN
        elif config.partition_mode == "sampled-partitions":
            yield flat, _random_partition(flat, config, random.Random(f"{config.seed}:{i}"))
        else:
            yield from ((flat, v) for v in _variants(flat, config))


def count_upper_bound(config: EnumerationConfig) -> int:
    if config.mode == "sampled":
        return config.sample_count
    all_shapes = shapes(config)
    if config.partition_mode != "exhaustive-partitions":
        return len(all_shapes)
    return sum(_variant_count(flatten(s), config) for s in all_shapes)


def enumerate_mechanisms(config: EnumerationConfig) -> Iterator[Mechanism]:
    """Stream every mechanism described by ``config`` (or the seeded samples)."""
    for i, (flat, variant) in enumerate(items(config)):
        yield build(flat, variant, config, f"m{i}")


def count(config: EnumerationConfig) -> int:
    return sum(1 for _ in items(config))


# -- sampling --------------------------------------------------------------


def _random_shape(config: EnumerationConfig, rng: random.Random) -> tuple:
    budget = [config.max_decision_nodes if config.max_decision_nodes is not None else math.inf]

    def gen(depth: int) -> tuple:
        leaf_p = 0.05 if depth == 0 else 0.35
        if depth >= config.max_depth or budget[0] < 1 or rng.random() < leaf_p:
            return (0, rng.randrange(2))
        budget[0] -= 1
        deciders = ()
        while not deciders:
            deciders = tuple(a for a in range(config.agent_count) if rng.random() < 0.5)
        nacts = tuple(rng.randint(1, config.max_actions) for _ in deciders)
        n_prof = math.prod(nacts)
        k = rng.randint(1, min(config.max_children, n_prof))
        slots = list(range(n_prof))
        rng.shuffle(slots)
        raw = [0] * n_prof
        for j, s in enumerate(slots):
            raw[s] = j if j < k else rng.randrange(k)
        kids = [gen(depth + 1) for _ in range(k)]
        pattern, ordered = _normalise(raw, kids)
        return (1, deciders, nacts, pattern, ordered)

    return gen(0)


__all__ = [
    "EnumerationConfig",
    "build",
    "count",
    "count_upper_bound",
    "enumerate_mechanisms",
    "flatten",
    "items",
    "shapes",
]
