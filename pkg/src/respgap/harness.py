"""Bounded verification of the theorems and lemmas over enumerated mechanisms.

Every check is a pure function of one mechanism returning
``(property, ok, explanation)`` triples, one per property that applies.
Reports from disjoint slices of the stream merge associatively, so the
stream can be split across worker processes with identical results.

All verdicts are bounded: they cover exactly the configured population.
"""

from __future__ import annotations

import json
import multiprocessing
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Sequence

from .dictatorship import DictatorKind, elected
from .enumeration import EnumerationConfig, build, items
from .examples import example
from .mechanism import Mechanism, Outcome
from .oracle import naive_fixpoint, oracle_uwin, oracle_win
from .responsibility import gap_mask
from .solver import Semantics, all_masks, mask_slot, nodes_of

ORACLE_NODE_LIMIT = 12
MAX_COUNTEREXAMPLES = 10
SCOPE = "bounded verification over the enumerated population; not a proof"

Result = tuple[str, bool, str]


@dataclass
class Tally:
    checked: int = 0
    passed: int = 0
    failed: int = 0

    def add(self, ok: bool) -> None:
        self.checked += 1
        if ok:
            self.passed += 1
        else:
            self.failed += 1

    def __iadd__(self, other: "Tally") -> "Tally":
        self.checked += other.checked
        self.passed += other.passed
        self.failed += other.failed
        return self


@dataclass(frozen=True, order=True)
class Counterexample:
    property: str
    source: tuple[int, int]  # (config position, stream index)
    explanation: str
    mechanism: str


@dataclass
class VerificationReport:
    check: str
    configs: list[dict] = field(default_factory=list)
    mechanisms: int = 0
    tallies: dict[str, Tally] = field(default_factory=dict)
    counterexamples: list[Counterexample] = field(default_factory=list)
    # named bundled-mechanism facts, e.g. that a converse fails
    witnesses: dict[str, tuple[bool, str]] = field(default_factory=dict)
    wall_time: float | None = None

    @property
    def failed(self) -> int:
        return sum(t.failed for t in self.tallies.values()) + sum(
            1 for ok, _ in self.witnesses.values() if not ok
        )

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def record(self, source: tuple[int, int], m: Mechanism, results: Iterable[Result]) -> None:
        self.mechanisms += 1
        for prop, ok, why in results:
            self.tallies.setdefault(prop, Tally()).add(ok)
            if not ok:
                self.counterexamples.append(Counterexample(prop, source, why, m.to_text()))
        self._trim()

    def merge(self, other: "VerificationReport") -> "VerificationReport":
        out = VerificationReport(self.check, list(self.configs))
        for c in other.configs:
            if c not in out.configs:
                out.configs.append(c)
        out.mechanisms = self.mechanisms + other.mechanisms
        for src in (self.tallies, other.tallies):
            for k, t in src.items():
                out.tallies.setdefault(k, Tally())
                out.tallies[k] += t
        out.counterexamples = self.counterexamples + other.counterexamples
        out._trim()
        out.witnesses = dict(self.witnesses)
        for k, (ok, why) in other.witnesses.items():
            prev = out.witnesses.get(k)
            out.witnesses[k] = (ok and (prev is None or prev[0]), why)
        if self.wall_time is not None or other.wall_time is not None:
            out.wall_time = (self.wall_time or 0.0) + (other.wall_time or 0.0)
        return out

    def _trim(self) -> None:
        self.counterexamples.sort()
        kept, per = [], {}
        for c in self.counterexamples:
            per[c.property] = per.get(c.property, 0) + 1
            if per[c.property] <= MAX_COUNTEREXAMPLES:
                kept.append(c)
        self.counterexamples = kept

    def to_dict(self, timing: bool = False) -> dict:
        out = {
            "check": self.check,
            "scope": SCOPE,
            "configs": self.configs,
            "mechanisms": self.mechanisms,
            "properties": {k: asdict(self.tallies[k]) for k in sorted(self.tallies)},
            "witnesses": {
                k: {"holds": ok, "explanation": why} for k, (ok, why) in sorted(self.witnesses.items())
            },
            "counterexamples": [
                {
                    "property": c.property,
                    "config": c.source[0],
                    "index": c.source[1],
                    "explanation": c.explanation,
                    "mechanism": c.mechanism,
                }
                for c in self.counterexamples
            ],
            "failed": self.failed,
        }
        if timing and self.wall_time is not None:
            out["wall_time"] = round(self.wall_time, 3)
        return out

    def to_json(self, timing: bool = False) -> str:
        return json.dumps(self.to_dict(timing), indent=2, sort_keys=True) + "\n"

    def to_text(self, timing: bool = False) -> str:
        lines = [f"check: {self.check} ({SCOPE})", f"mechanisms: {self.mechanisms}"]
        width = max((len(k) for k in self.tallies), default=0)
        for k in sorted(self.tallies):
            t = self.tallies[k]
            lines.append(f"  {k:<{width}}  checked {t.checked}  passed {t.passed}  failed {t.failed}")
        for k, (ok, why) in sorted(self.witnesses.items()):
            lines.append(f"  witness {k}: {'holds' if ok else 'FAILS'} ({why})")
        for c in self.counterexamples:
            lines.append(f"counterexample [{c.property}] config {c.source[0]} #{c.source[1]}: {c.explanation}")
            lines.extend("    " + ln for ln in c.mechanism.splitlines())
        if timing and self.wall_time is not None:
            lines.append(f"wall time: {self.wall_time:.2f}s")
        lines.append(f"failed: {self.failed}")
        return "\n".join(lines) + "\n"


# -- per-mechanism checks --------------------------------------------------


def _yn(flag: bool) -> str:
    return "yes" if flag else "no"


def check_theorem1(m: Mechanism) -> list[Result]:
    gf = gap_mask(m, "counterfactual") == 0
    ed = elected(m, DictatorKind.PLAIN)
    return [("theorem1: gap-free iff elected dictatorship", gf == ed,
             f"gap-free={_yn(gf)}, elected dictatorship={_yn(ed)}")]


def check_theorem2(m: Mechanism) -> list[Result]:
    ed = elected(m, DictatorKind.EPISTEMIC)
    gf = gap_mask(m, "epistemic") == 0
    return [("theorem2: elected epistemic dictatorship implies epistemic-gap-free", gf or not ed,
             f"elected epistemic dictatorship={_yn(ed)}, epistemic-gap-free={_yn(gf)}")]


def check_theorem3(m: Mechanism) -> list[Result]:
    gf = gap_mask(m, "epistemic") == 0
    sd = elected(m, DictatorKind.SEMI_EPISTEMIC)
    return [("theorem3: epistemic-gap-free implies elected semi-epistemic dictatorship", sd or not gf,
             f"epistemic-gap-free={_yn(gf)}, elected semi-epistemic dictatorship={_yn(sd)}")]


def _first_bit(x: int) -> int:
    return (x & -x).bit_length() - 1


def check_lemmas(m: Mechanism) -> list[Result]:
    cm = m.compiled
    n, k = cm.n, cm.n_agents
    masks = all_masks(m)
    ids = list(m.nodes)
    W, U, E = Semantics.WIN, Semantics.UWIN, Semantics.EWIN
    outs = (Outcome.NO, Outcome.YES)

    def get(a: int, o: Outcome, s: Semantics) -> int:
        return masks[mask_slot(a, o, s)]

    decisions = [v for v in range(n) if cm.label[v] < 0]
    leaf_of = {o: 0 for o in outs}
    for v in range(n):
        if cm.label[v] >= 0:
            leaf_of[outs[cm.label[v]]] |= 1 << v
    next_masks = {}
    for a in range(k):
        for v in decisions:
            row = []
            for d in range(cm.nact[a * n + v]):
                bits = 0
                for u in cm.next(a, d, v):
                    bits |= 1 << u
                row.append(bits)
            next_masks[a, v] = row
    child_mask = {}
    for v in decisions:
        bits = 0
        for u in cm.children(v):
            bits |= 1 << u
        child_mask[v] = bits

    bad: dict[str, str] = {}

    def fail(prop: str, why: str) -> None:
        bad.setdefault(prop, why)

    for a in range(k):
        agent = m.agents[a]
        for o in outs:
            w, u, e = get(a, o, W), get(a, o, U), get(a, o, E)
            w_bar = get(a, o.complement, W)
            if e & ~w:
                fail("ewin-subset-win", f"{ids[_first_bit(e & ~w)]} in ewin_{agent}({o}) but not win")
            if u & ~e:
                fail("uwin-subset-ewin", f"{ids[_first_bit(u & ~e)]} in uwin_{agent}({o}) but not ewin")
            for b in range(k):
                if b != a and w & get(b, o.complement, W):
                    clash = _first_bit(w & get(b, o.complement, W))
                    fail("two-hares", f"{ids[clash]} in win_{agent}({o}) and win_{m.agents[b]}({o.complement})")
            if e & leaf_of[o.complement]:
                fail("base", f"leaf {ids[_first_bit(e & leaf_of[o.complement])]} in ewin_{agent}({o})")
            for v in decisions:
                row = next_masks[a, v]
                if e >> v & 1 and not any(nx & ~e == 0 for nx in row):
                    fail("next-all", f"{ids[v]} in ewin_{agent}({o}) but no action keeps play inside it")
                if not w >> v & 1 and any(nx & ~w == 0 for nx in row):
                    fail("next-exists", f"{ids[v]} not in win_{agent}({o}) yet some action forces it")
                target = e & ~w_bar
                if target >> v & 1 and not child_mask[v] & target:
                    fail("step-down", f"{ids[v]} in ewin_{agent}({o}) minus win_{agent}({o.complement}) has no such child")

    results = [(p, p not in bad, bad.get(p, "")) for p in
               ("ewin-subset-win", "uwin-subset-ewin", "two-hares", "base", "next-all", "next-exists", "step-down")]
    if k < 2:
        results = [r for r in results if r[0] != "two-hares"]

    if gap_mask(m, "epistemic") == 0:
        results.append(_step_up(m, get, outs))
    if m.is_perfect_information:
        same = all(get(a, o, W) == get(a, o, U) == get(a, o, E) for a in range(k) for o in outs)
        results.append(("perfect-info collapse", same, "" if same else "win, uwin and ewin differ"))
    return results


def _step_up(m: Mechanism, get, outs) -> Result:
    cm = m.compiled
    k = cm.n_agents
    ids = list(m.nodes)
    ancestors = [0] * cm.n
    for v in range(1, cm.n):
        p = cm.parent[v]
        ancestors[v] = ancestors[p] | 1 << p
    for o in outs:
        others = 0
        for b in range(k):
            others |= get(b, o.complement, Semantics.EWIN)
        for a in range(k):
            hits = get(a, o, Semantics.EWIN) & ~get(a, o.complement, Semantics.WIN)
            v = 0
            while hits:
                if hits & 1 and not ancestors[v] & others:
                    return ("step-up", False,
                            f"{ids[v]} in ewin_{m.agents[a]}({o}) minus win_{m.agents[a]}({o.complement}), "
                            f"no ancestor in any ewin(-, {o.complement})")
                hits >>= 1
                v += 1
    return ("step-up", True, "")


def check_oracles(m: Mechanism) -> list[Result]:
    """Compare the solver with the brute-force oracles and the naive evaluator."""
    results = []
    solved = {}
    for a in m.agents:
        for o in Outcome:
            for s in Semantics:
                solved[a, o, s] = nodes_of(m, all_masks(m)[mask_slot(m.agents.index(a), o, s)])
    naive_bad = ""
    for (a, o, s), got in solved.items():
        if naive_fixpoint(m, a, o, s.value) != got:
            naive_bad = f"{s}_{a}({o}) differs from the naive evaluator"
            break
    results.append(("naive-fixpoint", not naive_bad, naive_bad))
    if len(m.nodes) > ORACLE_NODE_LIMIT:
        return results
    for prop, s, oracle in (("oracle-win", Semantics.WIN, oracle_win), ("oracle-uwin", Semantics.UWIN, oracle_uwin)):
        why = ""
        for a in m.agents:
            for o in Outcome:
                for v in m.nodes:
                    want = oracle(m, a, o, v, cap=ORACLE_NODE_LIMIT)
                    if want != (v in solved[a, o, s]):
                        why = f"{v}: oracle says {_yn(want)}, {s}_{a}({o}) says {_yn(not want)}"
                        break
                if why:
                    break
            if why:
                break
        results.append((prop, not why, why))
    return results


CHECKS: dict[str, Callable[[Mechanism], list[Result]]] = {
    "theorem1": check_theorem1,
    "theorem2": check_theorem2,
    "theorem3": check_theorem3,
    "lemmas": check_lemmas,
    "oracles": check_oracles,
}


def _witnesses(check: str) -> dict[str, tuple[bool, str]]:
    if check == "theorem2":
        m = example("mechanism-M")
        gf = gap_mask(m, "epistemic") == 0
        ed = elected(m, DictatorKind.EPISTEMIC)
        return {"converse falsified by mechanism-M": (
            gf and not ed, f"epistemic-gap-free={_yn(gf)}, elected epistemic dictatorship={_yn(ed)}")}
    if check == "theorem3":
        m = example("mechanism-N")
        gf = gap_mask(m, "epistemic") == 0
        sd = elected(m, DictatorKind.SEMI_EPISTEMIC)
        return {"converse falsified by mechanism-N": (
            sd and not gf, f"elected semi-epistemic dictatorship={_yn(sd)}, epistemic-gap-free={_yn(gf)}")}
    return {}


# -- drivers ---------------------------------------------------------------


def config_dict(config: EnumerationConfig) -> dict:
    d = asdict(config)
    if config.mode == "exhaustive":
        d.pop("sample_count")
        d.pop("seed")
    return d


CHUNK = 256


def _run_chunk(args) -> dict[str, VerificationReport]:
    checks, config, position, chunk = args
    reports = {c: VerificationReport(c) for c in checks}
    for i, flat, variant in chunk:
        m = build(flat, variant, config, f"m{i}")
        for c in checks:
            reports[c].record((position, i), m, CHECKS[c](m))
    return reports


def _chunks(checks, configs):
    for pos, config in enumerate(configs):
        chunk = []
        for i, (flat, variant) in enumerate(items(config)):
            chunk.append((i, flat, variant))
            if len(chunk) == CHUNK:
                yield checks, config, pos, chunk
                chunk = []
        if chunk:
            yield checks, config, pos, chunk


def verify_many(
    checks: Sequence[str], configs: "EnumerationConfig | Sequence[EnumerationConfig]", *, jobs: int = 1
) -> dict[str, VerificationReport]:
    """Run several checks in one pass over the population; one report per check."""
    for check in checks:
        if check not in CHECKS:
            raise ValueError(f"unknown check {check!r}; choose from {', '.join(CHECKS)}")
    if isinstance(configs, EnumerationConfig):
        configs = [configs]
    if "theorem1" in checks:
        for c in configs:
            if c.partition_mode != "perfect-only":
                raise ValueError("theorem 1 concerns perfect-information mechanisms; use partition_mode='perfect-only'")
    checks = list(dict.fromkeys(checks))
    start = time.perf_counter()
    described = [config_dict(c) for c in configs]
    out = {c: VerificationReport(c, list(described)) for c in checks}
    if jobs <= 1:
        parts = map(_run_chunk, _chunks(checks, configs))
        for part in parts:
            for c in checks:
                out[c] = out[c].merge(part[c])
    else:
        with multiprocessing.get_context("fork").Pool(jobs) as pool:
            for part in pool.imap(_run_chunk, _chunks(checks, configs)):
                for c in checks:
                    out[c] = out[c].merge(part[c])
    elapsed = time.perf_counter() - start
    for c in checks:
        out[c].witnesses = _witnesses(c)
        out[c].wall_time = elapsed
    return out


def verify(check: str, configs: "EnumerationConfig | Sequence[EnumerationConfig]", *, jobs: int = 1) -> VerificationReport:
    """Run ``check`` over every mechanism of each config and merge the results."""
    return verify_many([check], configs, jobs=jobs)[check]


def verify_theorem1(config, *, jobs: int = 1) -> VerificationReport:
    return verify("theorem1", config, jobs=jobs)


def verify_theorem2(config, *, jobs: int = 1) -> VerificationReport:
    return verify("theorem2", config, jobs=jobs)


def verify_theorem3(config, *, jobs: int = 1) -> VerificationReport:
    return verify("theorem3", config, jobs=jobs)


def verify_lemmas(config, *, jobs: int = 1) -> VerificationReport:
    return verify("lemmas", config, jobs=jobs)


def verify_oracles(config, *, jobs: int = 1) -> VerificationReport:
    return verify("oracles", config, jobs=jobs)


__all__ = [
    "CHECKS",
    "Counterexample",
    "Tally",
    "VerificationReport",
    "check_lemmas",
    "check_oracles",
    "check_theorem1",
    "check_theorem2",
    "check_theorem3",
    "verify",
    "verify_lemmas",
    "verify_many",
    "verify_oracles",
    "verify_theorem1",
    "verify_theorem2",
    "verify_theorem3",
]
