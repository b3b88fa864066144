import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from respgap import Semantics, example, naive_fixpoint, solve
from respgap import kernel
from respgap.enumeration import EnumerationConfig, build, flatten, items
from respgap.examples import NAMES
from respgap.solver import all_masks


def sets(m, a, o, s):
    return set(solve(m, a, o, s).nodes)


def test_two_person_rule_win_sets():
    m = example("two-person-rule")
    assert sets(m, "P", "No", "win") == {"u1", "v1", "v2"}
    assert sets(m, "P", "Yes", "win") == {"v3"}
    assert sets(m, "A", "No", "win") == {"u1", "v1", "u2", "v2"}
    assert sets(m, "A", "Yes", "win") == {"v3"}


def test_drawing_straws():
    m = example("drawing-straws")
    assert sets(m, "B", "Yes", "ewin") == {"v1", "v4"}
    assert sets(m, "B", "Yes", "uwin") == {"v1", "v4"}
    # B can force Yes from u2 and from u3 given the arrangement, and A's
    # move at u1 always lands in one of them, so u1 is in the plain set too.
    assert sets(m, "B", "Yes", "win") == {"u1", "u2", "u3", "v1", "v4"}
    assert sets(m, "A", "Yes", "win") == {"v1", "v4"}


def test_confusion_separates_uwin_from_ewin():
    m = example("confusion")
    uwin = sets(m, "A", "Yes", "uwin")
    ewin = sets(m, "A", "Yes", "ewin")
    assert "u7" in uwin
    assert "u4" not in uwin and "u6" not in uwin
    assert {"u4", "u6"} <= ewin
    assert uwin < ewin


def test_win_ignores_partitions():
    m = example("mechanism-N")
    flat = m.without_partitions()
    for a in m.agents:
        for o in ("Yes", "No"):
            assert sets(m, a, o, "win") == sets(flat, a, o, "win")


def test_witnesses():
    m = example("confusion")
    s = solve(m, "A", "Yes", "ewin", witnesses=True)
    assert s.witnesses["u7"].rule == 2 and s.witnesses["u7"].action == "2"
    assert s.witnesses["u6"].rule == 3
    assert set(s.witnesses) == {v for v in s.nodes if not m.is_leaf(v)}


def test_strategy_set_container_protocol():
    s = solve(example("two-person-rule"), "P", "No")
    assert "u1" in s and len(s) == 3 and set(s) == {"u1", "v1", "v2"}


@pytest.mark.parametrize("name", NAMES)
def test_kernel_matches_naive_evaluator_on_examples(name):
    m = example(name)
    for a in m.agents:
        for o in ("Yes", "No"):
            for s in Semantics:
                assert sets(m, a, o, s) == set(naive_fixpoint(m, a, o, s.value)), (a, o, s)


@pytest.mark.parametrize("name", NAMES)
def test_backends_agree_on_examples(name):
    cm = example(name).compiled
    results = [list(kernel.solve_all(cm, impl)) for impl in kernel.backends().values()]
    assert all(r == results[0] for r in results)


def test_solve_one_matches_solve_all():
    m = example("mechanism-M")
    masks = all_masks(m)
    for impl in kernel.backends().values():
        for a in range(len(m.agents)):
            for o in (0, 1):
                for s in (0, 1, 2):
                    assert kernel.solve_one(m.compiled, a, o, s, impl) == masks[(a * 2 + o) * 3 + s]


def test_large_mechanism_beyond_64_nodes():
    # a chain of 40 single-agent decision nodes, each with a Yes leaf
    lines = ["agents: A", "root: u0"]
    for i in range(40):
        nxt = f"u{i + 1}" if i < 39 else "w"
        lines += [f"decision u{i}", "  deciders: A", "  actions: A = [go, stop]",
                  f"  map: [go] -> {nxt} ; [stop] -> y{i}", f"leaf y{i} = Yes"]
    lines.append("leaf w = No")
    from respgap import parse, validate

    m = validate(parse("\n".join(lines) + "\n"))
    assert len(m.nodes) == 81
    assert sets(m, "A", "Yes", "win") == set(m.nodes) - {"w"}
    assert sets(m, "A", "No", "win") == set(m.nodes) - {f"y{i}" for i in range(40)}
    results = [list(kernel.solve_all(m.compiled, impl)) for impl in kernel.backends().values()]
    assert all(r == results[0] for r in results)


SAMPLER = EnumerationConfig(max_depth=4, agent_count=3, max_actions=3, max_children=3,
                            mode="sampled", sample_count=1, partition_mode="sampled-partitions")


def sampled(seed):
    cfg = EnumerationConfig(**{**SAMPLER.__dict__, "seed": seed})
    flat, variant = next(items(cfg))
    return build(flat, variant, cfg)


@settings(max_examples=150, deadline=None)
@given(st.integers(min_value=0, max_value=2**32))
def test_properties_on_random_mechanisms(seed):
    m = sampled(seed)
    for a in m.agents:
        for o in ("Yes", "No"):
            win, uwin, ewin = (sets(m, a, o, s) for s in ("win", "uwin", "ewin"))
            assert uwin <= ewin <= win
            assert ewin == set(naive_fixpoint(m, a, o, "ewin"))
            assert uwin == set(naive_fixpoint(m, a, o, "uwin"))
            assert win == set(naive_fixpoint(m, a, o, "win"))
            for v in m.leaves:
                assert (v in win) == (m.label(v).value == o)
    results = [list(kernel.solve_all(m.compiled, impl)) for impl in kernel.backends().values()]
    assert all(r == results[0] for r in results)


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=2**32))
def test_perfect_information_collapse_on_random_mechanisms(seed):
    m = sampled(seed).without_partitions()
    for a in m.agents:
        for o in ("Yes", "No"):
            assert sets(m, a, o, "win") == sets(m, a, o, "uwin") == sets(m, a, o, "ewin")


def test_pure_python_fallback_is_selectable():
    import os
    import subprocess
    import sys

    code = "import respgap; from respgap import example, solve; " \
           "print(respgap.BACKEND, sorted(solve(example('confusion'), 'A', 'Yes', 'ewin').nodes))"
    env = {**os.environ, "RESPGAP_PURE_PYTHON": "1"}
    pure = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True).stdout
    default = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, check=True).stdout
    assert pure.startswith("python ")
    assert pure.split(" ", 1)[1] == default.split(" ", 1)[1]
