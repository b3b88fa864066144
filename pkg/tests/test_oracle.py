import pytest

from respgap import BudgetExceeded, example, oracle_uwin, oracle_win, parse, solve, validate
from respgap.examples import NAMES

# Imperfect recall: after its first move A cannot tell w from w2.  The
# class-wide fixed point refuses both, while a uniform strategy (a0 at r,
# then a0 at {w, w2}) still reaches Yes from r.
RECALL = """agents: A
root: r
decision r
  deciders: A
  actions: A = [a0, a1]
  map: [a0] -> w ; [a1] -> w2
decision w
  deciders: A
  actions: A = [a0, a1]
  map: [a0] -> y1 ; [a1] -> n1
decision w2
  deciders: A
  actions: A = [a0, a1]
  map: [a0] -> n2 ; [a1] -> y2
leaf y1 = Yes
leaf n1 = No
leaf n2 = No
leaf y2 = Yes
indist A: {w, w2}
"""

# Absent-mindedness: u1 lies below u0 in the same class.
ABSENT = """agents: A
root: u0
decision u0
  deciders: A
  actions: A = [a0]
  map: [a0] -> u1
decision u1
  deciders: A
  actions: A = [a0]
  map: [a0] -> v
leaf v = Yes
indist A: {u0, u1}
"""


@pytest.mark.parametrize("name", NAMES)
def test_oracle_win_matches_solver_on_examples(name):
    m = example(name)
    for a in m.agents:
        for o in ("Yes", "No"):
            got = solve(m, a, o, "win").nodes
            for v in m.nodes:
                assert oracle_win(m, a, o, v) == (v in got), (a, o, v)


@pytest.mark.parametrize("name", ["two-person-rule", "senate", "academic", "drawing-straws", "mechanism-N"])
def test_oracle_uwin_matches_solver_where_recall_is_perfect(name):
    m = example(name)
    for a in m.agents:
        for o in ("Yes", "No"):
            got = solve(m, a, o, "uwin").nodes
            for v in m.nodes:
                assert oracle_uwin(m, a, o, v) == (v in got), (a, o, v)


def test_oracle_on_drawing_straws_class():
    m = example("drawing-straws")
    assert not oracle_uwin(m, "B", "Yes", "u2")
    assert oracle_win(m, "B", "Yes", "u2")
    assert oracle_win(m, "B", "Yes", "u1")


def test_imperfect_recall_divergence():
    m = validate(parse(RECALL))
    assert oracle_uwin(m, "A", "Yes", "r")
    assert "r" not in solve(m, "A", "Yes", "uwin")
    assert "r" not in solve(m, "A", "Yes", "ewin")
    assert "r" in solve(m, "A", "Yes", "win")


def test_absent_minded_divergence():
    m = validate(parse(ABSENT))
    assert oracle_uwin(m, "A", "Yes", "u0")
    assert "u0" not in solve(m, "A", "Yes", "uwin")
    # the all-children rule recovers it
    assert "u0" in solve(m, "A", "Yes", "ewin")


def test_oracle_leaf_answers():
    m = example("senate")
    assert oracle_win(m, "V", "No", "v1")
    assert not oracle_uwin(m, "V", "Yes", "v1")


def test_oracle_budget():
    m = example("confusion")
    with pytest.raises(BudgetExceeded) as exc:
        oracle_win(m, "A", "Yes", "u1", cap=5)
    assert exc.value.count == len(m.nodes)
