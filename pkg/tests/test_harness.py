import json

import pytest

from respgap import example, parse, validate
from respgap.enumeration import EnumerationConfig
from respgap.harness import (
    SCOPE,
    Tally,
    VerificationReport,
    check_lemmas,
    check_oracles,
    check_theorem1,
    check_theorem2,
    check_theorem3,
    verify,
    verify_many,
)
from respgap.examples import NAMES

SMALL = EnumerationConfig(max_depth=2, agent_count=1, partition_mode="exhaustive-partitions")
SAMPLED = EnumerationConfig(max_depth=3, agent_count=2, mode="sampled", sample_count=300, seed=5,
                            partition_mode="sampled-partitions")


def fake(check, n, fails):
    r = VerificationReport(check, [{"i": n}])
    m = example("senate")
    for i in range(n):
        r.record((0, i), m, [("p", i not in fails, f"why {i}"), ("q", True, "")])
    return r


def test_merge_is_associative():
    a, b, c = fake("x", 3, {1}), fake("x", 4, {0, 3}), fake("x", 2, set())
    left = a.merge(b).merge(c)
    right = a.merge(b.merge(c))
    assert left.to_json() == right.to_json()
    assert left.tallies["p"] == Tally(9, 6, 3)


def test_counterexamples_capped_and_sorted():
    r = fake("x", 30, set(range(30)))
    assert len(r.counterexamples) == 10
    assert [c.source for c in r.counterexamples] == [(0, i) for i in range(10)]
    assert r.failed == 30


@pytest.mark.parametrize("name", NAMES)
def test_checks_pass_on_examples(name):
    m = example(name)
    for check in (check_theorem2, check_theorem3, check_lemmas, check_oracles):
        for prop, ok, why in check(m):
            if prop == "oracle-uwin" and name == "confusion":
                continue
            assert ok, (prop, why)
    if m.is_perfect_information:
        assert all(ok for _, ok, _ in check_theorem1(m))


def test_lemma_properties_present():
    props = {p for p, _, _ in check_lemmas(example("mechanism-M"))}
    assert {"ewin-subset-win", "uwin-subset-ewin", "two-hares", "base", "next-all",
            "next-exists", "step-down", "step-up"} <= props
    assert "perfect-info collapse" not in props
    assert "perfect-info collapse" in {p for p, _, _ in check_lemmas(example("senate"))}


def test_single_agent_skips_two_hares():
    m = validate(parse("agents: A\nroot: v\nleaf v = Yes\n"))
    assert "two-hares" not in {p for p, _, _ in check_lemmas(m)}


def test_theorem1_rejects_imperfect_populations():
    with pytest.raises(ValueError):
        verify("theorem1", SMALL)


def test_unknown_check():
    with pytest.raises(ValueError):
        verify("theorem9", SMALL)


def test_witnesses_attached():
    rep = verify("theorem2", SMALL)
    assert rep.witnesses["converse falsified by mechanism-M"][0]
    rep = verify("theorem3", SMALL)
    assert rep.witnesses["converse falsified by mechanism-N"][0]
    assert rep.ok


def test_verify_many_matches_separate_runs():
    both = verify_many(["theorem3", "lemmas"], [SMALL, SAMPLED])
    for c in ("theorem3", "lemmas"):
        assert both[c].to_json() == verify(c, [SMALL, SAMPLED]).to_json()


def test_jobs_do_not_change_report():
    one = verify("lemmas", [SMALL, SAMPLED], jobs=1)
    two = verify("lemmas", [SMALL, SAMPLED], jobs=2)
    assert one.to_json() == two.to_json()
    assert one.mechanisms == 166 + 300


def test_json_shape_and_timing_flag():
    rep = verify("theorem3", SMALL)
    doc = json.loads(rep.to_json())
    assert doc["scope"] == SCOPE and "wall_time" not in doc
    assert doc["configs"][0]["partition_mode"] == "exhaustive-partitions"
    assert "seed" not in doc["configs"][0]
    assert "wall_time" in json.loads(rep.to_json(timing=True))
    assert rep.to_text().endswith("failed: 0\n")


def test_oracle_findings_are_reported_with_mechanism_text():
    cfg = EnumerationConfig(max_depth=3, agent_count=1, partition_mode="exhaustive-partitions",
                            max_decision_nodes=3)
    rep = verify("oracles", cfg)
    assert rep.tallies["oracle-win"].failed == 0
    assert rep.tallies["oracle-uwin"].failed > 0
    c = rep.counterexamples[0]
    assert c.property == "oracle-uwin"
    assert validate(parse(c.mechanism))
