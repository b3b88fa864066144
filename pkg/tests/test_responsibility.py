import pytest

from respgap import NotLeaf, example, is_gap_free, report, responsible


@pytest.mark.parametrize(
    "name, semantics, gap",
    [
        ("two-person-rule", "counterfactual", {"v1", "v2"}),
        ("senate", "counterfactual", {"v1", "v4"}),
        ("academic", "counterfactual", set()),
        ("mechanism-M", "epistemic", set()),
        ("confusion", "epistemic", set()),
    ],
)
def test_gap_sets(name, semantics, gap):
    assert set(report(example(name), semantics).gap) == gap


def test_mechanism_n_epistemic_gap_contains_v2():
    assert "v2" in report(example("mechanism-N"), "epistemic").gap
    assert not is_gap_free(example("mechanism-N"), "epistemic")


def test_two_person_rule_verdicts():
    m = example("two-person-rule")
    v = responsible(m, "P", "v3", "counterfactual")
    assert v.responsible and v.witness == "u1"
    assert not responsible(m, "A", "v1", "counterfactual").responsible
    rep = report(m, "counterfactual")
    assert rep.responsible_agents("v3") == ["P", "A", "B"]
    assert not rep.gap_free


def test_confusion_agent_is_epistemically_responsible_everywhere():
    m = example("confusion")
    for leaf in m.leaves:
        assert responsible(m, "A", leaf, "epistemic").responsible, leaf


def test_drawing_straws_epistemic_versus_counterfactual():
    m = example("drawing-straws")
    # Bob could have avoided No counterfactually, but not knowingly.
    assert responsible(m, "B", "v2", "counterfactual").responsible
    assert not responsible(m, "B", "v2", "epistemic").responsible


def test_epistemic_implies_counterfactual_on_examples():
    from respgap.examples import NAMES

    for name in NAMES:
        m = example(name)
        for leaf in m.leaves:
            for a in m.agents:
                if responsible(m, a, leaf, "epistemic").responsible:
                    assert responsible(m, a, leaf, "counterfactual").responsible


def test_responsible_rejects_decision_nodes():
    with pytest.raises(NotLeaf):
        responsible(example("senate"), "V", "u1", "counterfactual")


def test_perfect_information_gaps_coincide():
    m = example("senate")
    assert report(m, "counterfactual").gap == report(m, "epistemic").gap
